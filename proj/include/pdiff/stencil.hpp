#pragma once

#include <utility>
#include <vector>

#include <Eigen/Core>

#include "pdiff/expr.hpp"
#include "pdiff/grid.hpp"

namespace pdiff {

/// One summand gamma(x) * u(x + shift * h).
struct StencilTerm {
    Eigen::VectorXi shift;
    Expr coeff;
};

/// The linear difference operator
///
///     (D u)(x) = h^-p * sum_i gamma_i(x) * u(x + rho_i h)
///
/// with integer shifts rho_i. Terms are stored with distinct shifts in
/// lexicographic order: constant coefficients at equal shifts are added,
/// expression coefficients are joined into a symbolic sum.
class Stencil {
public:
    Stencil(int dim, double h, std::vector<StencilTerm> terms, int scale_exp = 0);

    int dim() const noexcept { return dim_; }
    double h() const noexcept { return h_; }
    int scale_exp() const noexcept { return scale_exp_; }
    const std::vector<StencilTerm>& terms() const noexcept { return terms_; }

    bool all_constant() const noexcept;

    /// Coefficient at a shift; zero if absent. Constant stencils only.
    double coefficient(const Eigen::VectorXi& shift) const;

    /// Minimum and maximum shift per axis.
    std::pair<Eigen::VectorXi, Eigen::VectorXi> reach() const;

    /// Every shift translated by `offset`.
    Stencil shifted(const Eigen::VectorXi& offset) const;
    Stencil with_scale(int scale_exp) const;

    /// Sum of operators with the same dim, h and scale.
    friend Stencil operator+(const Stencil& a, const Stencil& b);
    /// Every coefficient multiplied by c.
    friend Stencil operator*(double c, const Stencil& s);

private:
    int dim_;
    double h_;
    std::vector<StencilTerm> terms_;
    int scale_exp_;
};

/// Forward difference of order k along axis (1-based):
/// coefficients (-1)^(k-j) C(k, j) at shifts j * e_axis.
Stencil axis_difference(int dim, int axis, int order, double h);

/// Composition of axis_difference(i, orders[i]) over all axes.
Stencil mixed_difference(int dim, const Eigen::VectorXi& orders, double h);

/// sum_i Delta^2_(x_i) with forward shifts; u(x) carries coefficient n.
/// Scaled adds the factor 1/h^2.
Stencil laplace_stencil(int dim, double h, bool scaled);

/// sum_i Delta^4_(x_i) + sum_{i != j} Delta^2_(x_i) Delta^2_(x_j), forward shifts.
/// Scaled adds the factor 1/h^4.
Stencil biharmonic_stencil(int dim, double h, bool scaled);

/// Centered forms: sum_i [u(x + e_i h) - 2u(x) + u(x - e_i h)] and its square.
/// These are what the boundary-value solvers discretize.
Stencil centered_laplace_stencil(int dim, double h, bool scaled);
Stencil centered_biharmonic_stencil(int dim, double h, bool scaled);

/// Output lives on the nodes x where every x + shift stays in the grid.
GridFunction apply(const Stencil& s, const GridFunction& u);

struct Residual {
    double l1 = 0.0;
    double linf = 0.0;
};

/// Norms of apply(s, u) - rhs on the valid region of apply(s, u); rhs may be
/// any aligned grid that covers that region.
Residual residual(const Stencil& s, const GridFunction& u, const GridFunction& rhs);

} // namespace pdiff
