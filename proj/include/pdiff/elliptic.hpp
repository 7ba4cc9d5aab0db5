#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "pdiff/expr.hpp"
#include "pdiff/grid.hpp"

namespace pdiff {

// ---------------------------------------------------------------------------
// Fundamental solutions and potentials
// ---------------------------------------------------------------------------

/// Surface area of the unit sphere in R^n: 2 pi^(n/2) / Gamma(n/2).
double sphere_area(int n);

/// Phi with Laplace(Phi) = delta:
///   n = 2:  ln|x| / (2 pi)
///   n >= 3: -|x|^(2-n) / ((n-2) s_n)
class FundamentalSolution {
public:
    explicit FundamentalSolution(int n);

    int dim() const noexcept { return n_; }
    double sphere_area() const noexcept { return s_n_; }

    /// Throws NumericalError at x = 0. The radius is summed over sorted
    /// squared coordinates, so permuting or negating coordinates gives
    /// bitwise identical values.
    template <typename Derived>
    double operator()(const Eigen::MatrixBase<Derived>& x) const {
        Eigen::VectorXd sq = x.template cast<double>().array().square();
        std::sort(sq.begin(), sq.end());
        return of_radius(std::sqrt(sq.sum()));
    }

    double of_radius(double r) const;

    /// Mean of Phi over the axis-aligned cube of side h centered at `center`,
    /// by midpoint rule on `sub`^n subcells.
    double cell_average(const Eigen::VectorXd& center, double h, int sub = 8) const;

private:
    int n_;
    double s_n_;
};

/// u(x) = h^n * sum_y Phi(x - y) f(y), with the additive constant taken as 0.
/// When x falls inside the cell of a source node y, Phi(x - y) is replaced by
/// the cell average of Phi over that cell. f must vanish on its boundary
/// layer.
GridFunction newtonian_potential(const FundamentalSolution& fs, const GridFunction& f,
                                 const GridSpec& targets);

// ---------------------------------------------------------------------------
// Dirichlet solvers (centered second differences, red-black SOR)
// ---------------------------------------------------------------------------

struct SolveOptions {
    double tol = 1e-10;
    int max_iter = 100000;
    /// Relaxation factor; <= 0 selects 2 / (1 + sin(pi h / L)), L the longest side.
    double omega = 0.0;
};

struct SolveReport {
    GridFunction solution;
    int iterations = 0;
    /// Linf of (1/h^2) * centered Laplacian(u) - f over the interior.
    double final_residual = 0.0;
    bool converged = false;
};

/// Laplace(u) = 0 in the interior, u = g on the boundary. Only the boundary
/// nodes of g are read.
SolveReport solve_laplace_dirichlet(const GridFunction& g, const SolveOptions& opt = {});

/// Laplace(u) = f in the interior (no sign flip), u = g on the boundary.
SolveReport solve_poisson_dirichlet(const GridFunction& f, const GridFunction& g,
                                    const SolveOptions& opt = {});

struct BiharmonicReport {
    SolveReport laplacian; // v with Laplace(v) = rhs, v = g_lap on the boundary
    SolveReport solution;  // u with Laplace(u) = v,   u = g_u on the boundary
    /// Linf of the centered (1/h^4) biharmonic operator on u minus rhs, over
    /// nodes two or more steps from the boundary.
    double composed_residual = 0.0;
    bool converged = false;
};

BiharmonicReport solve_biharmonic(const GridFunction& rhs, const GridFunction& g_u,
                                  const GridFunction& g_lap, const SolveOptions& opt = {});

// ---------------------------------------------------------------------------
// Validators
// ---------------------------------------------------------------------------

/// |u(center) - mean of u over `points` samples on the sphere of radius r|,
/// multilinear interpolation between nodes. Supports n = 1, 2, 3.
double mean_value_check(const GridFunction& u, const Eigen::VectorXd& center, double r,
                        int points = 256);

/// Interior values may match a boundary extreme up to 64 ulps of the largest
/// magnitude; iterative solves of constant data leave such ties.
struct MaxPrincipleResult {
    bool pass = true;
    std::optional<Eigen::Index> witness; // flat index of a violating interior node
};

MaxPrincipleResult max_principle_check(const GridFunction& u);

enum class HarnackOutcome { FiniteLimit, Divergent, Violation, Inconclusive };

std::string_view to_string(HarnackOutcome outcome);

struct HarnackVerdict {
    HarnackOutcome outcome = HarnackOutcome::Inconclusive;
    std::vector<double> deviations; // linf(u_{k+1} - u_k) on the compact sub-box
    double divergence_threshold = 0.0;
    std::optional<GridFunction> limit;
    double limit_residual = 0.0; // linf of the scaled centered Laplacian of the limit
    std::optional<int> witness_step;
    std::optional<Eigen::Index> witness_node;
};

/// Checks a finite prefix of a monotone sequence of grid functions against
/// Harnack's dichotomy:
///  - violation     if u_{k+1} < u_k at some node;
///  - finite_limit  if the last increment on the sub-box is below tol;
///  - divergent     if the sub-box minimum of the last term exceeds 1/tol, or
///                  the increments stopped shrinking;
///  - inconclusive  otherwise.
HarnackVerdict harnack_limit(const std::vector<GridFunction>& seq, int compact_margin, double tol);

struct OrderStudy {
    std::vector<double> h;
    std::vector<double> values;
    std::vector<double> orders; // log(v_i / v_{i+1}) / log(h_i / h_{i+1}); NaN when undefined
    std::optional<double> fitted_order; // least-squares slope of log v vs log h
};

/// Sup over the valid region of |apply(forward Laplacian, sample(e))| on each
/// box, unscaled.
OrderStudy harmonicity_residual(const Expr& e, const std::vector<GridSpec>& boxes);

/// Observed orders for a sequence of errors on spacings h.
OrderStudy observed_orders(std::vector<double> h, std::vector<double> values);

} // namespace pdiff
