#pragma once

#include <algorithm>
#include <array>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "pdiff/expr.hpp"
#include "pdiff/grid.hpp"
#include "pdiff/stencil.hpp"

namespace pdiff {

/// Difference operator with real-valued shifts. Classification never touches
/// a grid, so shifts need not be integers here.
struct DifferenceOperator {
    struct Term {
        Eigen::VectorXd shift;
        Expr coeff;
    };

    int dim = 0;
    std::vector<Term> terms;

    static DifferenceOperator from(const Stencil& s);
};

/// Q(x) with entries A_kl(x) = sum_i rho_ki rho_li gamma_i(x).
struct CoefficientMatrix {
    Eigen::MatrixXd entries;
    Eigen::VectorXd point;
};

enum class OperatorType { Elliptic, Hyperbolic, Parabolic };

std::string_view to_string(OperatorType type);

/// The h^-p prefactor is positive and is ignored. Entries are built for
/// k <= l and mirrored, so the result is exactly symmetric.
CoefficientMatrix coefficient_matrix(const DifferenceOperator& op, const Eigen::VectorXd& x);
CoefficientMatrix coefficient_matrix(const Stencil& s, const Eigen::VectorXd& x);

/// Sign analysis of a sorted spectrum. With scale = max(1, max |lambda|):
/// elliptic if every lambda lies on one side of +-tol*scale, hyperbolic if
/// both sides are occupied, parabolic otherwise. Definite means positive or
/// negative definite.
template <typename Derived>
OperatorType classify_spectrum(const Eigen::MatrixBase<Derived>& eigenvalues, double tol) {
    const double scale = std::max(1.0, static_cast<double>(eigenvalues.cwiseAbs().maxCoeff()));
    const double cut = tol * scale;
    bool pos = false, neg = false, zero = false;
    for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
        const double l = static_cast<double>(eigenvalues[i]);
        if (l > cut)
            pos = true;
        else if (l < -cut)
            neg = true;
        else
            zero = true;
    }
    if (pos && neg) return OperatorType::Hyperbolic;
    if (zero) return OperatorType::Parabolic;
    return OperatorType::Elliptic;
}

struct ClassifiedPoint {
    Eigen::VectorXd point;
    Eigen::VectorXd eigenvalues; // ascending
    OperatorType type;
    double tol;
};

ClassifiedPoint classify_at(const DifferenceOperator& op, const Eigen::VectorXd& x, double tol);
ClassifiedPoint classify_at(const Stencil& s, const Eigen::VectorXd& x, double tol);

struct ClassificationReport {
    std::vector<ClassifiedPoint> points; // probe node order
    std::array<int, 3> counts{};         // indexed by OperatorType

    int count(OperatorType t) const { return counts[static_cast<int>(t)]; }
};

ClassificationReport classify_region(const DifferenceOperator& op, const GridSpec& probe, double tol);
ClassificationReport classify_region(const Stencil& s, const GridSpec& probe, double tol);

} // namespace pdiff
