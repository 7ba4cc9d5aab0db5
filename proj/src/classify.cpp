#include "pdiff/classify.hpp"

#include <string>

#include "pdiff/error.hpp"
#include "pdiff/symmetric_eigen.hpp"

namespace pdiff {

DifferenceOperator DifferenceOperator::from(const Stencil& s) {
    DifferenceOperator op;
    op.dim = s.dim();
    op.terms.reserve(s.terms().size());
    for (const auto& t : s.terms()) op.terms.push_back({t.shift.cast<double>(), t.coeff});
    return op;
}

std::string_view to_string(OperatorType type) {
    switch (type) {
    case OperatorType::Elliptic: return "elliptic";
    case OperatorType::Hyperbolic: return "hyperbolic";
    case OperatorType::Parabolic: return "parabolic";
    }
    return "unknown";
}

CoefficientMatrix coefficient_matrix(const DifferenceOperator& op, const Eigen::VectorXd& x) {
    if (x.size() != op.dim)
        throw InputError("point has " + std::to_string(x.size()) + " coordinates, operator is " +
                         std::to_string(op.dim) + "-dimensional");
    const int n = op.dim;
    std::vector<double> gamma(op.terms.size());
    for (std::size_t i = 0; i < op.terms.size(); ++i) gamma[i] = op.terms[i].coeff.eval(x);

    Eigen::MatrixXd q(n, n);
    for (int k = 0; k < n; ++k) {
        for (int l = k; l < n; ++l) {
            double a = 0.0;
            for (std::size_t i = 0; i < op.terms.size(); ++i)
                a += op.terms[i].shift[k] * op.terms[i].shift[l] * gamma[i];
            q(k, l) = a;
            q(l, k) = a;
        }
    }
    return {std::move(q), x};
}

CoefficientMatrix coefficient_matrix(const Stencil& s, const Eigen::VectorXd& x) {
    return coefficient_matrix(DifferenceOperator::from(s), x);
}

ClassifiedPoint classify_at(const DifferenceOperator& op, const Eigen::VectorXd& x, double tol) {
    if (!(tol > 0.0)) throw InputError("classification tolerance must be > 0");
    const CoefficientMatrix q = coefficient_matrix(op, x);
    Eigen::VectorXd lambda = symmetric_eigenvalues(q.entries);
    const OperatorType type = classify_spectrum(lambda, tol);
    return {x, std::move(lambda), type, tol};
}

ClassifiedPoint classify_at(const Stencil& s, const Eigen::VectorXd& x, double tol) {
    return classify_at(DifferenceOperator::from(s), x, tol);
}

ClassificationReport classify_region(const DifferenceOperator& op, const GridSpec& probe, double tol) {
    if (probe.dim() != op.dim) throw InputError("probe grid dimension differs from operator");
    ClassificationReport report;
    report.points.reserve(static_cast<std::size_t>(probe.size()));
    for (Eigen::Index k = 0; k < probe.size(); ++k) {
        report.points.push_back(classify_at(op, probe.node(k), tol));
        ++report.counts[static_cast<int>(report.points.back().type)];
    }
    return report;
}

ClassificationReport classify_region(const Stencil& s, const GridSpec& probe, double tol) {
    return classify_region(DifferenceOperator::from(s), probe, tol);
}

} // namespace pdiff
