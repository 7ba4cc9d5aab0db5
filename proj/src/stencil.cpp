#include "pdiff/stencil.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pdiff/error.hpp"

namespace pdiff {

namespace {

bool shift_less(const Eigen::VectorXi& a, const Eigen::VectorXi& b) {
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

std::vector<StencilTerm> merge_terms(std::vector<StencilTerm> terms) {
    std::stable_sort(terms.begin(), terms.end(), [](const StencilTerm& a, const StencilTerm& b) {
        return shift_less(a.shift, b.shift);
    });
    std::vector<StencilTerm> merged;
    for (auto& t : terms) {
        if (!merged.empty() && merged.back().shift == t.shift)
            merged.back().coeff = merged.back().coeff + t.coeff;
        else
            merged.push_back(std::move(t));
    }
    return merged;
}

long long binomial(int k, int j) {
    long long c = 1;
    for (int i = 1; i <= j; ++i) c = c * (k - j + i) / i;
    return c;
}

} // namespace

Stencil::Stencil(int dim, double h, std::vector<StencilTerm> terms, int scale_exp)
    : dim_(dim), h_(h), scale_exp_(scale_exp) {
    if (dim_ < 1) throw InputError("stencil dimension must be >= 1");
    if (!(h_ > 0.0) || !std::isfinite(h_)) throw InputError("stencil spacing h must be > 0");
    if (scale_exp_ < 0) throw InputError("stencil scale exponent must be >= 0");
    if (terms.empty()) throw InputError("stencil needs at least one term");
    for (const auto& t : terms) {
        if (t.shift.size() != dim_)
            throw InputError("stencil term shift has " + std::to_string(t.shift.size()) +
                             " entries, expected " + std::to_string(dim_));
        if (t.coeff.max_variable() > dim_)
            throw InputError("stencil coefficient references x" +
                             std::to_string(t.coeff.max_variable()));
    }
    terms_ = merge_terms(std::move(terms));
}

bool Stencil::all_constant() const noexcept {
    return std::all_of(terms_.begin(), terms_.end(),
                       [](const StencilTerm& t) { return t.coeff.is_constant(); });
}

double Stencil::coefficient(const Eigen::VectorXi& shift) const {
    for (const auto& t : terms_) {
        if (t.shift == shift) {
            if (!t.coeff.is_constant()) throw InputError("coefficient is not constant");
            return *t.coeff.constant_value();
        }
    }
    return 0.0;
}

std::pair<Eigen::VectorXi, Eigen::VectorXi> Stencil::reach() const {
    Eigen::VectorXi lo = terms_.front().shift;
    Eigen::VectorXi hi = lo;
    for (const auto& t : terms_) {
        lo = lo.cwiseMin(t.shift);
        hi = hi.cwiseMax(t.shift);
    }
    return {lo, hi};
}

Stencil Stencil::shifted(const Eigen::VectorXi& offset) const {
    std::vector<StencilTerm> terms = terms_;
    for (auto& t : terms) t.shift += offset;
    return Stencil(dim_, h_, std::move(terms), scale_exp_);
}

Stencil Stencil::with_scale(int scale_exp) const { return Stencil(dim_, h_, terms_, scale_exp); }

Stencil operator+(const Stencil& a, const Stencil& b) {
    if (a.dim_ != b.dim_ || a.h_ != b.h_ || a.scale_exp_ != b.scale_exp_)
        throw InputError("cannot add stencils with different dim, h or scale");
    std::vector<StencilTerm> terms = a.terms_;
    terms.insert(terms.end(), b.terms_.begin(), b.terms_.end());
    return Stencil(a.dim_, a.h_, std::move(terms), a.scale_exp_);
}

Stencil operator*(double c, const Stencil& s) {
    std::vector<StencilTerm> terms = s.terms_;
    for (auto& t : terms) t.coeff = Expr::constant(c) * t.coeff;
    return Stencil(s.dim_, s.h_, std::move(terms), s.scale_exp_);
}

Stencil axis_difference(int dim, int axis, int order, double h) {
    if (axis < 1 || axis > dim) throw InputError("axis out of range");
    if (order < 1) throw InputError("difference order must be >= 1");
    std::vector<StencilTerm> terms;
    for (int j = 0; j <= order; ++j) {
        Eigen::VectorXi shift = Eigen::VectorXi::Zero(dim);
        shift[axis - 1] = j;
        const double sign = (order - j) % 2 == 0 ? 1.0 : -1.0;
        terms.push_back({shift, Expr::constant(sign * static_cast<double>(binomial(order, j)))});
    }
    return Stencil(dim, h, std::move(terms));
}

Stencil mixed_difference(int dim, const Eigen::VectorXi& orders, double h) {
    if (orders.size() != dim) throw InputError("mixed difference needs one order per axis");
    if ((orders.array() < 0).any() || orders.sum() < 1)
        throw InputError("mixed difference orders must be nonnegative with positive sum");

    // Tensor product of per-axis binomial rows.
    std::vector<StencilTerm> terms{{Eigen::VectorXi::Zero(dim), Expr::constant(1.0)}};
    for (int axis = 0; axis < dim; ++axis) {
        const int k = orders[axis];
        if (k == 0) continue;
        std::vector<StencilTerm> next;
        next.reserve(terms.size() * static_cast<std::size_t>(k + 1));
        for (const auto& t : terms) {
            for (int j = 0; j <= k; ++j) {
                StencilTerm u = t;
                u.shift[axis] += j;
                const double sign = (k - j) % 2 == 0 ? 1.0 : -1.0;
                u.coeff = Expr::constant(*t.coeff.constant_value() * sign *
                                         static_cast<double>(binomial(k, j)));
                next.push_back(std::move(u));
            }
        }
        terms = std::move(next);
    }
    return Stencil(dim, h, std::move(terms));
}

Stencil laplace_stencil(int dim, double h, bool scaled) {
    if (dim < 1) throw InputError("dimension must be >= 1");
    Stencil s = axis_difference(dim, 1, 2, h);
    for (int i = 2; i <= dim; ++i) s = s + axis_difference(dim, i, 2, h);
    return scaled ? s.with_scale(2) : s;
}

Stencil biharmonic_stencil(int dim, double h, bool scaled) {
    if (dim < 1) throw InputError("dimension must be >= 1");
    Stencil s = axis_difference(dim, 1, 4, h);
    for (int i = 2; i <= dim; ++i) s = s + axis_difference(dim, i, 4, h);
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) {
            if (i == j) continue;
            Eigen::VectorXi orders = Eigen::VectorXi::Zero(dim);
            orders[i] = 2;
            orders[j] = 2;
            s = s + mixed_difference(dim, orders, h);
        }
    }
    return scaled ? s.with_scale(4) : s;
}

Stencil centered_laplace_stencil(int dim, double h, bool scaled) {
    if (dim < 1) throw InputError("dimension must be >= 1");
    Stencil s = axis_difference(dim, 1, 2, h).shifted(-Eigen::VectorXi::Unit(dim, 0));
    for (int i = 1; i < dim; ++i)
        s = s + axis_difference(dim, i + 1, 2, h).shifted(-Eigen::VectorXi::Unit(dim, i));
    return scaled ? s.with_scale(2) : s;
}

Stencil centered_biharmonic_stencil(int dim, double h, bool scaled) {
    if (dim < 1) throw InputError("dimension must be >= 1");
    Stencil s = axis_difference(dim, 1, 4, h).shifted(-2 * Eigen::VectorXi::Unit(dim, 0));
    for (int i = 1; i < dim; ++i)
        s = s + axis_difference(dim, i + 1, 4, h).shifted(-2 * Eigen::VectorXi::Unit(dim, i));
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) {
            if (i == j) continue;
            Eigen::VectorXi orders = Eigen::VectorXi::Zero(dim);
            orders[i] = 2;
            orders[j] = 2;
            s = s + mixed_difference(dim, orders, h).shifted(-orders / 2);
        }
    }
    return scaled ? s.with_scale(4) : s;
}

GridFunction apply(const Stencil& s, const GridFunction& u) {
    const GridSpec& in = u.spec();
    if (in.dim() != s.dim())
        throw InputError("stencil is " + std::to_string(s.dim()) + "-dimensional, grid is " +
                         std::to_string(in.dim()) + "-dimensional");
    if (std::abs(in.h() - s.h()) > 1e-12 * s.h())
        throw InputError("stencil spacing differs from grid spacing");

    const auto [min_shift, max_shift] = s.reach();
    const Eigen::VectorXi lo = (-min_shift).cwiseMax(0);
    const Eigen::VectorXi hi = max_shift.cwiseMax(0);
    if (((in.extents() - lo - hi).array() < 1).any())
        throw InputError("stencil leaves no valid region on this grid");
    GridSpec out = shrink(in, lo, hi);

    const auto& terms = s.terms();
    std::vector<Eigen::Index> offsets(terms.size());
    for (std::size_t t = 0; t < terms.size(); ++t) offsets[t] = in.flat(terms[t].shift);
    const double scale = s.scale_exp() == 0 ? 1.0 : std::pow(s.h(), -s.scale_exp());

    const Eigen::VectorXd& v = u.values();
    Eigen::VectorXd result(out.size());
    if (s.all_constant()) {
        std::vector<double> coeffs(terms.size());
        for (std::size_t t = 0; t < terms.size(); ++t) coeffs[t] = *terms[t].coeff.constant_value();
        for (Eigen::Index k = 0; k < out.size(); ++k) {
            const Eigen::Index base = in.flat(out.unflat(k) + lo);
            double acc = 0.0;
            for (std::size_t t = 0; t < terms.size(); ++t) acc += coeffs[t] * v[base + offsets[t]];
            result[k] = scale * acc;
        }
    } else {
        for (Eigen::Index k = 0; k < out.size(); ++k) {
            const Eigen::VectorXi index = out.unflat(k);
            const Eigen::Index base = in.flat(index + lo);
            const Eigen::VectorXd x = out.node(index);
            double acc = 0.0;
            for (std::size_t t = 0; t < terms.size(); ++t) {
                try {
                    acc += terms[t].coeff.eval(x) * v[base + offsets[t]];
                } catch (const NumericalError& err) {
                    throw NumericalError("coefficient evaluation failed: " + std::string(err.what()));
                }
            }
            result[k] = scale * acc;
        }
    }
    return GridFunction(std::move(out), std::move(result));
}

Residual residual(const Stencil& s, const GridFunction& u, const GridFunction& rhs) {
    const GridFunction lhs = apply(s, u);
    const GridFunction r = restrict_to(rhs, lhs.spec());
    const GridFunction diff(lhs.spec(), lhs.values() - r.values());
    return {norm(diff, NormKind::L1), norm(diff, NormKind::Linf)};
}

} // namespace pdiff
