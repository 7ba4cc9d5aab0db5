#include "pdiff/grid.hpp"

#include <cmath>
#include <string>

#include "pdiff/error.hpp"

namespace pdiff {

GridSpec::GridSpec(Eigen::VectorXd origin, double h, Eigen::VectorXi extents)
    : origin_(std::move(origin)), h_(h), extents_(std::move(extents)) {
    if (origin_.size() < 1) throw InputError("grid dimension must be >= 1");
    if (extents_.size() != origin_.size())
        throw InputError("grid origin and extents differ in dimension");
    if (!(h_ > 0.0) || !std::isfinite(h_)) throw InputError("grid spacing h must be > 0");
    if (!origin_.allFinite()) throw InputError("grid origin must be finite");
    if ((extents_.array() < 1).any()) throw InputError("every grid extent must be >= 1");

    strides_.resize(extents_.size());
    Eigen::Index stride = 1;
    for (Eigen::Index i = extents_.size() - 1; i >= 0; --i) {
        strides_[i] = static_cast<int>(stride);
        stride *= extents_[i];
    }
    size_ = stride;
}

GridSpec GridSpec::cube(int dim, double lo, double h, int count) {
    return GridSpec(Eigen::VectorXd::Constant(dim, lo), h, Eigen::VectorXi::Constant(dim, count));
}

Eigen::VectorXi GridSpec::unflat(Eigen::Index k) const {
    Eigen::VectorXi index(extents_.size());
    for (Eigen::Index i = 0; i < extents_.size(); ++i) {
        index[i] = static_cast<int>(k / strides_[i]);
        k %= strides_[i];
    }
    return index;
}

bool GridSpec::on_boundary(const Eigen::VectorXi& index) const {
    for (Eigen::Index i = 0; i < index.size(); ++i)
        if (index[i] == 0 || index[i] == extents_[i] - 1) return true;
    return false;
}

bool GridSpec::same_as(const GridSpec& other) const {
    if (dim() != other.dim() || extents_ != other.extents_) return false;
    if (std::abs(h_ - other.h_) > 1e-12 * h_) return false;
    return ((origin_ - other.origin_).array().abs() <= 1e-12 * h_).all();
}

GridFunction::GridFunction(GridSpec spec, Eigen::VectorXd values)
    : spec_(std::move(spec)), values_(std::move(values)) {
    if (values_.size() != spec_.size())
        throw InputError("grid has " + std::to_string(spec_.size()) + " nodes but " +
                         std::to_string(values_.size()) + " values");
    for (Eigen::Index k = 0; k < values_.size(); ++k)
        if (!std::isfinite(values_[k]))
            throw NumericalError("non-finite grid value at node " + std::to_string(k));
}

GridFunction GridFunction::zeros(const GridSpec& spec) {
    return GridFunction(spec, Eigen::VectorXd::Zero(spec.size()));
}

GridFunction sample(const Expr& e, const GridSpec& spec) {
    if (e.max_variable() > spec.dim())
        throw InputError("expression references x" + std::to_string(e.max_variable()) +
                         " on a " + std::to_string(spec.dim()) + "-dimensional grid");
    Eigen::VectorXd values(spec.size());
    for (Eigen::Index k = 0; k < spec.size(); ++k) {
        try {
            values[k] = e.eval(spec.node(k));
        } catch (const NumericalError& err) {
            throw NumericalError("sampling failed at node " + std::to_string(k) + ": " + err.what());
        }
    }
    return GridFunction(spec, std::move(values));
}

GridFunction sample(const std::function<double(const Eigen::VectorXd&)>& f, const GridSpec& spec) {
    Eigen::VectorXd values(spec.size());
    for (Eigen::Index k = 0; k < spec.size(); ++k) {
        values[k] = f(spec.node(k));
        if (!std::isfinite(values[k]))
            throw NumericalError("sampling failed at node " + std::to_string(k) +
                                 ": non-finite value");
    }
    return GridFunction(spec, std::move(values));
}

double norm(const GridFunction& u, NormKind kind) {
    if (u.values().size() == 0) return 0.0;
    if (kind == NormKind::Linf) return u.values().cwiseAbs().maxCoeff();
    return std::pow(u.spec().h(), u.spec().dim()) * u.values().cwiseAbs().sum();
}

GridSpec shrink(const GridSpec& spec, const Eigen::VectorXi& lo, const Eigen::VectorXi& hi) {
    if (lo.size() != spec.dim() || hi.size() != spec.dim())
        throw InputError("shrink margin dimension mismatch");
    if ((lo.array() < 0).any() || (hi.array() < 0).any())
        throw InputError("shrink margins must be nonnegative");
    const Eigen::VectorXi extents = spec.extents() - lo - hi;
    for (Eigen::Index i = 0; i < extents.size(); ++i)
        if (extents[i] < 1)
            throw InputError("shrink leaves axis " + std::to_string(i + 1) + " empty");
    return GridSpec(spec.node(lo), spec.h(), extents);
}

GridFunction shrink(const GridFunction& u, const Eigen::VectorXi& lo, const Eigen::VectorXi& hi) {
    GridSpec out = shrink(u.spec(), lo, hi);
    Eigen::VectorXd values(out.size());
    for (Eigen::Index k = 0; k < out.size(); ++k)
        values[k] = u.values()[u.spec().flat(out.unflat(k) + lo)];
    return GridFunction(std::move(out), std::move(values));
}

GridFunction restrict_to(const GridFunction& u, const GridSpec& target) {
    const GridSpec& src = u.spec();
    if (src.dim() != target.dim()) throw InputError("restriction across dimensions");
    if (std::abs(src.h() - target.h()) > 1e-12 * src.h())
        throw InputError("restriction between grids of different spacing");
    const Eigen::VectorXd shift = (target.origin() - src.origin()) / src.h();
    Eigen::VectorXi lo(src.dim());
    for (int i = 0; i < src.dim(); ++i) {
        const double r = std::round(shift[i]);
        if (std::abs(shift[i] - r) > 1e-9) throw InputError("grids are not lattice-aligned");
        lo[i] = static_cast<int>(r);
    }
    const Eigen::VectorXi hi = src.extents() - lo - target.extents();
    if ((lo.array() < 0).any() || (hi.array() < 0).any())
        throw InputError("target grid is not contained in the source grid");
    return shrink(u, lo, hi);
}

GridFunction combine(double a, const GridFunction& u, double b, const GridFunction& v) {
    if (!u.spec().same_as(v.spec())) throw InputError("combine on mismatched grids");
    return GridFunction(u.spec(), a * u.values() + b * v.values());
}

} // namespace pdiff
