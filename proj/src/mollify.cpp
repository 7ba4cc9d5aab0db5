#include "pdiff/mollify.hpp"

#include <cmath>
#include <string>

#include "pdiff/error.hpp"

namespace pdiff {

namespace {

struct Tap {
    Eigen::Index offset; // flat offset in the target grid
    double weight;
};

// Nonzero taps of a centered cube kernel with `radius` nodes per half-axis,
// expressed as flat offsets on `target`. Tap o contributes f(z - o) k(o).
std::vector<Tap> kernel_taps(const GridFunction& kernel, int radius, const GridSpec& target) {
    std::vector<Tap> taps;
    const GridSpec& ks = kernel.spec();
    for (Eigen::Index k = 0; k < ks.size(); ++k) {
        const double w = kernel[k];
        if (w == 0.0) continue;
        const Eigen::VectorXi o = ks.unflat(k).array() - radius;
        taps.push_back({-target.flat(o), w});
    }
    return taps;
}

GridFunction lattice_convolve(const GridFunction& f, const GridFunction& kernel, int radius) {
    const GridSpec& in = f.spec();
    const int n = in.dim();
    const Eigen::VectorXi margin = Eigen::VectorXi::Constant(n, radius);
    if (((in.extents() - 2 * margin).array() < 1).any())
        throw InputError("grid is too small for a kernel of radius " + std::to_string(radius) +
                         " nodes");
    GridSpec out = shrink(in, margin, margin);
    const std::vector<Tap> taps = kernel_taps(kernel, radius, in);
    const double cell = std::pow(in.h(), n);

    const Eigen::VectorXd& v = f.values();
    Eigen::VectorXd result(out.size());
    for (Eigen::Index k = 0; k < out.size(); ++k) {
        const Eigen::Index base = in.flat(out.unflat(k) + margin);
        double acc = 0.0;
        for (const Tap& t : taps) acc += v[base + t.offset] * t.weight;
        result[k] = cell * acc;
    }
    return GridFunction(std::move(out), std::move(result));
}

void check_spacing(const GridFunction& f, const MollifierKernel& k) {
    if (f.spec().dim() != k.dim) throw InputError("kernel and grid differ in dimension");
    if (std::abs(f.spec().h() - k.spacing) > 1e-12 * k.spacing)
        throw InputError("kernel spacing differs from grid spacing");
}

} // namespace

double bump(double s) { return s < 1.0 ? std::exp(-1.0 / (1.0 - s)) : 0.0; }

double mollifier_normalization(int dim, int panels) {
    if (dim < 1 || panels < 1) throw InputError("normalization needs dim >= 1 and panels >= 1");
    if (panels % 2 == 1) ++panels;
    // The integrand is even in every coordinate: integrate the positive
    // orthant and multiply by 2^n.
    const int half = panels / 2;
    const double step = 2.0 / panels;
    std::vector<double> sq(static_cast<std::size_t>(half));
    for (int j = 0; j < half; ++j) {
        const double t = (j + 0.5) * step;
        sq[static_cast<std::size_t>(j)] = t * t;
    }

    double total = 0.0;
    std::vector<int> idx(static_cast<std::size_t>(dim), 0);
    std::vector<double> partial(static_cast<std::size_t>(dim + 1), 0.0);
    // Odometer over the orthant, skipping the remainder of an axis once the
    // partial radius leaves the unit ball.
    int axis = 0;
    while (axis >= 0) {
        const auto a = static_cast<std::size_t>(axis);
        if (idx[a] >= half) {
            idx[a] = 0;
            --axis;
            if (axis >= 0) ++idx[static_cast<std::size_t>(axis)];
            continue;
        }
        partial[a + 1] = partial[a] + sq[static_cast<std::size_t>(idx[a])];
        if (partial[a + 1] >= 1.0) {
            idx[a] = half;
            continue;
        }
        if (axis + 1 < dim) {
            ++axis;
            idx[static_cast<std::size_t>(axis)] = 0;
            continue;
        }
        total += bump(partial[a + 1]);
        ++idx[a];
    }
    return total * std::pow(2.0 * step, dim);
}

MollifierKernel make_mollifier(int dim, double eps, double h, int refine) {
    if (dim < 1) throw InputError("mollifier dimension must be >= 1");
    if (!(h > 0.0)) throw InputError("mollifier spacing must be > 0");
    if (!(eps >= h * (1.0 - 1e-12)))
        throw InputError("mollifier radius " + std::to_string(eps) + " is below the grid spacing");
    if (refine < 1) throw InputError("refine must be >= 1");

    const int cells = static_cast<int>(std::ceil(2.0 * eps / h - 1e-9));
    const double z = mollifier_normalization(dim, refine * cells);
    const int radius = static_cast<int>(std::floor(eps / h + 1e-12));

    const GridSpec spec(Eigen::VectorXd::Constant(dim, -radius * h), h,
                        Eigen::VectorXi::Constant(dim, 2 * radius + 1));
    const double to_unit = (h * h) / (eps * eps);
    const double amplitude = std::pow(eps, -dim) / z;
    Eigen::VectorXd values(spec.size());
    for (Eigen::Index k = 0; k < spec.size(); ++k) {
        const Eigen::VectorXi m = spec.unflat(k).array() - radius;
        // Integer squared radius keeps k(x) == k(-x) bit for bit.
        const double r2 = static_cast<double>(m.squaredNorm()) * to_unit;
        values[k] = amplitude * bump(r2);
    }

    const double cell = std::pow(h, dim);
    const double raw_mass = cell * values.sum();
    if (std::abs(raw_mass - 1.0) > 0.1)
        throw NumericalError("mollifier eps=" + std::to_string(eps) + " is under-resolved at h=" +
                             std::to_string(h) + ": discrete mass " + std::to_string(raw_mass));
    values /= raw_mass;
    const double mass = cell * values.sum();

    return MollifierKernel{dim, eps, h, radius, z, raw_mass, mass, GridFunction(spec, std::move(values))};
}

GridFunction convolve(const GridFunction& f, const MollifierKernel& k) {
    check_spacing(f, k);
    return lattice_convolve(f, k.samples, k.radius);
}

KernelAudit audit(const MollifierKernel& k) {
    const GridSpec& spec = k.samples.spec();
    const Eigen::VectorXd& v = k.samples.values();
    KernelAudit a;
    a.mass_error = std::abs(k.mass - 1.0);
    a.min_value = v.minCoeff();
    for (Eigen::Index i = 0; i < spec.size(); ++i) {
        const Eigen::VectorXi idx = spec.unflat(i);
        const Eigen::VectorXi mirror = (2 * k.radius) - idx.array();
        a.symmetry_error = std::max(a.symmetry_error, std::abs(v[i] - k.samples.at(mirror)));
        const double r = spec.node(idx).norm();
        if (r > k.eps) a.support_violation = std::max(a.support_violation, std::abs(v[i]));
        if (v[i] > 0.0) a.support_radius = std::max(a.support_radius, r);
    }
    return a;
}

ConvergenceTrace l1_convergence(const GridFunction& f, const std::vector<double>& eps, int refine) {
    if (eps.empty()) throw InputError("eps list is empty");
    for (std::size_t i = 1; i < eps.size(); ++i)
        if (!(eps[i] < eps[i - 1])) throw InputError("eps list must be strictly descending");

    std::vector<MollifierKernel> kernels;
    for (double e : eps) kernels.push_back(make_mollifier(f.spec().dim(), e, f.spec().h(), refine));
    const int widest = kernels.front().radius;
    const Eigen::VectorXi margin = Eigen::VectorXi::Constant(f.spec().dim(), widest);
    if (((f.spec().extents() - 2 * margin).array() < 1).any())
        throw InputError("kernel for eps=" + std::to_string(eps.front()) + " does not fit the grid");
    const GridFunction reference = shrink(f, margin, margin);

    ConvergenceTrace trace;
    trace.eps = eps;
    for (const auto& k : kernels) {
        const GridFunction smoothed = restrict_to(convolve(f, k), reference.spec());
        trace.errors.push_back(norm(combine(1.0, smoothed, -1.0, reference), NormKind::L1));
    }
    for (std::size_t i = 1; i < trace.errors.size(); ++i)
        if (trace.errors[i] > 1.05 * trace.errors[i - 1]) trace.non_increasing = false;
    return trace;
}

std::vector<double> pointwise_errors(const GridFunction& f, const std::vector<double>& eps,
                                     const Eigen::VectorXi& node, int refine) {
    const GridSpec& in = f.spec();
    const double cell = std::pow(in.h(), in.dim());
    std::vector<double> errors;
    for (double e : eps) {
        const MollifierKernel k = make_mollifier(in.dim(), e, in.h(), refine);
        if ((node.array() < k.radius).any() || (node.array() + k.radius >= in.extents().array()).any())
            throw InputError("kernel for eps=" + std::to_string(e) + " leaves the grid at this node");
        const Eigen::Index base = in.flat(node);
        double acc = 0.0;
        for (const Tap& t : kernel_taps(k.samples, k.radius, in)) acc += f[base + t.offset] * t.weight;
        errors.push_back(std::abs(cell * acc - f[base]));
    }
    return errors;
}

CommutationResult derivative_commute(const GridFunction& f, const MollifierKernel& k, int axis) {
    check_spacing(f, k);
    const int n = k.dim;
    if (axis < 1 || axis > n) throw InputError("axis out of range");
    const int r = k.radius + 1;
    const Eigen::VectorXi margin = Eigen::VectorXi::Constant(n, r);
    if (((f.spec().extents() - 2 * margin).array() < 1).any())
        throw InputError("grid lacks the extra margin node needed for differencing");
    const double h = k.spacing;
    const Eigen::VectorXi e = Eigen::VectorXi::Unit(n, axis - 1);

    // Centered difference of the kernel on a cube one node wider.
    const GridSpec wide(Eigen::VectorXd::Constant(n, -r * h), h, Eigen::VectorXi::Constant(n, 2 * r + 1));
    auto kernel_at = [&](const Eigen::VectorXi& o) {
        if ((o.array().abs() > k.radius).any()) return 0.0;
        return k.samples.at(o.array() + k.radius);
    };
    Eigen::VectorXd dk(wide.size());
    for (Eigen::Index i = 0; i < wide.size(); ++i) {
        const Eigen::VectorXi o = wide.unflat(i).array() - r;
        dk[i] = (kernel_at(o + e) - kernel_at(o - e)) / (2.0 * h);
    }
    const GridFunction dkernel(wide, dk);
    const GridFunction rhs = lattice_convolve(f, dkernel, r);

    const GridFunction g = convolve(f, k);
    Eigen::VectorXd lhs(rhs.spec().size());
    for (Eigen::Index i = 0; i < rhs.spec().size(); ++i) {
        // rhs node i sits one node inside g on every axis.
        const Eigen::VectorXi gi = rhs.spec().unflat(i).array() + 1;
        lhs[i] = (g.at(gi + e) - g.at(gi - e)) / (2.0 * h);
    }

    CommutationResult out;
    out.deviation = (lhs - rhs.values()).cwiseAbs().maxCoeff();
    out.scale = norm(f, NormKind::Linf) * std::pow(h, n) * dk.cwiseAbs().sum();
    return out;
}

} // namespace pdiff
