#include <cmath>
#include <numbers>
#include <string>

#include "pdiff/elliptic.hpp"
#include "pdiff/error.hpp"

namespace pdiff {

double sphere_area(int n) {
    if (n < 2) throw InputError("sphere area needs n >= 2");
    const double half = 0.5 * n;
    return 2.0 * std::pow(std::numbers::pi, half) / std::tgamma(half);
}

FundamentalSolution::FundamentalSolution(int n) : n_(n), s_n_(pdiff::sphere_area(n)) {}

double FundamentalSolution::of_radius(double r) const {
    if (!(r > 0.0)) throw NumericalError("fundamental solution is singular at the origin");
    if (n_ == 2) return std::log(r) / (2.0 * std::numbers::pi);
    return -std::pow(r, 2 - n_) / ((n_ - 2) * s_n_);
}

double FundamentalSolution::cell_average(const Eigen::VectorXd& center, double h, int sub) const {
    if (center.size() != n_) throw InputError("cell center has the wrong dimension");
    if (sub < 1) throw InputError("subcell count must be >= 1");
    Eigen::VectorXi idx = Eigen::VectorXi::Zero(n_);
    const double step = h / sub;
    double total = 0.0;
    long long count = 0;
    for (;;) {
        const Eigen::VectorXd p =
            center.array() + step * (idx.cast<double>().array() + 0.5) - 0.5 * h;
        total += of_radius(p.norm());
        ++count;
        int axis = n_ - 1;
        while (axis >= 0 && ++idx[axis] == sub) idx[axis--] = 0;
        if (axis < 0) break;
    }
    return total / static_cast<double>(count);
}

GridFunction newtonian_potential(const FundamentalSolution& fs, const GridFunction& f,
                                 const GridSpec& targets) {
    const GridSpec& src = f.spec();
    const int n = src.dim();
    if (n != fs.dim()) throw InputError("source grid dimension differs from the kernel");
    if (targets.dim() != n) throw InputError("target grid dimension differs from the source grid");

    struct Source {
        Eigen::VectorXd y;
        double value;
    };
    std::vector<Source> sources;
    for (Eigen::Index k = 0; k < src.size(); ++k) {
        const Eigen::VectorXi idx = src.unflat(k);
        if (f[k] == 0.0) continue;
        if (src.on_boundary(idx))
            throw InputError("source is not compactly supported: nonzero value on boundary node " +
                             std::to_string(k));
        sources.push_back({src.node(idx), f[k]});
    }

    const double h = src.h();
    const double half = 0.5 * h * (1.0 + 1e-12);
    const double coincident = fs.cell_average(Eigen::VectorXd::Zero(n), h);
    const double cell = std::pow(h, n);

    Eigen::VectorXd u(targets.size());
    for (Eigen::Index k = 0; k < targets.size(); ++k) {
        const Eigen::VectorXd x = targets.node(k);
        double acc = 0.0;
        for (const Source& s : sources) {
            const Eigen::VectorXd d = x - s.y;
            double kernel;
            if (d.cwiseAbs().maxCoeff() <= half) {
                kernel = d.cwiseAbs().maxCoeff() <= 1e-12 * h ? coincident : fs.cell_average(d, h);
            } else {
                kernel = fs.of_radius(d.norm());
            }
            acc += kernel * s.value;
        }
        u[k] = cell * acc;
    }
    return GridFunction(targets, std::move(u));
}

} // namespace pdiff
