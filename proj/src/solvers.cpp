#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "pdiff/elliptic.hpp"
#include "pdiff/error.hpp"
#include "pdiff/stencil.hpp"

namespace pdiff {

namespace {

// Red-black SOR for the centered problem
//   sum_i [u(x + e_i h) - 2u(x) + u(x - e_i h)] = h^2 f(x)
// on the interior, with u = g on the boundary. Nodes of one color only
// couple to the other color, so each half-sweep is order independent.
SolveReport sor(const GridFunction& f, const GridFunction& g, const SolveOptions& opt) {
    const GridSpec& spec = g.spec();
    if (!f.spec().same_as(spec)) throw InputError("right-hand side and boundary grids differ");
    if ((spec.extents().array() < 3).any())
        throw InputError("Dirichlet solve needs at least 3 nodes per axis");
    if (!(opt.tol > 0.0)) throw InputError("solver tolerance must be > 0");
    if (opt.max_iter < 1) throw InputError("max_iter must be >= 1");

    const int n = spec.dim();
    const double h = spec.h();
    const double h2 = h * h;
    const double longest = h * (spec.extents().maxCoeff() - 1);
    const double omega =
        opt.omega > 0.0 ? opt.omega : 2.0 / (1.0 + std::sin(std::numbers::pi * h / longest));

    // Interior starts at the boundary mean.
    Eigen::VectorXd u = Eigen::VectorXd::Zero(spec.size());
    std::vector<Eigen::Index> color[2];
    double boundary_sum = 0.0;
    Eigen::Index boundary_count = 0;
    for (Eigen::Index k = 0; k < spec.size(); ++k) {
        const Eigen::VectorXi idx = spec.unflat(k);
        if (spec.on_boundary(idx)) {
            u[k] = g[k];
            boundary_sum += g[k];
            ++boundary_count;
        } else {
            color[idx.sum() % 2].push_back(k);
        }
    }
    const double start = boundary_sum / static_cast<double>(boundary_count);
    for (const auto& nodes : color)
        for (Eigen::Index k : nodes) u[k] = start;
    std::vector<Eigen::Index> stride(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) stride[static_cast<std::size_t>(i)] = spec.strides()[i];
    const double diag = 2.0 * n;
    const Eigen::VectorXd& rhs = f.values();

    auto neighbor_sum = [&](Eigen::Index k) {
        double s = 0.0;
        for (Eigen::Index st : stride) s += u[k + st] + u[k - st];
        return s;
    };

    double res = 0.0;
    int it = 0;
    while (it < opt.max_iter) {
        for (const auto& nodes : color) {
            for (Eigen::Index k : nodes) {
                const double gs = (neighbor_sum(k) - h2 * rhs[k]) / diag;
                u[k] += omega * (gs - u[k]);
            }
        }
        ++it;
        res = 0.0;
        for (const auto& nodes : color)
            for (Eigen::Index k : nodes)
                res = std::max(res, std::abs(neighbor_sum(k) - diag * u[k] - h2 * rhs[k]) / h2);
        if (res <= opt.tol) break;
    }
    return SolveReport{GridFunction(spec, std::move(u)), it, res, res <= opt.tol};
}

} // namespace

SolveReport solve_laplace_dirichlet(const GridFunction& g, const SolveOptions& opt) {
    return sor(GridFunction::zeros(g.spec()), g, opt);
}

SolveReport solve_poisson_dirichlet(const GridFunction& f, const GridFunction& g, const SolveOptions& opt) {
    return sor(f, g, opt);
}

BiharmonicReport solve_biharmonic(const GridFunction& rhs, const GridFunction& g_u,
                                  const GridFunction& g_lap, const SolveOptions& opt) {
    SolveReport lap = sor(rhs, g_lap, opt);
    SolveReport sol = sor(lap.solution, g_u, opt);
    double composed = std::numeric_limits<double>::quiet_NaN();
    const GridSpec& spec = g_u.spec();
    if ((spec.extents().array() >= 5).all()) {
        const Stencil op = centered_biharmonic_stencil(spec.dim(), spec.h(), true);
        composed = residual(op, sol.solution, rhs).linf;
    }
    const bool ok = lap.converged && sol.converged;
    return BiharmonicReport{std::move(lap), std::move(sol), composed, ok};
}

} // namespace pdiff
