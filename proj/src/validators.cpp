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

double interpolate(const GridFunction& u, const Eigen::VectorXd& x) {
    const GridSpec& spec = u.spec();
    const int n = spec.dim();
    const Eigen::VectorXd p = (x - spec.origin()) / spec.h();
    Eigen::VectorXi base(n);
    Eigen::VectorXd t(n);
    for (int i = 0; i < n; ++i) {
        const double last = spec.extents()[i] - 1;
        if (p[i] < -1e-9 || p[i] > last + 1e-9) throw InputError("sample point lies outside the grid");
        const double c = std::clamp(p[i], 0.0, last);
        base[i] = std::min(static_cast<int>(std::floor(c)), std::max(0, spec.extents()[i] - 2));
        t[i] = c - base[i];
    }
    double acc = 0.0;
    for (int corner = 0; corner < (1 << n); ++corner) {
        double w = 1.0;
        Eigen::VectorXi idx = base;
        for (int i = 0; i < n; ++i) {
            if (corner & (1 << i)) {
                w *= t[i];
                idx[i] = std::min(idx[i] + 1, spec.extents()[i] - 1);
            } else {
                w *= 1.0 - t[i];
            }
        }
        if (w != 0.0) acc += w * u.at(idx);
    }
    return acc;
}

std::vector<Eigen::VectorXd> sphere_points(int n, int count) {
    std::vector<Eigen::VectorXd> pts;
    if (n == 1) {
        pts.push_back(Eigen::VectorXd::Constant(1, -1.0));
        pts.push_back(Eigen::VectorXd::Constant(1, 1.0));
    } else if (n == 2) {
        for (int j = 0; j < count; ++j) {
            const double a = 2.0 * std::numbers::pi * j / count;
            pts.push_back(Eigen::Vector2d(std::cos(a), std::sin(a)));
        }
    } else if (n == 3) {
        // Fibonacci lattice.
        const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
        for (int j = 0; j < count; ++j) {
            const double z = 1.0 - (2.0 * j + 1.0) / count;
            const double rho = std::sqrt(1.0 - z * z);
            pts.push_back(Eigen::Vector3d(rho * std::cos(golden * j), rho * std::sin(golden * j), z));
        }
    } else {
        throw InputError("mean value check supports dimensions 1 to 3");
    }
    return pts;
}

} // namespace

double mean_value_check(const GridFunction& u, const Eigen::VectorXd& center, double r, int points) {
    if (center.size() != u.spec().dim()) throw InputError("center has the wrong dimension");
    if (!(r > 0.0)) throw InputError("radius must be > 0");
    if (points < 64) throw InputError("mean value check needs at least 64 points");
    const int n = u.spec().dim();
    const Eigen::VectorXd lo = u.spec().origin();
    const Eigen::VectorXd hi = lo + u.spec().h() * (u.spec().extents().cast<double>().array() - 1).matrix();
    if (((center.array() - r) < lo.array() - 1e-12).any() || ((center.array() + r) > hi.array() + 1e-12).any())
        throw InputError("sphere exits the grid");

    double sum = 0.0;
    const auto pts = sphere_points(n, points);
    for (const auto& p : pts) sum += interpolate(u, center + r * p);
    return std::abs(interpolate(u, center) - sum / static_cast<double>(pts.size()));
}

MaxPrincipleResult max_principle_check(const GridFunction& u) {
    const GridSpec& spec = u.spec();
    if ((spec.extents().array() < 3).any()) throw InputError("grid has no interior");
    double bmax = -std::numeric_limits<double>::infinity();
    double bmin = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < spec.size(); ++k) {
        if (!spec.on_boundary(spec.unflat(k))) continue;
        bmax = std::max(bmax, u[k]);
        bmin = std::min(bmin, u[k]);
    }
    const double tie = 64 * std::numeric_limits<double>::epsilon() * u.values().cwiseAbs().maxCoeff();
    MaxPrincipleResult result;
    for (Eigen::Index k = 0; k < spec.size(); ++k) {
        if (spec.on_boundary(spec.unflat(k))) continue;
        if (u[k] > bmax + tie || u[k] < bmin - tie) {
            result.pass = false;
            result.witness = k;
            break;
        }
    }
    return result;
}

std::string_view to_string(HarnackOutcome outcome) {
    switch (outcome) {
    case HarnackOutcome::FiniteLimit: return "finite_limit";
    case HarnackOutcome::Divergent: return "divergent";
    case HarnackOutcome::Violation: return "violation";
    case HarnackOutcome::Inconclusive: return "inconclusive";
    }
    return "unknown";
}

HarnackVerdict harnack_limit(const std::vector<GridFunction>& seq, int compact_margin, double tol) {
    if (seq.size() < 3) throw InputError("Harnack check needs a sequence of length >= 3");
    if (!(tol > 0.0)) throw InputError("tolerance must be > 0");
    if (compact_margin < 0) throw InputError("compact margin must be >= 0");
    for (const auto& u : seq)
        if (!u.spec().same_as(seq.front().spec())) throw InputError("sequence grids differ");

    HarnackVerdict verdict;
    verdict.divergence_threshold = 1.0 / tol;

    for (std::size_t k = 0; k + 1 < seq.size(); ++k) {
        const Eigen::VectorXd& a = seq[k].values();
        const Eigen::VectorXd& b = seq[k + 1].values();
        for (Eigen::Index i = 0; i < a.size(); ++i) {
            if (b[i] < a[i]) {
                verdict.outcome = HarnackOutcome::Violation;
                verdict.witness_step = static_cast<int>(k + 1);
                verdict.witness_node = i;
                return verdict;
            }
        }
    }

    const int n = seq.front().spec().dim();
    const Eigen::VectorXi margin = Eigen::VectorXi::Constant(n, compact_margin);
    std::vector<GridFunction> boxed;
    boxed.reserve(seq.size());
    for (const auto& u : seq) boxed.push_back(shrink(u, margin, margin));
    for (std::size_t k = 0; k + 1 < boxed.size(); ++k)
        verdict.deviations.push_back((boxed[k + 1].values() - boxed[k].values()).cwiseAbs().maxCoeff());

    const double last = verdict.deviations.back();
    const double prev = verdict.deviations[verdict.deviations.size() - 2];
    if (last < tol) {
        verdict.outcome = HarnackOutcome::FiniteLimit;
        verdict.limit = seq.back();
        const GridSpec& spec = seq.back().spec();
        if ((spec.extents().array() >= 3).all()) {
            const Stencil lap = centered_laplace_stencil(n, spec.h(), true);
            verdict.limit_residual = norm(apply(lap, seq.back()), NormKind::Linf);
        }
    } else if (boxed.back().values().minCoeff() > verdict.divergence_threshold || last >= prev) {
        verdict.outcome = HarnackOutcome::Divergent;
    } else {
        verdict.outcome = HarnackOutcome::Inconclusive;
    }
    return verdict;
}

OrderStudy observed_orders(std::vector<double> h, std::vector<double> values) {
    if (h.size() != values.size()) throw InputError("spacing and value lists differ in length");
    OrderStudy study;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i + 1 < h.size(); ++i) {
        if (values[i] > 0.0 && values[i + 1] > 0.0 && h[i] != h[i + 1])
            study.orders.push_back(std::log(values[i] / values[i + 1]) / std::log(h[i] / h[i + 1]));
        else
            study.orders.push_back(nan);
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        if (!(values[i] > 0.0)) continue;
        const double x = std::log(h[i]);
        const double y = std::log(values[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++m;
    }
    if (m >= 2 && m * sxx - sx * sx > 0.0) study.fitted_order = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    study.h = std::move(h);
    study.values = std::move(values);
    return study;
}

OrderStudy harmonicity_residual(const Expr& e, const std::vector<GridSpec>& boxes) {
    std::vector<double> hs;
    std::vector<double> res;
    for (const auto& box : boxes) {
        const Stencil lap = laplace_stencil(box.dim(), box.h(), false);
        hs.push_back(box.h());
        res.push_back(norm(apply(lap, sample(e, box)), NormKind::Linf));
    }
    return observed_orders(std::move(hs), std::move(res));
}

} // namespace pdiff
