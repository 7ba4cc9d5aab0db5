#include <doctest.h>

#include <cmath>
#include <random>

#include "pdiff/elliptic.hpp"
#include "pdiff/error.hpp"
#include "pdiff/mollify.hpp"
#include "pdiff/stencil.hpp"

using namespace pdiff;

namespace {

// Monte-Carlo oracle: s_n = n * vol(B_n), vol(B_n) = 2^n * P(|U| <= 1) for U uniform in the cube.
double monte_carlo_sphere_area(int n, int samples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> d(-1, 1);
    int hits = 0;
    for (int s = 0; s < samples; ++s) {
        double r2 = 0;
        for (int i = 0; i < n; ++i) {
            const double x = d(rng);
            r2 += x * x;
        }
        hits += r2 <= 1.0;
    }
    return n * std::pow(2.0, n) * hits / samples;
}

GridFunction boundary(const char* expr, int n, double h) {
    return sample(Expr::parse(expr), GridSpec::cube(n, 0, h, static_cast<int>(std::lround(1 / h)) + 1));
}

double max_error(const GridFunction& u, const char* expr) {
    return norm(combine(1, u, -1, sample(Expr::parse(expr), u.spec())), NormKind::Linf);
}

} // namespace

TEST_CASE("sphere area against a Monte-Carlo oracle") {
    const double closed[] = {0, 0, 2 * M_PI, 4 * M_PI, 2 * M_PI * M_PI};
    for (int n = 2; n <= 4; ++n) {
        const double mc = monte_carlo_sphere_area(n, 2'000'000, 1234 + n);
        CHECK(std::abs(sphere_area(n) - mc) / mc <= 0.01);
        CHECK(std::abs(sphere_area(n) - closed[n]) <= 1e-12);
    }
    CHECK(FundamentalSolution(3).sphere_area() == sphere_area(3));
    CHECK_THROWS_AS(sphere_area(1), InputError);
}

TEST_CASE("fundamental solution values") {
    const FundamentalSolution p2(2), p3(3);
    CHECK(std::abs(p2(Eigen::Vector2d(1, 0))) <= 1e-15);
    CHECK(std::abs(p2(Eigen::Vector2d(std::exp(1.0), 0)) - 1 / (2 * M_PI)) <= 1e-12);
    CHECK(std::abs(p3(Eigen::Vector3d(0, 0, 1)) + 1 / (4 * M_PI)) <= 1e-12);
    CHECK(std::abs(FundamentalSolution(4).of_radius(2.0) + 1.0 / (2 * 4 * 2 * M_PI * M_PI)) <= 1e-12);
    CHECK_THROWS_AS(p2(Eigen::Vector2d::Zero()), NumericalError);
    CHECK_THROWS_AS(FundamentalSolution(1), InputError);
}

TEST_CASE("fundamental solution is exactly invariant under coordinate permutations and sign flips") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> d(-3, 3);
    for (int t = 0; t < 200; ++t) {
        const int n = 2 + t % 3;
        const FundamentalSolution fs(n);
        Eigen::VectorXd x(n);
        for (auto& v : x) v = d(rng);
        Eigen::VectorXd y = x.reverse();
        y[t % n] = -y[t % n];
        CHECK(fs(x) == fs(y));
    }
}

TEST_CASE("fundamental solution is harmonic away from the origin") {
    for (int n = 2; n <= 3; ++n) {
        const FundamentalSolution fs(n);
        const double h = 1e-3;
        Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 0.7);
        double lap = 0;
        for (int i = 0; i < n; ++i) {
            const Eigen::VectorXd e = Eigen::VectorXd::Unit(n, i) * h;
            lap += (fs(x + e) - 2 * fs(x) + fs(x - e)) / (h * h);
        }
        CHECK(std::abs(lap) <= 1e-5);
    }
}

TEST_CASE("cell average of the fundamental solution") {
    const FundamentalSolution fs(2);
    // Far from the origin the midpoint average is close to the point value.
    const Eigen::Vector2d far(3, 1);
    CHECK(fs.cell_average(far, 0.01) == doctest::Approx(fs(far)).epsilon(1e-8));
    // At the origin the average is finite and below Phi at the half-diagonal.
    const double c = fs.cell_average(Eigen::Vector2d::Zero(), 0.1);
    CHECK(std::isfinite(c));
    CHECK(c < fs.of_radius(0.05 * std::sqrt(2.0)));
}

TEST_CASE("Newtonian potential") {
    const FundamentalSolution fs(2);
    const double h = 0.125;
    const GridSpec src = GridSpec::cube(2, -1, h, 17);
    const GridSpec targets = GridSpec::cube(2, -2, 0.5, 9);
    const GridFunction zero = newtonian_potential(fs, GridFunction::zeros(src), targets);
    CHECK(norm(zero, NormKind::Linf) == 0.0);

    const GridFunction f = sample([](const Eigen::VectorXd& x) { return bump(x.squaredNorm() / 0.36); }, src);
    const GridFunction g = sample([](const Eigen::VectorXd& x) { return x[0] * bump(x.squaredNorm() / 0.25); }, src);
    const GridFunction lhs = newtonian_potential(fs, combine(2, f, -3, g), targets);
    const GridFunction rhs = combine(2, newtonian_potential(fs, f, targets), -3, newtonian_potential(fs, g, targets));
    CHECK((lhs.values() - rhs.values()).cwiseAbs().maxCoeff() <= 1e-13);

    const GridFunction edge = sample(Expr::parse("1"), src);
    CHECK_THROWS_AS(newtonian_potential(fs, edge, targets), InputError);
}

TEST_CASE("Newtonian potential far field follows the total mass") {
    const FundamentalSolution fs(2);
    const double h = 1.0 / 16;
    const GridSpec src = GridSpec::cube(2, -0.5, h, 17);
    const double a = 0.3;
    const GridFunction f = sample([&](const Eigen::VectorXd& x) { return bump(x.squaredNorm() / (a * a)); }, src);
    const double mass = std::pow(h, 2) * f.values().sum();
    const GridSpec ring(Eigen::Vector2d(2.0, -2.0), 0.5, Eigen::Vector2i(3, 9));
    const GridFunction u = newtonian_potential(fs, f, ring);
    for (Eigen::Index i = 0; i < ring.size(); ++i) {
        const double r = ring.node(i).norm();
        REQUIRE(r >= 5 * a);
        const double far = mass * fs.of_radius(r);
        CHECK(std::abs(u[i] - far) / std::abs(far) < 0.02);
    }
}

TEST_CASE("Laplace solver reproduces discretely exact solutions") {
    const double h = 1.0 / 16;
    const SolveReport bilinear = solve_laplace_dirichlet(boundary("x1*x2", 2, h));
    CHECK(bilinear.converged);
    CHECK(bilinear.final_residual <= 1e-10);
    CHECK(max_error(bilinear.solution, "x1*x2") <= 1e-10);

    const SolveReport seven = solve_laplace_dirichlet(boundary("7", 2, h));
    CHECK(seven.converged);
    CHECK(max_error(seven.solution, "7") <= 1e-10);
    CHECK(max_principle_check(seven.solution).pass);

    const SolveReport cube = solve_laplace_dirichlet(boundary("x1^2 - x3^2 + x2", 3, 0.125));
    CHECK(cube.converged);
    CHECK(max_error(cube.solution, "x1^2 - x3^2 + x2") <= 1e-9);
}

TEST_CASE("Laplace solver converges at second order") {
    std::vector<double> errs;
    for (int n : {16, 32, 64}) {
        const SolveReport r = solve_laplace_dirichlet(boundary("exp(x1)*sin(x2)", 2, 1.0 / n));
        REQUIRE(r.converged);
        CHECK(r.final_residual <= 1e-10);
        CHECK(r.iterations <= 100000);
        CHECK(max_principle_check(r.solution).pass);
        errs.push_back(max_error(r.solution, "exp(x1)*sin(x2)"));
    }
    for (std::size_t i = 0; i + 1 < errs.size(); ++i) {
        CHECK(errs[i] / errs[i + 1] >= 3.4);
        CHECK(errs[i] / errs[i + 1] <= 4.6);
    }
}

TEST_CASE("Poisson solver") {
    const double h = 1.0 / 16;
    const GridFunction g = boundary("exp(x1)*sin(x2)", 2, h);
    const SolveReport lap = solve_laplace_dirichlet(g);
    const SolveReport poi = solve_poisson_dirichlet(GridFunction::zeros(g.spec()), g);
    CHECK(lap.iterations == poi.iterations);
    CHECK(lap.solution.values() == poi.solution.values());
    CHECK(lap.final_residual == poi.final_residual);

    const GridFunction one = sample(Expr::parse("1"), g.spec());
    const SolveReport quad = solve_poisson_dirichlet(one, boundary("(x1^2+x2^2)/4", 2, h));
    CHECK(quad.converged);
    CHECK(max_error(quad.solution, "(x1^2+x2^2)/4") <= 1e-10);

    std::vector<double> errs;
    for (int n : {16, 32, 64}) {
        const GridFunction gb = boundary("sin(x1)*sin(x2)", 2, 1.0 / n);
        const GridFunction f = sample(Expr::parse("-2*sin(x1)*sin(x2)"), gb.spec());
        const SolveReport r = solve_poisson_dirichlet(f, gb);
        REQUIRE(r.converged);
        errs.push_back(max_error(r.solution, "sin(x1)*sin(x2)"));
    }
    for (std::size_t i = 0; i + 1 < errs.size(); ++i) {
        CHECK(errs[i] / errs[i + 1] >= 3.4);
        CHECK(errs[i] / errs[i + 1] <= 4.6);
    }
}

TEST_CASE("solver superposition") {
    const double h = 1.0 / 16;
    const GridFunction g1 = boundary("exp(x1)*sin(x2)", 2, h);
    const GridFunction g2 = boundary("x1^3 + cos(3*x2)", 2, h);
    SolveOptions opt;
    const SolveReport a = solve_laplace_dirichlet(g1, opt);
    const SolveReport b = solve_laplace_dirichlet(g2, opt);
    const SolveReport ab = solve_laplace_dirichlet(combine(1, g1, 1, g2), opt);
    const GridFunction sum = combine(1, a.solution, 1, b.solution);
    // The solver stops on the scaled residual, so solution errors are at most
    // tol / lambda_min with lambda_min = 2 pi^2 the smallest eigenvalue of -Laplace.
    const double bound = 2 * opt.tol / (2 * M_PI * M_PI);
    CHECK((ab.solution.values() - sum.values()).cwiseAbs().maxCoeff() <= 2 * bound);
}

TEST_CASE("solver failure modes") {
    SolveOptions opt;
    opt.max_iter = 3;
    const SolveReport r = solve_laplace_dirichlet(boundary("exp(x1)*sin(x2)", 2, 1.0 / 32), opt);
    CHECK_FALSE(r.converged);
    CHECK(r.iterations == 3);
    CHECK(r.final_residual > opt.tol);
    CHECK_THROWS_AS(solve_laplace_dirichlet(GridFunction::zeros(GridSpec::cube(2, 0, 1, 2))), InputError);
    CHECK_THROWS_AS(solve_poisson_dirichlet(GridFunction::zeros(GridSpec::cube(2, 0, 0.5, 3)),
                                            GridFunction::zeros(GridSpec::cube(2, 0, 0.25, 5))),
                    InputError);
}

TEST_CASE("biharmonic splitting") {
    const double h = 1.0 / 16;
    for (const auto& [u, lap] : {std::pair{"x1^2 + x2^2", "4"}, std::pair{"x1^3 - 3*x1*x2^2", "0"}}) {
        const GridFunction gu = boundary(u, 2, h);
        const GridFunction gl = sample(Expr::parse(lap), gu.spec());
        const BiharmonicReport r = solve_biharmonic(GridFunction::zeros(gu.spec()), gu, gl);
        INFO(u);
        CHECK(r.converged);
        CHECK(r.laplacian.converged);
        CHECK(r.solution.converged);
        CHECK(max_error(r.laplacian.solution, lap) <= 1e-10);
        CHECK(max_error(r.solution.solution, u) <= 1e-10);
        // Composition of the two stages reproduces rhs = 0 up to stage tolerances.
        const Stencil c = centered_laplace_stencil(2, h, true);
        const GridFunction twice = apply(c, apply(c, r.solution.solution));
        CHECK(norm(twice, NormKind::Linf) <= 8 * 1e-10 / (h * h));
    }
}

TEST_CASE("biharmonic solution converges under refinement") {
    // sinh(x2) written out, the expression language has no hyperbolic functions
    const char* u = "x1*sin(x1)*(exp(x2)-exp(-x2))/2";
    const char* lap = "cos(x1)*(exp(x2)-exp(-x2))";
    const char* rhs = "0";
    std::vector<double> errs;
    for (int n : {8, 16, 32}) {
        const GridFunction gu = boundary(u, 2, 1.0 / n);
        const BiharmonicReport r = solve_biharmonic(sample(Expr::parse(rhs), gu.spec()), gu,
                                                    sample(Expr::parse(lap), gu.spec()));
        REQUIRE(r.converged);
        errs.push_back(max_error(r.solution.solution, u));
    }
    for (std::size_t i = 0; i + 1 < errs.size(); ++i) CHECK(std::log2(errs[i] / errs[i + 1]) >= 1.5);
}

TEST_CASE("mean value check") {
    const double h = 1.0 / 64;
    const GridSpec g = GridSpec::cube(2, 0, h, 65);
    const Eigen::Vector2d c(0.5, 0.5);
    const double harmonic = mean_value_check(sample(Expr::parse("x1^2 - x2^2"), g), c, 0.25);
    CHECK(harmonic <= 1e-2);
    CHECK(mean_value_check(sample(Expr::parse("3"), g), c, 0.25) <= 1e-14);
    // Oracle: mean of x1^2+x2^2 over the circle of radius r exceeds the center value by r^2.
    const double control = mean_value_check(sample(Expr::parse("x1^2 + x2^2"), g), c, 0.25);
    CHECK(control == doctest::Approx(0.0625).epsilon(0.01));
    CHECK(control >= 10 * harmonic);
    CHECK_THROWS_AS(mean_value_check(sample(Expr::parse("3"), g), c, 0.75), InputError);

    const GridSpec g3 = GridSpec::cube(3, 0, 1.0 / 32, 33);
    const Eigen::Vector3d c3(0.5, 0.5, 0.5);
    CHECK(mean_value_check(sample(Expr::parse("x1*x2 + x3"), g3), c3, 0.25, 512) <= 1e-2);
    CHECK(mean_value_check(sample(Expr::parse("x1^2 + x2^2 + x3^2"), g3), c3, 0.25, 512) ==
          doctest::Approx(0.0625).epsilon(0.02));
}

TEST_CASE("max principle check") {
    const GridSpec g = GridSpec::cube(2, 0, 0.25, 5);
    CHECK(max_principle_check(sample(Expr::parse("2"), g)).pass);
    Eigen::VectorXd v = sample(Expr::parse("x1*x2"), g).values();
    const Eigen::Index spike = g.flat(Eigen::Vector2i(2, 3));
    v[spike] = 10;
    const MaxPrincipleResult r = max_principle_check(GridFunction(g, v));
    CHECK_FALSE(r.pass);
    REQUIRE(r.witness.has_value());
    CHECK(*r.witness == spike);
    v[spike] = -10;
    CHECK(max_principle_check(GridFunction(g, v)).witness == spike);
}

TEST_CASE("Harnack dichotomy") {
    const GridSpec g = GridSpec::cube(2, 0, 1.0 / 16, 17);
    const GridFunction base = sample(Expr::parse("x1*x2"), g);

    std::vector<GridFunction> bounded;
    for (int k = 1; k <= 40; ++k) bounded.push_back(combine(1 - std::ldexp(1.0, -k), base, 0, base));
    const HarnackVerdict fin = harnack_limit(bounded, 2, 1e-10);
    CHECK(fin.outcome == HarnackOutcome::FiniteLimit);
    REQUIRE(fin.limit.has_value());
    CHECK(fin.limit_residual <= 1e-10);
    CHECK(fin.deviations.size() == 39);
    for (std::size_t i = 0; i + 1 < fin.deviations.size(); ++i) CHECK(fin.deviations[i + 1] <= fin.deviations[i]);

    std::vector<GridFunction> constants;
    for (int k = 1; k <= 5; ++k) constants.push_back(sample(Expr::constant(k), g));
    const HarnackVerdict div = harnack_limit(constants, 2, 1e-10);
    CHECK(div.outcome == HarnackOutcome::Divergent);
    CHECK(div.divergence_threshold == doctest::Approx(1e10));

    std::vector<GridFunction> broken = bounded;
    Eigen::VectorXd v = broken[2].values();
    v[40] -= 1.0;
    broken[2] = GridFunction(g, v);
    const HarnackVerdict bad = harnack_limit(broken, 2, 1e-10);
    CHECK(bad.outcome == HarnackOutcome::Violation);
    CHECK(bad.witness_step == 2);
    CHECK(bad.witness_node == 40);

    const std::vector<GridFunction> shortseq(bounded.begin(), bounded.begin() + 4);
    CHECK(harnack_limit(shortseq, 2, 1e-10).outcome == HarnackOutcome::Inconclusive);
    CHECK_THROWS_AS(harnack_limit({base, base}, 1, 1e-10), InputError);
    CHECK(to_string(HarnackOutcome::FiniteLimit) == "finite_limit");
}

TEST_CASE("harmonicity residual") {
    std::vector<GridSpec> boxes;
    for (int n : {8, 16, 32, 64}) boxes.push_back(GridSpec::cube(2, 0, 1.0 / n, n + 1));

    const OrderStudy exact = harmonicity_residual(Expr::parse("x1^2 - x2^2"), boxes);
    for (double v : exact.values) CHECK(v <= 1e-14);

    const OrderStudy smooth = harmonicity_residual(Expr::parse("exp(x1)*sin(x2)"), boxes);
    for (double o : smooth.orders) CHECK(o >= 1.9);
    REQUIRE(smooth.fitted_order.has_value());
    CHECK(*smooth.fitted_order >= 1.9);

    const OrderStudy quad = harmonicity_residual(Expr::parse("x1^2 + x2^2"), boxes);
    for (std::size_t i = 0; i < boxes.size(); ++i) {
        const double h = boxes[i].h();
        CHECK(quad.values[i] == doctest::Approx(4 * h * h).epsilon(1e-10));
    }
}

TEST_CASE("observed orders") {
    const OrderStudy s = observed_orders({0.1, 0.05, 0.025}, {1e-2, 2.5e-3, 6.25e-4});
    REQUIRE(s.orders.size() == 2);
    CHECK(s.orders[0] == doctest::Approx(2.0));
    CHECK(s.orders[1] == doctest::Approx(2.0));
    CHECK(*s.fitted_order == doctest::Approx(2.0));
    const OrderStudy z = observed_orders({0.1, 0.05}, {0.0, 0.0});
    CHECK(std::isnan(z.orders[0]));
}
