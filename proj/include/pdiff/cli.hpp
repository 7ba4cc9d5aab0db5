#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pdiff/elliptic.hpp"
#include "pdiff/expr.hpp"

namespace pdiff::cli {

/// Exit codes of `run`.
inline constexpr int kOk = 0;
inline constexpr int kInputError = 1;
inline constexpr int kNumericalError = 2;

/// Entry point of the `pdiff` tool. Results go to `out` or to files,
/// diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

enum class Problem { Laplace, Poisson, Biharmonic };

/// Dirichlet problem on the unit box [0, 1]^dim with an analytic reference.
struct ConvergenceProblem {
    Problem problem = Problem::Laplace;
    int dim = 2;
    Expr reference;                 // exact solution, also the boundary data
    std::optional<Expr> rhs;        // f for Poisson, Laplace(Laplace u) for biharmonic
    std::optional<Expr> laplacian;  // Laplace(u), boundary data of the first biharmonic stage
    SolveOptions options;
};

struct ConvergenceRow {
    double h = 0.0;
    double error = 0.0;  // linf of solution - reference over every node
    std::string order;   // "" on the first row, "exact", or the observed order
    int iterations = 0;
    bool converged = false;
};

/// Solves on each spacing (strictly decreasing, at least two, 1/h integral)
/// and reports errors with observed orders log(e_i / e_{i+1}) / log(h_i / h_{i+1}).
/// Pairs whose errors are both within the solver tolerance are "exact".
std::vector<ConvergenceRow> convergence_study(const ConvergenceProblem& problem,
                                              const std::vector<double>& h);

} // namespace pdiff::cli
