#include "pdiff/cli.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "pdiff/classify.hpp"
#include "pdiff/error.hpp"
#include "pdiff/io.hpp"
#include "pdiff/mollify.hpp"
#include "pdiff/stencil.hpp"

namespace pdiff::cli {

namespace fs = std::filesystem;

namespace {

using io::format_number;

void require_input(const std::string& path) {
    if (path.empty()) return;
    std::error_code ec;
    if (!fs::is_regular_file(path, ec)) throw InputError("input file not found: " + path);
}

void require_output(const std::string& path) {
    if (path.empty()) return;
    const fs::path parent = fs::absolute(fs::path(path)).parent_path();
    std::error_code ec;
    if (!fs::is_directory(parent, ec)) throw InputError("output directory does not exist: " + parent.string());
}

std::string csv_row(const std::vector<std::string>& cells) {
    std::string row;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) row += ',';
        row += cells[i];
    }
    return row + '\n';
}

std::vector<std::string> point_cells(const Eigen::VectorXd& x) {
    std::vector<std::string> cells;
    for (Eigen::Index i = 0; i < x.size(); ++i) cells.push_back(format_number(x[i]));
    return cells;
}

std::string classify_header(int dim) {
    std::vector<std::string> cells;
    for (int i = 1; i <= dim; ++i) cells.push_back("x" + std::to_string(i));
    for (int i = 1; i <= dim; ++i) cells.push_back("lambda" + std::to_string(i));
    cells.push_back("label");
    return csv_row(cells);
}

std::string classify_row(const ClassifiedPoint& p) {
    std::vector<std::string> cells = point_cells(p.point);
    for (Eigen::Index i = 0; i < p.eigenvalues.size(); ++i) cells.push_back(format_number(p.eigenvalues[i]));
    cells.emplace_back(to_string(p.type));
    return csv_row(cells);
}

Problem parse_problem(const std::string& name) {
    if (name == "laplace") return Problem::Laplace;
    if (name == "poisson") return Problem::Poisson;
    if (name == "biharmonic") return Problem::Biharmonic;
    throw InputError("unknown problem '" + name + "' (expected laplace, poisson or biharmonic)");
}

Expr parse_option_expr(const std::string& flag, const std::string& text) {
    try {
        return Expr::parse(text);
    } catch (const SyntaxError& e) {
        throw InputError(flag + " \"" + text + "\": " + e.what());
    }
}

struct SolveOutcome {
    GridFunction solution;
    int iterations;
    double residual;
    bool converged;
};

SolveOutcome solve_problem(Problem problem, const GridSpec& spec, const Expr& boundary,
                           const std::optional<Expr>& rhs, const std::optional<Expr>& laplacian,
                           const SolveOptions& opt) {
    const GridFunction g = sample(boundary, spec);
    switch (problem) {
    case Problem::Laplace: {
        SolveReport r = solve_laplace_dirichlet(g, opt);
        return {std::move(r.solution), r.iterations, r.final_residual, r.converged};
    }
    case Problem::Poisson: {
        if (!rhs) throw InputError("poisson needs a right-hand side (--rhs)");
        SolveReport r = solve_poisson_dirichlet(sample(*rhs, spec), g, opt);
        return {std::move(r.solution), r.iterations, r.final_residual, r.converged};
    }
    case Problem::Biharmonic: {
        if (!laplacian) throw InputError("biharmonic needs boundary values of the Laplacian (--boundary-lap)");
        const GridFunction f = rhs ? sample(*rhs, spec) : GridFunction::zeros(spec);
        BiharmonicReport r = solve_biharmonic(f, g, sample(*laplacian, spec), opt);
        return {std::move(r.solution.solution), r.laplacian.iterations + r.solution.iterations,
                std::max(r.laplacian.final_residual, r.solution.final_residual), r.converged};
    }
    }
    throw InputError("unknown problem");
}

GridSpec unit_box(int dim, double h) {
    const double cells = 1.0 / h;
    const double rounded = std::round(cells);
    if (rounded < 2.0 || std::abs(cells - rounded) > 1e-9 * rounded)
        throw InputError("h=" + format_number(h) + " does not divide the unit box into >= 2 cells");
    return GridSpec::cube(dim, 0.0, 1.0 / rounded, static_cast<int>(rounded) + 1);
}

const char* kHelpFooter = R"(CSV headers:
  classify     x1..xn,lambda1..lambdan,label
  apply        l1,linf                      (only with --rhs)
  solve        problem,iterations,residual,converged[,wall_time]
  mollify      eps,radius_nodes,mass,raw_mass,support_radius,symmetry_error,min_value,support_violation
  verify       check,value,pass             (grid mode)
               h,residual,order             (expression mode)
  convergence  h,error,order,iterations
Exit codes: 0 success, 1 input or parse error, 2 numerical failure.)";

} // namespace

std::vector<ConvergenceRow> convergence_study(const ConvergenceProblem& p, const std::vector<double>& h) {
    if (h.size() < 2) throw InputError("convergence study needs at least two spacings");
    for (std::size_t i = 1; i < h.size(); ++i)
        if (!(h[i] < h[i - 1])) throw InputError("spacings must be strictly decreasing");

    std::vector<ConvergenceRow> rows;
    for (double hi : h) {
        const GridSpec spec = unit_box(p.dim, hi);
        SolveOutcome s = solve_problem(p.problem, spec, p.reference, p.rhs, p.laplacian, p.options);
        if (!s.converged)
            throw NumericalError("solve at h=" + format_number(hi) + " did not converge (residual " +
                                 format_number(s.residual) + ")");
        const GridFunction exact = sample(p.reference, spec);
        ConvergenceRow row;
        row.h = spec.h();
        row.error = (s.solution.values() - exact.values()).cwiseAbs().maxCoeff();
        row.iterations = s.iterations;
        row.converged = s.converged;
        rows.push_back(row);
    }
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double a = rows[i - 1].error;
        const double b = rows[i].error;
        if (a <= p.options.tol && b <= p.options.tol)
            rows[i].order = "exact";
        else if (a > 0.0 && b > 0.0)
            rows[i].order = format_number(std::log(a / b) / std::log(rows[i - 1].h / rows[i].h));
        else
            rows[i].order = "nan";
    }
    return rows;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Partial difference operators on uniform grids: classify, apply, solve, verify."};
    app.set_help_flag("--help", "Print this help message and exit");
    app.require_subcommand(1);
    app.footer(kHelpFooter);

    // classify
    auto* classify = app.add_subcommand("classify", "Label a stencil elliptic, hyperbolic or parabolic");
    std::string stencil_path;
    std::vector<double> at;
    std::string probe_path;
    double class_tol = 1e-9;
    classify->add_option("--stencil", stencil_path, "Stencil file")->required();
    classify->add_option("--at", at, "Point coordinates");
    classify->add_option("--probe", probe_path, "Grid file whose nodes are classified (values optional)");
    classify->add_option("--tol", class_tol, "Relative eigenvalue tolerance");

    // apply
    auto* apply_cmd = app.add_subcommand("apply", "Apply a stencil to a grid function");
    std::string apply_stencil, grid_path, out_path, rhs_path, expr_text;
    apply_cmd->add_option("--stencil", apply_stencil, "Stencil file")->required();
    apply_cmd->add_option("--grid", grid_path, "Grid file")->required();
    apply_cmd->add_option("--expr", expr_text, "Sample this expression on the grid instead of its values");
    apply_cmd->add_option("--out", out_path, "Output grid file")->required();
    apply_cmd->add_option("--rhs", rhs_path, "Grid file to compare against; prints residual norms");

    // solve
    auto* solve = app.add_subcommand("solve", "Dirichlet solve: laplace, poisson or biharmonic");
    std::string problem_name, boundary_text, solve_rhs_text, boundary_lap_text;
    std::string solve_grid, solve_out = "solution.grd";
    SolveOptions solve_opt;
    bool timing = false;
    solve->add_option("problem", problem_name, "laplace | poisson | biharmonic")->required();
    solve->add_option("--grid", solve_grid, "Grid file giving the box (values optional)")->required();
    solve->add_option("--boundary", boundary_text, "Boundary values of u, as an expression")->required();
    solve->add_option("--rhs", solve_rhs_text, "Right-hand side expression");
    solve->add_option("--boundary-lap", boundary_lap_text, "Boundary values of Laplace(u) (biharmonic)");
    solve->add_option("--tol", solve_opt.tol, "Residual tolerance");
    solve->add_option("--max-iter", solve_opt.max_iter, "Iteration cap");
    solve->add_option("--out", solve_out, "Solution grid file");
    solve->add_flag("--timing", timing, "Append wall time to the report");

    // mollify
    auto* mollify = app.add_subcommand("mollify", "Convolve a grid function with the bump mollifier");
    std::string moll_grid, moll_out, moll_report;
    double moll_eps = 0.0;
    int refine = 8;
    mollify->add_option("--grid", moll_grid, "Grid file")->required();
    mollify->add_option("--eps", moll_eps, "Mollifier radius")->required();
    mollify->add_option("--refine", refine, "Quadrature panels per cell for the normalization");
    mollify->add_option("--out", moll_out, "Smoothed grid file")->required();
    mollify->add_option("--report", moll_report, "Kernel audit CSV (stdout if omitted)");

    // potential
    auto* potential = app.add_subcommand("potential", "Newtonian potential of a compactly supported source");
    std::string pot_grid, pot_targets, pot_out;
    potential->add_option("--grid", pot_grid, "Source grid file")->required();
    potential->add_option("--targets", pot_targets, "Target grid file (values optional)")->required();
    potential->add_option("--out", pot_out, "Potential grid file")->required();

    // verify
    auto* verify = app.add_subcommand("verify", "Harmonicity checks on a grid file or an expression");
    std::string ver_grid, ver_expr;
    std::vector<double> ver_center, ver_h;
    double ver_radius = 0.0;
    int ver_dim = 2;
    double ver_tol = 1e-8;
    verify->add_option("--grid", ver_grid, "Grid file: max principle, Laplacian residual, mean value");
    verify->add_option("--center", ver_center, "Mean-value sphere center");
    verify->add_option("--radius", ver_radius, "Mean-value sphere radius");
    verify->add_option("--tol", ver_tol, "Pass threshold for the residual and mean-value checks");
    verify->add_option("--expr", ver_expr, "Expression: forward Laplacian residual over --h on [0,1]^dim");
    verify->add_option("--h", ver_h, "Spacings for expression mode");
    verify->add_option("--dim", ver_dim, "Dimension for expression mode");

    // convergence
    auto* conv = app.add_subcommand("convergence", "Grid convergence study against an analytic solution");
    std::string conv_problem = "laplace", conv_ref, conv_rhs, conv_lap;
    std::vector<double> conv_h;
    ConvergenceProblem study;
    conv->add_option("--problem", conv_problem, "laplace | poisson | biharmonic");
    conv->add_option("--reference", conv_ref, "Exact solution expression")->required();
    conv->add_option("--rhs", conv_rhs, "Right-hand side expression");
    conv->add_option("--lap", conv_lap, "Laplacian of the reference (biharmonic)");
    conv->add_option("--h", conv_h, "Strictly decreasing spacings")->required();
    conv->add_option("--dim", study.dim, "Dimension of the unit box");
    conv->add_option("--tol", study.options.tol, "Solver tolerance");
    conv->add_option("--max-iter", study.options.max_iter, "Iteration cap");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kInputError;
    }

    try {
        if (classify->parsed()) {
            require_input(stencil_path);
            require_input(probe_path);
            const io::StencilFile file = io::read_stencil_file(fs::path(stencil_path));
            if (at.empty() == probe_path.empty())
                throw InputError("classify needs exactly one of --at or --probe");
            std::string csv = classify_header(file.dim);
            if (!at.empty()) {
                if (static_cast<int>(at.size()) != file.dim)
                    throw InputError("--at needs " + std::to_string(file.dim) + " coordinates");
                const Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(at.data(), file.dim);
                csv += classify_row(classify_at(file.op, x, class_tol));
            } else {
                const ClassificationReport rep =
                    classify_region(file.op, io::read_grid_spec(fs::path(probe_path)), class_tol);
                for (const auto& p : rep.points) csv += classify_row(p);
                err << "elliptic " << rep.count(OperatorType::Elliptic) << ", hyperbolic "
                    << rep.count(OperatorType::Hyperbolic) << ", parabolic "
                    << rep.count(OperatorType::Parabolic) << "\n";
            }
            out << csv;
            return kOk;
        }

        if (apply_cmd->parsed()) {
            require_input(apply_stencil);
            require_input(grid_path);
            require_input(rhs_path);
            require_output(out_path);
            const Stencil s = io::to_stencil(io::read_stencil_file(fs::path(apply_stencil)), apply_stencil);
            const GridFunction u = expr_text.empty()
                                       ? io::read_grid(fs::path(grid_path))
                                       : sample(parse_option_expr("--expr", expr_text),
                                                io::read_grid_spec(fs::path(grid_path)));
            const GridFunction result = apply(s, u);
            std::string csv;
            if (!rhs_path.empty()) {
                const Residual r = residual(s, u, io::read_grid(fs::path(rhs_path)));
                csv = csv_row({"l1", "linf"}) + csv_row({format_number(r.l1), format_number(r.linf)});
            }
            io::write_file_atomic(out_path, io::format_grid(result));
            out << csv;
            return kOk;
        }

        if (solve->parsed()) {
            require_input(solve_grid);
            require_output(solve_out);
            const Problem problem = parse_problem(problem_name);
            const Expr boundary = parse_option_expr("--boundary", boundary_text);
            std::optional<Expr> rhs, lap;
            if (!solve_rhs_text.empty()) rhs = parse_option_expr("--rhs", solve_rhs_text);
            if (!boundary_lap_text.empty()) lap = parse_option_expr("--boundary-lap", boundary_lap_text);
            const GridSpec spec = io::read_grid_spec(fs::path(solve_grid));

            const auto start = std::chrono::steady_clock::now();
            SolveOutcome s = solve_problem(problem, spec, boundary, rhs, lap, solve_opt);
            const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            if (!s.converged) {
                err << "error: " << problem_name << " solve did not converge in " << s.iterations
                    << " iterations (best residual " << format_number(s.residual) << ")\n";
                return kNumericalError;
            }
            io::write_file_atomic(solve_out, io::format_grid(s.solution));
            std::vector<std::string> header{"problem", "iterations", "residual", "converged"};
            std::vector<std::string> row{problem_name, std::to_string(s.iterations), format_number(s.residual), "1"};
            if (timing) {
                header.push_back("wall_time");
                row.push_back(format_number(wall));
            }
            out << csv_row(header) << csv_row(row);
            return kOk;
        }

        if (mollify->parsed()) {
            require_input(moll_grid);
            require_output(moll_out);
            require_output(moll_report);
            const GridFunction f = io::read_grid(fs::path(moll_grid));
            const MollifierKernel k = make_mollifier(f.spec().dim(), moll_eps, f.spec().h(), refine);
            const GridFunction smoothed = convolve(f, k);
            const KernelAudit a = audit(k);
            const std::string csv =
                csv_row({"eps", "radius_nodes", "mass", "raw_mass", "support_radius", "symmetry_error",
                         "min_value", "support_violation"}) +
                csv_row({format_number(k.eps), std::to_string(k.radius), format_number(k.mass),
                         format_number(k.raw_mass), format_number(a.support_radius),
                         format_number(a.symmetry_error), format_number(a.min_value),
                         format_number(a.support_violation)});
            io::write_file_atomic(moll_out, io::format_grid(smoothed));
            if (moll_report.empty())
                out << csv;
            else
                io::write_file_atomic(moll_report, csv);
            return kOk;
        }

        if (potential->parsed()) {
            require_input(pot_grid);
            require_input(pot_targets);
            require_output(pot_out);
            const GridFunction f = io::read_grid(fs::path(pot_grid));
            const GridSpec targets = io::read_grid_spec(fs::path(pot_targets));
            const GridFunction u = newtonian_potential(FundamentalSolution(f.spec().dim()), f, targets);
            io::write_file_atomic(pot_out, io::format_grid(u));
            return kOk;
        }

        if (verify->parsed()) {
            if (ver_grid.empty() == ver_expr.empty())
                throw InputError("verify needs exactly one of --grid or --expr");
            if (!ver_grid.empty()) {
                require_input(ver_grid);
                const GridFunction u = io::read_grid(fs::path(ver_grid));
                std::string csv = csv_row({"check", "value", "pass"});
                const MaxPrincipleResult mp = max_principle_check(u);
                csv += csv_row({"max_principle", mp.witness ? std::to_string(*mp.witness) : "-1",
                                mp.pass ? "1" : "0"});
                const Stencil lap = centered_laplace_stencil(u.spec().dim(), u.spec().h(), true);
                const double res = norm(apply(lap, u), NormKind::Linf);
                csv += csv_row({"laplace_residual", format_number(res), res <= ver_tol ? "1" : "0"});
                if (!ver_center.empty()) {
                    if (static_cast<int>(ver_center.size()) != u.spec().dim())
                        throw InputError("--center has the wrong dimension");
                    const Eigen::VectorXd c = Eigen::Map<const Eigen::VectorXd>(ver_center.data(), u.spec().dim());
                    const double dev = mean_value_check(u, c, ver_radius);
                    csv += csv_row({"mean_value", format_number(dev), dev <= ver_tol ? "1" : "0"});
                }
                out << csv;
                return mp.pass ? kOk : kNumericalError;
            }
            if (ver_h.empty()) throw InputError("expression mode needs --h");
            std::vector<GridSpec> boxes;
            for (double h : ver_h) boxes.push_back(unit_box(ver_dim, h));
            const OrderStudy st = harmonicity_residual(parse_option_expr("--expr", ver_expr), boxes);
            std::string csv = csv_row({"h", "residual", "order"});
            for (std::size_t i = 0; i < st.h.size(); ++i) {
                std::string order;
                if (i > 0) order = std::isnan(st.orders[i - 1]) ? "nan" : format_number(st.orders[i - 1]);
                csv += csv_row({format_number(st.h[i]), format_number(st.values[i]), order});
            }
            out << csv;
            return kOk;
        }

        if (conv->parsed()) {
            study.problem = parse_problem(conv_problem);
            study.reference = parse_option_expr("--reference", conv_ref);
            if (!conv_rhs.empty()) study.rhs = parse_option_expr("--rhs", conv_rhs);
            if (!conv_lap.empty()) study.laplacian = parse_option_expr("--lap", conv_lap);
            const auto rows = convergence_study(study, conv_h);
            std::string csv = csv_row({"h", "error", "order", "iterations"});
            for (const auto& r : rows)
                csv += csv_row({format_number(r.h), format_number(r.error), r.order, std::to_string(r.iterations)});
            out << csv;
            return kOk;
        }
    } catch (const InputError& e) {
        err << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const NumericalError& e) {
        err << "error: " << e.what() << "\n";
        return kNumericalError;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kInputError;
    }
    return kInputError;
}

} // namespace pdiff::cli
