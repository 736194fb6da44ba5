// Experiment driver: convergence tables, robustness sweeps, the membrane
// benchmark, and mesh statistics. See README.md for invocations.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "elastfem/exportio.hpp"
#include "elastfem/experiments.hpp"

namespace {

using namespace elastfem;

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) out.push_back(std::stod(tok));
    if (out.empty()) throw ConfigError("empty numeric list '" + s + "'");
    return out;
}

GridLadder parse_grid(const std::string& s, int levels) {
    GridLadder g;
    g.levels = levels;
    if (s.rfind("structured:", 0) == 0) {
        g.structured = true;
        g.base_n = std::stoi(s.substr(11));
        if (g.base_n < 1) throw ConfigError("grid size must be >= 1");
        return g;
    }
    if (s.rfind("file:", 0) == 0) {
        g.structured = false;
        std::stringstream ss(s.substr(5));
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            if (tok.empty()) continue;
            std::string ele = tok;
            const auto pos = ele.rfind(".node");
            if (pos == ele.size() - 5)
                ele = ele.substr(0, pos) + ".ele";
            else
                ele += ".ele";
            g.files.emplace_back(tok, ele);
        }
        if (g.files.empty()) throw ConfigError("no mesh files in '" + s + "'");
        return g;
    }
    throw ConfigError("grid must be structured:N or file:PATH[,PATH...]");
}

std::string fmt_rate(double v) {
    if (std::isnan(v)) return "-";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

void print_convergence(const ExperimentReport& r) {
    std::cout << "# scheme " << r.name << " on " << r.grid << "\n";
    std::printf("%10s %12s %12s %8s %12s %8s %10s\n", "ndof", "h", "l2_error", "rate",
                "h1_error", "rate", "seconds");
    for (const auto& row : r.conv)
        std::printf("%10lld %12.4e %12.4e %8s %12.4e %8s %10.3f\n", row.ndof, row.h, row.l2,
                    fmt_rate(row.l2_rate).c_str(), row.h1, fmt_rate(row.h1_rate).c_str(),
                    row.seconds);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"2D locking-free linear elasticity experiments (P1+RT0 and baselines)"};
    app.require_subcommand(1);

    std::string scheme_s = "s1", ar_s = "adiv", grid_s = "structured:8";
    std::string bc_s = "dirichlet", out_path, vtk_path, h1_s = "full";
    std::string lambda_s = "1", mu_s = "1", nu_s = "0.33";
    double alpha = 1.0, alpha_gn = -1.0;
    int levels = 5, cook_n = 8;

    auto* conv = app.add_subcommand("convergence", "error table against the exact solution");
    conv->add_option("--scheme", scheme_s, "s1|s2|s3|s4|s4sym|naive|p1|br|cr");
    conv->add_option("--ar", ar_s, "a0|ad|adiv");
    conv->add_option("--alpha", alpha, "stabilization weight");
    conv->add_option("--alpha-gn", alpha_gn, "override weight on traction-adjacent cells");
    conv->add_option("--lambda", lambda_s, "first Lame constant");
    conv->add_option("--mu", mu_s, "shear modulus");
    conv->add_option("--grid", grid_s, "structured:N or file:PATH[,PATH...]");
    conv->add_option("--levels", levels, "refinement levels (structured grids)");
    conv->add_option("--bc", bc_s, "dirichlet|mixed-right");
    conv->add_option("--out", out_path, "write CSV here");
    conv->add_option("--vtk", vtk_path, "write finest-level VTK here");
    conv->add_option("--h1", h1_s, "full|p1only broken gradient in the H1 error");

    auto* grad = app.add_subcommand("gradrobust", "|grad u_h| sweep for a gradient body force");
    grad->add_option("--lambda", lambda_s, "comma list of lambda values");
    grad->add_option("--mu", mu_s, "comma list of mu values");
    grad->add_option("--ar", ar_s, "a0|ad|adiv");
    grad->add_option("--alpha", alpha, "stabilization weight");
    grad->add_option("--grid", grid_s, "structured:N or file:PATH[,PATH...]");
    grad->add_option("--levels", levels, "refinement levels");
    grad->add_option("--out", out_path, "write CSV here");

    auto* cook = app.add_subcommand("cooks", "membrane benchmark: tip deflection and dilation");
    cook->add_option("--scheme", scheme_s, "comma list, e.g. s2,p1");
    cook->add_option("--nu", nu_s, "comma list of Poisson ratios");
    cook->add_option("--n", cook_n, "base grid size");
    cook->add_option("--levels", levels, "ladder length");
    cook->add_option("--ar", ar_s, "a0|ad|adiv");
    cook->add_option("--alpha", alpha, "stabilization weight");
    cook->add_option("--out", out_path, "write CSV here");
    cook->add_option("--vtk", vtk_path, "VTK path prefix for finest-level fields");

    auto* info = app.add_subcommand("meshinfo", "mesh statistics dump");
    info->add_option("--grid", grid_s, "structured:N or file:PATH");

    CLI11_PARSE(app, argc, argv);

    try {
        if (conv->parsed()) {
            const auto lambdas = parse_list(lambda_s);
            const auto mus = parse_list(mu_s);
            if (lambdas.size() != 1 || mus.size() != 1)
                throw ConfigError("convergence takes a single --lambda and --mu");
            SchemeConfig cfg;
            cfg.scheme = scheme_from_string(scheme_s);
            cfg.ar = ar_from_string(ar_s);
            cfg.alpha = alpha;
            cfg.lambda = lambdas[0];
            cfg.mu = mus[0];
            const BcKind bc = bc_from_string(bc_s);
            if (scheme_needs_neumann(cfg.scheme) && bc != BcKind::mixed_right)
                throw ConfigError("scheme " + scheme_s + " requires --bc mixed-right");
            if (!scheme_needs_neumann(cfg.scheme) && bc != BcKind::dirichlet)
                throw ConfigError("scheme " + scheme_s + " requires --bc dirichlet");
            if (h1_s != "full" && h1_s != "p1only")
                throw ConfigError("--h1 must be full or p1only");

            cfg.alpha_neumann = alpha_gn;
            const GridLadder grid = parse_grid(grid_s, levels);
            FieldSink sink;
            if (!vtk_path.empty())
                sink = [&](const Triangulation& mesh, const DofMap&, const FeFunction& u) {
                    write_text(vtk_path, vtk_string(mesh, u, "displacement field"));
                };
            const ExperimentReport rep = run_convergence(cfg, grid, bc, h1_s == "full", sink);
            print_convergence(rep);
            if (!out_path.empty()) write_text(out_path, convergence_csv(rep));
        } else if (grad->parsed()) {
            const GridLadder grid = parse_grid(grid_s, levels);
            const auto rep = run_gradrobust(parse_list(lambda_s), parse_list(mu_s), grid,
                                            ar_from_string(ar_s), alpha);
            std::cout << "# gradient body force sweep on " << rep.grid << "\n";
            std::printf("%12s %12s %10s %14s\n", "lambda", "mu", "ndof", "h1_semi_norm");
            for (const auto& r : rep.sweep)
                std::printf("%12.4g %12.4g %10lld %14.6e\n", r.lambda, r.mu, r.ndof, r.h1_semi);
            if (!out_path.empty()) write_text(out_path, sweep_csv(rep));
        } else if (cook->parsed()) {
            std::vector<Scheme> schemes;
            {
                std::stringstream ss(scheme_s);
                std::string tok;
                while (std::getline(ss, tok, ','))
                    if (!tok.empty()) schemes.push_back(scheme_from_string(tok));
            }
            CooksFieldSink sink;
            if (!vtk_path.empty())
                sink = [&](const std::string& sname, double nu, int n, const Triangulation& mesh,
                           const DofMap&, const FeFunction& u) {
                    std::ostringstream name;
                    name << vtk_path << "_" << sname << "_nu" << nu << "_n" << n << ".vtk";
                    write_text(name.str(), vtk_string(mesh, u, "membrane dilation"));
                };
            const auto rep = run_cooks(parse_list(nu_s), schemes, cook_n, levels,
                                       ar_from_string(ar_s), alpha, sink);
            std::cout << "# membrane benchmark\n";
            std::printf("%8s %8s %6s %10s %14s\n", "scheme", "nu", "n", "ndof", "tip_y");
            for (const auto& r : rep.cooks)
                std::printf("%8s %8.4f %6d %10lld %14.6e\n", r.scheme.c_str(), r.nu, r.n,
                            r.ndof, r.tip_y);
            if (!out_path.empty()) write_text(out_path, cooks_csv(rep));
        } else if (info->parsed()) {
            const GridLadder grid = parse_grid(grid_s, 1);
            const Triangulation mesh = grid.build(0);
            std::cout << describe(mesh);
        }
    } catch (const MeshError& e) {
        std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
