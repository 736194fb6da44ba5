#include "elastfem/experiments.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "elastfem/linalg.hpp"

namespace elastfem {

std::string GridLadder::id() const {
    if (structured) return "structured:" + std::to_string(base_n);
    std::string s = "file:";
    for (std::size_t i = 0; i < files.size(); ++i) {
        if (i) s += ',';
        s += files[i].first;
    }
    return s;
}

Triangulation GridLadder::build(int level) const {
    if (structured) return generate_structured_unit_square(base_n << level);
    const auto& [node, ele] = files[static_cast<std::size_t>(level)];
    return load_mesh(node, ele);
}

BcKind bc_from_string(const std::string& s) {
    if (s == "dirichlet") return BcKind::dirichlet;
    if (s == "mixed-right") return BcKind::mixed_right;
    throw ConfigError("unknown boundary condition '" + s + "'");
}

FeFunction solve_scheme(const SchemeConfig& cfg, const Triangulation& mesh,
                        const BoundarySpec& bspec, const DofMap& dm, SolveStats* stats) {
    const auto t0 = std::chrono::steady_clock::now();
    const LinearSystem sys = assemble_scheme(cfg, mesh, bspec, dm);
    const auto x = solve_direct(sys.A, sys.rhs, sys.symmetric);
    const double res = relative_residual(sys.A, x, sys.rhs);
    if (res > 1e-10 && backward_error(sys.A, x, sys.rhs) > 8.0 * 2.220446049250313e-16)
        throw LinalgError("solve_scheme: residual contract violated");
    const auto t1 = std::chrono::steady_clock::now();
    if (stats) {
        stats->seconds = std::chrono::duration<double>(t1 - t0).count();
        stats->residual = res;
    }
    FeFunction fe = FeFunction::zeros(dm);
    for (std::size_t i = 0; i < x.size(); ++i)
        fe.coef[static_cast<std::size_t>(dm.free_dofs[i])] = x[i];
    return fe;
}

ExperimentReport run_convergence(const SchemeConfig& cfg_in, const GridLadder& grid, BcKind bc,
                                 bool h1_include_rt, const FieldSink& sink) {
    const auto ms = ManufacturedSolution::trig_unit_square(cfg_in.lambda, cfg_in.mu);
    SchemeConfig cfg = cfg_in;
    cfg.body_force = [ms](Vec2 p) { return ms.body_force(p); };

    ExperimentReport report;
    report.name = to_string(cfg.scheme);
    report.grid = grid.id();

    std::vector<double> l2s, h1s;
    std::vector<long long> ndofs;
    const int levels = grid.n_levels();
    for (int k = 0; k < levels; ++k) {
        const Triangulation mesh = grid.build(k);
        const BoundarySpec bspec =
            bc == BcKind::dirichlet
                ? BoundarySpec::pure_dirichlet(mesh)
                : BoundarySpec::mixed_right(
                      mesh, [ms](Vec2 p) { return ms.traction(p, Vec2{1.0, 0.0}); });
        const DofMap dm = DofMap::build(mesh, bspec, layout_for(cfg.scheme));
        SolveStats stats;
        const FeFunction u = solve_scheme(cfg, mesh, bspec, dm, &stats);

        ConvRow row;
        row.ndof = dm.reported_ndof;
        row.h = mesh.max_h();
        row.l2 = error_l2(u, ms.u);
        row.h1 = error_h1_broken(u, ms.grad_u, h1_include_rt);
        row.seconds = stats.seconds;
        report.conv.push_back(row);
        l2s.push_back(row.l2);
        h1s.push_back(row.h1);
        ndofs.push_back(row.ndof);

        if (sink && k == levels - 1) sink(mesh, dm, u);
    }

    if (report.conv.size() >= 2) {
        const auto l2r = grid.structured ? convergence_rates_structured(l2s)
                                         : convergence_rates_ndof(l2s, ndofs);
        const auto h1r = grid.structured ? convergence_rates_structured(h1s)
                                         : convergence_rates_ndof(h1s, ndofs);
        for (std::size_t k = 1; k < report.conv.size(); ++k) {
            report.conv[k].l2_rate = l2r[k - 1];
            report.conv[k].h1_rate = h1r[k - 1];
        }
    }
    return report;
}

ExperimentReport run_gradrobust(const std::vector<double>& lambdas,
                                const std::vector<double>& mus, const GridLadder& grid,
                                ARVariant ar, double alpha) {
    ExperimentReport report;
    report.name = "s1";
    report.grid = grid.id();
    for (double lambda : lambdas) {
        for (double mu : mus) {
            SchemeConfig cfg;
            cfg.scheme = Scheme::s1;
            cfg.ar = ar;
            cfg.alpha = alpha;
            cfg.lambda = lambda;
            cfg.mu = mu;
            cfg.body_force = sextic_gradient_force;
            for (int k = 0; k < grid.n_levels(); ++k) {
                const Triangulation mesh = grid.build(k);
                const BoundarySpec bspec = BoundarySpec::pure_dirichlet(mesh);
                const DofMap dm = DofMap::build(mesh, bspec, DofLayout::p1_rt0);
                const FeFunction u = solve_scheme(cfg, mesh, bspec, dm);
                report.sweep.push_back({lambda, mu, dm.reported_ndof, h1_seminorm_broken(u)});
            }
        }
    }
    return report;
}

std::array<Vec2, 4> cooks_corners() {
    return {Vec2{0.0, 0.0}, Vec2{48.0, 44.0}, Vec2{48.0, 60.0}, Vec2{0.0, 44.0}};
}

BoundarySpec cooks_boundary(const Triangulation& mesh) {
    BoundarySpec b;
    b.kind = BoundarySpec::Kind::mixed;
    b.neumann.assign(static_cast<std::size_t>(mesh.n_edges()), false);
    for (int e = 0; e < mesh.n_edges(); ++e)
        if (mesh.is_boundary_edge(e) &&
            mesh.boundary_marker[static_cast<std::size_t>(e)] != boundary_marker::left)
            b.neumann[static_cast<std::size_t>(e)] = true;
    const double xtol = 48.0 * (1.0 - 1e-6);
    b.traction = [xtol](Vec2 p) {
        return p.x > xtol ? Vec2{0.0, 1.0 / 16.0} : Vec2{0.0, 0.0};
    };
    return b;
}

std::pair<double, double> lame_from_poisson(double E, double nu) {
    return {E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu)), E / (2.0 * (1.0 + nu))};
}

ExperimentReport run_cooks(const std::vector<double>& nus, const std::vector<Scheme>& schemes,
                           int base_n, int levels, ARVariant ar, double alpha,
                           const CooksFieldSink& sink) {
    ExperimentReport report;
    report.name = "cooks";
    report.grid = "cook:" + std::to_string(base_n);
    for (Scheme scheme : schemes) {
        if (scheme == Scheme::s1 || scheme == Scheme::cr)
            throw ConfigError("the membrane problem has a traction boundary; scheme " +
                              std::string(to_string(scheme)) + " does not apply");
        for (double nu : nus) {
            const auto [lambda, mu] = lame_from_poisson(1.0, nu);
            SchemeConfig cfg;
            cfg.scheme = scheme;
            cfg.ar = ar;
            cfg.alpha = alpha;
            cfg.lambda = lambda;
            cfg.mu = mu; // f = 0
            for (int k = 0; k < levels; ++k) {
                const int n = base_n << k;
                const Triangulation mesh = generate_mapped_quad(cooks_corners(), n, n);
                const BoundarySpec bspec = cooks_boundary(mesh);
                const DofMap dm = DofMap::build(mesh, bspec, layout_for(scheme));
                const FeFunction u = solve_scheme(cfg, mesh, bspec, dm);

                // y-displacement of the vertex at the top right corner
                const Vec2 tip{48.0, 60.0};
                int best = 0;
                double best_d = 1e300;
                for (int v = 0; v < mesh.n_vertices(); ++v) {
                    const double d = norm(mesh.vertices[static_cast<std::size_t>(v)] - tip);
                    if (d < best_d) {
                        best_d = d;
                        best = v;
                    }
                }
                report.cooks.push_back(
                    {to_string(scheme), nu, n, dm.reported_ndof, u.p1(best, 1)});
                if (sink && k == levels - 1) sink(to_string(scheme), nu, n, mesh, dm, u);
            }
        }
    }
    return report;
}

std::vector<double> dilation_field(const FeFunction& u) {
    const Triangulation& mesh = *u.map->mesh;
    std::vector<double> d(static_cast<std::size_t>(mesh.n_cells()));
    for (int t = 0; t < mesh.n_cells(); ++t)
        d[static_cast<std::size_t>(t)] = cell_divergence(u, t);
    return d;
}

int count_dilation_oscillation_edges(const Triangulation& mesh,
                                     const std::vector<double>& dilation, double magnitude_frac,
                                     const std::vector<Vec2>& excluded, double radius) {
    double dmax = 0.0;
    for (double v : dilation) dmax = std::max(dmax, std::abs(v));
    const double threshold = magnitude_frac * dmax;
    int count = 0;
    for (int e = 0; e < mesh.n_edges(); ++e) {
        const auto& ec = mesh.edge_cells[static_cast<std::size_t>(e)];
        if (ec[1] < 0) continue;
        const double a = dilation[static_cast<std::size_t>(ec[0])];
        const double b = dilation[static_cast<std::size_t>(ec[1])];
        if (!(a * b < 0.0)) continue;
        if (std::min(std::abs(a), std::abs(b)) <= threshold) continue;
        const Vec2 mid = mesh.edge_midpoint(e);
        bool near = false;
        for (const Vec2& p : excluded)
            if (norm(mid - p) < radius) near = true;
        if (!near) ++count;
    }
    return count;
}

} // namespace elastfem
