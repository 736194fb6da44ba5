#include "elastfem/reference.hpp"

#include <cmath>

#include "elastfem/quadrature.hpp"

namespace elastfem::ref {

LinearSystem assemble_scheme(const SchemeConfig& cfg, const Triangulation& mesh,
                             const BoundarySpec& bspec, const DofMap& dm) {
    cfg.validate(mesh, bspec);
    if (dm.layout != layout_for(cfg.scheme))
        throw ConfigError("dof map layout does not match the scheme");
    const unsigned terms = detail::scheme_terms(cfg.scheme);

    std::vector<Triplet> triplets;
    std::vector<double> rhs(static_cast<std::size_t>(dm.n_free), 0.0);
    for (int t = 0; t < mesh.n_cells(); ++t) {
        const auto lb = detail::local_block(mesh, &bspec, dm, cfg, t, terms);
        for (int i = 0; i < lb.n; ++i) {
            const int r = dm.free_index[static_cast<std::size_t>(lb.dofs[static_cast<std::size_t>(i)])];
            if (r < 0) continue;
            rhs[static_cast<std::size_t>(r)] += lb.b[static_cast<std::size_t>(i)];
            for (int j = 0; j < lb.n; ++j) {
                const int c = dm.free_index[static_cast<std::size_t>(lb.dofs[static_cast<std::size_t>(j)])];
                if (c >= 0)
                    triplets.push_back({r, c, lb.A[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]});
            }
        }
    }

    LinearSystem sys;
    sys.A = SparseMatrix::from_triplets(dm.n_free, dm.n_free, std::move(triplets));
    sys.A.finalize();
    sys.rhs = std::move(rhs);
    sys.free_to_raw = dm.free_dofs;
    sys.symmetric = scheme_is_symmetric(cfg.scheme);
    return sys;
}

double error_l2(const FeFunction& u_h, const VectorField& exact) {
    const Triangulation& mesh = *u_h.map->mesh;
    double s = 0.0;
    for (int t = 0; t < mesh.n_cells(); ++t) {
        const auto& c = mesh.cells[static_cast<std::size_t>(t)];
        const Vec2 a = mesh.vertices[c[0]], b = mesh.vertices[c[1]], d = mesh.vertices[c[2]];
        double cell = 0.0;
        for (const auto& q : tri_rule_deg6()) {
            const Vec2 x = q.l0 * a + q.l1 * b + q.l2 * d;
            const Vec2 diff = exact(x) - evaluate_unchecked(u_h, t, x).value;
            cell += q.w * dot(diff, diff);
        }
        s += cell * mesh.cell_area[static_cast<std::size_t>(t)];
    }
    return std::sqrt(s);
}

double error_h1_broken(const FeFunction& u_h, const MatrixField& exact_grad, bool include_rt) {
    const Triangulation& mesh = *u_h.map->mesh;
    const FeFunction fe = include_rt ? u_h : u_h.p1_part();
    double s = 0.0;
    for (int t = 0; t < mesh.n_cells(); ++t) {
        const auto& c = mesh.cells[static_cast<std::size_t>(t)];
        const Vec2 a = mesh.vertices[c[0]], b = mesh.vertices[c[1]], d = mesh.vertices[c[2]];
        double cell = 0.0;
        for (const auto& q : tri_rule_deg6()) {
            const Vec2 x = q.l0 * a + q.l1 * b + q.l2 * d;
            cell += q.w * frob2(exact_grad(x) - evaluate_unchecked(fe, t, x).gradient);
        }
        s += cell * mesh.cell_area[static_cast<std::size_t>(t)];
    }
    return std::sqrt(s);
}

double h1_seminorm_broken(const FeFunction& u_h, bool include_rt) {
    const Triangulation& mesh = *u_h.map->mesh;
    const FeFunction fe = include_rt ? u_h : u_h.p1_part();
    double s = 0.0;
    for (int t = 0; t < mesh.n_cells(); ++t) {
        const auto& c = mesh.cells[static_cast<std::size_t>(t)];
        const Vec2 a = mesh.vertices[c[0]], b = mesh.vertices[c[1]], d = mesh.vertices[c[2]];
        double cell = 0.0;
        for (const auto& q : tri_rule_deg2()) {
            const Vec2 x = q.l0 * a + q.l1 * b + q.l2 * d;
            cell += q.w * frob2(evaluate_unchecked(fe, t, x).gradient);
        }
        s += cell * mesh.cell_area[static_cast<std::size_t>(t)];
    }
    return std::sqrt(s);
}

} // namespace elastfem::ref
