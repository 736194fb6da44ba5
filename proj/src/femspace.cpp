#include "elastfem/femspace.hpp"

#include <cmath>
#include <stdexcept>

#include "elastfem/quadrature.hpp"

namespace elastfem {

DofMap DofMap::build(const Triangulation& mesh, const BoundarySpec& bspec, DofLayout layout) {
    DofMap dm;
    dm.mesh = &mesh;
    dm.layout = layout;
    const int nv = mesh.n_vertices();
    const int ne = mesh.n_edges();

    dm.dirichlet_vertex.assign(static_cast<std::size_t>(nv), 0);
    for (int e = 0; e < ne; ++e) {
        if (bspec.is_dirichlet_edge(mesh, e)) {
            dm.dirichlet_vertex[static_cast<std::size_t>(mesh.edges[e][0])] = 1;
            dm.dirichlet_vertex[static_cast<std::size_t>(mesh.edges[e][1])] = 1;
        }
    }

    switch (layout) {
    case DofLayout::p1:
        dm.n_raw = 2 * nv;
        dm.reported_ndof = 2LL * nv;
        break;
    case DofLayout::p1_rt0:
    case DofLayout::br:
        dm.n_raw = 2 * nv + ne;
        dm.reported_ndof = 2LL * nv + ne;
        break;
    case DofLayout::cr:
        dm.n_raw = 2 * ne;
        dm.reported_ndof = 2LL * ne;
        break;
    }

    dm.constrained.assign(static_cast<std::size_t>(dm.n_raw), 0);
    if (dm.has_vertex_block()) {
        for (int v = 0; v < nv; ++v)
            if (dm.dirichlet_vertex[static_cast<std::size_t>(v)]) {
                dm.constrained[static_cast<std::size_t>(dm.vdof(v, 0))] = 1;
                dm.constrained[static_cast<std::size_t>(dm.vdof(v, 1))] = 1;
            }
    }
    if (dm.has_edge_scalar()) {
        for (int e = 0; e < ne; ++e)
            if (bspec.is_dirichlet_edge(mesh, e))
                dm.constrained[static_cast<std::size_t>(dm.edof(e))] = 1;
    }
    if (layout == DofLayout::cr) {
        for (int e = 0; e < ne; ++e)
            if (bspec.is_dirichlet_edge(mesh, e)) {
                dm.constrained[static_cast<std::size_t>(dm.crdof(e, 0))] = 1;
                dm.constrained[static_cast<std::size_t>(dm.crdof(e, 1))] = 1;
            }
    }

    dm.free_index.assign(static_cast<std::size_t>(dm.n_raw), -1);
    for (int d = 0; d < dm.n_raw; ++d) {
        if (!dm.constrained[static_cast<std::size_t>(d)]) {
            dm.free_index[static_cast<std::size_t>(d)] = static_cast<int>(dm.free_dofs.size());
            dm.free_dofs.push_back(d);
        }
    }
    dm.n_free = static_cast<int>(dm.free_dofs.size());
    return dm;
}

FeFunction FeFunction::p1_part() const {
    FeFunction r = *this;
    if (map->has_edge_scalar())
        for (int e = 0; e < map->mesh->n_edges(); ++e) r.rt(e) = 0.0;
    return r;
}

FeFunction FeFunction::rt_part() const {
    FeFunction r = *this;
    if (map->has_vertex_block())
        for (int v = 0; v < map->mesh->n_vertices(); ++v) {
            r.p1(v, 0) = 0.0;
            r.p1(v, 1) = 0.0;
        }
    return r;
}

// --- local bases ------------------------------------------------------

Vec2 rt0_value(const Triangulation& mesh, int cell, int le, const Vec2& x) {
    const auto& ce = mesh.cell_edges[static_cast<std::size_t>(cell)][static_cast<std::size_t>(le)];
    const Vec2 p = mesh.vertices[mesh.cells[static_cast<std::size_t>(cell)][static_cast<std::size_t>(le)]];
    const double s = ce.sign * mesh.edge_length[static_cast<std::size_t>(ce.edge)] /
                     (2.0 * mesh.cell_area[static_cast<std::size_t>(cell)]);
    return s * (x - p);
}

double rt0_div(const Triangulation& mesh, int cell, int le) {
    const auto& ce = mesh.cell_edges[static_cast<std::size_t>(cell)][static_cast<std::size_t>(le)];
    return ce.sign * mesh.edge_length[static_cast<std::size_t>(ce.edge)] /
           mesh.cell_area[static_cast<std::size_t>(cell)];
}

double p1_hat(const Triangulation& mesh, int cell, int lv, const Vec2& x) {
    return mesh.barycentric(cell, x)[static_cast<std::size_t>(lv)];
}

Vec2 p1_hat_grad(const Triangulation& mesh, int cell, int lv) {
    return mesh.grad_bary[static_cast<std::size_t>(cell)][static_cast<std::size_t>(lv)];
}

double cr_hat(const Triangulation& mesh, int cell, int le, const Vec2& x) {
    return 1.0 - 2.0 * p1_hat(mesh, cell, le, x);
}

Vec2 cr_hat_grad(const Triangulation& mesh, int cell, int le) {
    return -2.0 * p1_hat_grad(mesh, cell, le);
}

Vec2 br_bubble(const Triangulation& mesh, int cell, int le, const Vec2& x) {
    const auto bary = mesh.barycentric(cell, x);
    const int i = (le + 1) % 3, j = (le + 2) % 3;
    const int e = mesh.cell_edges[static_cast<std::size_t>(cell)][static_cast<std::size_t>(le)].edge;
    return (bary[static_cast<std::size_t>(i)] * bary[static_cast<std::size_t>(j)]) *
           mesh.edge_normal[static_cast<std::size_t>(e)];
}

Vec2 br_bubble_scalar_grad(const Triangulation& mesh, int cell, int le, const Vec2& x) {
    const auto bary = mesh.barycentric(cell, x);
    const int i = (le + 1) % 3, j = (le + 2) % 3;
    const Vec2 gi = p1_hat_grad(mesh, cell, i), gj = p1_hat_grad(mesh, cell, j);
    return bary[static_cast<std::size_t>(i)] * gj + bary[static_cast<std::size_t>(j)] * gi;
}

double br_bubble_meandiv(const Triangulation& mesh, int cell, int le) {
    const auto& ce = mesh.cell_edges[static_cast<std::size_t>(cell)][static_cast<std::size_t>(le)];
    return ce.sign * mesh.edge_length[static_cast<std::size_t>(ce.edge)] /
           (6.0 * mesh.cell_area[static_cast<std::size_t>(cell)]);
}

// --- interpolation ----------------------------------------------------

FeFunction interp_nodal(const DofMap& dm, const VectorField& v) {
    FeFunction fe = FeFunction::zeros(dm);
    if (!dm.has_vertex_block())
        throw std::invalid_argument("interp_nodal: layout has no vertex block");
    const auto& mesh = *dm.mesh;
    for (int vi = 0; vi < mesh.n_vertices(); ++vi) {
        const Vec2 val = v(mesh.vertices[static_cast<std::size_t>(vi)]);
        fe.p1(vi, 0) = val.x;
        fe.p1(vi, 1) = val.y;
    }
    return fe;
}

namespace {

double mean_edge_flux(const Triangulation& mesh, int e, const VectorField& v) {
    const Vec2 a = mesh.vertices[mesh.edges[e][0]];
    const Vec2 b = mesh.vertices[mesh.edges[e][1]];
    const Vec2 n = mesh.edge_normal[static_cast<std::size_t>(e)];
    double s = 0.0;
    for (const auto& q : edge_rule_3())
        s += q.w * dot(v(a + q.t * (b - a)), n);
    return s;
}

} // namespace

FeFunction interp_rt(const DofMap& dm, const VectorField& v) {
    if (dm.layout != DofLayout::p1_rt0)
        throw std::invalid_argument("interp_rt: requires the p1_rt0 layout");
    FeFunction fe = FeFunction::zeros(dm);
    const auto& mesh = *dm.mesh;
    for (int e = 0; e < mesh.n_edges(); ++e)
        fe.rt(e) = mean_edge_flux(mesh, e, v);
    return fe;
}

FeFunction interp_rt_midpoint(const DofMap& dm, const VectorField& v) {
    if (dm.layout != DofLayout::p1_rt0)
        throw std::invalid_argument("interp_rt_midpoint: requires the p1_rt0 layout");
    FeFunction fe = FeFunction::zeros(dm);
    const auto& mesh = *dm.mesh;
    for (int e = 0; e < mesh.n_edges(); ++e)
        fe.rt(e) = dot(v(mesh.edge_midpoint(e)), mesh.edge_normal[static_cast<std::size_t>(e)]);
    return fe;
}

FeFunction interp_composite(const DofMap& dm, const VectorField& v) {
    if (dm.layout != DofLayout::p1_rt0)
        throw std::invalid_argument("interp_composite: requires the p1_rt0 layout");
    FeFunction fe = interp_nodal(dm, v);
    const auto& mesh = *dm.mesh;
    for (int e = 0; e < mesh.n_edges(); ++e) {
        const int va = mesh.edges[e][0], vb = mesh.edges[e][1];
        const Vec2 a = mesh.vertices[va], b = mesh.vertices[vb];
        const Vec2 ua{fe.p1(va, 0), fe.p1(va, 1)};
        const Vec2 ub{fe.p1(vb, 0), fe.p1(vb, 1)};
        const Vec2 n = mesh.edge_normal[static_cast<std::size_t>(e)];
        double s = 0.0;
        for (const auto& q : edge_rule_3()) {
            const Vec2 x = a + q.t * (b - a);
            const Vec2 lin = (1.0 - q.t) * ua + q.t * ub; // nodal part on the edge
            s += q.w * dot(v(x) - lin, n);
        }
        fe.rt(e) = s;
    }
    return fe;
}

std::vector<double> project_p0(const Triangulation& mesh, const ScalarField& r) {
    std::vector<double> out(static_cast<std::size_t>(mesh.n_cells()), 0.0);
    for (int t = 0; t < mesh.n_cells(); ++t) {
        const auto& c = mesh.cells[static_cast<std::size_t>(t)];
        const Vec2 a = mesh.vertices[c[0]], b = mesh.vertices[c[1]], d = mesh.vertices[c[2]];
        double s = 0.0;
        for (const auto& q : tri_rule_deg6())
            s += q.w * r(q.l0 * a + q.l1 * b + q.l2 * d);
        out[static_cast<std::size_t>(t)] = s; // weights sum to 1: already the mean
    }
    return out;
}

// --- evaluation -------------------------------------------------------

EvalResult evaluate_unchecked(const FeFunction& fe, int cell, const Vec2& point) {
    const DofMap& dm = *fe.map;
    const Triangulation& mesh = *dm.mesh;
    const auto& c = mesh.cells[static_cast<std::size_t>(cell)];
    const auto bary = mesh.barycentric(cell, point);

    EvalResult r;
    switch (dm.layout) {
    case DofLayout::p1:
    case DofLayout::p1_rt0:
    case DofLayout::br: {
        for (int k = 0; k < 3; ++k) {
            const Vec2 g = p1_hat_grad(mesh, cell, k);
            const Vec2 uk{fe.p1(c[static_cast<std::size_t>(k)], 0),
                          fe.p1(c[static_cast<std::size_t>(k)], 1)};
            r.value += bary[static_cast<std::size_t>(k)] * uk;
            r.gradient(0, 0) += uk.x * g.x;
            r.gradient(0, 1) += uk.x * g.y;
            r.gradient(1, 0) += uk.y * g.x;
            r.gradient(1, 1) += uk.y * g.y;
        }
        if (dm.layout == DofLayout::p1_rt0) {
            double slope = 0.0; // coefficient of the identity in the RT0 gradient
            for (int le = 0; le < 3; ++le) {
                const auto& ce =
                    mesh.cell_edges[static_cast<std::size_t>(cell)][static_cast<std::size_t>(le)];
                const double ce_coef = fe.rt(ce.edge);
                if (ce_coef == 0.0) continue;
                r.value += ce_coef * rt0_value(mesh, cell, le, point);
                slope += ce_coef * 0.5 * rt0_div(mesh, cell, le);
            }
            r.gradient(0, 0) += slope;
            r.gradient(1, 1) += slope;
        } else if (dm.layout == DofLayout::br) {
            for (int le = 0; le < 3; ++le) {
                const auto& ce =
                    mesh.cell_edges[static_cast<std::size_t>(cell)][static_cast<std::size_t>(le)];
                const double amp = fe.rt(ce.edge);
                if (amp == 0.0) continue;
                r.value += amp * br_bubble(mesh, cell, le, point);
                const Vec2 sg = br_bubble_scalar_grad(mesh, cell, le, point);
                const Vec2 n = mesh.edge_normal[static_cast<std::size_t>(ce.edge)];
                r.gradient(0, 0) += amp * n.x * sg.x;
                r.gradient(0, 1) += amp * n.x * sg.y;
                r.gradient(1, 0) += amp * n.y * sg.x;
                r.gradient(1, 1) += amp * n.y * sg.y;
            }
        }
        break;
    }
    case DofLayout::cr: {
        for (int le = 0; le < 3; ++le) {
            const int e = mesh.cell_edges[static_cast<std::size_t>(cell)][static_cast<std::size_t>(le)].edge;
            const double hat = cr_hat(mesh, cell, le, point);
            const Vec2 g = cr_hat_grad(mesh, cell, le);
            const Vec2 ue{fe.coef[static_cast<std::size_t>(dm.crdof(e, 0))],
                          fe.coef[static_cast<std::size_t>(dm.crdof(e, 1))]};
            r.value += hat * ue;
            r.gradient(0, 0) += ue.x * g.x;
            r.gradient(0, 1) += ue.x * g.y;
            r.gradient(1, 0) += ue.y * g.x;
            r.gradient(1, 1) += ue.y * g.y;
        }
        break;
    }
    }
    r.divergence = r.gradient.trace();
    return r;
}

EvalResult evaluate(const FeFunction& fe, int cell, const Vec2& point) {
    const auto bary = fe.map->mesh->barycentric(cell, point);
    const double tol = 1e-12;
    for (double l : bary)
        if (l < -tol || l > 1.0 + tol)
            throw std::domain_error("evaluate: point outside cell");
    return evaluate_unchecked(fe, cell, point);
}

double cell_divergence(const FeFunction& fe, int cell) {
    return evaluate_unchecked(fe, cell, fe.map->mesh->centroid(cell)).divergence;
}

} // namespace elastfem
