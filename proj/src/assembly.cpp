#include "elastfem/assembly.hpp"

#include <algorithm>
#include <cmath>

#include "elastfem/parallel.hpp"
#include "elastfem/quadrature.hpp"

namespace elastfem {

const char* to_string(Scheme s) {
    switch (s) {
    case Scheme::s1: return "s1";
    case Scheme::s2: return "s2";
    case Scheme::s3: return "s3";
    case Scheme::s4: return "s4";
    case Scheme::s4sym: return "s4sym";
    case Scheme::naive: return "naive";
    case Scheme::p1: return "p1";
    case Scheme::br: return "br";
    case Scheme::cr: return "cr";
    }
    return "?";
}

Scheme scheme_from_string(const std::string& name) {
    if (name == "s1") return Scheme::s1;
    if (name == "s2") return Scheme::s2;
    if (name == "s3") return Scheme::s3;
    if (name == "s4") return Scheme::s4;
    if (name == "s4sym") return Scheme::s4sym;
    if (name == "naive") return Scheme::naive;
    if (name == "p1") return Scheme::p1;
    if (name == "br") return Scheme::br;
    if (name == "cr") return Scheme::cr;
    throw ConfigError("unknown scheme '" + name + "'");
}

ARVariant ar_from_string(const std::string& name) {
    if (name == "a0") return ARVariant::a0;
    if (name == "ad") return ARVariant::aD;
    if (name == "adiv") return ARVariant::adiv;
    throw ConfigError("unknown a^R variant '" + name + "'");
}

DofLayout layout_for(Scheme s) {
    switch (s) {
    case Scheme::p1: return DofLayout::p1;
    case Scheme::br: return DofLayout::br;
    case Scheme::cr: return DofLayout::cr;
    default: return DofLayout::p1_rt0;
    }
}

bool scheme_is_symmetric(Scheme s) {
    return s != Scheme::s2 && s != Scheme::s4;
}

bool scheme_needs_neumann(Scheme s) {
    return s == Scheme::s2 || s == Scheme::s3 || s == Scheme::s4 || s == Scheme::s4sym ||
           s == Scheme::naive;
}

void SchemeConfig::validate(const Triangulation& mesh, const BoundarySpec& bspec) const {
    if (!(lambda > 0.0)) throw ConfigError("lambda must be positive");
    if (!(mu > 0.0)) throw ConfigError("mu must be positive");
    if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
    if (!alpha_cell.empty()) {
        if (static_cast<int>(alpha_cell.size()) != mesh.n_cells())
            throw ConfigError("alpha_cell size must match the cell count");
        for (double a : alpha_cell)
            if (!(a > 0.0)) throw ConfigError("alpha_cell entries must be positive");
    }
    if (scheme_needs_neumann(scheme)) {
        if (bspec.kind != BoundarySpec::Kind::mixed)
            throw ConfigError(std::string("scheme ") + to_string(scheme) +
                              " requires a Neumann boundary");
    } else if (scheme == Scheme::s1 || scheme == Scheme::cr) {
        if (bspec.kind != BoundarySpec::Kind::pure_dirichlet)
            throw ConfigError(std::string("scheme ") + to_string(scheme) +
                              " is restricted to pure displacement problems");
    }
    // p1 and br are conforming: a traction boundary enters through the
    // natural boundary term and is accepted as well.
}

namespace detail {

unsigned scheme_terms(Scheme s) {
    switch (s) {
    case Scheme::s1:
    case Scheme::naive:
        return term_epsilon | term_ar | term_divdiv | term_load;
    case Scheme::s2:
    case Scheme::s3:
    case Scheme::s4:
    case Scheme::s4sym:
        return term_epsilon | term_ar | term_divdiv | term_coupling | term_load;
    case Scheme::p1:
    case Scheme::br:
    case Scheme::cr:
        return term_epsilon | term_divdiv | term_load;
    }
    return 0;
}

namespace {

struct Voigt {
    double e11 = 0.0, e22 = 0.0, e12 = 0.0;
};

inline double contract(const Voigt& a, const Voigt& b) {
    return a.e11 * b.e11 + a.e22 * b.e22 + 2.0 * a.e12 * b.e12;
}

// P1+RT0 element (schemes s1, s2, s3, s4, s4sym, naive)
void block_p1rt0(const Triangulation& mesh, const BoundarySpec* bspec, const DofMap& dm,
                 const SchemeConfig& cfg, int cell, unsigned terms, LocalBlock& out) {
    const auto& c = mesh.cells[static_cast<std::size_t>(cell)];
    const auto& ces = mesh.cell_edges[static_cast<std::size_t>(cell)];
    const double area = mesh.cell_area[static_cast<std::size_t>(cell)];
    const double hT = mesh.cell_h[static_cast<std::size_t>(cell)];
    const Vec2 pv[3] = {mesh.vertices[c[0]], mesh.vertices[c[1]], mesh.vertices[c[2]]};

    out.n = 9;
    for (int k = 0; k < 3; ++k) {
        out.dofs[static_cast<std::size_t>(2 * k)] = dm.vdof(c[static_cast<std::size_t>(k)], 0);
        out.dofs[static_cast<std::size_t>(2 * k + 1)] = dm.vdof(c[static_cast<std::size_t>(k)], 1);
        out.dofs[static_cast<std::size_t>(6 + k)] = dm.edof(ces[static_cast<std::size_t>(k)].edge);
    }

    // strains and divergences of the P1 block
    Voigt eps[6];
    double div[9];
    for (int k = 0; k < 3; ++k) {
        const Vec2 g = mesh.grad_bary[static_cast<std::size_t>(cell)][static_cast<std::size_t>(k)];
        eps[2 * k] = {g.x, 0.0, 0.5 * g.y};
        eps[2 * k + 1] = {0.0, g.y, 0.5 * g.x};
        div[2 * k] = g.x;
        div[2 * k + 1] = g.y;
    }
    for (int le = 0; le < 3; ++le) div[6 + le] = rt0_div(mesh, cell, le);

    const double two_mu = 2.0 * cfg.mu;

    if (terms & term_epsilon) {
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j)
                out.A[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] +=
                    two_mu * area * contract(eps[i], eps[j]);
    }

    if (terms & term_ar) {
        double alpha = cfg.alpha_of(cell);
        if (cfg.alpha_neumann > 0.0 && bspec) {
            for (int le = 0; le < 3; ++le)
                if (bspec->neumann[static_cast<std::size_t>(ces[static_cast<std::size_t>(le)].edge)])
                    alpha = cfg.alpha_neumann;
        }
        switch (cfg.ar) {
        case ARVariant::adiv:
            for (int le = 0; le < 3; ++le) {
                const double he = mesh.edge_length[static_cast<std::size_t>(ces[static_cast<std::size_t>(le)].edge)];
                out.A[static_cast<std::size_t>(6 + le)][static_cast<std::size_t>(6 + le)] +=
                    two_mu * alpha * he * he / area;
            }
            break;
        case ARVariant::aD:
        case ARVariant::a0: {
            const double s = two_mu * alpha / (hT * hT);
            for (const auto& q : tri_rule_deg2()) {
                const Vec2 x = q.l0 * pv[0] + q.l1 * pv[1] + q.l2 * pv[2];
                Vec2 psi[3];
                for (int le = 0; le < 3; ++le) psi[le] = rt0_value(mesh, cell, le, x);
                for (int le = 0; le < 3; ++le) {
                    if (cfg.ar == ARVariant::aD) {
                        out.A[static_cast<std::size_t>(6 + le)][static_cast<std::size_t>(6 + le)] +=
                            s * q.w * area * dot(psi[le], psi[le]);
                    } else {
                        for (int lf = 0; lf < 3; ++lf)
                            out.A[static_cast<std::size_t>(6 + le)][static_cast<std::size_t>(6 + lf)] +=
                                s * q.w * area * dot(psi[le], psi[lf]);
                    }
                }
            }
            break;
        }
        }
    }

    if (terms & term_divdiv) {
        for (int i = 0; i < 9; ++i)
            for (int j = 0; j < 9; ++j)
                out.A[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] +=
                    cfg.lambda * area * div[i] * div[j];
    }

    if (terms & term_load) {
        if (cfg.body_force) {
            for (const auto& q : tri_rule_deg6()) {
                const Vec2 x = q.l0 * pv[0] + q.l1 * pv[1] + q.l2 * pv[2];
                const Vec2 f = cfg.body_force(x);
                const double bary[3] = {q.l0, q.l1, q.l2};
                const double wq = q.w * area;
                for (int k = 0; k < 3; ++k) {
                    out.b[static_cast<std::size_t>(2 * k)] += wq * f.x * bary[k];
                    out.b[static_cast<std::size_t>(2 * k + 1)] += wq * f.y * bary[k];
                }
                for (int le = 0; le < 3; ++le)
                    out.b[static_cast<std::size_t>(6 + le)] +=
                        wq * dot(f, rt0_value(mesh, cell, le, x));
            }
        }
    }

    // traction boundary terms
    const bool want_neumann =
        bspec && bspec->kind == BoundarySpec::Kind::mixed &&
        ((terms & term_coupling) || (terms & term_load));
    if (!want_neumann) return;

    for (int le = 0; le < 3; ++le) {
        const int e = ces[static_cast<std::size_t>(le)].edge;
        if (!bspec->neumann[static_cast<std::size_t>(e)]) continue;
        const int sigma = ces[static_cast<std::size_t>(le)].sign;
        const Vec2 n_out = static_cast<double>(sigma) * mesh.edge_normal[static_cast<std::size_t>(e)];
        const Vec2 a = mesh.vertices[mesh.edges[e][0]];
        const Vec2 b = mesh.vertices[mesh.edges[e][1]];
        const double he = mesh.edge_length[static_cast<std::size_t>(e)];

        if ((terms & term_load) && bspec->traction) {
            const bool rt_normal_only =
                cfg.scheme == Scheme::s4 || cfg.scheme == Scheme::s4sym;
            for (const auto& q : edge_rule_3()) {
                const Vec2 x = a + q.t * (b - a);
                const Vec2 g = bspec->traction(x);
                const double wq = q.w * he;
                const auto bary = mesh.barycentric(cell, x);
                for (int k = 0; k < 3; ++k) {
                    out.b[static_cast<std::size_t>(2 * k)] += wq * g.x * bary[static_cast<std::size_t>(k)];
                    out.b[static_cast<std::size_t>(2 * k + 1)] += wq * g.y * bary[static_cast<std::size_t>(k)];
                }
                if (rt_normal_only) {
                    // (g.n)(psi_e.n) with psi_e.n constant sigma on its edge
                    out.b[static_cast<std::size_t>(6 + le)] += wq * dot(g, n_out) * sigma;
                } else {
                    for (int lf = 0; lf < 3; ++lf)
                        out.b[static_cast<std::size_t>(6 + lf)] +=
                            wq * dot(g, rt0_value(mesh, cell, lf, x));
                }
            }
        }

        if (terms & term_coupling) {
            const double sign = (cfg.scheme == Scheme::s3 || cfg.scheme == Scheme::s4sym) ? 1.0 : -1.0;
            if (cfg.scheme == Scheme::s2 || cfg.scheme == Scheme::s3) {
                for (int j = 0; j < 6; ++j) {
                    const Vec2 en{eps[j].e11 * n_out.x + eps[j].e12 * n_out.y,
                                  eps[j].e12 * n_out.x + eps[j].e22 * n_out.y};
                    for (int lf = 0; lf < 3; ++lf) {
                        double c_ij = 0.0;
                        for (const auto& q : edge_rule_2()) {
                            const Vec2 x = a + q.t * (b - a);
                            c_ij += q.w * he * two_mu * dot(en, rt0_value(mesh, cell, lf, x));
                        }
                        out.A[static_cast<std::size_t>(6 + lf)][static_cast<std::size_t>(j)] += c_ij;
                        out.A[static_cast<std::size_t>(j)][static_cast<std::size_t>(6 + lf)] += sign * c_ij;
                    }
                }
            } else { // s4, s4sym: only normal components, only this edge's dof
                for (int j = 0; j < 6; ++j) {
                    const double enn = eps[j].e11 * n_out.x * n_out.x +
                                       2.0 * eps[j].e12 * n_out.x * n_out.y +
                                       eps[j].e22 * n_out.y * n_out.y;
                    const double c_ij = two_mu * enn * sigma * he;
                    out.A[static_cast<std::size_t>(6 + le)][static_cast<std::size_t>(j)] += c_ij;
                    out.A[static_cast<std::size_t>(j)][static_cast<std::size_t>(6 + le)] += sign * c_ij;
                }
            }
        }
    }
}

// P1 baseline
void block_p1(const Triangulation& mesh, const BoundarySpec* bspec, const DofMap& dm,
              const SchemeConfig& cfg, int cell, unsigned terms, LocalBlock& out) {
    const auto& c = mesh.cells[static_cast<std::size_t>(cell)];
    const double area = mesh.cell_area[static_cast<std::size_t>(cell)];
    const Vec2 pv[3] = {mesh.vertices[c[0]], mesh.vertices[c[1]], mesh.vertices[c[2]]};

    out.n = 6;
    for (int k = 0; k < 3; ++k) {
        out.dofs[static_cast<std::size_t>(2 * k)] = dm.vdof(c[static_cast<std::size_t>(k)], 0);
        out.dofs[static_cast<std::size_t>(2 * k + 1)] = dm.vdof(c[static_cast<std::size_t>(k)], 1);
    }

    Voigt eps[6];
    double div[6];
    for (int k = 0; k < 3; ++k) {
        const Vec2 g = mesh.grad_bary[static_cast<std::size_t>(cell)][static_cast<std::size_t>(k)];
        eps[2 * k] = {g.x, 0.0, 0.5 * g.y};
        eps[2 * k + 1] = {0.0, g.y, 0.5 * g.x};
        div[2 * k] = g.x;
        div[2 * k + 1] = g.y;
    }

    if (terms & term_epsilon)
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j)
                out.A[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] +=
                    2.0 * cfg.mu * area * contract(eps[i], eps[j]);

    if (terms & term_divdiv)
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j)
                out.A[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] +=
                    cfg.lambda * area * div[i] * div[j];

    if ((terms & term_load) && cfg.body_force) {
        for (const auto& q : tri_rule_deg6()) {
            const Vec2 x = q.l0 * pv[0] + q.l1 * pv[1] + q.l2 * pv[2];
            const Vec2 f = cfg.body_force(x);
            const double bary[3] = {q.l0, q.l1, q.l2};
            const double wq = q.w * area;
            for (int k = 0; k < 3; ++k) {
                out.b[static_cast<std::size_t>(2 * k)] += wq * f.x * bary[k];
                out.b[static_cast<std::size_t>(2 * k + 1)] += wq * f.y * bary[k];
            }
        }
    }
    if ((terms & term_load) && bspec && bspec->kind == BoundarySpec::Kind::mixed &&
        bspec->traction) {
        const auto& ces = mesh.cell_edges[static_cast<std::size_t>(cell)];
        for (int le = 0; le < 3; ++le) {
            const int e = ces[static_cast<std::size_t>(le)].edge;
            if (!bspec->neumann[static_cast<std::size_t>(e)]) continue;
            const Vec2 a = mesh.vertices[mesh.edges[e][0]];
            const Vec2 b = mesh.vertices[mesh.edges[e][1]];
            const double he = mesh.edge_length[static_cast<std::size_t>(e)];
            for (const auto& q : edge_rule_3()) {
                const Vec2 x = a + q.t * (b - a);
                const Vec2 g = bspec->traction(x);
                const auto bary = mesh.barycentric(cell, x);
                const double wq = q.w * he;
                for (int k = 0; k < 3; ++k) {
                    out.b[static_cast<std::size_t>(2 * k)] += wq * g.x * bary[static_cast<std::size_t>(k)];
                    out.b[static_cast<std::size_t>(2 * k + 1)] += wq * g.y * bary[static_cast<std::size_t>(k)];
                }
            }
        }
    }
}

// Bernardi-Raugel baseline with reduced integration of the lambda term
void block_br(const Triangulation& mesh, const BoundarySpec* bspec, const DofMap& dm,
              const SchemeConfig& cfg, int cell, unsigned terms, LocalBlock& out) {
    const auto& c = mesh.cells[static_cast<std::size_t>(cell)];
    const auto& ces = mesh.cell_edges[static_cast<std::size_t>(cell)];
    const double area = mesh.cell_area[static_cast<std::size_t>(cell)];
    const Vec2 pv[3] = {mesh.vertices[c[0]], mesh.vertices[c[1]], mesh.vertices[c[2]]};

    out.n = 9;
    for (int k = 0; k < 3; ++k) {
        out.dofs[static_cast<std::size_t>(2 * k)] = dm.vdof(c[static_cast<std::size_t>(k)], 0);
        out.dofs[static_cast<std::size_t>(2 * k + 1)] = dm.vdof(c[static_cast<std::size_t>(k)], 1);
        out.dofs[static_cast<std::size_t>(6 + k)] = dm.edof(ces[static_cast<std::size_t>(k)].edge);
    }

    if (terms & term_epsilon) {
        // bubble strains vary linearly: degree-2 rule is exact
        for (const auto& q : tri_rule_deg2()) {
            const Vec2 x = q.l0 * pv[0] + q.l1 * pv[1] + q.l2 * pv[2];
            Voigt eps[9];
            for (int k = 0; k < 3; ++k) {
                const Vec2 g = mesh.grad_bary[static_cast<std::size_t>(cell)][static_cast<std::size_t>(k)];
                eps[2 * k] = {g.x, 0.0, 0.5 * g.y};
                eps[2 * k + 1] = {0.0, g.y, 0.5 * g.x};
            }
            for (int le = 0; le < 3; ++le) {
                const Vec2 sg = br_bubble_scalar_grad(mesh, cell, le, x);
                const Vec2 n = mesh.edge_normal[static_cast<std::size_t>(ces[static_cast<std::size_t>(le)].edge)];
                eps[6 + le] = {n.x * sg.x, n.y * sg.y, 0.5 * (n.x * sg.y + n.y * sg.x)};
            }
            const double wq = q.w * area * 2.0 * cfg.mu;
            for (int i = 0; i < 9; ++i)
                for (int j = 0; j < 9; ++j)
                    out.A[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] +=
                        wq * contract(eps[i], eps[j]);
        }
    }

    if (terms & term_divdiv) {
        // reduced integration: cell means of the divergence
        double mean_div[9];
        for (int k = 0; k < 3; ++k) {
            const Vec2 g = mesh.grad_bary[static_cast<std::size_t>(cell)][static_cast<std::size_t>(k)];
            mean_div[2 * k] = g.x;
            mean_div[2 * k + 1] = g.y;
        }
        for (int le = 0; le < 3; ++le) mean_div[6 + le] = br_bubble_meandiv(mesh, cell, le);
        for (int i = 0; i < 9; ++i)
            for (int j = 0; j < 9; ++j)
                out.A[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] +=
                    cfg.lambda * area * mean_div[i] * mean_div[j];
    }

    if ((terms & term_load) && cfg.body_force) {
        for (const auto& q : tri_rule_deg6()) {
            const Vec2 x = q.l0 * pv[0] + q.l1 * pv[1] + q.l2 * pv[2];
            const Vec2 f = cfg.body_force(x);
            const double bary[3] = {q.l0, q.l1, q.l2};
            const double wq = q.w * area;
            for (int k = 0; k < 3; ++k) {
                out.b[static_cast<std::size_t>(2 * k)] += wq * f.x * bary[k];
                out.b[static_cast<std::size_t>(2 * k + 1)] += wq * f.y * bary[k];
            }
            for (int le = 0; le < 3; ++le)
                out.b[static_cast<std::size_t>(6 + le)] += wq * dot(f, br_bubble(mesh, cell, le, x));
        }
    }
    if ((terms & term_load) && bspec && bspec->kind == BoundarySpec::Kind::mixed &&
        bspec->traction) {
        for (int le = 0; le < 3; ++le) {
            const int e = ces[static_cast<std::size_t>(le)].edge;
            if (!bspec->neumann[static_cast<std::size_t>(e)]) continue;
            const Vec2 a = mesh.vertices[mesh.edges[e][0]];
            const Vec2 b = mesh.vertices[mesh.edges[e][1]];
            const double he = mesh.edge_length[static_cast<std::size_t>(e)];
            for (const auto& q : edge_rule_3()) {
                const Vec2 x = a + q.t * (b - a);
                const Vec2 g = bspec->traction(x);
                const auto bary = mesh.barycentric(cell, x);
                const double wq = q.w * he;
                for (int k = 0; k < 3; ++k) {
                    out.b[static_cast<std::size_t>(2 * k)] += wq * g.x * bary[static_cast<std::size_t>(k)];
                    out.b[static_cast<std::size_t>(2 * k + 1)] += wq * g.y * bary[static_cast<std::size_t>(k)];
                }
                for (int lf = 0; lf < 3; ++lf)
                    out.b[static_cast<std::size_t>(6 + lf)] +=
                        wq * dot(g, br_bubble(mesh, cell, lf, x));
            }
        }
    }
}

// Crouzeix-Raviart baseline with the divergence-preserving right-hand side
void block_cr(const Triangulation& mesh, const DofMap& dm, const SchemeConfig& cfg, int cell,
              unsigned terms, LocalBlock& out) {
    const auto& ces = mesh.cell_edges[static_cast<std::size_t>(cell)];
    const auto& c = mesh.cells[static_cast<std::size_t>(cell)];
    const double area = mesh.cell_area[static_cast<std::size_t>(cell)];
    const Vec2 pv[3] = {mesh.vertices[c[0]], mesh.vertices[c[1]], mesh.vertices[c[2]]};

    out.n = 6;
    for (int le = 0; le < 3; ++le) {
        out.dofs[static_cast<std::size_t>(2 * le)] = dm.crdof(ces[static_cast<std::size_t>(le)].edge, 0);
        out.dofs[static_cast<std::size_t>(2 * le + 1)] = dm.crdof(ces[static_cast<std::size_t>(le)].edge, 1);
    }

    Vec2 g[3];
    for (int le = 0; le < 3; ++le) g[le] = cr_hat_grad(mesh, cell, le);

    // mu (grad u, grad v) + (mu + lambda)(div u, div v)
    if (terms & (term_epsilon | term_divdiv)) {
        for (int le = 0; le < 3; ++le)
            for (int lf = 0; lf < 3; ++lf) {
                const double gg = dot(g[le], g[lf]);
                for (int m = 0; m < 2; ++m) {
                    if (terms & term_epsilon)
                        out.A[static_cast<std::size_t>(2 * le + m)][static_cast<std::size_t>(2 * lf + m)] +=
                            cfg.mu * area * gg;
                    if (terms & term_divdiv)
                        for (int l = 0; l < 2; ++l)
                            out.A[static_cast<std::size_t>(2 * le + m)][static_cast<std::size_t>(2 * lf + l)] +=
                                (cfg.mu + cfg.lambda) * area * g[le][m] * g[lf][l];
                }
            }
    }

    if ((terms & term_load) && cfg.body_force) {
        // (f, Pi_R v): the test function is replaced by its Raviart-Thomas
        // interpolation, whose edge flux is the midpoint value v(m_e).n_e
        for (const auto& q : tri_rule_deg6()) {
            const Vec2 x = q.l0 * pv[0] + q.l1 * pv[1] + q.l2 * pv[2];
            const Vec2 f = cfg.body_force(x);
            const double wq = q.w * area;
            for (int le = 0; le < 3; ++le) {
                const double fp = wq * dot(f, rt0_value(mesh, cell, le, x));
                const Vec2 n = mesh.edge_normal[static_cast<std::size_t>(ces[static_cast<std::size_t>(le)].edge)];
                out.b[static_cast<std::size_t>(2 * le)] += fp * n.x;
                out.b[static_cast<std::size_t>(2 * le + 1)] += fp * n.y;
            }
        }
    }
}

} // namespace

LocalBlock local_block(const Triangulation& mesh, const BoundarySpec* bspec, const DofMap& dm,
                       const SchemeConfig& cfg, int cell, unsigned terms) {
    LocalBlock out;
    switch (dm.layout) {
    case DofLayout::p1_rt0: block_p1rt0(mesh, bspec, dm, cfg, cell, terms, out); break;
    case DofLayout::p1: block_p1(mesh, bspec, dm, cfg, cell, terms, out); break;
    case DofLayout::br: block_br(mesh, bspec, dm, cfg, cell, terms, out); break;
    case DofLayout::cr: block_cr(mesh, dm, cfg, cell, terms, out); break;
    }
    return out;
}

SparseMatrix gather_matrix(int dim, const std::vector<int>& target_of_raw,
                           const std::vector<LocalBlock>& locals) {
    auto target = [&](int raw) { return target_of_raw.empty() ? raw : target_of_raw[static_cast<std::size_t>(raw)]; };

    // row adjacency in ascending cell order
    std::vector<std::vector<std::pair<int, int>>> adj(static_cast<std::size_t>(dim));
    for (std::size_t t = 0; t < locals.size(); ++t) {
        const LocalBlock& lb = locals[t];
        for (int i = 0; i < lb.n; ++i) {
            const int r = target(lb.dofs[static_cast<std::size_t>(i)]);
            if (r >= 0) adj[static_cast<std::size_t>(r)].emplace_back(static_cast<int>(t), i);
        }
    }

    std::vector<std::vector<int>> cols(static_cast<std::size_t>(dim));
    parallel_for(static_cast<std::size_t>(dim), [&](std::size_t r) {
        auto& cr = cols[r];
        for (const auto& [t, i] : adj[r]) {
            const LocalBlock& lb = locals[static_cast<std::size_t>(t)];
            for (int j = 0; j < lb.n; ++j) {
                const int cc = target(lb.dofs[static_cast<std::size_t>(j)]);
                if (cc >= 0) cr.push_back(cc);
            }
        }
        std::sort(cr.begin(), cr.end());
        cr.erase(std::unique(cr.begin(), cr.end()), cr.end());
    });

    SparseMatrix a;
    a.rows = dim;
    a.cols = dim;
    a.row_ptr.assign(static_cast<std::size_t>(dim) + 1, 0);
    for (int r = 0; r < dim; ++r)
        a.row_ptr[static_cast<std::size_t>(r) + 1] =
            a.row_ptr[static_cast<std::size_t>(r)] + static_cast<int>(cols[static_cast<std::size_t>(r)].size());
    a.col_idx.resize(static_cast<std::size_t>(a.row_ptr.back()));
    a.values.assign(static_cast<std::size_t>(a.row_ptr.back()), 0.0);

    parallel_for(static_cast<std::size_t>(dim), [&](std::size_t r) {
        const int begin = a.row_ptr[r];
        std::copy(cols[r].begin(), cols[r].end(), a.col_idx.begin() + begin);
        for (const auto& [t, i] : adj[r]) {
            const LocalBlock& lb = locals[static_cast<std::size_t>(t)];
            for (int j = 0; j < lb.n; ++j) {
                const int cc = target(lb.dofs[static_cast<std::size_t>(j)]);
                if (cc < 0) continue;
                const auto first = a.col_idx.begin() + begin;
                const auto last = a.col_idx.begin() + a.row_ptr[r + 1];
                const auto pos = std::lower_bound(first, last, cc);
                a.values[static_cast<std::size_t>(pos - a.col_idx.begin())] +=
                    lb.A[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            }
        }
    });
    return a;
}

std::vector<double> gather_rhs(int dim, const std::vector<int>& target_of_raw,
                               const std::vector<LocalBlock>& locals) {
    auto target = [&](int raw) { return target_of_raw.empty() ? raw : target_of_raw[static_cast<std::size_t>(raw)]; };
    std::vector<double> rhs(static_cast<std::size_t>(dim), 0.0);
    for (std::size_t t = 0; t < locals.size(); ++t) {
        const LocalBlock& lb = locals[t];
        for (int i = 0; i < lb.n; ++i) {
            const int r = target(lb.dofs[static_cast<std::size_t>(i)]);
            if (r >= 0) rhs[static_cast<std::size_t>(r)] += lb.b[static_cast<std::size_t>(i)];
        }
    }
    return rhs;
}

} // namespace detail

namespace {

std::vector<detail::LocalBlock> compute_locals(const Triangulation& mesh,
                                               const BoundarySpec* bspec, const DofMap& dm,
                                               const SchemeConfig& cfg, unsigned terms) {
    std::vector<detail::LocalBlock> locals(static_cast<std::size_t>(mesh.n_cells()));
    parallel_for(static_cast<std::size_t>(mesh.n_cells()), [&](std::size_t t) {
        locals[t] = detail::local_block(mesh, bspec, dm, cfg, static_cast<int>(t), terms);
    });
    return locals;
}

} // namespace

LinearSystem assemble_scheme(const SchemeConfig& cfg, const Triangulation& mesh,
                             const BoundarySpec& bspec, const DofMap& dm) {
    cfg.validate(mesh, bspec);
    if (dm.layout != layout_for(cfg.scheme))
        throw ConfigError("dof map layout does not match the scheme");
    const unsigned terms = detail::scheme_terms(cfg.scheme);
    const auto locals = compute_locals(mesh, &bspec, dm, cfg, terms);
    LinearSystem sys;
    sys.A = detail::gather_matrix(dm.n_free, dm.free_index, locals);
    sys.A.finalize();
    sys.rhs = detail::gather_rhs(dm.n_free, dm.free_index, locals);
    sys.free_to_raw = dm.free_dofs;
    sys.symmetric = scheme_is_symmetric(cfg.scheme);
    return sys;
}

SparseMatrix assemble_epsilon(const Triangulation& mesh, const DofMap& dm, double mu) {
    SchemeConfig cfg;
    cfg.mu = mu;
    const auto locals = compute_locals(mesh, nullptr, dm, cfg, detail::term_epsilon);
    auto a = detail::gather_matrix(dm.n_raw, {}, locals);
    a.finalize();
    return a;
}

SparseMatrix assemble_ar(const Triangulation& mesh, const DofMap& dm, ARVariant variant,
                         double alpha, const std::vector<double>& alpha_cell) {
    SchemeConfig cfg;
    cfg.ar = variant;
    cfg.alpha = alpha;
    cfg.alpha_cell = alpha_cell;
    cfg.mu = 0.5; // the kernel scales a^R by 2 mu; this block is unscaled
    const auto locals = compute_locals(mesh, nullptr, dm, cfg, detail::term_ar);
    auto a = detail::gather_matrix(dm.n_raw, {}, locals);
    a.finalize();
    return a;
}

SparseMatrix assemble_divdiv(const Triangulation& mesh, const DofMap& dm, double lambda) {
    if (dm.layout == DofLayout::cr)
        throw ConfigError("assemble_divdiv: not defined for the cr layout");
    SchemeConfig cfg;
    cfg.lambda = lambda;
    const auto locals = compute_locals(mesh, nullptr, dm, cfg, detail::term_divdiv);
    auto a = detail::gather_matrix(dm.n_raw, {}, locals);
    a.finalize();
    return a;
}

SparseMatrix assemble_neumann_coupling(const Triangulation& mesh, const DofMap& dm,
                                       const BoundarySpec& bspec, Scheme scheme, double mu) {
    if (bspec.kind != BoundarySpec::Kind::mixed)
        throw ConfigError("assemble_neumann_coupling: requires a mixed boundary spec");
    if (scheme != Scheme::s2 && scheme != Scheme::s3 && scheme != Scheme::s4 &&
        scheme != Scheme::s4sym)
        throw ConfigError("assemble_neumann_coupling: scheme has no coupling term");
    SchemeConfig cfg;
    cfg.scheme = scheme;
    cfg.mu = mu;
    const auto locals = compute_locals(mesh, &bspec, dm, cfg, detail::term_coupling);
    auto a = detail::gather_matrix(dm.n_raw, {}, locals);
    a.finalize();
    return a;
}

std::vector<double> assemble_load(const Triangulation& mesh, const DofMap& dm,
                                  const BoundarySpec& bspec, const SchemeConfig& cfg) {
    const auto locals = compute_locals(mesh, &bspec, dm, cfg, detail::term_load);
    return detail::gather_rhs(dm.n_raw, {}, locals);
}

} // namespace elastfem
