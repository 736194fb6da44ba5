#include "elastfem/analysis.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "elastfem/parallel.hpp"
#include "elastfem/quadrature.hpp"

namespace elastfem {

Vec2 ManufacturedSolution::body_force(Vec2 p) const {
    const Vec2 lap = laplace_u(p);
    const Vec2 gd = grad_div_u(p);
    return {-mu * lap.x - (mu + lambda) * gd.x, -mu * lap.y - (mu + lambda) * gd.y};
}

Vec2 ManufacturedSolution::traction(Vec2 p, Vec2 n) const {
    const Mat2 eps = grad_u(p).sym();
    const double d = div_u(p);
    return eps * n * (2.0 * mu) + (lambda * d) * n;
}

Vec2 ManufacturedSolution::div_eps(Vec2 p) const {
    const Vec2 lap = laplace_u(p);
    const Vec2 gd = grad_div_u(p);
    return 0.5 * (lap + gd);
}

ManufacturedSolution ManufacturedSolution::trig_unit_square(double lambda, double mu) {
    using std::cos;
    using std::sin;
    const double pi = std::numbers::pi;
    const double c = 1.0 / (mu + lambda);

    ManufacturedSolution ms;
    ms.lambda = lambda;
    ms.mu = mu;
    ms.u = [=](Vec2 p) {
        const double s = c * sin(pi * p.x) * sin(pi * p.y);
        return Vec2{sin(2 * pi * p.y) * (cos(2 * pi * p.x) - 1.0) + s,
                    sin(2 * pi * p.x) * (1.0 - cos(2 * pi * p.y)) + s};
    };
    ms.grad_u = [=](Vec2 p) {
        Mat2 g;
        g(0, 0) = -2 * pi * sin(2 * pi * p.x) * sin(2 * pi * p.y) +
                  c * pi * cos(pi * p.x) * sin(pi * p.y);
        g(0, 1) = 2 * pi * cos(2 * pi * p.y) * (cos(2 * pi * p.x) - 1.0) +
                  c * pi * sin(pi * p.x) * cos(pi * p.y);
        g(1, 0) = 2 * pi * cos(2 * pi * p.x) * (1.0 - cos(2 * pi * p.y)) +
                  c * pi * cos(pi * p.x) * sin(pi * p.y);
        g(1, 1) = 2 * pi * sin(2 * pi * p.x) * sin(2 * pi * p.y) +
                  c * pi * sin(pi * p.x) * cos(pi * p.y);
        return g;
    };
    ms.div_u = [=](Vec2 p) { return c * pi * sin(pi * (p.x + p.y)); };
    ms.laplace_u = [=](Vec2 p) {
        const double s = 2.0 * c * pi * pi * sin(pi * p.x) * sin(pi * p.y);
        return Vec2{-4 * pi * pi * sin(2 * pi * p.y) * (2.0 * cos(2 * pi * p.x) - 1.0) - s,
                    -4 * pi * pi * sin(2 * pi * p.x) * (1.0 - 2.0 * cos(2 * pi * p.y)) - s};
    };
    ms.grad_div_u = [=](Vec2 p) {
        const double v = c * pi * pi * cos(pi * (p.x + p.y));
        return Vec2{v, v};
    };
    return ms;
}

Vec2 sextic_gradient_force(Vec2 p) {
    return {6.0 * p.x * p.x * p.x * p.x * p.x, 6.0 * p.y * p.y * p.y * p.y * p.y};
}

namespace {

struct CellP1Data {
    Mat2 grad;   // gradient of the vertex-block part
    double rt_slope = 0.0; // RT0 gradient coefficient of the identity
    double div = 0.0;
};

CellP1Data p1_cell_data(const FeFunction& fe, int cell) {
    const DofMap& dm = *fe.map;
    const Triangulation& mesh = *dm.mesh;
    CellP1Data d;
    if (dm.has_vertex_block()) {
        const auto& c = mesh.cells[static_cast<std::size_t>(cell)];
        for (int k = 0; k < 3; ++k) {
            const Vec2 g = mesh.grad_bary[static_cast<std::size_t>(cell)][static_cast<std::size_t>(k)];
            const Vec2 uk{fe.p1(c[static_cast<std::size_t>(k)], 0),
                          fe.p1(c[static_cast<std::size_t>(k)], 1)};
            d.grad(0, 0) += uk.x * g.x;
            d.grad(0, 1) += uk.x * g.y;
            d.grad(1, 0) += uk.y * g.x;
            d.grad(1, 1) += uk.y * g.y;
        }
    }
    if (dm.layout == DofLayout::p1_rt0) {
        for (int le = 0; le < 3; ++le) {
            const auto& ce = mesh.cell_edges[static_cast<std::size_t>(cell)][static_cast<std::size_t>(le)];
            d.rt_slope += fe.rt(ce.edge) * 0.5 * rt0_div(mesh, cell, le);
        }
    }
    d.div = d.grad.trace() + 2.0 * d.rt_slope;
    return d;
}

Vec2 rt_value_at(const FeFunction& fe, int cell, const Vec2& x) {
    const Triangulation& mesh = *fe.map->mesh;
    Vec2 v;
    for (int le = 0; le < 3; ++le) {
        const auto& ce = mesh.cell_edges[static_cast<std::size_t>(cell)][static_cast<std::size_t>(le)];
        const double c = fe.rt(ce.edge);
        if (c != 0.0) v += c * rt0_value(mesh, cell, le, x);
    }
    return v;
}

void require_primary(const FeFunction& v, const char* what) {
    if (v.map->layout != DofLayout::p1_rt0)
        throw std::invalid_argument(std::string(what) + ": requires the p1_rt0 layout");
}

} // namespace

double error_l2(const FeFunction& u_h, const VectorField& exact) {
    const Triangulation& mesh = *u_h.map->mesh;
    const double s = block_sum(static_cast<std::size_t>(mesh.n_cells()), [&](std::size_t t) {
        const auto& c = mesh.cells[t];
        const Vec2 a = mesh.vertices[c[0]], b = mesh.vertices[c[1]], d = mesh.vertices[c[2]];
        double cell = 0.0;
        for (const auto& q : tri_rule_deg6()) {
            const Vec2 x = q.l0 * a + q.l1 * b + q.l2 * d;
            const Vec2 diff = exact(x) - evaluate_unchecked(u_h, static_cast<int>(t), x).value;
            cell += q.w * dot(diff, diff);
        }
        return cell * mesh.cell_area[t];
    });
    return std::sqrt(s);
}

double error_h1_broken(const FeFunction& u_h, const MatrixField& exact_grad, bool include_rt) {
    const Triangulation& mesh = *u_h.map->mesh;
    const double s = block_sum(static_cast<std::size_t>(mesh.n_cells()), [&](std::size_t t) {
        const auto& c = mesh.cells[t];
        const Vec2 a = mesh.vertices[c[0]], b = mesh.vertices[c[1]], d = mesh.vertices[c[2]];
        const auto cd = p1_cell_data(u_h, static_cast<int>(t));
        Mat2 gh = cd.grad;
        if (include_rt) {
            gh(0, 0) += cd.rt_slope;
            gh(1, 1) += cd.rt_slope;
        }
        double cell = 0.0;
        for (const auto& q : tri_rule_deg6()) {
            const Vec2 x = q.l0 * a + q.l1 * b + q.l2 * d;
            Mat2 diff = exact_grad(x) - gh;
            if (u_h.map->layout == DofLayout::br) // bubble gradients vary inside the cell
                diff = exact_grad(x) - evaluate_unchecked(u_h, static_cast<int>(t), x).gradient;
            cell += q.w * frob2(diff);
        }
        return cell * mesh.cell_area[t];
    });
    return std::sqrt(s);
}

double h1_seminorm_broken(const FeFunction& u_h, bool include_rt) {
    const Triangulation& mesh = *u_h.map->mesh;
    const double s = block_sum(static_cast<std::size_t>(mesh.n_cells()), [&](std::size_t t) {
        if (u_h.map->layout == DofLayout::br) {
            const auto& c = mesh.cells[t];
            const Vec2 a = mesh.vertices[c[0]], b = mesh.vertices[c[1]], d = mesh.vertices[c[2]];
            double cell = 0.0;
            for (const auto& q : tri_rule_deg2()) {
                const Vec2 x = q.l0 * a + q.l1 * b + q.l2 * d;
                cell += q.w * frob2(evaluate_unchecked(u_h, static_cast<int>(t), x).gradient);
            }
            return cell * mesh.cell_area[t];
        }
        const auto cd = p1_cell_data(u_h, static_cast<int>(t));
        Mat2 gh = cd.grad;
        if (u_h.map->layout == DofLayout::cr) {
            gh = evaluate_unchecked(u_h, static_cast<int>(t), mesh.centroid(static_cast<int>(t))).gradient;
        } else if (include_rt) {
            gh(0, 0) += cd.rt_slope;
            gh(1, 1) += cd.rt_slope;
        }
        return frob2(gh) * mesh.cell_area[t];
    });
    return std::sqrt(s);
}

double div_l2_norm(const FeFunction& u_h) {
    const Triangulation& mesh = *u_h.map->mesh;
    const double s = block_sum(static_cast<std::size_t>(mesh.n_cells()), [&](std::size_t t) {
        const auto& c = mesh.cells[t];
        const Vec2 a = mesh.vertices[c[0]], b = mesh.vertices[c[1]], d = mesh.vertices[c[2]];
        double cell = 0.0;
        for (const auto& q : tri_rule_deg2()) {
            const Vec2 x = q.l0 * a + q.l1 * b + q.l2 * d;
            const double dv = evaluate_unchecked(u_h, static_cast<int>(t), x).divergence;
            cell += q.w * dv * dv;
        }
        return cell * mesh.cell_area[t];
    });
    return std::sqrt(s);
}

double norm_R(const FeFunction& v, const SchemeConfig& cfg) {
    require_primary(v, "norm_R");
    const Triangulation& mesh = *v.map->mesh;
    const double s = block_sum(static_cast<std::size_t>(mesh.n_cells()), [&](std::size_t t) {
        const int cell = static_cast<int>(t);
        const double alpha = cfg.alpha_of(cell);
        const double area = mesh.cell_area[t];
        const auto& c = mesh.cells[t];
        const Vec2 a = mesh.vertices[c[0]], b = mesh.vertices[c[1]], d = mesh.vertices[c[2]];
        const auto& ces = mesh.cell_edges[t];
        double out = 0.0;
        switch (cfg.ar) {
        case ARVariant::adiv:
            for (int le = 0; le < 3; ++le) {
                const double ce = v.rt(ces[static_cast<std::size_t>(le)].edge);
                const double dv = rt0_div(mesh, cell, le);
                out += alpha * ce * ce * dv * dv * area;
            }
            break;
        case ARVariant::aD:
            for (const auto& q : tri_rule_deg2()) {
                const Vec2 x = q.l0 * a + q.l1 * b + q.l2 * d;
                for (int le = 0; le < 3; ++le) {
                    const double ce = v.rt(ces[static_cast<std::size_t>(le)].edge);
                    const Vec2 psi = rt0_value(mesh, cell, le, x);
                    out += alpha / (mesh.cell_h[t] * mesh.cell_h[t]) * q.w * area * ce * ce *
                           dot(psi, psi);
                }
            }
            break;
        case ARVariant::a0:
            for (const auto& q : tri_rule_deg2()) {
                const Vec2 x = q.l0 * a + q.l1 * b + q.l2 * d;
                const Vec2 vr = rt_value_at(v, cell, x);
                out += alpha / (mesh.cell_h[t] * mesh.cell_h[t]) * q.w * area * dot(vr, vr);
            }
            break;
        }
        return out;
    });
    return std::sqrt(s);
}

double norm_h(const FeFunction& v, const SchemeConfig& cfg) {
    require_primary(v, "norm_h");
    const Triangulation& mesh = *v.map->mesh;
    const double eps2 = block_sum(static_cast<std::size_t>(mesh.n_cells()), [&](std::size_t t) {
        const Mat2 eps = p1_cell_data(v, static_cast<int>(t)).grad.sym();
        return ddot(eps, eps) * mesh.cell_area[t];
    });
    const double r = norm_R(v, cfg);
    return std::sqrt(eps2 + r * r);
}

double norm_h_mixed(const FeFunction& v, const BoundarySpec& bspec, const SchemeConfig& cfg) {
    require_primary(v, "norm_h_mixed");
    const Triangulation& mesh = *v.map->mesh;
    double edge_term = 0.0;
    for (int e = 0; e < mesh.n_edges(); ++e) {
        if (!bspec.neumann[static_cast<std::size_t>(e)]) continue;
        const int cell = mesh.edge_cells[static_cast<std::size_t>(e)][0];
        const Mat2 eps = p1_cell_data(v, cell).grad.sym();
        const double he = mesh.edge_length[static_cast<std::size_t>(e)];
        edge_term += he * he * ddot(eps, eps); // h_e * |eps|^2 * |e|
    }
    const double pure = norm_h(v, cfg);
    return std::sqrt(pure * pure + edge_term);
}

double norm_h1(const FeFunction& v, const SchemeConfig& cfg) {
    const double nh = norm_h(v, cfg);
    const double nd = div_l2_norm(v);
    return std::sqrt(2.0 * cfg.mu * nh * nh + cfg.lambda * nd * nd);
}

double norm_h2(const FeFunction& v, const BoundarySpec& bspec, const SchemeConfig& cfg) {
    const double nh = norm_h_mixed(v, bspec, cfg);
    const double nd = div_l2_norm(v);
    return std::sqrt(2.0 * cfg.mu * nh * nh + cfg.lambda * nd * nd);
}

ConsistencyResidual consistency_residual(const ManufacturedSolution& ms, const FeFunction& v,
                                         const SchemeConfig& cfg) {
    require_primary(v, "consistency_residual");
    const Triangulation& mesh = *v.map->mesh;
    const double two_mu = 2.0 * cfg.mu;

    const double defining = block_sum(static_cast<std::size_t>(mesh.n_cells()), [&](std::size_t t) {
        const int cell = static_cast<int>(t);
        const auto& c = mesh.cells[t];
        const Vec2 a = mesh.vertices[c[0]], b = mesh.vertices[c[1]], d = mesh.vertices[c[2]];
        const auto cd = p1_cell_data(v, cell);
        const Mat2 eps_v = cd.grad.sym();
        double f_dot_v = 0.0;
        Mat2 int_eps_u;
        double int_div_u = 0.0;
        for (const auto& q : tri_rule_deg6()) {
            const Vec2 x = q.l0 * a + q.l1 * b + q.l2 * d;
            f_dot_v += q.w * dot(ms.body_force(x), evaluate_unchecked(v, cell, x).value);
            int_eps_u = int_eps_u + ms.grad_u(x).sym() * q.w;
            int_div_u += q.w * ms.div_u(x);
        }
        const double area = mesh.cell_area[t];
        return area * (f_dot_v - two_mu * ddot(int_eps_u, eps_v) -
                       cfg.lambda * int_div_u * cd.div);
    });

    const double reduced = block_sum(static_cast<std::size_t>(mesh.n_cells()), [&](std::size_t t) {
        const int cell = static_cast<int>(t);
        const auto& c = mesh.cells[t];
        const Vec2 a = mesh.vertices[c[0]], b = mesh.vertices[c[1]], d = mesh.vertices[c[2]];
        double s = 0.0;
        for (const auto& q : tri_rule_deg6()) {
            const Vec2 x = q.l0 * a + q.l1 * b + q.l2 * d;
            s += q.w * dot(ms.div_eps(x) * (-two_mu), rt_value_at(v, cell, x));
        }
        return s * mesh.cell_area[t];
    });

    return {defining, reduced};
}

std::vector<double> convergence_rates_structured(const std::vector<double>& errors) {
    if (errors.size() < 2)
        throw std::invalid_argument("convergence_rates: need at least two errors");
    std::vector<double> rates;
    for (std::size_t k = 1; k < errors.size(); ++k) {
        if (!(errors[k] > 0.0) || !(errors[k - 1] > 0.0))
            throw std::invalid_argument("convergence_rates: errors must be positive");
        rates.push_back(std::log2(errors[k - 1] / errors[k]));
    }
    return rates;
}

std::vector<double> convergence_rates_ndof(const std::vector<double>& errors,
                                           const std::vector<long long>& ndofs) {
    if (errors.size() < 2 || ndofs.size() != errors.size())
        throw std::invalid_argument("convergence_rates: need matching lists of >= 2 entries");
    std::vector<double> rates;
    for (std::size_t k = 1; k < errors.size(); ++k) {
        if (!(errors[k] > 0.0) || !(errors[k - 1] > 0.0))
            throw std::invalid_argument("convergence_rates: errors must be positive");
        const double hratio =
            std::sqrt(static_cast<double>(ndofs[k]) / static_cast<double>(ndofs[k - 1]));
        rates.push_back(std::log(errors[k - 1] / errors[k]) / std::log(hratio));
    }
    return rates;
}

} // namespace elastfem
