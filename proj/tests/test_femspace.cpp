#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "elastfem/analysis.hpp"
#include "elastfem/femspace.hpp"
#include "elastfem/quadrature.hpp"
#include "support.hpp"

using namespace elastfem;
using namespace testsupport;

namespace {

constexpr double pi = std::numbers::pi;

DofMap primary_map(const Triangulation& mesh) {
    return DofMap::build(mesh, BoundarySpec::pure_dirichlet(mesh), DofLayout::p1_rt0);
}

// Dirichlet on the left side only, so nonzero linear fields satisfy the
// boundary data.
BoundarySpec left_dirichlet(const Triangulation& mesh) {
    return BoundarySpec::mixed(
        mesh, [](Vec2 p) { return p.x > 1e-9; }, [](Vec2) { return Vec2{0, 0}; });
}

} // namespace

TEST_CASE("quadrature rules integrate monomials exactly") {
    // reference triangle: int x^a y^b = a! b! / (a+b+2)!
    auto exact = [](int a, int b) {
        double num = 1.0, den = 1.0;
        for (int k = 2; k <= a + b + 2; ++k) den *= k;
        for (int k = 2; k <= a; ++k) num *= k;
        for (int k = 2; k <= b; ++k) num *= k;
        return num / den;
    };
    auto integrate = [&](const auto& rule, int a, int b) {
        double s = 0.0;
        for (const auto& q : rule) {
            const double x = q.l1, y = q.l2; // vertices (0,0), (1,0), (0,1)
            s += q.w * std::pow(x, a) * std::pow(y, b);
        }
        return 0.5 * s;
    };
    for (int a = 0; a + 0 <= 2; ++a)
        for (int b = 0; a + b <= 2; ++b)
            CHECK(integrate(tri_rule_deg2(), a, b) == doctest::Approx(exact(a, b)).epsilon(1e-13));
    for (int a = 0; a <= 6; ++a)
        for (int b = 0; a + b <= 6; ++b)
            CHECK(integrate(tri_rule_deg6(), a, b) == doctest::Approx(exact(a, b)).epsilon(1e-13));

    auto edge_int = [](const auto& rule, int p) {
        double s = 0.0;
        for (const auto& q : rule) s += q.w * std::pow(q.t, p);
        return s;
    };
    for (int p = 0; p <= 3; ++p)
        CHECK(edge_int(edge_rule_2(), p) == doctest::Approx(1.0 / (p + 1)).epsilon(1e-14));
    for (int p = 0; p <= 5; ++p)
        CHECK(edge_int(edge_rule_3(), p) == doctest::Approx(1.0 / (p + 1)).epsilon(1e-14));
    for (int p = 0; p <= 9; ++p)
        CHECK(edge_int(edge_rule_5(), p) == doctest::Approx(1.0 / (p + 1)).epsilon(1e-13));
}

TEST_CASE("dof counts and constraints") {
    const auto mesh = generate_structured_unit_square(8);

    const auto pd = primary_map(mesh);
    CHECK(pd.reported_ndof == 370);
    CHECK(pd.n_raw == 370);
    // free: interior vertices (49) x 2 + interior edges (208 - 32)
    CHECK(pd.n_free == 2 * 49 + 176);

    const auto mr = DofMap::build(
        mesh, BoundarySpec::mixed_right(mesh, [](Vec2) { return Vec2{0, 0}; }),
        DofLayout::p1_rt0);
    CHECK(mr.reported_ndof == 370); // reported count ignores constraints
    // extra free: 7 vertices interior to the right side x 2, 8 right edges
    CHECK(mr.n_free == pd.n_free + 14 + 8);

    const auto cr = DofMap::build(mesh, BoundarySpec::pure_dirichlet(mesh), DofLayout::cr);
    CHECK(cr.reported_ndof == 2 * 208);
    CHECK(cr.n_free == 2 * 176);

    const auto p1 = DofMap::build(mesh, BoundarySpec::pure_dirichlet(mesh), DofLayout::p1);
    CHECK(p1.reported_ndof == 162);
    CHECK(p1.n_free == 98);
}

TEST_CASE("lowest-order Raviart-Thomas basis") {
    const auto mesh = generate_structured_unit_square(1);
    // cell 0 = {(0,0), (1,0), (0,1)}; local edge 0 is the hypotenuse
    const int t = 0, le = 0;
    const auto& ce = mesh.cell_edges[t][le];
    const Vec2 a = mesh.vertices[mesh.edges[ce.edge][0]];
    const Vec2 b = mesh.vertices[mesh.edges[ce.edge][1]];

    // psi = sign * sqrt(2) * (x, y)
    const Vec2 probe{0.3, 0.25};
    const Vec2 val = rt0_value(mesh, t, le, probe);
    CHECK(val.x == doctest::Approx(ce.sign * std::sqrt(2.0) * probe.x).epsilon(1e-14));
    CHECK(val.y == doctest::Approx(ce.sign * std::sqrt(2.0) * probe.y).epsilon(1e-14));

    // vanishes at the opposite vertex
    CHECK(norm(rt0_value(mesh, t, le, Vec2{0, 0})) < 1e-15);

    // unit normal trace along its own edge, with the global normal
    for (const auto& q : edge_rule_3()) {
        const Vec2 x = a + q.t * (b - a);
        CHECK(dot(rt0_value(mesh, t, le, x), mesh.edge_normal[ce.edge]) ==
              doctest::Approx(1.0).epsilon(1e-14));
    }

    // zero normal trace on the other two edges
    for (int other = 1; other < 3; ++other) {
        const auto& oe = mesh.cell_edges[t][other];
        const Vec2 oa = mesh.vertices[mesh.edges[oe.edge][0]];
        const Vec2 ob = mesh.vertices[mesh.edges[oe.edge][1]];
        for (const auto& q : edge_rule_3()) {
            const Vec2 x = oa + q.t * (ob - oa);
            CHECK(std::abs(dot(rt0_value(mesh, t, le, x), mesh.edge_normal[oe.edge])) < 1e-14);
        }
    }

    // constant divergence |e| / |T|
    CHECK(rt0_div(mesh, t, le) == doctest::Approx(ce.sign * 2.0 * std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("nodal, nonconforming, and bubble bases") {
    const auto mesh = generate_structured_unit_square(3);
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> unit(0.1, 0.9);

    for (int t = 0; t < mesh.n_cells(); ++t) {
        // partition of unity at a random interior point
        const auto bary0 = std::array<double, 3>{unit(rng), unit(rng), unit(rng)};
        const double s = bary0[0] + bary0[1] + bary0[2];
        const auto& c = mesh.cells[t];
        const Vec2 x = (bary0[0] * mesh.vertices[c[0]] + bary0[1] * mesh.vertices[c[1]] +
                        bary0[2] * mesh.vertices[c[2]]) /
                       s;
        double hats = 0.0;
        for (int k = 0; k < 3; ++k) hats += p1_hat(mesh, t, k, x);
        CHECK(hats == doctest::Approx(1.0).epsilon(1e-13));

        for (int le = 0; le < 3; ++le) {
            const int e = mesh.cell_edges[t][le].edge;
            const Vec2 mid = mesh.edge_midpoint(e);
            // midpoint Kronecker property of the nonconforming hat
            for (int lf = 0; lf < 3; ++lf) {
                const double expect = le == lf ? 1.0 : 0.0;
                CHECK(cr_hat(mesh, t, lf, mid) == doctest::Approx(expect).epsilon(1e-13));
            }
            // bubble: n_e/4 at its midpoint, zero on the other edges
            const Vec2 bub = br_bubble(mesh, t, le, mid);
            const Vec2 n = mesh.edge_normal[e];
            CHECK(norm(bub - 0.25 * n) < 1e-14);
            for (int lf = 0; lf < 3; ++lf) {
                if (lf == le) continue;
                const Vec2 omid = mesh.edge_midpoint(mesh.cell_edges[t][lf].edge);
                CHECK(norm(br_bubble(mesh, t, le, omid)) < 1e-14);
            }
        }
    }
}

TEST_CASE("nodal interpolation") {
    const auto mesh = generate_structured_unit_square(4);
    const auto dm = DofMap::build(mesh, left_dirichlet(mesh), DofLayout::p1_rt0);

    SUBCASE("reproduces linear fields exactly") {
        const auto v = [](Vec2 p) { return Vec2{0.7 * p.x, -1.3 * p.x + 0.0 * p.y}; };
        const auto fe = interp_nodal(dm, v);
        std::mt19937 rng(3);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int k = 0; k < 50; ++k) {
            const Vec2 p{u(rng), u(rng)};
            const int cell = locate_cell(mesh, p);
            REQUIRE(cell >= 0);
            const auto r = evaluate(fe, cell, p);
            CHECK(norm(r.value - v(p)) < 1e-13);
        }
    }

    SUBCASE("matches vertex values for smooth fields") {
        const auto v = [](Vec2 p) {
            return Vec2{std::sin(pi * p.x) * std::sin(pi * p.y), 0.0};
        };
        const auto fe = interp_nodal(dm, v);
        for (int vi = 0; vi < mesh.n_vertices(); ++vi) {
            CHECK(fe.p1(vi, 0) == v(mesh.vertices[vi]).x);
            CHECK(fe.p1(vi, 1) == 0.0);
        }
    }

    SUBCASE("second-order interpolation error") {
        const auto v = [](Vec2 p) {
            return Vec2{std::sin(pi * p.x) * std::sin(pi * p.y),
                        std::sin(2 * pi * p.x) * p.y * p.y};
        };
        double prev = 0.0;
        for (int k = 0; k < 2; ++k) {
            const int n = 8 << k;
            const auto m = generate_structured_unit_square(n);
            const auto d = primary_map(m);
            const double err = error_l2(interp_nodal(d, v), v);
            if (k > 0) CHECK(prev / err == doctest::Approx(4.0).epsilon(0.1));
            prev = err;
        }
    }
}

TEST_CASE("Raviart-Thomas interpolation") {
    const auto mesh = generate_structured_unit_square(4);
    const auto dm = primary_map(mesh);

    SUBCASE("constants: flux dofs and zero divergence") {
        const Vec2 w{0.8, -0.4};
        const auto fe = interp_rt(dm, [w](Vec2) { return w; });
        for (int e = 0; e < mesh.n_edges(); ++e)
            CHECK(fe.rt(e) == doctest::Approx(dot(w, mesh.edge_normal[e])).epsilon(1e-13));
        for (int t = 0; t < mesh.n_cells(); ++t)
            CHECK(std::abs(cell_divergence(fe, t)) < 1e-12);
    }

    SUBCASE("identity field has divergence 2") {
        const auto fe = interp_rt(dm, [](Vec2 p) { return p; });
        for (int t = 0; t < mesh.n_cells(); ++t)
            CHECK(cell_divergence(fe, t) == doctest::Approx(2.0).epsilon(1e-12));
    }

    SUBCASE("divergence equals the cell mean for (x^2, 0)") {
        const auto fe = interp_rt(dm, [](Vec2 p) { return Vec2{p.x * p.x, 0.0}; });
        for (int t = 0; t < mesh.n_cells(); ++t) {
            const double mean_div = 2.0 * mesh.centroid(t).x;
            CHECK(cell_divergence(fe, t) == doctest::Approx(mean_div).epsilon(1e-12));
        }
    }

    SUBCASE("midpoint variant agrees for fields with linear traces") {
        const auto v = [](Vec2 p) { return Vec2{0.3 * p.x + 0.1 * p.y, 0.2 - p.x}; };
        const auto a = interp_rt(dm, v);
        const auto b = interp_rt_midpoint(dm, v);
        for (int e = 0; e < mesh.n_edges(); ++e)
            CHECK(a.rt(e) == doctest::Approx(b.rt(e)).epsilon(1e-13));
    }
}

TEST_CASE("composite interpolation") {
    const auto mesh = generate_structured_unit_square(4);
    const auto dm = primary_map(mesh);

    SUBCASE("no Raviart-Thomas remainder for vertex-block functions") {
        const auto v = [](Vec2 p) { return Vec2{1.0 - 2.0 * p.y, 0.5 * p.x}; };
        const auto fe = interp_composite(dm, v);
        for (int e = 0; e < mesh.n_edges(); ++e) CHECK(std::abs(fe.rt(e)) < 1e-14);
    }

    SUBCASE("divergence commutes with the projection for (x^2, 0)") {
        const auto v = [](Vec2 p) { return Vec2{p.x * p.x, 0.0}; };
        const auto fe = interp_composite(dm, v);
        const auto ph = project_p0(mesh, [](Vec2 p) { return 2.0 * p.x; });
        for (int t = 0; t < mesh.n_cells(); ++t)
            CHECK(cell_divergence(fe, t) == doctest::Approx(ph[t]).epsilon(1e-12));
    }

    SUBCASE("first-order accuracy in the broken energy norm") {
        const auto v = [](Vec2 p) {
            return Vec2{std::sin(pi * p.x) * std::sin(pi * p.y),
                        std::sin(pi * p.x) * std::sin(2 * pi * p.y)};
        };
        const auto grad_v = [](Vec2 p) {
            Mat2 g;
            g(0, 0) = pi * std::cos(pi * p.x) * std::sin(pi * p.y);
            g(0, 1) = pi * std::sin(pi * p.x) * std::cos(pi * p.y);
            g(1, 0) = pi * std::cos(pi * p.x) * std::sin(2 * pi * p.y);
            g(1, 1) = 2 * pi * std::sin(pi * p.x) * std::cos(2 * pi * p.y);
            return g;
        };
        SchemeConfig cfg; // adiv, alpha 1
        std::vector<double> l2s, energies;
        for (int k = 0; k < 3; ++k) {
            const auto m = generate_structured_unit_square(8 << k);
            const auto d = primary_map(m);
            const auto fe = interp_composite(d, v);
            l2s.push_back(error_l2(fe, v));
            // energy part: strain mismatch of the vertex block plus the
            // stabilization norm of the edge-block remainder
            const double eps_part = error_h1_broken(fe, grad_v, /*include_rt=*/false);
            const double r_part = norm_R(fe.rt_part(), cfg);
            energies.push_back(std::sqrt(eps_part * eps_part + r_part * r_part));
        }
        const auto l2_rates = convergence_rates_structured(l2s);
        const auto en_rates = convergence_rates_structured(energies);
        for (double r : l2_rates) CHECK(r > 1.9);
        for (double r : en_rates) CHECK(r > 0.9);
    }
}

TEST_CASE("piecewise-constant projection") {
    const auto mesh = generate_structured_unit_square(1);

    SUBCASE("constants project to themselves") {
        const auto p = project_p0(mesh, [](Vec2) { return 3.25; });
        for (double v : p) CHECK(v == doctest::Approx(3.25).epsilon(1e-14));
    }

    SUBCASE("x projects to the centroid coordinate") {
        const auto p = project_p0(mesh, [](Vec2 q) { return q.x; });
        for (int t = 0; t < mesh.n_cells(); ++t)
            CHECK(p[t] == doctest::Approx(mesh.centroid(t).x).epsilon(1e-14));
        // cell 0 is the reference triangle: mean of x is 1/3
        CHECK(p[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    }

    SUBCASE("first-order accuracy for smooth fields") {
        const auto r = [](Vec2 p) { return std::sin(pi * p.x); };
        std::vector<double> errs;
        for (int k = 0; k < 3; ++k) {
            const auto m = generate_structured_unit_square(8 << k);
            const auto ph = project_p0(m, r);
            double err2 = 0.0;
            for (int t = 0; t < m.n_cells(); ++t) {
                const auto& c = m.cells[t];
                const Vec2 a = m.vertices[c[0]], b = m.vertices[c[1]], d = m.vertices[c[2]];
                for (const auto& q : tri_rule_deg6()) {
                    const Vec2 x = q.l0 * a + q.l1 * b + q.l2 * d;
                    const double diff = r(x) - ph[t];
                    err2 += q.w * m.cell_area[t] * diff * diff;
                }
            }
            errs.push_back(std::sqrt(err2));
        }
        for (double rate : convergence_rates_structured(errs)) CHECK(rate > 0.95);
    }
}

TEST_CASE("point evaluation") {
    const auto mesh = generate_structured_unit_square(2);
    const auto dm = primary_map(mesh);

    SUBCASE("zero coefficients evaluate to zero") {
        const auto fe = FeFunction::zeros(dm);
        const auto r = evaluate(fe, 0, mesh.centroid(0));
        CHECK(norm(r.value) == 0.0);
        CHECK(frob2(r.gradient) == 0.0);
        CHECK(r.divergence == 0.0);
    }

    SUBCASE("single edge dof reproduces the basis divergence") {
        for (int t = 0; t < mesh.n_cells(); ++t) {
            for (int le = 0; le < 3; ++le) {
                auto fe = FeFunction::zeros(dm);
                fe.rt(mesh.cell_edges[t][le].edge) = 1.0;
                CHECK(cell_divergence(fe, t) ==
                      doctest::Approx(rt0_div(mesh, t, le)).epsilon(1e-13));
            }
        }
    }

    SUBCASE("gradient matches central differences") {
        std::mt19937 rng(11);
        std::uniform_real_distribution<double> coef(-1.0, 1.0);
        auto fe = FeFunction::zeros(dm);
        for (auto& c : fe.coef) c = coef(rng);
        const double step = 1e-6;
        for (int t = 0; t < mesh.n_cells(); ++t) {
            const Vec2 x = mesh.centroid(t);
            const auto g = evaluate(fe, t, x).gradient;
            for (int j = 0; j < 2; ++j) {
                const Vec2 dxj = j == 0 ? Vec2{step, 0} : Vec2{0, step};
                const Vec2 fp = evaluate_unchecked(fe, t, x + dxj).value;
                const Vec2 fm = evaluate_unchecked(fe, t, x - dxj).value;
                const Vec2 fd = (fp - fm) / (2 * step);
                CHECK(g(0, j) == doctest::Approx(fd.x).epsilon(1e-6));
                CHECK(g(1, j) == doctest::Approx(fd.y).epsilon(1e-6));
            }
        }
    }

    SUBCASE("points outside the cell are rejected") {
        const auto fe = FeFunction::zeros(dm);
        CHECK_THROWS_AS(evaluate(fe, 0, Vec2{2.0, 2.0}), std::domain_error);
    }
}

TEST_CASE("commuting diagram on random polynomial fields") {
    // both interpolations reproduce the elementwise mean divergence, on a
    // structured grid and on a skewed mapped one
    const auto square = generate_structured_unit_square(4);
    const auto skewed = generate_mapped_quad(
        {Vec2{0, 0}, Vec2{2.1, 0.3}, Vec2{1.9, 2.2}, Vec2{-0.4, 1.8}}, 3, 2);

    std::mt19937 rng(2024);
    for (const Triangulation* mesh : {&square, &skewed}) {
        const auto dm = DofMap::build(*mesh, BoundarySpec::pure_dirichlet(*mesh),
                                      DofLayout::p1_rt0);
        for (int trial = 0; trial < 25; ++trial) {
            const auto f = PolyField::random(rng, 3);
            const auto rt = interp_rt(dm, [&](Vec2 p) { return f(p); });
            const auto comp = interp_composite(dm, [&](Vec2 p) { return f(p); });
            const auto ph = project_p0(*mesh, [&](Vec2 p) { return f.divergence(p); });
            double worst = 0.0;
            for (int t = 0; t < mesh->n_cells(); ++t) {
                worst = std::max(worst, std::abs(cell_divergence(rt, t) - ph[t]));
                worst = std::max(worst, std::abs(cell_divergence(comp, t) - ph[t]));
            }
            CHECK(worst < 1e-11);
        }
    }
}

TEST_CASE("unisolvence: defining functionals recover the coefficients") {
    const auto mesh = generate_structured_unit_square(3);
    const auto dm = primary_map(mesh);
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> coef(-2.0, 2.0);

    for (int trial = 0; trial < 5; ++trial) {
        auto w = FeFunction::zeros(dm);
        for (auto& c : w.coef) c = coef(rng);
        const auto w1 = w.p1_part();

        // vertex block: nodal values of the vertex-block part
        for (int v = 0; v < mesh.n_vertices(); ++v) {
            bool found = false;
            for (int t = 0; t < mesh.n_cells() && !found; ++t)
                for (int k = 0; k < 3; ++k)
                    if (mesh.cells[t][k] == v) {
                        const auto val = evaluate_unchecked(w1, t, mesh.vertices[v]).value;
                        CHECK(val.x == doctest::Approx(w.p1(v, 0)).epsilon(1e-12));
                        CHECK(val.y == doctest::Approx(w.p1(v, 1)).epsilon(1e-12));
                        found = true;
                        break;
                    }
        }

        // edge block: mean normal flux of the remainder
        for (int e = 0; e < mesh.n_edges(); ++e) {
            const int t = mesh.edge_cells[e][0];
            const Vec2 a = mesh.vertices[mesh.edges[e][0]];
            const Vec2 b = mesh.vertices[mesh.edges[e][1]];
            double flux = 0.0;
            for (const auto& q : edge_rule_3()) {
                const Vec2 x = a + q.t * (b - a);
                const Vec2 rem = evaluate_unchecked(w, t, x).value -
                                 evaluate_unchecked(w1, t, x).value;
                flux += q.w * dot(rem, mesh.edge_normal[e]);
            }
            CHECK(flux == doctest::Approx(w.rt(e)).epsilon(1e-12));
        }
    }
}

TEST_CASE("interpolation convergence orders") {
    const auto v = [](Vec2 p) {
        return Vec2{std::sin(pi * p.x) * std::sin(pi * p.y),
                    std::cos(pi * p.x) * std::sin(pi * p.y)};
    };
    std::vector<double> nodal, composite, proj;
    for (int k = 0; k < 4; ++k) {
        const auto mesh = generate_structured_unit_square(8 << k);
        const auto dm = DofMap::build(mesh, BoundarySpec::pure_dirichlet(mesh),
                                      DofLayout::p1_rt0);
        nodal.push_back(error_l2(interp_nodal(dm, v), v));
        composite.push_back(error_l2(interp_composite(dm, v), v));
        const auto r = [](Vec2 p) { return std::sin(pi * p.x); };
        const auto ph = project_p0(mesh, r);
        double err2 = 0.0;
        for (int t = 0; t < mesh.n_cells(); ++t) {
            const auto& c = mesh.cells[t];
            const Vec2 a = mesh.vertices[c[0]], b = mesh.vertices[c[1]], d = mesh.vertices[c[2]];
            for (const auto& q : tri_rule_deg6()) {
                const Vec2 x = q.l0 * a + q.l1 * b + q.l2 * d;
                err2 += q.w * mesh.cell_area[t] * (r(x) - ph[t]) * (r(x) - ph[t]);
            }
        }
        proj.push_back(std::sqrt(err2));
    }
    for (double r : convergence_rates_structured(nodal)) CHECK(r >= 1.95);
    for (double r : convergence_rates_structured(composite)) CHECK(r >= 1.95);
    for (double r : convergence_rates_structured(proj)) CHECK(r >= 0.98);
}
