#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "elastfem/mesh.hpp"
#include "support.hpp"

using namespace elastfem;
using namespace testsupport;

namespace {
const std::array<Vec2, 4> membrane_corners{Vec2{0, 0}, Vec2{48, 44}, Vec2{48, 60}, Vec2{0, 44}};
}

TEST_CASE("structured grid counts match the dof bookkeeping") {
    const auto m8 = generate_structured_unit_square(8);
    CHECK(m8.n_vertices() == 81);
    CHECK(m8.n_cells() == 128);
    CHECK(m8.n_edges() == 208);
    CHECK(2 * m8.n_vertices() + m8.n_edges() == 370);

    const auto m16 = generate_structured_unit_square(16);
    CHECK(2 * m16.n_vertices() + m16.n_edges() == 1378);

    const auto m1 = generate_structured_unit_square(1);
    CHECK(m1.n_vertices() == 4);
    CHECK(m1.n_cells() == 2);
    CHECK(m1.n_edges() == 5);
    CHECK(m1.n_vertices() - m1.n_edges() + m1.n_cells() == 1);

    CHECK_THROWS_AS(generate_structured_unit_square(0), MeshError);
}

TEST_CASE("edge orientation and normals") {
    const auto mesh = generate_structured_unit_square(5);

    for (int e = 0; e < mesh.n_edges(); ++e) {
        CHECK(mesh.edges[e][0] < mesh.edges[e][1]);
        CHECK(std::abs(norm(mesh.edge_normal[e]) - 1.0) < 1e-14);
        // normal = i->j direction rotated by -90 degrees
        const Vec2 d = mesh.vertices[mesh.edges[e][1]] - mesh.vertices[mesh.edges[e][0]];
        CHECK(std::abs(cross(d / norm(d), mesh.edge_normal[e]) + 1.0) < 1e-14);
        CHECK(std::abs(dot(d, mesh.edge_normal[e])) < 1e-14);
    }

    // opposite signs across interior edges, one cell on boundary edges
    std::vector<int> sign_sum(mesh.n_edges(), 0), touch(mesh.n_edges(), 0);
    for (int t = 0; t < mesh.n_cells(); ++t)
        for (const auto& ce : mesh.cell_edges[t]) {
            sign_sum[ce.edge] += ce.sign;
            ++touch[ce.edge];
        }
    for (int e = 0; e < mesh.n_edges(); ++e) {
        if (mesh.is_boundary_edge(e)) {
            CHECK(touch[e] == 1);
        } else {
            CHECK(touch[e] == 2);
            CHECK(sign_sum[e] == 0);
        }
    }

    CHECK(mesh.n_vertices() - mesh.n_edges() + mesh.n_cells() == 1);
}

TEST_CASE("cell geometry: closed polygon and divergence theorem") {
    const auto mesh = generate_structured_unit_square(4);
    for (int t = 0; t < mesh.n_cells(); ++t) {
        CHECK(mesh.cell_area[t] > 0.0);
        Vec2 closed{};
        double div_sum = 0.0;
        for (const auto& ce : mesh.cell_edges[t]) {
            const double len = mesh.edge_length[ce.edge];
            closed += (ce.sign * len) * mesh.edge_normal[ce.edge];
            // midpoint rule is exact for v = x linear on the edge
            const Vec2 mid = mesh.edge_midpoint(ce.edge);
            div_sum += ce.sign * len * dot(mid, mesh.edge_normal[ce.edge]);
        }
        CHECK(norm(closed) < 1e-13);
        CHECK(std::abs(div_sum / mesh.cell_area[t] - 2.0) < 1e-12);
    }
}

TEST_CASE("refinement halves every cell diameter exactly") {
    const auto coarse = generate_structured_unit_square(8);
    const auto fine = generate_structured_unit_square(16);
    // congruent cells: a single h value per mesh
    for (double h : coarse.cell_h) CHECK(h == coarse.cell_h[0]);
    for (double h : fine.cell_h) CHECK(h == 0.5 * coarse.cell_h[0]);
}

TEST_CASE("geometric quantities on reference and equilateral triangles") {
    // cell 0 of the n=1 grid is the unit reference triangle
    const auto m1 = generate_structured_unit_square(1);
    CHECK(m1.cell_area[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(m1.cell_h[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));

    // single equilateral triangle via the file path
    const std::string stem = temp_dir() + "/equilateral";
    write_file(stem + ".node", "3 2 0 0\n1 0 0\n2 1 0\n3 0.5 0.86602540378443865\n");
    write_file(stem + ".ele", "1 3 0\n1 1 2 3\n");
    const auto eq = load_mesh(stem + ".node", stem + ".ele");
    CHECK(shape_regularity(eq) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-10));

    // congruent cells on the structured grid: gamma identical per cell
    const auto m8 = generate_structured_unit_square(8);
    double lo = 1e300, hi = 0.0;
    for (int t = 0; t < m8.n_cells(); ++t) {
        lo = std::min(lo, m8.cell_h[t] / m8.cell_rho[t]);
        hi = std::max(hi, m8.cell_h[t] / m8.cell_rho[t]);
    }
    CHECK(hi - lo < 1e-13);
    CHECK(shape_regularity(m8) == doctest::Approx(hi).epsilon(1e-14));
}

TEST_CASE("mapped quadrilateral generator") {
    SUBCASE("unit corners reproduce the structured grid") {
        const std::array<Vec2, 4> unit{Vec2{0, 0}, Vec2{1, 0}, Vec2{1, 1}, Vec2{0, 1}};
        const auto a = generate_mapped_quad(unit, 1, 1);
        const auto b = generate_structured_unit_square(1);
        REQUIRE(a.n_vertices() == b.n_vertices());
        REQUIRE(a.n_cells() == b.n_cells());
        REQUIRE(a.n_edges() == b.n_edges());
        for (int v = 0; v < a.n_vertices(); ++v) {
            CHECK(a.vertices[v].x == b.vertices[v].x);
            CHECK(a.vertices[v].y == b.vertices[v].y);
        }
        CHECK(a.cells == b.cells);
    }

    SUBCASE("membrane corners at n=m=2") {
        const auto mesh = generate_mapped_quad(membrane_corners, 2, 2);
        REQUIRE(mesh.n_vertices() == 9);
        const std::vector<Vec2> expected{{0, 0}, {48, 44}, {48, 60}, {0, 44}, {48, 52}};
        for (const auto& p : expected) {
            bool found = false;
            for (const auto& v : mesh.vertices)
                if (norm(v - p) < 1e-12) found = true;
            CHECK(found);
        }
    }

    SUBCASE("fine membrane mesh is valid") {
        const auto mesh = generate_mapped_quad(membrane_corners, 32, 32);
        for (double a : mesh.cell_area) CHECK(a > 0.0);
        CHECK(std::isfinite(shape_regularity(mesh)));
        CHECK(mesh.n_vertices() - mesh.n_edges() + mesh.n_cells() == 1);
    }

    SUBCASE("non-convex corners are rejected") {
        // reflex corner
        const std::array<Vec2, 4> bad{Vec2{0, 0}, Vec2{1, 0}, Vec2{0.2, 0.2}, Vec2{0, 1}};
        CHECK_THROWS_AS(generate_mapped_quad(bad, 2, 2), MeshError);
        // clockwise order
        const std::array<Vec2, 4> cw{Vec2{0, 0}, Vec2{0, 1}, Vec2{1, 1}, Vec2{1, 0}};
        CHECK_THROWS_AS(generate_mapped_quad(cw, 2, 2), MeshError);
    }
}

TEST_CASE("node/ele import") {
    const std::string dir = temp_dir();

    SUBCASE("round trip of a generated grid") {
        const auto orig = generate_structured_unit_square(2);
        save_node_ele(orig, dir + "/roundtrip");
        const auto back = load_mesh(dir + "/roundtrip.node", dir + "/roundtrip.ele");
        REQUIRE(back.n_vertices() == orig.n_vertices());
        REQUIRE(back.n_cells() == orig.n_cells());
        REQUIRE(back.n_edges() == orig.n_edges());
        CHECK(back.edges == orig.edges);
        CHECK(back.edge_cells == orig.edge_cells);
        for (int e = 0; e < back.n_edges(); ++e)
            CHECK(back.is_boundary_edge(e) == orig.is_boundary_edge(e));
    }

    SUBCASE("clockwise triangles are reoriented") {
        write_file(dir + "/cw.node", "3 2 0 0\n1 0 0\n2 1 0\n3 0 1\n");
        write_file(dir + "/cw.ele", "1 3 0\n1 1 3 2\n"); // clockwise
        const auto mesh = load_mesh(dir + "/cw.node", dir + "/cw.ele");
        CHECK(mesh.cell_area[0] > 0.0);
    }

    SUBCASE("an edge shared by three triangles is non-manifold") {
        write_file(dir + "/nm.node", "5 2 0 0\n1 0 0\n2 1 0\n3 0 1\n4 1 1\n5 -1 -1\n");
        write_file(dir + "/nm.ele", "3 3 0\n1 1 2 3\n2 2 4 3\n3 3 5 2\n");
        try {
            load_mesh(dir + "/nm.node", dir + "/nm.ele");
            FAIL("expected non-manifold error");
        } catch (const MeshError& e) {
            CHECK(e.code() == MeshErrc::non_manifold_edge);
        }
    }

    SUBCASE("duplicate cells are rejected") {
        write_file(dir + "/dup.node", "4 2 0 0\n1 0 0\n2 1 0\n3 0 1\n4 1 1\n");
        write_file(dir + "/dup.ele", "2 3 0\n1 1 2 3\n2 3 1 2\n");
        try {
            load_mesh(dir + "/dup.node", dir + "/dup.ele");
            FAIL("expected duplicate error");
        } catch (const MeshError& e) {
            CHECK(e.code() == MeshErrc::duplicate_cell);
        }
    }

    SUBCASE("degenerate cells are rejected") {
        write_file(dir + "/deg.node", "3 2 0 0\n1 0 0\n2 1 0\n3 2 0\n");
        write_file(dir + "/deg.ele", "1 3 0\n1 1 2 3\n");
        try {
            load_mesh(dir + "/deg.node", dir + "/deg.ele");
            FAIL("expected degenerate error");
        } catch (const MeshError& e) {
            CHECK(e.code() == MeshErrc::degenerate_cell);
        }
    }

    SUBCASE("missing and malformed files") {
        CHECK_THROWS_AS(load_mesh(dir + "/nope.node", dir + "/nope.ele"), MeshError);
        write_file(dir + "/bad.node", "2 2 0 0\n1 0 zero\n2 1 0\n");
        write_file(dir + "/bad.ele", "1 3 0\n1 1 2 1\n");
        CHECK_THROWS_AS(load_mesh(dir + "/bad.node", dir + "/bad.ele"), MeshError);
    }
}

TEST_CASE("boundary classification") {
    const auto mesh = generate_structured_unit_square(6);

    const auto pd = BoundarySpec::pure_dirichlet(mesh);
    CHECK(pd.kind == BoundarySpec::Kind::pure_dirichlet);
    CHECK_FALSE(pd.has_neumann_edges());

    const auto mr = BoundarySpec::mixed_right(mesh, [](Vec2) { return Vec2{1, 0}; });
    CHECK(mr.kind == BoundarySpec::Kind::mixed);
    int n_neumann = 0;
    for (int e = 0; e < mesh.n_edges(); ++e) {
        if (mr.neumann[e]) {
            ++n_neumann;
            CHECK(mesh.boundary_marker[e] == boundary_marker::right);
        }
    }
    CHECK(n_neumann == 6);

    // the Dirichlet part must stay nonempty
    CHECK_THROWS_AS(BoundarySpec::mixed(
                        mesh, [](Vec2) { return true; }, nullptr),
                    MeshError);

    // side markers cover the boundary
    std::set<int> markers;
    for (int e = 0; e < mesh.n_edges(); ++e)
        if (mesh.is_boundary_edge(e)) markers.insert(mesh.boundary_marker[e]);
    CHECK(markers == std::set<int>{boundary_marker::left, boundary_marker::right,
                                   boundary_marker::bottom, boundary_marker::top});
}

TEST_CASE("statistics dump mentions the headline numbers") {
    const auto mesh = generate_structured_unit_square(8);
    const std::string s = describe(mesh);
    CHECK(s.find("81") != std::string::npos);
    CHECK(s.find("208") != std::string::npos);
    CHECK(s.find("370") != std::string::npos);
}
