#include "elastfem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>

namespace elastfem {

const char* to_string(MeshErrc c) {
    switch (c) {
    case MeshErrc::io_error: return "io_error";
    case MeshErrc::parse_error: return "parse_error";
    case MeshErrc::duplicate_cell: return "duplicate_cell";
    case MeshErrc::degenerate_cell: return "degenerate_cell";
    case MeshErrc::non_manifold_edge: return "non_manifold_edge";
    case MeshErrc::non_convex_quad: return "non_convex_quad";
    case MeshErrc::invalid_argument: return "invalid_argument";
    }
    return "unknown";
}

int Triangulation::n_boundary_edges() const {
    int n = 0;
    for (int e = 0; e < n_edges(); ++e)
        if (is_boundary_edge(e)) ++n;
    return n;
}

Vec2 Triangulation::centroid(int cell) const {
    const auto& c = cells[static_cast<std::size_t>(cell)];
    return (vertices[c[0]] + vertices[c[1]] + vertices[c[2]]) / 3.0;
}

Vec2 Triangulation::edge_midpoint(int e) const {
    const auto& ev = edges[static_cast<std::size_t>(e)];
    return (vertices[ev[0]] + vertices[ev[1]]) * 0.5;
}

double Triangulation::max_h() const {
    double h = 0.0;
    for (double v : cell_h) h = std::max(h, v);
    return h;
}

std::array<double, 3> Triangulation::barycentric(int cell, const Vec2& p) const {
    const auto& c = cells[static_cast<std::size_t>(cell)];
    const Vec2 a = vertices[c[0]], b = vertices[c[1]], d = vertices[c[2]];
    const double twoA = cross(b - a, d - a);
    const double l0 = cross(b - p, d - p) / twoA;
    const double l1 = cross(d - p, a - p) / twoA;
    return {l0, l1, 1.0 - l0 - l1};
}

namespace {

// Builds edge topology and geometric caches for already validated, CCW
// cells. Throws on non-manifold edges.
void build_topology(Triangulation& mesh) {
    const int nc = mesh.n_cells();

    // global edges: sorted vertex pairs, lexicographic order
    std::map<std::pair<int, int>, int> edge_id;
    for (const auto& c : mesh.cells) {
        for (int k = 0; k < 3; ++k) {
            int a = c[(k + 1) % 3], b = c[(k + 2) % 3];
            if (a > b) std::swap(a, b);
            edge_id.emplace(std::make_pair(a, b), 0);
        }
    }
    mesh.edges.clear();
    mesh.edges.reserve(edge_id.size());
    int id = 0;
    for (auto& [key, val] : edge_id) {
        val = id++;
        mesh.edges.push_back({key.first, key.second});
    }

    const int ne = mesh.n_edges();
    mesh.edge_normal.resize(ne);
    mesh.edge_length.resize(ne);
    for (int e = 0; e < ne; ++e) {
        const Vec2 d = mesh.vertices[mesh.edges[e][1]] - mesh.vertices[mesh.edges[e][0]];
        const double len = norm(d);
        mesh.edge_length[e] = len;
        mesh.edge_normal[e] = rot90cw(d / len);
    }

    mesh.cell_edges.assign(static_cast<std::size_t>(nc), {});
    mesh.edge_cells.assign(static_cast<std::size_t>(ne), {-1, -1});
    for (int t = 0; t < nc; ++t) {
        const auto& c = mesh.cells[static_cast<std::size_t>(t)];
        for (int k = 0; k < 3; ++k) {
            const int a = c[(k + 1) % 3], b = c[(k + 2) % 3];
            const int e = edge_id.at(std::minmax(a, b));
            // +1 iff the cell traverses the edge in the global i->j direction
            // (the -90 degree normal of a CCW traversal points outward)
            const int sign = (a == mesh.edges[e][0]) ? 1 : -1;
            mesh.cell_edges[static_cast<std::size_t>(t)][static_cast<std::size_t>(k)] = {e, sign};
            auto& ec = mesh.edge_cells[static_cast<std::size_t>(e)];
            if (ec[0] < 0) {
                ec[0] = t;
            } else if (ec[1] < 0) {
                ec[1] = t;
            } else {
                throw MeshError(MeshErrc::non_manifold_edge,
                                "edge " + std::to_string(e) + " is shared by more than two cells");
            }
        }
    }

    mesh.boundary_marker.assign(static_cast<std::size_t>(ne), boundary_marker::interior);

    mesh.cell_area.resize(nc);
    mesh.cell_h.resize(nc);
    mesh.cell_rho.resize(nc);
    mesh.grad_bary.resize(nc);
    for (int t = 0; t < nc; ++t) {
        const auto& c = mesh.cells[static_cast<std::size_t>(t)];
        const Vec2 a = mesh.vertices[c[0]], b = mesh.vertices[c[1]], d = mesh.vertices[c[2]];
        const double twoA = cross(b - a, d - a);
        if (!(twoA > 0.0))
            throw MeshError(MeshErrc::degenerate_cell,
                            "cell " + std::to_string(t) + " has non-positive area");
        const double area = 0.5 * twoA;
        double per = 0.0, h = 0.0;
        for (int k = 0; k < 3; ++k) {
            const double l = mesh.edge_length[mesh.cell_edges[static_cast<std::size_t>(t)][static_cast<std::size_t>(k)].edge];
            per += l;
            h = std::max(h, l);
        }
        mesh.cell_area[static_cast<std::size_t>(t)] = area;
        mesh.cell_h[static_cast<std::size_t>(t)] = h;
        mesh.cell_rho[static_cast<std::size_t>(t)] = 4.0 * area / per; // twice the inradius
        // hat gradient at local vertex k: rot90ccw(opposite edge vector)/(2A)
        mesh.grad_bary[static_cast<std::size_t>(t)][0] = rot90ccw(d - b) / twoA;
        mesh.grad_bary[static_cast<std::size_t>(t)][1] = rot90ccw(a - d) / twoA;
        mesh.grad_bary[static_cast<std::size_t>(t)][2] = rot90ccw(b - a) / twoA;
    }
}

void mark_rectangle_sides(Triangulation& mesh) {
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& v : mesh.vertices) {
        xmin = std::min(xmin, v.x);
        xmax = std::max(xmax, v.x);
        ymin = std::min(ymin, v.y);
        ymax = std::max(ymax, v.y);
    }
    const double tol = 1e-12 * std::max(xmax - xmin, ymax - ymin);
    for (int e = 0; e < mesh.n_edges(); ++e) {
        if (!mesh.is_boundary_edge(e)) continue;
        const Vec2 p = mesh.vertices[mesh.edges[e][0]];
        const Vec2 q = mesh.vertices[mesh.edges[e][1]];
        int m = boundary_marker::generic;
        if (std::abs(p.x - xmin) < tol && std::abs(q.x - xmin) < tol)
            m = boundary_marker::left;
        else if (std::abs(p.x - xmax) < tol && std::abs(q.x - xmax) < tol)
            m = boundary_marker::right;
        else if (std::abs(p.y - ymin) < tol && std::abs(q.y - ymin) < tol)
            m = boundary_marker::bottom;
        else if (std::abs(p.y - ymax) < tol && std::abs(q.y - ymax) < tol)
            m = boundary_marker::top;
        mesh.boundary_marker[static_cast<std::size_t>(e)] = m;
    }
}

} // namespace

Triangulation generate_structured_unit_square(int n) {
    if (n < 1)
        throw MeshError(MeshErrc::invalid_argument, "grid size must be >= 1");
    Triangulation mesh;
    mesh.vertices.reserve(static_cast<std::size_t>((n + 1) * (n + 1)));
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i)
            mesh.vertices.emplace_back(double(i) / double(n), double(j) / double(n));
    auto vid = [n](int i, int j) { return j * (n + 1) + i; };
    mesh.cells.reserve(static_cast<std::size_t>(2 * n * n));
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            // split along the (i+1,j)-(i,j+1) anti-diagonal
            mesh.cells.push_back({vid(i, j), vid(i + 1, j), vid(i, j + 1)});
            mesh.cells.push_back({vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)});
        }
    }
    build_topology(mesh);
    mark_rectangle_sides(mesh);
    return mesh;
}

Triangulation generate_mapped_quad(const std::array<Vec2, 4>& corners, int n, int m) {
    if (n < 1 || m < 1)
        throw MeshError(MeshErrc::invalid_argument, "grid size must be >= 1");
    for (int k = 0; k < 4; ++k) {
        const Vec2 a = corners[static_cast<std::size_t>(k)];
        const Vec2 b = corners[static_cast<std::size_t>((k + 1) % 4)];
        const Vec2 c = corners[static_cast<std::size_t>((k + 2) % 4)];
        if (!(cross(b - a, c - b) > 0.0))
            throw MeshError(MeshErrc::non_convex_quad,
                            "corners must form a convex counterclockwise quadrilateral");
    }
    Triangulation mesh;
    auto map = [&corners](double s, double t) {
        return (1.0 - s) * (1.0 - t) * corners[0] + s * (1.0 - t) * corners[1] +
               s * t * corners[2] + (1.0 - s) * t * corners[3];
    };
    mesh.vertices.reserve(static_cast<std::size_t>((n + 1) * (m + 1)));
    for (int j = 0; j <= m; ++j)
        for (int i = 0; i <= n; ++i)
            mesh.vertices.push_back(map(double(i) / double(n), double(j) / double(m)));
    auto vid = [n](int i, int j) { return j * (n + 1) + i; };
    mesh.cells.reserve(static_cast<std::size_t>(2 * n * m));
    for (int j = 0; j < m; ++j) {
        for (int i = 0; i < n; ++i) {
            mesh.cells.push_back({vid(i, j), vid(i + 1, j), vid(i, j + 1)});
            mesh.cells.push_back({vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)});
        }
    }
    build_topology(mesh);

    // markers follow the parameter-space sides
    auto pvid = [](int a, int b) { return std::pair<int, int>(std::min(a, b), std::max(a, b)); };
    std::map<std::pair<int, int>, int> side;
    for (int j = 0; j < m; ++j) {
        side[pvid(vid(0, j), vid(0, j + 1))] = boundary_marker::left;
        side[pvid(vid(n, j), vid(n, j + 1))] = boundary_marker::right;
    }
    for (int i = 0; i < n; ++i) {
        side[pvid(vid(i, 0), vid(i + 1, 0))] = boundary_marker::bottom;
        side[pvid(vid(i, m), vid(i + 1, m))] = boundary_marker::top;
    }
    for (int e = 0; e < mesh.n_edges(); ++e) {
        if (!mesh.is_boundary_edge(e)) continue;
        auto it = side.find({mesh.edges[e][0], mesh.edges[e][1]});
        mesh.boundary_marker[static_cast<std::size_t>(e)] =
            it != side.end() ? it->second : boundary_marker::generic;
    }
    return mesh;
}

namespace {

std::vector<std::vector<std::string>> read_records(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw MeshError(MeshErrc::io_error, "cannot open '" + path + "'");
    std::vector<std::vector<std::string>> records;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::vector<std::string> toks;
        std::string t;
        while (ls >> t) toks.push_back(t);
        if (!toks.empty()) records.push_back(std::move(toks));
    }
    return records;
}

long to_long(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        const long v = std::stol(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw MeshError(MeshErrc::parse_error, "bad " + what + " '" + s + "'");
    }
}

double to_double(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw MeshError(MeshErrc::parse_error, "bad " + what + " '" + s + "'");
    }
}

} // namespace

Triangulation load_mesh(const std::string& node_path, const std::string& ele_path) {
    const auto nodes = read_records(node_path);
    if (nodes.empty() || nodes[0].size() < 2)
        throw MeshError(MeshErrc::parse_error, "missing node header in '" + node_path + "'");
    const long nv = to_long(nodes[0][0], "node count");
    const long dim = to_long(nodes[0][1], "dimension");
    if (dim != 2)
        throw MeshError(MeshErrc::parse_error, "only 2D node files are supported");
    if (static_cast<long>(nodes.size()) != nv + 1)
        throw MeshError(MeshErrc::parse_error, "node count does not match records");

    std::vector<long> node_ids(static_cast<std::size_t>(nv));
    Triangulation mesh;
    mesh.vertices.resize(static_cast<std::size_t>(nv));
    long min_node_id = std::numeric_limits<long>::max();
    for (long r = 0; r < nv; ++r) {
        const auto& rec = nodes[static_cast<std::size_t>(r + 1)];
        if (rec.size() < 3)
            throw MeshError(MeshErrc::parse_error, "short node record");
        node_ids[static_cast<std::size_t>(r)] = to_long(rec[0], "node index");
        min_node_id = std::min(min_node_id, node_ids[static_cast<std::size_t>(r)]);
    }
    if (min_node_id != 0 && min_node_id != 1)
        throw MeshError(MeshErrc::parse_error, "node indices must be 0- or 1-based");
    for (long r = 0; r < nv; ++r) {
        const auto& rec = nodes[static_cast<std::size_t>(r + 1)];
        const long id = node_ids[static_cast<std::size_t>(r)] - min_node_id;
        if (id < 0 || id >= nv)
            throw MeshError(MeshErrc::parse_error, "node index out of range");
        mesh.vertices[static_cast<std::size_t>(id)] =
            Vec2(to_double(rec[1], "coordinate"), to_double(rec[2], "coordinate"));
    }

    const auto eles = read_records(ele_path);
    if (eles.empty() || eles[0].size() < 2)
        throw MeshError(MeshErrc::parse_error, "missing element header in '" + ele_path + "'");
    const long nt = to_long(eles[0][0], "element count");
    if (to_long(eles[0][1], "nodes per element") != 3)
        throw MeshError(MeshErrc::parse_error, "only 3-node triangles are supported");
    if (static_cast<long>(eles.size()) != nt + 1)
        throw MeshError(MeshErrc::parse_error, "element count does not match records");

    mesh.cells.resize(static_cast<std::size_t>(nt));
    int reoriented = 0;
    for (long r = 0; r < nt; ++r) {
        const auto& rec = eles[static_cast<std::size_t>(r + 1)];
        if (rec.size() < 4)
            throw MeshError(MeshErrc::parse_error, "short element record");
        std::array<int, 3> c{};
        for (int k = 0; k < 3; ++k) {
            const long v = to_long(rec[static_cast<std::size_t>(k + 1)], "vertex index") - min_node_id;
            if (v < 0 || v >= nv)
                throw MeshError(MeshErrc::parse_error, "vertex index out of range");
            c[static_cast<std::size_t>(k)] = static_cast<int>(v);
        }
        if (c[0] == c[1] || c[1] == c[2] || c[0] == c[2])
            throw MeshError(MeshErrc::degenerate_cell,
                            "cell " + std::to_string(r) + " repeats a vertex");
        const Vec2 a = mesh.vertices[c[0]], b = mesh.vertices[c[1]], d = mesh.vertices[c[2]];
        const double twoA = cross(b - a, d - a);
        if (twoA == 0.0)
            throw MeshError(MeshErrc::degenerate_cell,
                            "cell " + std::to_string(r) + " has zero area");
        if (twoA < 0.0) {
            std::swap(c[1], c[2]);
            ++reoriented;
        }
        mesh.cells[static_cast<std::size_t>(r)] = c;
    }
    if (reoriented > 0)
        std::cerr << "load_mesh: reoriented " << reoriented << " clockwise cell(s)\n";

    std::vector<std::array<int, 3>> sorted(mesh.cells.begin(), mesh.cells.end());
    for (auto& c : sorted) std::sort(c.begin(), c.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw MeshError(MeshErrc::duplicate_cell, "duplicate cell in '" + ele_path + "'");

    build_topology(mesh);
    for (int e = 0; e < mesh.n_edges(); ++e)
        if (mesh.is_boundary_edge(e))
            mesh.boundary_marker[static_cast<std::size_t>(e)] = boundary_marker::generic;
    return mesh;
}

double shape_regularity(const Triangulation& mesh) {
    double g = 0.0;
    for (int t = 0; t < mesh.n_cells(); ++t)
        g = std::max(g, mesh.cell_h[static_cast<std::size_t>(t)] / mesh.cell_rho[static_cast<std::size_t>(t)]);
    return g;
}

std::string describe(const Triangulation& mesh) {
    std::ostringstream os;
    const int v = mesh.n_vertices(), t = mesh.n_cells(), e = mesh.n_edges();
    os << "vertices       " << v << "\n";
    os << "cells          " << t << "\n";
    os << "edges          " << e << "\n";
    os << "boundary edges " << mesh.n_boundary_edges() << "\n";
    os << "euler V-E+T    " << (v - e + t) << "\n";
    os << "ndof (2V+E)    " << (2LL * v + e) << "\n";
    os << "h              " << mesh.max_h() << "\n";
    os << "gamma          " << shape_regularity(mesh) << "\n";
    double amin = 1e300, amax = 0.0;
    for (double a : mesh.cell_area) {
        amin = std::min(amin, a);
        amax = std::max(amax, a);
    }
    os << "cell area      [" << amin << ", " << amax << "]\n";
    return os.str();
}

BoundarySpec BoundarySpec::pure_dirichlet(const Triangulation& mesh) {
    BoundarySpec b;
    b.kind = Kind::pure_dirichlet;
    b.neumann.assign(static_cast<std::size_t>(mesh.n_edges()), false);
    b.traction = [](Vec2) { return Vec2{0.0, 0.0}; };
    return b;
}

BoundarySpec BoundarySpec::mixed(const Triangulation& mesh,
                                 const std::function<bool(Vec2)>& neumann_where,
                                 std::function<Vec2(Vec2)> traction) {
    BoundarySpec b;
    b.kind = Kind::mixed;
    b.neumann.assign(static_cast<std::size_t>(mesh.n_edges()), false);
    b.traction = std::move(traction);
    int n_dirichlet = 0;
    for (int e = 0; e < mesh.n_edges(); ++e) {
        if (!mesh.is_boundary_edge(e)) continue;
        if (neumann_where(mesh.edge_midpoint(e)))
            b.neumann[static_cast<std::size_t>(e)] = true;
        else
            ++n_dirichlet;
    }
    if (n_dirichlet == 0)
        throw MeshError(MeshErrc::invalid_argument, "the Dirichlet boundary must be nonempty");
    return b;
}

BoundarySpec BoundarySpec::mixed_right(const Triangulation& mesh,
                                       std::function<Vec2(Vec2)> traction) {
    double xmax = -1e300;
    for (const auto& v : mesh.vertices) xmax = std::max(xmax, v.x);
    const double tol = 1e-12 * std::max(1.0, std::abs(xmax));
    return mixed(
        mesh, [xmax, tol](Vec2 p) { return p.x > xmax - tol; }, std::move(traction));
}

bool BoundarySpec::has_neumann_edges() const {
    for (bool b : neumann)
        if (b) return true;
    return false;
}

} // namespace elastfem
