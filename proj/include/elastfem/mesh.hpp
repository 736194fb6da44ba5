#ifndef ELASTFEM_MESH_HPP
#define ELASTFEM_MESH_HPP

#include <array>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "elastfem/geometry.hpp"

namespace elastfem {

enum class MeshErrc {
    io_error,
    parse_error,
    duplicate_cell,
    degenerate_cell,
    non_manifold_edge,
    non_convex_quad,
    invalid_argument,
};

class MeshError : public std::runtime_error {
public:
    MeshError(MeshErrc c, const std::string& msg)
        : std::runtime_error(msg), code_(c) {}
    MeshErrc code() const { return code_; }

private:
    MeshErrc code_;
};

const char* to_string(MeshErrc c);

// Boundary side labels assigned by the generators. Imported meshes get
// `generic` on every boundary edge.
namespace boundary_marker {
inline constexpr int interior = 0;
inline constexpr int left = 1;
inline constexpr int right = 2;
inline constexpr int bottom = 3;
inline constexpr int top = 4;
inline constexpr int generic = 5;
} // namespace boundary_marker

/// 2D triangulation with globally oriented edges.
///
/// Cells are counterclockwise vertex triples. Edges are stored as vertex
/// pairs (i, j) with i < j; the unit edge normal is the i->j direction
/// rotated by -90 degrees. Local edge k of a cell is the edge opposite
/// local vertex k; its orientation sign is +1 iff the global normal points
/// out of the cell. Immutable after construction.
struct Triangulation {
    struct CellEdge {
        int edge = -1;
        int sign = 0; // +1 iff global normal is outward for this cell
    };

    std::vector<Vec2> vertices;
    std::vector<std::array<int, 3>> cells;
    std::vector<std::array<int, 2>> edges;
    std::vector<Vec2> edge_normal;     // unit
    std::vector<double> edge_length;   // h_e
    std::vector<std::array<CellEdge, 3>> cell_edges;
    std::vector<std::array<int, 2>> edge_cells; // second == -1 on the boundary
    std::vector<int> boundary_marker;           // per edge, interior == 0

    // geometric caches
    std::vector<double> cell_area;
    std::vector<double> cell_h;   // diameter (longest edge)
    std::vector<double> cell_rho; // diameter of the inscribed ball
    std::vector<std::array<Vec2, 3>> grad_bary; // hat gradients per local vertex

    int n_vertices() const { return static_cast<int>(vertices.size()); }
    int n_cells() const { return static_cast<int>(cells.size()); }
    int n_edges() const { return static_cast<int>(edges.size()); }
    int n_boundary_edges() const;

    bool is_boundary_edge(int e) const { return edge_cells[e][1] < 0; }
    Vec2 centroid(int cell) const;
    Vec2 edge_midpoint(int e) const;
    double max_h() const;

    // Barycentric coordinates of a point with respect to a cell.
    std::array<double, 3> barycentric(int cell, const Vec2& p) const;
};

/// n x n squares on (0,1)^2, each split along the anti-diagonal (top-left
/// to bottom-right of the square).
Triangulation generate_structured_unit_square(int n);

/// Bilinear image of an n x m unit-square grid onto a convex quadrilateral
/// given by four counterclockwise corners; each quad is split along the
/// same diagonal as the structured grid.
Triangulation generate_mapped_quad(const std::array<Vec2, 4>& corners, int n, int m);

/// Reads the classical ASCII node/ele pair. Clockwise triangles are
/// reoriented (with a warning on stderr); duplicate cells, degenerate
/// cells and non-manifold edges are rejected.
Triangulation load_mesh(const std::string& node_path, const std::string& ele_path);

/// max_T h_T / rho_T
double shape_regularity(const Triangulation& mesh);

/// Plain-text statistics dump.
std::string describe(const Triangulation& mesh);

/// Classification of the boundary into a Dirichlet part (displacement
/// fixed to zero) and a Neumann part carrying a traction g.
struct BoundarySpec {
    enum class Kind { pure_dirichlet, mixed };

    Kind kind = Kind::pure_dirichlet;
    std::vector<bool> neumann; // per edge; true only on Neumann boundary edges
    std::function<Vec2(Vec2)> traction; // g; ignored on Dirichlet edges

    static BoundarySpec pure_dirichlet(const Triangulation& mesh);

    // Boundary edges whose midpoint satisfies the predicate become Neumann.
    // Gamma_D must stay nonempty.
    static BoundarySpec mixed(const Triangulation& mesh,
                              const std::function<bool(Vec2)>& neumann_where,
                              std::function<Vec2(Vec2)> traction);

    // Neumann part on the right boundary x = max x.
    static BoundarySpec mixed_right(const Triangulation& mesh,
                                    std::function<Vec2(Vec2)> traction);

    bool has_neumann_edges() const;
    bool is_dirichlet_edge(const Triangulation& mesh, int e) const {
        return mesh.is_boundary_edge(e) && !neumann[static_cast<std::size_t>(e)];
    }
};

} // namespace elastfem

#endif
