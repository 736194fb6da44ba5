#ifndef ELASTFEM_FEMSPACE_HPP
#define ELASTFEM_FEMSPACE_HPP

#include <functional>
#include <vector>

#include "elastfem/mesh.hpp"

namespace elastfem {

using VectorField = std::function<Vec2(Vec2)>;
using ScalarField = std::function<double(Vec2)>;

/// Degree-of-freedom layouts. `p1_rt0` is the primary element: a pair of
/// displacement dofs per vertex followed by one flux dof per edge (the mean
/// normal flux across the edge with respect to its global normal). `br`
/// reuses the same layout with the per-edge scalar meaning the normal edge
/// bubble amplitude; `cr` has two midpoint dofs per edge; `p1` only the
/// vertex block.
enum class DofLayout { p1, p1_rt0, br, cr };

struct DofMap {
    const Triangulation* mesh = nullptr;
    DofLayout layout = DofLayout::p1_rt0;

    int n_raw = 0;
    int n_free = 0;
    std::vector<char> constrained; // per raw dof
    std::vector<int> free_index;   // raw -> free or -1
    std::vector<int> free_dofs;    // free -> raw
    std::vector<char> dirichlet_vertex;
    long long reported_ndof = 0; // 2V + E for the primary element

    bool has_vertex_block() const { return layout != DofLayout::cr; }
    bool has_edge_scalar() const {
        return layout == DofLayout::p1_rt0 || layout == DofLayout::br;
    }

    int vdof(int v, int k) const { return 2 * v + k; }
    int edof(int e) const { return 2 * mesh->n_vertices() + e; }
    int crdof(int e, int k) const { return 2 * e + k; }

    static DofMap build(const Triangulation& mesh, const BoundarySpec& bspec, DofLayout layout);
};

/// Coefficient vector over a DofMap. For the primary element the function
/// is the sum of its P1 part (vertex block) and RT0 part (edge block).
struct FeFunction {
    const DofMap* map = nullptr;
    std::vector<double> coef;

    static FeFunction zeros(const DofMap& dm) {
        return {&dm, std::vector<double>(static_cast<std::size_t>(dm.n_raw), 0.0)};
    }

    double& p1(int v, int k) { return coef[static_cast<std::size_t>(map->vdof(v, k))]; }
    double p1(int v, int k) const { return coef[static_cast<std::size_t>(map->vdof(v, k))]; }
    double& rt(int e) { return coef[static_cast<std::size_t>(map->edof(e))]; }
    double rt(int e) const { return coef[static_cast<std::size_t>(map->edof(e))]; }

    FeFunction p1_part() const; // edge block zeroed
    FeFunction rt_part() const; // vertex block zeroed
};

// --- local bases ------------------------------------------------------

/// Raviart-Thomas basis for local edge `le` (the edge opposite local
/// vertex `le`): psi(x) = sign * |e|/(2|T|) * (x - p) with p the opposite
/// vertex. Its normal trace with respect to the global edge normal is 1.
Vec2 rt0_value(const Triangulation& mesh, int cell, int le, const Vec2& x);
double rt0_div(const Triangulation& mesh, int cell, int le);

double p1_hat(const Triangulation& mesh, int cell, int lv, const Vec2& x);
Vec2 p1_hat_grad(const Triangulation& mesh, int cell, int lv);

/// Crouzeix-Raviart hat of local edge `le`: 1 at its midpoint, 1 - 2*lambda
/// of the opposite vertex.
double cr_hat(const Triangulation& mesh, int cell, int le, const Vec2& x);
Vec2 cr_hat_grad(const Triangulation& mesh, int cell, int le);

/// Bernardi-Raugel edge bubble lambda_i lambda_j n_e for edge {i, j}, with
/// the global edge normal.
Vec2 br_bubble(const Triangulation& mesh, int cell, int le, const Vec2& x);
Vec2 br_bubble_scalar_grad(const Triangulation& mesh, int cell, int le, const Vec2& x);
/// Mean of the bubble divergence over the cell: sign * |e| / (6 |T|).
double br_bubble_meandiv(const Triangulation& mesh, int cell, int le);

// --- interpolation ----------------------------------------------------
//
// The interpolation operators fill the defining functionals for every dof
// (nodal values, mean edge fluxes); boundary conditions are not forced, so
// fields satisfying the homogeneous data produce conforming coefficients
// naturally.

/// Nodal interpolation into the vertex block.
FeFunction interp_nodal(const DofMap& dm, const VectorField& v);

/// Raviart-Thomas interpolation: edge dof = mean normal flux across the
/// edge (3-point Gauss).
FeFunction interp_rt(const DofMap& dm, const VectorField& v);

/// Midpoint-rule variant of interp_rt, exact for fields with linear edge
/// traces (used for Crouzeix-Raviart test functions).
FeFunction interp_rt_midpoint(const DofMap& dm, const VectorField& v);

/// Composite interpolation: nodal part plus Raviart-Thomas interpolation
/// of the remainder. Commutes with the divergence: the elementwise
/// divergence equals the cell mean of div v.
FeFunction interp_composite(const DofMap& dm, const VectorField& v);

/// L2 projection onto piecewise constants, one mean value per cell
/// (degree-6 quadrature).
std::vector<double> project_p0(const Triangulation& mesh, const ScalarField& r);

// --- evaluation -------------------------------------------------------

struct EvalResult {
    Vec2 value;
    Mat2 gradient; // gradient(i, j) = d u_i / d x_j
    double divergence = 0.0;
};

/// Evaluates value, gradient and divergence of a finite element function
/// inside a cell. Points outside the cell (barycentric tolerance 1e-12)
/// are rejected.
EvalResult evaluate(const FeFunction& fe, int cell, const Vec2& point);

/// Same without the point-membership check, for quadrature loops.
EvalResult evaluate_unchecked(const FeFunction& fe, int cell, const Vec2& point);

/// Elementwise divergence (constant per cell for p1, p1_rt0 and cr).
double cell_divergence(const FeFunction& fe, int cell);

} // namespace elastfem

#endif
