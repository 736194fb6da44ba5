#ifndef ELASTFEM_ASSEMBLY_HPP
#define ELASTFEM_ASSEMBLY_HPP

#include <array>
#include <vector>

#include "elastfem/femspace.hpp"
#include "elastfem/linalg.hpp"
#include "elastfem/mesh.hpp"

namespace elastfem {

/// s1        pure-displacement scheme on the P1+RT0 pair
/// s2 / s3   nonsymmetric / symmetric mixed-boundary schemes
/// s4, s4sym modified schemes coupling only normal components on the
///           traction boundary (nonsymmetric and symmetric sign)
/// naive     mixed-boundary scheme without the boundary coupling terms
///           (negative control: suboptimal L2 convergence)
/// p1, br, cr baselines
enum class Scheme { s1, s2, s3, s4, s4sym, naive, p1, br, cr };

/// Stabilization of the RT0 block: scaled mass matrix (a0), its diagonal
/// (aD), or the div-div diagonal (adiv).
enum class ARVariant { a0, aD, adiv };

const char* to_string(Scheme s);
Scheme scheme_from_string(const std::string& name);
ARVariant ar_from_string(const std::string& name);
DofLayout layout_for(Scheme s);
bool scheme_is_symmetric(Scheme s);
bool scheme_needs_neumann(Scheme s);

struct SchemeConfig {
    Scheme scheme = Scheme::s1;
    ARVariant ar = ARVariant::adiv;
    double alpha = 1.0;
    std::vector<double> alpha_cell; // optional per-cell weights, overrides alpha
    double alpha_neumann = -1.0;    // > 0: weight for cells touching the traction boundary
    double lambda = 1.0;
    double mu = 1.0;
    VectorField body_force; // empty means zero

    double alpha_of(int cell) const {
        return alpha_cell.empty() ? alpha : alpha_cell[static_cast<std::size_t>(cell)];
    }

    // Checks parameter positivity and the scheme/boundary pairing.
    void validate(const Triangulation& mesh, const BoundarySpec& bspec) const;
};

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Assembled system over the free dofs, homogeneous Dirichlet dofs
/// eliminated by row/column deletion.
struct LinearSystem {
    SparseMatrix A;
    std::vector<double> rhs;
    std::vector<int> free_to_raw;
    bool symmetric = false;
};

LinearSystem assemble_scheme(const SchemeConfig& cfg, const Triangulation& mesh,
                             const BoundarySpec& bspec, const DofMap& dm);

// Individual blocks on the raw (uneliminated) dof set, mainly for
// diagnostics and tests. assemble_scheme is the fused single-pass path.

/// 2 mu * integral of eps(u1) : eps(v1)
SparseMatrix assemble_epsilon(const Triangulation& mesh, const DofMap& dm, double mu);

/// a^R stabilization block over the edge dofs (no 2 mu factor)
SparseMatrix assemble_ar(const Triangulation& mesh, const DofMap& dm, ARVariant variant,
                         double alpha, const std::vector<double>& alpha_cell = {});

/// lambda * (div u, div v)
SparseMatrix assemble_divdiv(const Triangulation& mesh, const DofMap& dm, double lambda);

/// Boundary coupling terms of the mixed schemes (s2/s3/s4/s4sym); rejects
/// pure-Dirichlet boundary specs.
SparseMatrix assemble_neumann_coupling(const Triangulation& mesh, const DofMap& dm,
                                       const BoundarySpec& bspec, Scheme scheme, double mu);

/// Load vector: volume term plus the scheme's traction term.
std::vector<double> assemble_load(const Triangulation& mesh, const DofMap& dm,
                                  const BoundarySpec& bspec, const SchemeConfig& cfg);

namespace detail {

struct LocalBlock {
    int n = 0;
    std::array<int, 9> dofs{}; // raw dof ids
    std::array<std::array<double, 9>, 9> A{};
    std::array<double, 9> b{};
};

enum : unsigned {
    term_epsilon = 1u,
    term_ar = 2u,
    term_divdiv = 4u,
    term_coupling = 8u,
    term_load = 16u,
};

unsigned scheme_terms(Scheme s);

/// Local element matrix/rhs for one cell. `bspec` may be null when no
/// boundary terms are requested.
LocalBlock local_block(const Triangulation& mesh, const BoundarySpec* bspec, const DofMap& dm,
                       const SchemeConfig& cfg, int cell, unsigned terms);

/// Deterministic gather of local blocks into CSR: every matrix entry
/// accumulates its cell contributions in ascending cell order regardless
/// of the thread count. `target_of_raw` maps raw dofs to rows/cols
/// (negative drops the dof); empty means identity.
SparseMatrix gather_matrix(int dim, const std::vector<int>& target_of_raw,
                           const std::vector<LocalBlock>& locals);
std::vector<double> gather_rhs(int dim, const std::vector<int>& target_of_raw,
                               const std::vector<LocalBlock>& locals);

} // namespace detail

} // namespace elastfem

#endif
