#ifndef ELASTFEM_EXPERIMENTS_HPP
#define ELASTFEM_EXPERIMENTS_HPP

#include <array>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "elastfem/analysis.hpp"
#include "elastfem/assembly.hpp"

namespace elastfem {

struct ConvRow {
    long long ndof = 0;
    double h = 0.0;
    double l2 = 0.0, h1 = 0.0;
    double l2_rate = std::numeric_limits<double>::quiet_NaN();
    double h1_rate = std::numeric_limits<double>::quiet_NaN();
    double seconds = 0.0;
};

struct SweepRow {
    double lambda = 0.0, mu = 0.0;
    long long ndof = 0;
    double h1_semi = 0.0;
};

struct CooksRow {
    std::string scheme;
    double nu = 0.0;
    int n = 0;
    long long ndof = 0;
    double tip_y = 0.0;
};

struct ExperimentReport {
    std::string name; // scheme id
    std::string grid;
    std::vector<ConvRow> conv;
    std::vector<SweepRow> sweep;
    std::vector<CooksRow> cooks;
};

/// Refinement ladder: either structured grids base_n * 2^k, or one
/// node/ele pair per level.
struct GridLadder {
    bool structured = true;
    int base_n = 8;
    int levels = 5;
    std::vector<std::pair<std::string, std::string>> files;

    std::string id() const;
    int n_levels() const { return structured ? levels : static_cast<int>(files.size()); }
    Triangulation build(int level) const;
};

enum class BcKind { dirichlet, mixed_right };
BcKind bc_from_string(const std::string& s);

/// Assemble + direct solve; re-checks the solver residual contract.
struct SolveStats {
    double seconds = 0.0;
    double residual = 0.0;
};
FeFunction solve_scheme(const SchemeConfig& cfg, const Triangulation& mesh,
                        const BoundarySpec& bspec, const DofMap& dm, SolveStats* stats = nullptr);

using FieldSink =
    std::function<void(const Triangulation&, const DofMap&, const FeFunction&)>;

/// Convergence study against the trigonometric manufactured solution.
/// The sink, when set, receives the finest-level solution.
ExperimentReport run_convergence(const SchemeConfig& cfg, const GridLadder& grid, BcKind bc,
                                 bool h1_include_rt = true, const FieldSink& sink = nullptr);

/// || grad_h u_h || sweep for the gradient body force f = grad(x^6+y^6)
/// under pure Dirichlet conditions (scheme s1).
ExperimentReport run_gradrobust(const std::vector<double>& lambdas,
                                const std::vector<double>& mus, const GridLadder& grid,
                                ARVariant ar = ARVariant::adiv, double alpha = 1.0);

/// Cook's membrane corners.
std::array<Vec2, 4> cooks_corners();

/// Boundary spec of the membrane problem: clamped left side, vertical
/// traction (0, 1/16) on the right side, traction-free top and bottom.
BoundarySpec cooks_boundary(const Triangulation& mesh);

using CooksFieldSink = std::function<void(const std::string& scheme, double nu, int n,
                                          const Triangulation&, const DofMap&, const FeFunction&)>;

/// Cook's membrane ladder: tip displacement per level, finest-level field
/// to the sink. nu in (0, 1/2), E = 1.
ExperimentReport run_cooks(const std::vector<double>& nus, const std::vector<Scheme>& schemes,
                           int base_n, int levels, ARVariant ar = ARVariant::adiv,
                           double alpha = 1.0, const CooksFieldSink& sink = nullptr);

std::pair<double, double> lame_from_poisson(double E, double nu); // (lambda, mu)

/// Per-cell dilation div u_h.
std::vector<double> dilation_field(const FeFunction& u);

/// Number of interior edges whose two neighboring dilations have opposite
/// signs with both magnitudes above magnitude_frac * max |dilation|,
/// skipping edges within `radius` of any excluded point. Checkerboard
/// oscillation produces many such edges; a smooth sign change none.
int count_dilation_oscillation_edges(const Triangulation& mesh,
                                     const std::vector<double>& dilation, double magnitude_frac,
                                     const std::vector<Vec2>& excluded = {}, double radius = 0.0);

} // namespace elastfem

#endif
