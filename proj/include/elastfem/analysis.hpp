#ifndef ELASTFEM_ANALYSIS_HPP
#define ELASTFEM_ANALYSIS_HPP

#include <functional>
#include <vector>

#include "elastfem/assembly.hpp"
#include "elastfem/femspace.hpp"

namespace elastfem {

using MatrixField = std::function<Mat2(Vec2)>;

/// Closed-form solution data for convergence studies: displacement, its
/// derivatives, and the matching body force / boundary traction.
struct ManufacturedSolution {
    double lambda = 1.0;
    double mu = 1.0;
    VectorField u;
    MatrixField grad_u;
    ScalarField div_u;
    VectorField laplace_u;
    VectorField grad_div_u;

    Vec2 body_force(Vec2 p) const;        // -div sigma(u)
    Vec2 traction(Vec2 p, Vec2 n) const;  // sigma(u) n
    Vec2 div_eps(Vec2 p) const;           // div eps(u) = (lap u + grad div u)/2

    /// Trigonometric displacement on the unit square that vanishes on the
    /// whole boundary and becomes divergence-free as lambda grows.
    static ManufacturedSolution trig_unit_square(double lambda, double mu);
};

/// f = grad(x^6 + y^6), the gradient body force used by the robustness
/// sweeps.
Vec2 sextic_gradient_force(Vec2 p);

// --- error measures (degree-6 quadrature, cell-parallel) ----------------

double error_l2(const FeFunction& u_h, const VectorField& exact);
double error_h1_broken(const FeFunction& u_h, const MatrixField& exact_grad,
                       bool include_rt = true);

/// || grad_h u_h ||, the broken H1-seminorm of the discrete function.
double h1_seminorm_broken(const FeFunction& u_h, bool include_rt = true);

/// || div u_h ||
double div_l2_norm(const FeFunction& u_h);

// --- discrete norms ------------------------------------------------------
// Recomputed by direct elementwise integration, independently of the
// assembled matrices.

double norm_R(const FeFunction& v, const SchemeConfig& cfg);
double norm_h(const FeFunction& v, const SchemeConfig& cfg); // pure-displacement variant
double norm_h_mixed(const FeFunction& v, const BoundarySpec& bspec, const SchemeConfig& cfg);
double norm_h1(const FeFunction& v, const SchemeConfig& cfg);
double norm_h2(const FeFunction& v, const BoundarySpec& bspec, const SchemeConfig& cfg);

// --- consistency ---------------------------------------------------------

struct ConsistencyResidual {
    double defining; // (f, v) - a_h1(u, v)
    double reduced;  // (-2 mu div eps(u), v^R)
};

/// Residual of the exact solution in the pure-displacement discrete form,
/// evaluated both from the definition and from the reduced volume form.
ConsistencyResidual consistency_residual(const ManufacturedSolution& ms, const FeFunction& v,
                                         const SchemeConfig& cfg);

// --- convergence rates ----------------------------------------------------

/// rate_k = log2(e_{k-1} / e_k); assumes h halving between entries.
std::vector<double> convergence_rates_structured(const std::vector<double>& errors);

/// rate_k = log(e_{k-1}/e_k) / log(sqrt(ndof_k / ndof_{k-1}))
std::vector<double> convergence_rates_ndof(const std::vector<double>& errors,
                                           const std::vector<long long>& ndofs);

} // namespace elastfem

#endif
