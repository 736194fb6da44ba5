#ifndef ELASTFEM_REFERENCE_HPP
#define ELASTFEM_REFERENCE_HPP

#include "elastfem/analysis.hpp"
#include "elastfem/assembly.hpp"

// Straightforward single-threaded implementations used to validate the
// parallel kernels and as the baseline of the benchmark tool. The element
// math is shared; accumulation is a plain cell loop.
namespace elastfem::ref {

LinearSystem assemble_scheme(const SchemeConfig& cfg, const Triangulation& mesh,
                             const BoundarySpec& bspec, const DofMap& dm);

double error_l2(const FeFunction& u_h, const VectorField& exact);
double error_h1_broken(const FeFunction& u_h, const MatrixField& exact_grad,
                       bool include_rt = true);
double h1_seminorm_broken(const FeFunction& u_h, bool include_rt = true);

} // namespace elastfem::ref

#endif
