#ifndef ELASTFEM_EXPORTIO_HPP
#define ELASTFEM_EXPORTIO_HPP

#include <string>

#include "elastfem/experiments.hpp"

namespace elastfem {

class ExportError : public std::runtime_error {
public:
    explicit ExportError(const std::string& msg) : std::runtime_error(msg) {}
};

// CSV schemas (fixed):
//   convergence: ndof,h,l2_error,l2_rate,h1_error,h1_rate
//   sweep:       lambda,mu,ndof,h1_semi_norm
//   cooks:       scheme,nu,n,ndof,tip_y
// Rate fields are empty where no rate exists (first row).
std::string convergence_csv(const ExperimentReport& report);
std::string sweep_csv(const ExperimentReport& report);
std::string cooks_csv(const ExperimentReport& report);

/// VTK legacy ASCII export: triangles, point-data vector `displacement`
/// (the vertex-block part), cell-data scalar `dilation`, and for the
/// primary element a cell-data vector `rt0_mean` with the cell-averaged
/// RT0 part.
std::string vtk_string(const Triangulation& mesh, const FeFunction& u,
                       const std::string& title);

void write_text(const std::string& path, const std::string& content);

} // namespace elastfem

#endif
