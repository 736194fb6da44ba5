#ifndef ELASTFEM_LINALG_HPP
#define ELASTFEM_LINALG_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace elastfem {

class LinalgError : public std::runtime_error {
public:
    explicit LinalgError(const std::string& msg) : std::runtime_error(msg) {}
};

struct Triplet {
    int row;
    int col;
    double value;
};

/// Compressed-row sparse matrix. Column indices are sorted and unique per
/// row; finalize() additionally drops explicitly stored zeros.
struct SparseMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<int> row_ptr;  // size rows + 1
    std::vector<int> col_idx;
    std::vector<double> values;

    static SparseMatrix zero(int n, int m);

    // Triplets may repeat (row, col); duplicates are accumulated in input
    // order.
    static SparseMatrix from_triplets(int n, int m, std::vector<Triplet> triplets);

    std::int64_t nnz() const { return static_cast<std::int64_t>(values.size()); }
    double coeff(int i, int j) const;

    // y = A x (row-parallel)
    std::vector<double> multiply(const std::vector<double>& x) const;

    void add_scaled(const SparseMatrix& other, double s); // this += s * other
    void finalize();                                      // drop stored zeros

    double max_abs() const;
    double max_asymmetry() const; // max |a_ij - a_ji|
    bool same_pattern(const SparseMatrix& other) const;
};

/// relative 2-norm residual ||Ax - b|| / ||b||, or the absolute residual
/// norm when b = 0 (residual accumulated in extended precision)
double relative_residual(const SparseMatrix& A, const std::vector<double>& x,
                         const std::vector<double>& b);

/// normwise backward error ||Ax - b|| / (|| |A||x| || + ||b||)
double backward_error(const SparseMatrix& A, const std::vector<double>& x,
                      const std::vector<double>& b);

/// Largest ||Ax - b|| / ||b|| a double-precision x can represent:
/// rounding the exact solution already perturbs the residual by about
/// eps * || |A||x| ||. Relevant for lambda-dominated elasticity systems,
/// where this floor exceeds the 1e-10 contract.
double residual_floor(const SparseMatrix& A, const std::vector<double>& x,
                      const std::vector<double>& b);

/// Sparse direct solve with fill-reducing ordering. Symmetric systems take
/// an LDL^T path, everything else sparse LU with partial pivoting; both are
/// polished by iterative refinement with extended-precision residuals.
///
/// Every solve is re-checked post hoc and accepted only when the relative
/// residual is <= 1e-10, or — when the representability floor of the
/// system is above that — the backward error is at machine precision
/// (<= 8 eps). A failed factorization names the offending pivot.
std::vector<double> solve_direct(const SparseMatrix& A, const std::vector<double>& b,
                                 bool symmetric);

struct CgResult {
    std::vector<double> x;
    int iterations = 0;
    double residual = 0.0; // relative
};

/// Conjugate gradients for SPD systems, Jacobi-preconditioned by default.
/// Throws LinalgError (reporting the final residual) when the iteration
/// limit is hit.
CgResult solve_cg(const SparseMatrix& A, const std::vector<double>& b, double tol,
                  int maxit, bool jacobi = true);

} // namespace elastfem

#endif
