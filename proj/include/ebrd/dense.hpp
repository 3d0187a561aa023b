#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ebrd {

// Small dense row-major matrix. Used for the matrix-exponential kernel,
// the Krylov projections, and the local RBF systems. Not meant for large n.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(int rows, int cols)
      : rows_(rows), cols_(cols),
        a_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), 0.0) {}

  static DenseMatrix identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double& operator()(int i, int j) { return a_[idx(i, j)]; }
  double operator()(int i, int j) const { return a_[idx(i, j)]; }

  double* data() { return a_.data(); }
  const double* data() const { return a_.data(); }

 private:
  std::size_t idx(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(cols_) +
           static_cast<std::size_t>(j);
  }
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> a_;
};

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
std::vector<double> matvec(const DenseMatrix& a, std::span<const double> x);

// y += alpha * x (same shape)
void add_scaled(DenseMatrix& y, double alpha, const DenseMatrix& x);

double norm_1(const DenseMatrix& a);      // max column sum
double max_abs(const DenseMatrix& a);

// Solves a * x = b with partially pivoted LU; `a` is factored in place.
// Throws NumericalError on a zero pivot.
DenseMatrix lu_solve(DenseMatrix a, DenseMatrix b);

// 1-norm condition estimate via explicit inverse (fine for the tiny systems
// this library solves densely).
double cond_1(const DenseMatrix& a);

// Matrix exponential by Pade approximation with scaling and squaring.
// Requires a square matrix with n <= 512.
DenseMatrix dense_expm(const DenseMatrix& a);

// Complete Cholesky a = l * l^T for a symmetric positive definite matrix.
// Throws NumericalError on a nonpositive pivot.
DenseMatrix dense_cholesky(const DenseMatrix& a);

}  // namespace ebrd
