#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ebrd/common.hpp"
#include "ebrd/dense.hpp"

namespace ebrd {

struct Triplet {
  int row;
  int col;
  double value;
};

// Row-compressed symmetric sparse matrix. Both triangles are stored;
// structural symmetry is an invariant of every construction path.
struct SymSparseMatrix {
  int n = 0;
  std::vector<int> row_offsets;   // size n+1
  std::vector<int> col_indices;   // sorted within each row
  std::vector<double> values;

  // Sums duplicate entries, sorts rows. Does not symmetrize: the caller
  // supplies both triangles (assembly routines do).
  static SymSparseMatrix from_triplets(int n, std::vector<Triplet> entries);

  void matvec(std::span<const double> x, std::span<double> y) const;
  std::vector<double> matvec(std::span<const double> x) const;

  double entry(int i, int j) const;  // 0 if not stored
  // max |a_ij - a_ji| over the stored pattern; 0 for a symmetric matrix.
  double max_asymmetry() const;
  DenseMatrix to_dense() const;
};

// Incomplete Cholesky factor with the sparsity pattern of tril(A).
struct IC0Factor {
  int n = 0;
  std::vector<int> row_offsets;
  std::vector<int> col_indices;   // sorted, last entry of each row is the diagonal
  std::vector<double> values;

  // z = (L L^T)^{-1} r
  void solve(std::span<const double> r, std::span<double> z) const;
};

// Throws NumericalError("ic0: nonpositive pivot ...") when A is not SPD enough.
IC0Factor ic0_factor(const SymSparseMatrix& a);

struct CgResult {
  std::vector<double> x;
  int iterations = 0;
  double relative_residual = 0.0;  // true residual ||b - A x|| / ||b||
};

class CgFailure : public NumericalError {
 public:
  CgFailure(const std::string& what, int iterations, double relative_residual)
      : NumericalError(what), iterations(iterations), relative_residual(relative_residual) {}
  int iterations;
  double relative_residual;
};

// Preconditioned conjugate gradients. `precond` may be null (plain CG).
// Stops on the preconditioned residual and verifies the true residual
// before returning; throws CgFailure if maxit is exhausted.
// maxit <= 0 means the default 10*n.
CgResult cg_solve(const SymSparseMatrix& a, std::span<const double> b,
                  const IC0Factor* precond, double tol = 1e-10, int maxit = 0);

// Debug import/export: one "i j value" per line, 0-based.
void write_triplets(const SymSparseMatrix& a, std::ostream& out);
SymSparseMatrix read_triplets(std::istream& in);

}  // namespace ebrd
