#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "ebrd/common.hpp"
#include "ebrd/dense.hpp"

namespace ebrd {

// Scalar phi functions in the normalization phi_0 = e^z, phi_k(0) = 1/k,
// satisfying z*phi_{k+1}(z) + 1 = k*phi_k(z). Requires 0 <= k <= 8.
double phi_scalar(int k, double z);
std::complex<double> phi_scalar(int k, std::complex<double> z);

// Dense phi_k(A) in the same normalization, via the exponential of the
// block-augmented matrix. Requires n <= 512.
DenseMatrix phi_dense(int k, const DenseMatrix& a);

using MatrixAction = std::function<void(std::span<const double>, std::span<double>)>;

// One linear combination phi_0(tau A) v_0 + ... + phi_p(tau A) v_p.
struct PhiCombinationRequest {
  MatrixAction apply_op;                     // y = A x
  std::vector<std::vector<double>> vectors;  // v_0 .. v_p, p <= 4
  double scale = 1.0;                        // tau
  double tolerance = 1e-8;                   // relative accuracy target
  int max_krylov_dim = 128;
  double min_substep = 1e-10;
};

struct PhiCombinationStats {
  int substeps_accepted = 0;
  int substeps_rejected = 0;
  int matvecs = 0;
  int max_dim_used = 0;
};

class PhiAccuracyError : public NumericalError {
 public:
  PhiAccuracyError(const std::string& what, std::vector<double> best, double bound)
      : NumericalError(what), best_estimate(std::move(best)), error_bound(bound) {}
  std::vector<double> best_estimate;
  double error_bound;
};

// Evaluates the combination by integrating the equivalent ODE over [0,1]
// with adaptive substeps and an adaptive IOM-2 Krylov basis.
std::vector<double> phi_combination(const PhiCombinationRequest& req,
                                    PhiCombinationStats* stats = nullptr);

namespace detail {

// Krylov workspace for one substep family: unit-norm basis vectors and the
// projected matrix, tridiagonal under incomplete orthogonalization depth 2.
struct KrylovWorkspace {
  std::vector<std::vector<double>> basis;
  DenseMatrix hess;        // (max_dim+1) x max_dim, filled up to `dim`
  int dim = 0;
  bool happy = false;      // invariant subspace reached
  double next_coupling = 0.0;  // h_{dim+1,dim} when not happy
};

// Extends the basis for operator `op` up to target_dim (or breakdown).
void iom2_extend(const MatrixAction& op, KrylovWorkspace& ws, int target_dim,
                 PhiCombinationStats* stats);

}  // namespace detail

}  // namespace ebrd
