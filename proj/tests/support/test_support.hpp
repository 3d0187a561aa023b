#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ebrd/dense.hpp"
#include "ebrd/sparse.hpp"

namespace ebrd::testing {

// Deterministic uniform generator; distributions are hand-rolled so results
// do not depend on the standard library implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

  std::uint64_t next_u64() {
    std::uint64_t x = state_;
    x ^= x >> 12;
    x ^= x << 25;
    x ^= x >> 27;
    state_ = x;
    return x * 0x2545f4914f6cdd1dull;
  }
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
  }

 private:
  std::uint64_t state_;
};

// Dense oracle for the phi combination: the exponential of the augmented
// matrix [[tau A, W], [0, J]] applied to [v0; e_p]. Independent of the
// Krylov evaluation path. Inputs v_k use the phi_k(0) = 1/k normalization.
std::vector<double> phi_combination_dense_oracle(const DenseMatrix& a,
                                                 const std::vector<std::vector<double>>& v,
                                                 double tau);

// Composite Gauss-Legendre quadrature of the phi integral
// int_0^1 e^{(1-s) z} s^{k-1} ds, with panel doubling until convergence.
double phi_scalar_quadrature(int k, double z);
DenseMatrix phi_dense_quadrature(int k, const DenseMatrix& a);

// Random sparse SPD matrix: symmetric diagonally dominant with positive
// diagonal, bandwidth-limited pattern.
SymSparseMatrix random_spd(Rng& rng, int n, double density = 0.1);

// Random symmetric negative semidefinite matrix with spectrum inside
// [-spread, 0] (Gershgorin bound), as sparse and dense views.
struct NegativeOperator {
  SymSparseMatrix sparse;
  DenseMatrix dense;
};
NegativeOperator random_negative_operator(Rng& rng, int n, double spread);

// Banded complete Cholesky; throws NumericalError on a nonpositive pivot.
// Returns the bandwidth used (for reporting).
int banded_cholesky_check(const SymSparseMatrix& a);

// Minimal legacy-VTK structured-points reader for round-trip tests.
struct VtkDump {
  int nx = 0, ny = 0;
  double origin_x = 0, origin_y = 0, spacing = 0;
  std::vector<double> u, rho;
};
VtkDump read_vtk_dump(const std::string& path);

}  // namespace ebrd::testing
