#include <cmath>
#include <sstream>

#include <doctest.h>

#include "ebrd/sparse.hpp"
#include "test_support.hpp"

using namespace ebrd;
using testing::Rng;

namespace {

SymSparseMatrix laplacian_1d(int n) {
  std::vector<Triplet> ts;
  for (int i = 0; i < n; ++i) {
    ts.push_back({i, i, -2.0});
    if (i > 0) ts.push_back({i, i - 1, 1.0});
    if (i + 1 < n) ts.push_back({i, i + 1, 1.0});
  }
  return SymSparseMatrix::from_triplets(n, std::move(ts));
}

SymSparseMatrix laplacian_2d(int m) {  // 5-point, SPD (negated), m x m interior grid
  const int n = m * m;
  std::vector<Triplet> ts;
  auto id = [m](int i, int j) { return j * m + i; };
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) {
      ts.push_back({id(i, j), id(i, j), 4.0});
      if (i > 0) ts.push_back({id(i, j), id(i - 1, j), -1.0});
      if (i + 1 < m) ts.push_back({id(i, j), id(i + 1, j), -1.0});
      if (j > 0) ts.push_back({id(i, j), id(i, j - 1), -1.0});
      if (j + 1 < m) ts.push_back({id(i, j), id(i, j + 1), -1.0});
    }
  return SymSparseMatrix::from_triplets(n, std::move(ts));
}

}  // namespace

TEST_CASE("matvec: identity returns input") {
  std::vector<Triplet> ts;
  for (int i = 0; i < 7; ++i) ts.push_back({i, i, 1.0});
  auto a = SymSparseMatrix::from_triplets(7, std::move(ts));
  std::vector<double> x = {1, -2, 3, -4, 5, -6, 7};
  auto y = a.matvec(x);
  for (int i = 0; i < 7; ++i) CHECK(y[i] == x[i]);
}

TEST_CASE("matvec: 1d laplacian telescopes on ones") {
  auto a = laplacian_1d(5);
  std::vector<double> ones(5, 1.0);
  auto y = a.matvec(ones);
  CHECK(y[0] == doctest::Approx(-1.0));
  for (int i = 1; i < 4; ++i) CHECK(y[i] == doctest::Approx(0.0));
  CHECK(y[4] == doctest::Approx(-1.0));
}

TEST_CASE("matvec: random SPD matches dense product") {
  Rng rng(42);
  auto a = testing::random_spd(rng, 50);
  DenseMatrix d = a.to_dense();
  std::vector<double> x(50);
  for (auto& v : x) v = rng.uniform(-1, 1);
  auto ys = a.matvec(x);
  auto yd = matvec(d, x);
  double scale = norm_1(d);
  for (int i = 0; i < 50; ++i) CHECK(std::abs(ys[i] - yd[i]) <= 1e-13 * scale);
}

TEST_CASE("ic0: diagonal matrix factors to elementwise square roots") {
  std::vector<Triplet> ts = {{0, 0, 4.0}, {1, 1, 9.0}, {2, 2, 16.0}};
  auto a = SymSparseMatrix::from_triplets(3, std::move(ts));
  auto f = ic0_factor(a);
  CHECK(f.values[0] == doctest::Approx(2.0));
  CHECK(f.values[1] == doctest::Approx(3.0));
  CHECK(f.values[2] == doctest::Approx(4.0));
}

TEST_CASE("ic0: tridiagonal pattern has no fill, factor is exact") {
  auto neg = laplacian_1d(8);  // negative definite
  for (auto& v : neg.values) v = -v;  // SPD tridiagonal
  auto f = ic0_factor(neg);
  // reconstruct L L^T densely and compare against a dense Cholesky
  DenseMatrix l(8, 8);
  for (int i = 0; i < 8; ++i)
    for (int k = f.row_offsets[i]; k < f.row_offsets[i + 1]; ++k)
      l(i, f.col_indices[k]) = f.values[k];
  DenseMatrix ref = dense_cholesky(neg.to_dense());
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) CHECK(std::abs(l(i, j) - ref(i, j)) <= 1e-13);
}

TEST_CASE("ic0: preconditioning reduces CG iterations on the 5-point laplacian") {
  auto a = laplacian_2d(8);
  std::vector<double> b(64);
  Rng rng(7);
  for (auto& v : b) v = rng.uniform(-1, 1);
  auto plain = cg_solve(a, b, nullptr, 1e-10);
  auto f = ic0_factor(a);
  auto pre = cg_solve(a, b, &f, 1e-10);
  CHECK(pre.iterations < plain.iterations);
}

TEST_CASE("ic0: breakdown on a non-SPD matrix") {
  std::vector<Triplet> ts = {{0, 0, 1.0}, {0, 1, 3.0}, {1, 0, 3.0}, {1, 1, 1.0}};
  auto a = SymSparseMatrix::from_triplets(2, std::move(ts));
  CHECK_THROWS_AS(ic0_factor(a), NumericalError);
}

TEST_CASE("cg: identity converges in one iteration") {
  std::vector<Triplet> ts;
  for (int i = 0; i < 5; ++i) ts.push_back({i, i, 1.0});
  auto a = SymSparseMatrix::from_triplets(5, std::move(ts));
  std::vector<double> b = {1, 2, 3, 4, 5};
  auto r = cg_solve(a, b, nullptr, 1e-12);
  CHECK(r.iterations == 1);
  for (int i = 0; i < 5; ++i) CHECK(r.x[i] == doctest::Approx(b[i]));
}

TEST_CASE("cg: constructed solution is recovered") {
  auto a = laplacian_2d(10);
  std::vector<double> ones(100, 1.0);
  auto b = a.matvec(ones);
  auto r = cg_solve(a, b, nullptr, 1e-12);
  for (int i = 0; i < 100; ++i) CHECK(r.x[i] == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("cg: maxit exhaustion throws with residual attached") {
  auto a = laplacian_2d(12);
  std::vector<double> b(144, 1.0);
  CHECK_THROWS_AS(cg_solve(a, b, nullptr, 1e-14, 3), CgFailure);
  try {
    cg_solve(a, b, nullptr, 1e-14, 3);
  } catch (const CgFailure& e) {
    CHECK(e.iterations == 3);
    CHECK(e.relative_residual > 0.0);
  }
}

TEST_CASE("cg: residual contract on random SPD instances, with and without IC(0)") {
  Rng rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = rng.uniform_int(5, 200);
    auto a = testing::random_spd(rng, n);
    std::vector<double> b(n);
    for (auto& v : b) v = rng.uniform(-1, 1);
    const double tol = 1e-10;
    auto plain = cg_solve(a, b, nullptr, tol);
    CHECK(plain.relative_residual <= tol);
    auto f = ic0_factor(a);
    auto pre = cg_solve(a, b, &f, tol);
    CHECK(pre.relative_residual <= tol);
  }
}

TEST_CASE("dense_expm: exp(0) = I") {
  DenseMatrix z(4, 4);
  auto e = dense_expm(z);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK(e(i, j) == doctest::Approx(i == j ? 1.0 : 0.0));
}

TEST_CASE("dense_expm: diagonal closed form") {
  DenseMatrix a(2, 2);
  a(0, 0) = 1.0;
  a(1, 1) = 2.0;
  auto e = dense_expm(a);
  CHECK(e(0, 0) == doctest::Approx(std::exp(1.0)).epsilon(1e-13));
  CHECK(e(1, 1) == doctest::Approx(std::exp(2.0)).epsilon(1e-13));
  CHECK(std::abs(e(0, 1)) <= 1e-15);
}

TEST_CASE("dense_expm: nilpotent series truncates") {
  DenseMatrix a(2, 2);
  a(0, 1) = 1.0;
  auto e = dense_expm(a);
  CHECK(e(0, 0) == doctest::Approx(1.0));
  CHECK(e(0, 1) == doctest::Approx(1.0));
  CHECK(e(1, 0) == doctest::Approx(0.0));
  CHECK(e(1, 1) == doctest::Approx(1.0));
}

TEST_CASE("dense_expm: large-norm scaling against the squaring identity") {
  Rng rng(5);
  DenseMatrix a(6, 6);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) a(i, j) = rng.uniform(-2, 2);
  // exp(A) == exp(A/2)^2
  DenseMatrix half = a;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) half(i, j) *= 0.5;
  auto e1 = dense_expm(a);
  auto eh = dense_expm(half);
  auto e2 = matmul(eh, eh);
  const double scale = norm_1(e1);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) CHECK(std::abs(e1(i, j) - e2(i, j)) <= 1e-11 * scale);
}

TEST_CASE("triplet text round trip") {
  Rng rng(11);
  auto a = testing::random_spd(rng, 20);
  std::stringstream ss;
  write_triplets(a, ss);
  auto b = read_triplets(ss);
  REQUIRE(b.n == a.n);
  REQUIRE(b.values.size() == a.values.size());
  for (std::size_t k = 0; k < a.values.size(); ++k) {
    CHECK(b.col_indices[k] == a.col_indices[k]);
    CHECK(b.values[k] == doctest::Approx(a.values[k]).epsilon(1e-15));
  }
}
