#include "ebrd/dense.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "ebrd/common.hpp"

namespace ebrd {

DenseMatrix DenseMatrix::identity(int n) {
  DenseMatrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw NumericalError("matmul: shape mismatch");
  const int n = a.rows(), k = a.cols(), m = b.cols();
  DenseMatrix c(n, m);
  // ikj ordering keeps the inner loop contiguous in b and c.
  for (int i = 0; i < n; ++i) {
    double* ci = c.data() + static_cast<std::size_t>(i) * m;
    for (int l = 0; l < k; ++l) {
      const double ail = a(i, l);
      if (ail == 0.0) continue;
      const double* bl = b.data() + static_cast<std::size_t>(l) * m;
      for (int j = 0; j < m; ++j) ci[j] += ail * bl[j];
    }
  }
  return c;
}

std::vector<double> matvec(const DenseMatrix& a, std::span<const double> x) {
  if (a.cols() != static_cast<int>(x.size()))
    throw NumericalError("dense matvec: shape mismatch");
  std::vector<double> y(static_cast<std::size_t>(a.rows()), 0.0);
  for (int i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    const double* ai = a.data() + static_cast<std::size_t>(i) * a.cols();
    for (int j = 0; j < a.cols(); ++j) s += ai[j] * x[j];
    y[static_cast<std::size_t>(i)] = s;
  }
  return y;
}

void add_scaled(DenseMatrix& y, double alpha, const DenseMatrix& x) {
  if (y.rows() != x.rows() || y.cols() != x.cols())
    throw NumericalError("add_scaled: shape mismatch");
  const std::size_t total =
      static_cast<std::size_t>(y.rows()) * static_cast<std::size_t>(y.cols());
  for (std::size_t i = 0; i < total; ++i) y.data()[i] += alpha * x.data()[i];
}

double norm_1(const DenseMatrix& a) {
  double best = 0.0;
  for (int j = 0; j < a.cols(); ++j) {
    double s = 0.0;
    for (int i = 0; i < a.rows(); ++i) s += std::abs(a(i, j));
    best = std::max(best, s);
  }
  return best;
}

double max_abs(const DenseMatrix& a) {
  double best = 0.0;
  const std::size_t total =
      static_cast<std::size_t>(a.rows()) * static_cast<std::size_t>(a.cols());
  for (std::size_t i = 0; i < total; ++i) best = std::max(best, std::abs(a.data()[i]));
  return best;
}

namespace {

struct Lu {
  DenseMatrix lu;
  std::vector<int> piv;
};

Lu lu_factor(DenseMatrix a) {
  if (a.rows() != a.cols()) throw NumericalError("lu_factor: matrix not square");
  const int n = a.rows();
  std::vector<int> piv(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    int p = k;
    double best = std::abs(a(k, k));
    for (int i = k + 1; i < n; ++i) {
      if (std::abs(a(i, k)) > best) {
        best = std::abs(a(i, k));
        p = i;
      }
    }
    if (best == 0.0) throw NumericalError("lu_factor: singular matrix");
    piv[static_cast<std::size_t>(k)] = p;
    if (p != k)
      for (int j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
    const double inv = 1.0 / a(k, k);
    for (int i = k + 1; i < n; ++i) {
      const double lik = a(i, k) * inv;
      a(i, k) = lik;
      if (lik == 0.0) continue;
      for (int j = k + 1; j < n; ++j) a(i, j) -= lik * a(k, j);
    }
  }
  return {std::move(a), std::move(piv)};
}

DenseMatrix lu_apply(const Lu& f, DenseMatrix b) {
  const int n = f.lu.rows();
  if (b.rows() != n) throw NumericalError("lu_solve: rhs shape mismatch");
  const int m = b.cols();
  // the stored multipliers live in fully pivoted row order, so all row
  // swaps go first, then the clean triangular solves
  for (int k = 0; k < n; ++k) {
    const int p = f.piv[static_cast<std::size_t>(k)];
    if (p != k)
      for (int j = 0; j < m; ++j) std::swap(b(k, j), b(p, j));
  }
  for (int k = 0; k < n; ++k) {
    for (int i = k + 1; i < n; ++i) {
      const double lik = f.lu(i, k);
      if (lik == 0.0) continue;
      for (int j = 0; j < m; ++j) b(i, j) -= lik * b(k, j);
    }
  }
  for (int k = n - 1; k >= 0; --k) {
    const double inv = 1.0 / f.lu(k, k);
    for (int j = 0; j < m; ++j) b(k, j) *= inv;
    for (int i = 0; i < k; ++i) {
      const double uik = f.lu(i, k);
      if (uik == 0.0) continue;
      for (int j = 0; j < m; ++j) b(i, j) -= uik * b(k, j);
    }
  }
  return b;
}

}  // namespace

DenseMatrix lu_solve(DenseMatrix a, DenseMatrix b) {
  Lu f = lu_factor(std::move(a));
  return lu_apply(f, std::move(b));
}

double cond_1(const DenseMatrix& a) {
  const double na = norm_1(a);
  Lu f = lu_factor(a);
  DenseMatrix inv = lu_apply(f, DenseMatrix::identity(a.rows()));
  return na * norm_1(inv);
}

namespace {

// Pade numerator coefficients from the standard double-precision tables.
const double kPade3[] = {120.0, 60.0, 12.0, 1.0};
const double kPade5[] = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
const double kPade7[] = {17297280.0, 8648640.0, 1995840.0, 277200.0,
                         25200.0,    1512.0,    56.0,      1.0};
const double kPade9[] = {17643225600.0, 8821612800.0, 2075673600.0, 302702400.0,
                         30270240.0,    2162160.0,    110880.0,     3960.0,
                         90.0,          1.0};
const double kPade13[] = {64764752532480000.0,
                          32382376266240000.0,
                          7771770303897600.0,
                          1187353796428800.0,
                          129060195264000.0,
                          10559470521600.0,
                          670442572800.0,
                          33522128640.0,
                          1323241920.0,
                          40840800.0,
                          960960.0,
                          16380.0,
                          182.0,
                          1.0};

DenseMatrix pade_low(const DenseMatrix& a, std::span<const double> b) {
  const int n = a.rows();
  const int m = static_cast<int>(b.size()) - 1;  // 3, 5, 7 or 9
  DenseMatrix a2 = matmul(a, a);
  // u_inner = sum of odd coefficients over a2 powers, v = even part
  DenseMatrix pow = DenseMatrix::identity(n);
  DenseMatrix u_inner(n, n), v(n, n);
  add_scaled(u_inner, b[1], pow);
  add_scaled(v, b[0], pow);
  for (int k = 2; k <= m; k += 2) {
    pow = matmul(pow, a2);
    add_scaled(v, b[static_cast<std::size_t>(k)], pow);
    if (k + 1 <= m) add_scaled(u_inner, b[static_cast<std::size_t>(k + 1)], pow);
  }
  DenseMatrix u = matmul(a, u_inner);
  DenseMatrix p = v, q = v;
  add_scaled(p, 1.0, u);
  add_scaled(q, -1.0, u);
  return lu_solve(std::move(q), std::move(p));
}

DenseMatrix pade13(const DenseMatrix& a) {
  const int n = a.rows();
  const auto& b = kPade13;
  DenseMatrix a2 = matmul(a, a);
  DenseMatrix a4 = matmul(a2, a2);
  DenseMatrix a6 = matmul(a4, a2);
  DenseMatrix id = DenseMatrix::identity(n);

  DenseMatrix w1(n, n);
  add_scaled(w1, b[13], a6);
  add_scaled(w1, b[11], a4);
  add_scaled(w1, b[9], a2);
  DenseMatrix w2(n, n);
  add_scaled(w2, b[7], a6);
  add_scaled(w2, b[5], a4);
  add_scaled(w2, b[3], a2);
  add_scaled(w2, b[1], id);
  DenseMatrix w = matmul(a6, w1);
  add_scaled(w, 1.0, w2);
  DenseMatrix u = matmul(a, w);

  DenseMatrix z1(n, n);
  add_scaled(z1, b[12], a6);
  add_scaled(z1, b[10], a4);
  add_scaled(z1, b[8], a2);
  DenseMatrix v = matmul(a6, z1);
  add_scaled(v, b[6], a6);
  add_scaled(v, b[4], a4);
  add_scaled(v, b[2], a2);
  add_scaled(v, b[0], id);

  DenseMatrix p = v, q = v;
  add_scaled(p, 1.0, u);
  add_scaled(q, -1.0, u);
  return lu_solve(std::move(q), std::move(p));
}

}  // namespace

DenseMatrix dense_expm(const DenseMatrix& a) {
  if (a.rows() != a.cols()) throw NumericalError("dense_expm: matrix not square");
  if (a.rows() > 512) throw NumericalError("dense_expm: dimension exceeds 512");
  const int n = a.rows();
  if (n == 0) return DenseMatrix(0, 0);
  const double na = norm_1(a);
  if (!std::isfinite(na)) throw NumericalError("dense_expm: non-finite input");

  constexpr double kTheta3 = 1.495585217958292e-2;
  constexpr double kTheta5 = 2.539398330063230e-1;
  constexpr double kTheta7 = 9.504178996162932e-1;
  constexpr double kTheta9 = 2.097847961257068;
  constexpr double kTheta13 = 5.371920351148152;

  if (na <= kTheta3) return pade_low(a, kPade3);
  if (na <= kTheta5) return pade_low(a, kPade5);
  if (na <= kTheta7) return pade_low(a, kPade7);
  if (na <= kTheta9) return pade_low(a, kPade9);

  int s = 0;
  if (na > kTheta13) s = static_cast<int>(std::ceil(std::log2(na / kTheta13)));
  if (s > 1024) throw NumericalError("dense_expm: norm too large to scale");
  DenseMatrix scaled = a;
  const double factor = std::ldexp(1.0, -s);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) scaled(i, j) *= factor;
  DenseMatrix r = pade13(scaled);
  for (int k = 0; k < s; ++k) r = matmul(r, r);
  return r;
}

DenseMatrix dense_cholesky(const DenseMatrix& a) {
  if (a.rows() != a.cols()) throw NumericalError("dense_cholesky: matrix not square");
  const int n = a.rows();
  DenseMatrix l(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = a(i, j);
      for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      if (i == j) {
        if (s <= 0.0) throw NumericalError("dense_cholesky: nonpositive pivot");
        l(i, i) = std::sqrt(s);
      } else {
        l(i, j) = s / l(j, j);
      }
    }
  }
  return l;
}

}  // namespace ebrd
