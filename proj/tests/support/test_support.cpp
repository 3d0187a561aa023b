#include "test_support.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ebrd/common.hpp"

namespace ebrd::testing {

std::vector<double> phi_combination_dense_oracle(const DenseMatrix& a,
                                                 const std::vector<std::vector<double>>& v,
                                                 double tau) {
  const int n = a.rows();
  int p = static_cast<int>(v.size()) - 1;
  if (p == 0) {
    DenseMatrix s = a;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) s(i, j) *= tau;
    return matvec(dense_expm(s), v[0]);
  }
  // phi_k here is (k-1)! phihat_k; the augmented construction produces the
  // phihat series, so scale v_k accordingly
  const int big = n + p;
  DenseMatrix m(big, big);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = tau * a(i, j);
  double fact = 1.0;
  for (int k = 1; k <= p; ++k) {
    if (k >= 2) fact *= (k - 1);
    // column n + (p - k) carries w_k = (k-1)! v_k
    for (int i = 0; i < n; ++i)
      m(i, n + (p - k)) = fact * v[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
  }
  for (int i = 0; i + 1 < p; ++i) m(n + i, n + i + 1) = 1.0;
  DenseMatrix e = dense_expm(m);
  std::vector<double> out(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    double s = e(i, n + p - 1);  // column of the J-block unit start vector
    for (int j = 0; j < n; ++j) s += e(i, j) * v[0][static_cast<std::size_t>(j)];
    out[static_cast<std::size_t>(i)] = s;
  }
  return out;
}

namespace {

// 16-point Gauss-Legendre nodes/weights on [-1, 1]
const double kGlNodes[16] = {
    -0.9894009349916499, -0.9445750230732326, -0.8656312023878318,
    -0.7554044083550030, -0.6178762444026438, -0.4580167776572274,
    -0.2816035507792589, -0.0950125098376374, 0.0950125098376374,
    0.2816035507792589,  0.4580167776572274,  0.6178762444026438,
    0.7554044083550030,  0.8656312023878318,  0.9445750230732326,
    0.9894009349916499};
const double kGlWeights[16] = {
    0.0271524594117541, 0.0622535239386479, 0.0951585116824928,
    0.1246289712555339, 0.1495959888165767, 0.1691565193950025,
    0.1826034150449236, 0.1894506104550685, 0.1894506104550685,
    0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479,
    0.0271524594117541};

}  // namespace

double phi_scalar_quadrature(int k, double z) {
  auto integrate = [&](int panels) {
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
      const double a = static_cast<double>(p) / panels;
      const double b = static_cast<double>(p + 1) / panels;
      for (int q = 0; q < 16; ++q) {
        const double s = 0.5 * (a + b) + 0.5 * (b - a) * kGlNodes[q];
        total += 0.5 * (b - a) * kGlWeights[q] * std::exp((1.0 - s) * z) *
                 std::pow(s, k - 1);
      }
    }
    return total;
  };
  double prev = integrate(2);
  for (int panels = 4; panels <= 64; panels *= 2) {
    const double cur = integrate(panels);
    if (std::abs(cur - prev) <= 1e-14 * std::max(1.0, std::abs(cur))) return cur;
    prev = cur;
  }
  return prev;
}

DenseMatrix phi_dense_quadrature(int k, const DenseMatrix& a) {
  const int n = a.rows();
  auto integrate = [&](int panels) {
    DenseMatrix total(n, n);
    for (int p = 0; p < panels; ++p) {
      const double lo = static_cast<double>(p) / panels;
      const double hi = static_cast<double>(p + 1) / panels;
      for (int q = 0; q < 16; ++q) {
        const double s = 0.5 * (lo + hi) + 0.5 * (hi - lo) * kGlNodes[q];
        DenseMatrix scaled = a;
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) scaled(i, j) *= (1.0 - s);
        DenseMatrix e = dense_expm(scaled);
        const double w = 0.5 * (hi - lo) * kGlWeights[q] * std::pow(s, k - 1);
        add_scaled(total, w, e);
      }
    }
    return total;
  };
  DenseMatrix prev = integrate(4);
  for (int panels = 8; panels <= 32; panels *= 2) {
    DenseMatrix cur = integrate(panels);
    DenseMatrix diff = cur;
    add_scaled(diff, -1.0, prev);
    if (max_abs(diff) <= 1e-12 * std::max(1.0, max_abs(cur))) return cur;
    prev = cur;
  }
  return prev;
}

SymSparseMatrix random_spd(Rng& rng, int n, double density) {
  std::vector<Triplet> ts;
  std::vector<double> row_sum(static_cast<std::size_t>(n), 0.0);
  const int band = std::max(1, static_cast<int>(n * density));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j <= std::min(n - 1, i + band); ++j) {
      if (rng.uniform() > 0.4) continue;
      const double v = rng.uniform(-1.0, 1.0);
      ts.push_back({i, j, v});
      ts.push_back({j, i, v});
      row_sum[static_cast<std::size_t>(i)] += std::abs(v);
      row_sum[static_cast<std::size_t>(j)] += std::abs(v);
    }
  for (int i = 0; i < n; ++i)
    ts.push_back({i, i, row_sum[static_cast<std::size_t>(i)] + rng.uniform(0.1, 2.0)});
  return SymSparseMatrix::from_triplets(n, std::move(ts));
}

NegativeOperator random_negative_operator(Rng& rng, int n, double spread) {
  // -(D + L) with L weakly diagonally dominant PSD and D >= 0:
  // Gershgorin keeps the spectrum inside [-spread, 0]. The first node is
  // left fully decoupled, which pins an exact zero eigenvalue so results
  // never decay below representable scale.
  std::vector<Triplet> ts;
  std::vector<double> row_sum(static_cast<std::size_t>(n), 0.0);
  const int band = std::max(1, n / 10);
  for (int i = 1; i < n; ++i)
    for (int j = i + 1; j <= std::min(n - 1, i + band); ++j) {
      if (rng.uniform() > 0.5) continue;
      const double v = rng.uniform(0.0, 1.0);
      ts.push_back({i, j, v});
      ts.push_back({j, i, v});
      row_sum[static_cast<std::size_t>(i)] += v;
      row_sum[static_cast<std::size_t>(j)] += v;
    }
  double max_diag = 1e-12;
  std::vector<double> diag(static_cast<std::size_t>(n), 0.0);
  for (int i = 1; i < n; ++i) {
    diag[static_cast<std::size_t>(i)] =
        row_sum[static_cast<std::size_t>(i)] + rng.uniform(0.0, 1.0);
    max_diag = std::max(max_diag, diag[static_cast<std::size_t>(i)] +
                                      row_sum[static_cast<std::size_t>(i)]);
  }
  const double scale = spread / (2.0 * max_diag);
  for (Triplet& t : ts) t.value *= -scale;
  for (int i = 0; i < n; ++i)
    ts.push_back({i, i, -scale * diag[static_cast<std::size_t>(i)]});
  NegativeOperator out;
  out.sparse = SymSparseMatrix::from_triplets(n, std::move(ts));
  out.dense = out.sparse.to_dense();
  return out;
}

int banded_cholesky_check(const SymSparseMatrix& a) {
  const int n = a.n;
  int bw = 0;
  for (int i = 0; i < n; ++i)
    for (int k = a.row_offsets[static_cast<std::size_t>(i)];
         k < a.row_offsets[static_cast<std::size_t>(i) + 1]; ++k)
      bw = std::max(bw, std::abs(a.col_indices[static_cast<std::size_t>(k)] - i));
  // row-major band storage, lower triangle: l[i][b] = L(i, i-bw+b)
  std::vector<std::vector<double>> l(static_cast<std::size_t>(n),
                                     std::vector<double>(static_cast<std::size_t>(bw) + 1, 0.0));
  auto lget = [&](int i, int j) -> double& {
    return l[static_cast<std::size_t>(i)][static_cast<std::size_t>(j - (i - bw))];
  };
  for (int i = 0; i < n; ++i) {
    for (int j = std::max(0, i - bw); j <= i; ++j) {
      double s = a.entry(i, j);
      for (int k = std::max(0, i - bw); k < j; ++k) {
        if (k < j - bw) continue;
        s -= lget(i, k) * lget(j, k);
      }
      if (i == j) {
        if (s <= 0.0)
          throw NumericalError("banded_cholesky_check: nonpositive pivot at row " +
                               std::to_string(i));
        lget(i, i) = std::sqrt(s);
      } else {
        lget(i, j) = s / lget(j, j);
      }
    }
  }
  return bw;
}

VtkDump read_vtk_dump(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("read_vtk_dump: cannot open '" + path + "'");
  VtkDump d;
  std::string line;
  std::vector<double>* target = nullptr;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    std::string word;
    ss >> word;
    if (word == "DIMENSIONS") {
      int nz;
      ss >> d.nx >> d.ny >> nz;
    } else if (word == "ORIGIN") {
      double z;
      ss >> d.origin_x >> d.origin_y >> z;
    } else if (word == "SPACING") {
      double sy, sz;
      ss >> d.spacing >> sy >> sz;
    } else if (word == "SCALARS") {
      std::string name;
      ss >> name;
      std::getline(in, line);  // LOOKUP_TABLE
      target = name == "u" ? &d.u : &d.rho;
      target->clear();
      target->reserve(static_cast<std::size_t>(d.nx) * static_cast<std::size_t>(d.ny));
      for (int k = 0; k < d.nx * d.ny; ++k) {
        double v;
        in >> v;
        target->push_back(v);
      }
      in.ignore();
    }
  }
  return d;
}

}  // namespace ebrd::testing
