#include "ebrd/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace ebrd {

SymSparseMatrix SymSparseMatrix::from_triplets(int n, std::vector<Triplet> entries) {
  for (const Triplet& t : entries) {
    if (t.row < 0 || t.row >= n || t.col < 0 || t.col >= n)
      throw NumericalError("from_triplets: index out of range");
  }
  std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  SymSparseMatrix m;
  m.n = n;
  m.row_offsets.assign(static_cast<std::size_t>(n) + 1, 0);
  m.col_indices.reserve(entries.size());
  m.values.reserve(entries.size());
  std::size_t i = 0;
  for (int row = 0; row < n; ++row) {
    m.row_offsets[static_cast<std::size_t>(row)] = static_cast<int>(m.col_indices.size());
    while (i < entries.size() && entries[i].row == row) {
      const int col = entries[i].col;
      double v = 0.0;
      while (i < entries.size() && entries[i].row == row && entries[i].col == col) {
        v += entries[i].value;
        ++i;
      }
      m.col_indices.push_back(col);
      m.values.push_back(v);
    }
  }
  m.row_offsets[static_cast<std::size_t>(n)] = static_cast<int>(m.col_indices.size());
  return m;
}

void SymSparseMatrix::matvec(std::span<const double> x, std::span<double> y) const {
  if (static_cast<int>(x.size()) != n || static_cast<int>(y.size()) != n)
    throw NumericalError("matvec: dimension mismatch");
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    const int lo = row_offsets[static_cast<std::size_t>(i)];
    const int hi = row_offsets[static_cast<std::size_t>(i) + 1];
    for (int k = lo; k < hi; ++k)
      s += values[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(col_indices[static_cast<std::size_t>(k)])];
    y[static_cast<std::size_t>(i)] = s;
  }
}

std::vector<double> SymSparseMatrix::matvec(std::span<const double> x) const {
  std::vector<double> y(static_cast<std::size_t>(n));
  matvec(x, y);
  return y;
}

double SymSparseMatrix::entry(int i, int j) const {
  const int lo = row_offsets[static_cast<std::size_t>(i)];
  const int hi = row_offsets[static_cast<std::size_t>(i) + 1];
  const auto begin = col_indices.begin() + lo;
  const auto end = col_indices.begin() + hi;
  const auto it = std::lower_bound(begin, end, j);
  if (it == end || *it != j) return 0.0;
  return values[static_cast<std::size_t>(it - col_indices.begin())];
}

double SymSparseMatrix::max_asymmetry() const {
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int k = row_offsets[static_cast<std::size_t>(i)]; k < row_offsets[static_cast<std::size_t>(i) + 1]; ++k) {
      const int j = col_indices[static_cast<std::size_t>(k)];
      worst = std::max(worst, std::abs(values[static_cast<std::size_t>(k)] - entry(j, i)));
    }
  }
  return worst;
}

DenseMatrix SymSparseMatrix::to_dense() const {
  DenseMatrix d(n, n);
  for (int i = 0; i < n; ++i)
    for (int k = row_offsets[static_cast<std::size_t>(i)]; k < row_offsets[static_cast<std::size_t>(i) + 1]; ++k)
      d(i, col_indices[static_cast<std::size_t>(k)]) = values[static_cast<std::size_t>(k)];
  return d;
}

IC0Factor ic0_factor(const SymSparseMatrix& a) {
  IC0Factor f;
  f.n = a.n;
  f.row_offsets.assign(static_cast<std::size_t>(a.n) + 1, 0);
  // pattern: lower triangle incl. diagonal, rows stay sorted so the
  // diagonal is the last entry of each row
  for (int i = 0; i < a.n; ++i) {
    f.row_offsets[static_cast<std::size_t>(i)] = static_cast<int>(f.col_indices.size());
    bool has_diag = false;
    for (int k = a.row_offsets[static_cast<std::size_t>(i)]; k < a.row_offsets[static_cast<std::size_t>(i) + 1]; ++k) {
      const int j = a.col_indices[static_cast<std::size_t>(k)];
      if (j > i) break;
      if (j == i) has_diag = true;
      f.col_indices.push_back(j);
      f.values.push_back(a.values[static_cast<std::size_t>(k)]);
    }
    if (!has_diag) throw NumericalError("ic0: structurally missing diagonal entry");
  }
  f.row_offsets[static_cast<std::size_t>(a.n)] = static_cast<int>(f.col_indices.size());

  // Up-looking IC(0): for row i and each stored column j < i,
  //   L(i,j) = (A(i,j) - sum_{k in pat(i) ∩ pat(j), k<j} L(i,k) L(j,k)) / L(j,j),
  //   L(i,i) = sqrt(A(i,i) - sum L(i,k)^2).
  std::vector<int> pos(static_cast<std::size_t>(a.n), -1);  // column -> slot in row i
  for (int i = 0; i < a.n; ++i) {
    const int lo = f.row_offsets[static_cast<std::size_t>(i)];
    const int hi = f.row_offsets[static_cast<std::size_t>(i) + 1];
    for (int k = lo; k < hi; ++k) pos[static_cast<std::size_t>(f.col_indices[static_cast<std::size_t>(k)])] = k;
    for (int k = lo; k < hi; ++k) {
      const int j = f.col_indices[static_cast<std::size_t>(k)];
      double s = f.values[static_cast<std::size_t>(k)];
      const int jlo = f.row_offsets[static_cast<std::size_t>(j)];
      const int jhi = f.row_offsets[static_cast<std::size_t>(j) + 1] - 1;  // exclude diag of row j
      for (int kk = jlo; kk < jhi; ++kk) {
        const int c = f.col_indices[static_cast<std::size_t>(kk)];
        const int pi = pos[static_cast<std::size_t>(c)];
        if (pi >= 0 && pi < k) s -= f.values[static_cast<std::size_t>(pi)] * f.values[static_cast<std::size_t>(kk)];
      }
      if (j == i) {
        if (s <= 0.0)
          throw NumericalError("ic0: nonpositive pivot at row " + std::to_string(i) +
                               " (matrix not SPD)");
        f.values[static_cast<std::size_t>(k)] = std::sqrt(s);
      } else {
        const double djj = f.values[static_cast<std::size_t>(f.row_offsets[static_cast<std::size_t>(j) + 1] - 1)];
        f.values[static_cast<std::size_t>(k)] = s / djj;
      }
    }
    for (int k = lo; k < hi; ++k) pos[static_cast<std::size_t>(f.col_indices[static_cast<std::size_t>(k)])] = -1;
  }
  return f;
}

void IC0Factor::solve(std::span<const double> r, std::span<double> z) const {
  // forward substitution L y = r, stored in z
  for (int i = 0; i < n; ++i) {
    double s = r[static_cast<std::size_t>(i)];
    const int lo = row_offsets[static_cast<std::size_t>(i)];
    const int hi = row_offsets[static_cast<std::size_t>(i) + 1] - 1;
    for (int k = lo; k < hi; ++k)
      s -= values[static_cast<std::size_t>(k)] * z[static_cast<std::size_t>(col_indices[static_cast<std::size_t>(k)])];
    z[static_cast<std::size_t>(i)] = s / values[static_cast<std::size_t>(hi)];
  }
  // backward substitution L^T z = y, in place (column sweep)
  for (int j = n - 1; j >= 0; --j) {
    const int lo = row_offsets[static_cast<std::size_t>(j)];
    const int hi = row_offsets[static_cast<std::size_t>(j) + 1] - 1;
    const double zj = z[static_cast<std::size_t>(j)] / values[static_cast<std::size_t>(hi)];
    z[static_cast<std::size_t>(j)] = zj;
    for (int k = lo; k < hi; ++k)
      z[static_cast<std::size_t>(col_indices[static_cast<std::size_t>(k)])] -= values[static_cast<std::size_t>(k)] * zj;
  }
}

namespace {
double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}
double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }
}  // namespace

CgResult cg_solve(const SymSparseMatrix& a, std::span<const double> b,
                  const IC0Factor* precond, double tol, int maxit) {
  if (tol <= 0.0) throw NumericalError("cg_solve: tol must be positive");
  const int n = a.n;
  if (static_cast<int>(b.size()) != n) throw NumericalError("cg_solve: rhs dimension mismatch");
  if (maxit <= 0) maxit = 10 * n;

  CgResult res;
  res.x.assign(static_cast<std::size_t>(n), 0.0);
  const double bnorm = norm2(b);
  if (bnorm == 0.0) return res;  // x = 0 solves exactly

  std::vector<double> r(b.begin(), b.end());
  std::vector<double> z(static_cast<std::size_t>(n));
  if (precond)
    precond->solve(r, z);
  else
    z = r;
  std::vector<double> p = z;
  std::vector<double> ap(static_cast<std::size_t>(n));
  double rz = dot(r, z);
  const double rz0 = std::abs(rz);

  int it = 0;
  double true_rel = norm2(r) / bnorm;
  while (it < maxit) {
    if (true_rel <= tol && std::abs(rz) <= tol * tol * rz0) break;
    a.matvec(p, ap);
    const double pap = dot(p, ap);
    if (pap <= 0.0)
      throw CgFailure("cg_solve: nonpositive curvature (matrix not SPD)", it, true_rel);
    const double alpha = rz / pap;
    for (int i = 0; i < n; ++i) {
      res.x[static_cast<std::size_t>(i)] += alpha * p[static_cast<std::size_t>(i)];
      r[static_cast<std::size_t>(i)] -= alpha * ap[static_cast<std::size_t>(i)];
    }
    if (precond)
      precond->solve(r, z);
    else
      z = r;
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (int i = 0; i < n; ++i)
      p[static_cast<std::size_t>(i)] = z[static_cast<std::size_t>(i)] + beta * p[static_cast<std::size_t>(i)];
    ++it;
    true_rel = norm2(r) / bnorm;
  }
  res.iterations = it;
  res.relative_residual = true_rel;
  if (true_rel > tol)
    throw CgFailure("cg_solve: no convergence within " + std::to_string(maxit) +
                        " iterations (residual " + std::to_string(true_rel) + ")",
                    it, true_rel);
  return res;
}

void write_triplets(const SymSparseMatrix& a, std::ostream& out) {
  out.precision(17);
  for (int i = 0; i < a.n; ++i)
    for (int k = a.row_offsets[static_cast<std::size_t>(i)]; k < a.row_offsets[static_cast<std::size_t>(i) + 1]; ++k)
      out << i << ' ' << a.col_indices[static_cast<std::size_t>(k)] << ' '
          << a.values[static_cast<std::size_t>(k)] << '\n';
}

SymSparseMatrix read_triplets(std::istream& in) {
  std::vector<Triplet> ts;
  int n = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    Triplet t{};
    if (!(ss >> t.row >> t.col >> t.value))
      throw IoError("read_triplets: malformed line '" + line + "'");
    n = std::max({n, t.row + 1, t.col + 1});
    ts.push_back(t);
  }
  return SymSparseMatrix::from_triplets(n, std::move(ts));
}

}  // namespace ebrd
