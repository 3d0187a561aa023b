#include "ebrd/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace ebrd {

UniformGrid2D::UniformGrid2D(double x_lo_, double y_lo_, double h_, int nx_, int ny_)
    : x_lo(x_lo_), y_lo(y_lo_), h(h_), nx(nx_), ny(ny_) {
  if (h <= 0.0) throw ConfigError("UniformGrid2D: spacing must be positive");
  if (nx < 4 || ny < 4) throw ConfigError("UniformGrid2D: need at least 4 nodes per axis");
}

LevelSetField::LevelSetField(const UniformGrid2D& g, std::function<double(double, double)> rho)
    : grid(g), values(static_cast<std::size_t>(g.size())) {
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double v = rho(g.x(i), g.y(j));
      if (!std::isfinite(v)) throw NumericalError("LevelSetField: non-finite sample");
      values[static_cast<std::size_t>(g.index(i, j))] = v;
    }
}

namespace {

// cell index and local coordinate for a clamped query
void locate(double lo, double h, int n, double q, int& cell, double& frac) {
  double t = (q - lo) / h;
  t = std::clamp(t, 0.0, static_cast<double>(n - 1));
  cell = std::min(static_cast<int>(t), n - 2);
  frac = t - cell;
}

}  // namespace

double LevelSetField::interpolate(double x, double y) const {
  int i, j;
  double fx, fy;
  locate(grid.x_lo, grid.h, grid.nx, x, i, fx);
  locate(grid.y_lo, grid.h, grid.ny, y, j, fy);
  const double v00 = at(i, j), v10 = at(i + 1, j);
  const double v01 = at(i, j + 1), v11 = at(i + 1, j + 1);
  return (1 - fx) * (1 - fy) * v00 + fx * (1 - fy) * v10 + (1 - fx) * fy * v01 +
         fx * fy * v11;
}

double nodal_grad_x(const LevelSetField& f, int i, int j) {
  const UniformGrid2D& g = f.grid;
  if (i == 0) return (f.at(1, j) - f.at(0, j)) / g.h;
  if (i == g.nx - 1) return (f.at(i, j) - f.at(i - 1, j)) / g.h;
  return (f.at(i + 1, j) - f.at(i - 1, j)) / (2.0 * g.h);
}

double nodal_grad_y(const LevelSetField& f, int i, int j) {
  const UniformGrid2D& g = f.grid;
  if (j == 0) return (f.at(i, 1) - f.at(i, 0)) / g.h;
  if (j == g.ny - 1) return (f.at(i, j) - f.at(i, j - 1)) / g.h;
  return (f.at(i, j + 1) - f.at(i, j - 1)) / (2.0 * g.h);
}

std::array<double, 2> LevelSetField::gradient(double x, double y) const {
  int i, j;
  double fx, fy;
  locate(grid.x_lo, grid.h, grid.nx, x, i, fx);
  locate(grid.y_lo, grid.h, grid.ny, y, j, fy);
  double gx = 0.0, gy = 0.0;
  const double w[4] = {(1 - fx) * (1 - fy), fx * (1 - fy), (1 - fx) * fy, fx * fy};
  const int di[4] = {0, 1, 0, 1};
  const int dj[4] = {0, 0, 1, 1};
  for (int k = 0; k < 4; ++k) {
    gx += w[k] * nodal_grad_x(*this, i + di[k], j + dj[k]);
    gy += w[k] * nodal_grad_y(*this, i + di[k], j + dj[k]);
  }
  return {gx, gy};
}

double LevelSetField::line_interpolant(Axis axis, int other, double s) const {
  const int n = axis == Axis::X ? grid.nx : grid.ny;
  const double lo = axis == Axis::X ? grid.x_lo : grid.y_lo;
  int base = static_cast<int>(std::floor((s - lo) / grid.h));
  base = std::clamp(base - 1, 0, n - 4);  // 4-point stencil [base, base+3]
  double xs[4], vs[4];
  for (int m = 0; m < 4; ++m) {
    const int k = base + m;
    xs[m] = lo + k * grid.h;
    vs[m] = axis == Axis::X ? at(k, other) : at(other, k);
  }
  // Neville's scheme on the 4 points
  for (int level = 1; level < 4; ++level)
    for (int m = 0; m < 4 - level; ++m)
      vs[m] = ((s - xs[m + level]) * vs[m] + (xs[m] - s) * vs[m + 1]) /
              (xs[m] - xs[m + level]);
  return vs[0];
}

bool LevelSetField::has_sign_change() const {
  bool neg = false, pos = false;
  for (double v : values) {
    neg = neg || v <= 0.0;
    pos = pos || v > 0.0;
    if (neg && pos) return true;
  }
  return false;
}

std::vector<PointClass> classify_points(const UniformGrid2D& grid, const LevelSetField& ls) {
  if (ls.grid.nx != grid.nx || ls.grid.ny != grid.ny)
    throw ConfigError("classify_points: level set not defined on this grid");
  std::vector<PointClass> cls(static_cast<std::size_t>(grid.size()), PointClass::Outside);
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      if (!ls.inside(i, j)) continue;
      const int di[4] = {1, -1, 0, 0};
      const int dj[4] = {0, 0, 1, -1};
      bool any_out = false;
      for (int k = 0; k < 4; ++k) {
        const int a = i + di[k], b = j + dj[k];
        if (grid.in_grid(a, b) && !ls.inside(a, b)) any_out = true;
      }
      PointClass& c = cls[static_cast<std::size_t>(grid.index(i, j))];
      if (any_out)
        c = PointClass::InteriorGhost;
      else if (!grid.on_rim(i, j))
        c = PointClass::Computational;
      // inside rim nodes without outside neighbors stay excluded from the stencil
    }
  }
  return cls;
}

BoundaryCrossing find_crossing(const LevelSetField& ls, int inside_i, int inside_j,
                               int outside_i, int outside_j) {
  const UniformGrid2D& g = ls.grid;
  const int di = outside_i - inside_i, dj = outside_j - inside_j;
  if (std::abs(di) + std::abs(dj) != 1)
    throw NumericalError("find_crossing: nodes are not axis neighbors");
  const double rin = ls.at(inside_i, inside_j);
  const double rout = ls.at(outside_i, outside_j);
  if (!(rin < 0.0) || rout < 0.0)
    throw NumericalError("find_crossing: degenerate crossing, segment has no sign change");

  BoundaryCrossing c;
  c.axis = dj == 0 ? Axis::X : Axis::Y;
  c.inside_i = inside_i;
  c.inside_j = inside_j;
  c.outside_i = outside_i;
  c.outside_j = outside_j;

  const double s_in = c.axis == Axis::X ? g.x(inside_i) : g.y(inside_j);
  const double s_out = c.axis == Axis::X ? g.x(outside_i) : g.y(outside_j);
  const int other = c.axis == Axis::X ? inside_j : inside_i;

  double gamma;
  if (rout == 0.0) {
    gamma = s_out;  // boundary exactly on the node
  } else {
    auto f = [&](double s) { return ls.line_interpolant(c.axis, other, s); };
    // safeguarded secant on the bracket; the interpolant matches the nodal
    // values at the endpoints, so a root exists strictly inside
    double a = s_in, fa = rin;
    double b = s_out, fb = rout;
    double scale = std::max(1.0, std::max(std::abs(rin), std::abs(rout)));
    const double ftol = 1e-12 * scale;
    gamma = 0.5 * (a + b);
    for (int it = 0; it < 100; ++it) {
      double cand = (fb != fa) ? b - fb * (b - a) / (fb - fa) : 0.5 * (a + b);
      const double lo = std::min(a, b), hi = std::max(a, b);
      if (!(cand > lo && cand < hi)) cand = 0.5 * (a + b);
      const double fc = f(cand);
      gamma = cand;
      if (std::abs(fc) <= ftol) break;
      if ((fc < 0.0) == (fa < 0.0)) {
        a = cand;
        fa = fc;
      } else {
        b = cand;
        fb = fc;
      }
      if (std::abs(b - a) <= 1e-15 * g.h) break;
    }
  }
  c.gamma_coord = gamma;
  if (c.axis == Axis::X) {
    c.bx = gamma;
    c.by = g.y(inside_j);
  } else {
    c.bx = g.x(inside_i);
    c.by = gamma;
  }
  return c;
}

std::vector<BoundaryCrossing> enumerate_crossings(const LevelSetField& ls) {
  const UniformGrid2D& g = ls.grid;
  std::vector<BoundaryCrossing> out;
  auto segment = [&](int ii, int ij, int oi, int oj) {
    const double rin = ls.at(ii, ij);
    BoundaryCrossing c;
    if (rin == 0.0) {  // boundary on the inside node itself
      c.axis = oj == ij ? Axis::X : Axis::Y;
      c.inside_i = ii;
      c.inside_j = ij;
      c.outside_i = oi;
      c.outside_j = oj;
      c.gamma_coord = c.axis == Axis::X ? g.x(ii) : g.y(ij);
      c.bx = g.x(ii);
      c.by = g.y(ij);
    } else {
      c = find_crossing(ls, ii, ij, oi, oj);
    }
    out.push_back(c);
  };
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const bool in0 = ls.inside(i, j);
      if (i + 1 < g.nx && ls.inside(i + 1, j) != in0) {
        if (in0)
          segment(i, j, i + 1, j);
        else
          segment(i + 1, j, i, j);
      }
      if (j + 1 < g.ny && ls.inside(i, j + 1) != in0) {
        if (in0)
          segment(i, j, i, j + 1);
        else
          segment(i, j + 1, i, j);
      }
    }
  return out;
}

std::array<double, 2> closest_boundary_point(const LevelSetField& ls, double px, double py) {
  const UniformGrid2D& g = ls.grid;
  const double x_hi = g.x(g.nx - 1), y_hi = g.y(g.ny - 1);
  if (px < g.x_lo || px > x_hi || py < g.y_lo || py > y_hi)
    throw NumericalError("closest_boundary_point: query outside grid bounds");

  double qx = px, qy = py;
  double r = ls.interpolate(qx, qy);
  const double tol = 1e-10 * (1.0 + std::abs(r));
  for (int it = 0; it < 50; ++it) {
    if (std::abs(r) <= tol) return {qx, qy};
    const std::array<double, 2> grad = ls.gradient(qx, qy);
    const double g2 = grad[0] * grad[0] + grad[1] * grad[1];
    const double gnorm = std::sqrt(g2);
    if (gnorm < 1e-10)
      throw NumericalError("closest_boundary_point: degenerate level-set normal");
    double step = r / g2;
    // keep each move under a cell width: the interpolant is only piecewise
    // smooth and long steps bounce across cell boundaries
    const double move = std::abs(step) * gnorm;
    if (move > 0.75 * g.h) step *= 0.75 * g.h / move;
    // damped Newton along the normal; back off when the residual fails
    // to shrink
    for (int half = 0; half < 20; ++half) {
      const double nqx = std::clamp(qx - step * grad[0], g.x_lo, x_hi);
      const double nqy = std::clamp(qy - step * grad[1], g.y_lo, y_hi);
      const double nr = ls.interpolate(nqx, nqy);
      if (std::abs(nr) < std::abs(r) || half == 19) {
        qx = nqx;
        qy = nqy;
        r = nr;
        break;
      }
      step *= 0.5;
    }
  }
  if (std::abs(r) <= 10.0 * tol) return {qx, qy};
  throw NumericalError("closest_boundary_point: projection did not converge");
}

}  // namespace ebrd
