#include "ebrd/levelset.hpp"

#include <algorithm>
#include <cmath>

namespace ebrd {

double VelocityExtensionField::max_component() const {
  double m = 0.0;
  for (double v : vx) m = std::max(m, std::abs(v));
  for (double v : vy) m = std::max(m, std::abs(v));
  return m;
}

NarrowBand build_narrow_band(const LevelSetField& ls, double width_in_h) {
  NarrowBand band;
  band.width = width_in_h * ls.grid.h;
  band.mask.assign(static_cast<std::size_t>(ls.grid.size()), 0);
  for (int j = 0; j < ls.grid.ny; ++j)
    for (int i = 0; i < ls.grid.nx; ++i)
      if (std::abs(ls.at(i, j)) <= band.width) {
        band.mask[static_cast<std::size_t>(ls.grid.index(i, j))] = 1;
        band.nodes.push_back(ls.grid.index(i, j));
      }
  return band;
}

namespace detail {

double weno5(double v1, double v2, double v3, double v4, double v5) {
  const double s1 = 13.0 / 12.0 * (v1 - 2 * v2 + v3) * (v1 - 2 * v2 + v3) +
                    0.25 * (v1 - 4 * v2 + 3 * v3) * (v1 - 4 * v2 + 3 * v3);
  const double s2 = 13.0 / 12.0 * (v2 - 2 * v3 + v4) * (v2 - 2 * v3 + v4) +
                    0.25 * (v2 - v4) * (v2 - v4);
  const double s3 = 13.0 / 12.0 * (v3 - 2 * v4 + v5) * (v3 - 2 * v4 + v5) +
                    0.25 * (3 * v3 - 4 * v4 + v5) * (3 * v3 - 4 * v4 + v5);
  const double vmax = std::max({v1 * v1, v2 * v2, v3 * v3, v4 * v4, v5 * v5});
  const double eps = 1e-6 * vmax + 1e-99;
  const double a1 = 0.1 / ((s1 + eps) * (s1 + eps));
  const double a2 = 0.6 / ((s2 + eps) * (s2 + eps));
  const double a3 = 0.3 / ((s3 + eps) * (s3 + eps));
  const double inv = 1.0 / (a1 + a2 + a3);
  return (a1 * (v1 / 3 - 7 * v2 / 6 + 11 * v3 / 6) +
          a2 * (-v2 / 6 + 5 * v3 / 6 + v4 / 3) +
          a3 * (v3 / 3 + 5 * v4 / 6 - v5 / 6)) * inv;
}

}  // namespace detail

namespace {

struct WenoContext {
  const UniformGrid2D* g;
  const std::vector<double>* f;

  double val(int i, int j) const {
    i = std::clamp(i, 0, g->nx - 1);
    j = std::clamp(j, 0, g->ny - 1);
    return (*f)[static_cast<std::size_t>(g->index(i, j))];
  }
  double slope_x(int i, int j) const { return (val(i + 1, j) - val(i, j)) / g->h; }
  double slope_y(int i, int j) const { return (val(i, j + 1) - val(i, j)) / g->h; }

  double dx_minus(int i, int j) const {
    return detail::weno5(slope_x(i - 3, j), slope_x(i - 2, j), slope_x(i - 1, j),
                         slope_x(i, j), slope_x(i + 1, j));
  }
  double dx_plus(int i, int j) const {
    return detail::weno5(slope_x(i + 2, j), slope_x(i + 1, j), slope_x(i, j),
                         slope_x(i - 1, j), slope_x(i - 2, j));
  }
  double dy_minus(int i, int j) const {
    return detail::weno5(slope_y(i, j - 3), slope_y(i, j - 2), slope_y(i, j - 1),
                         slope_y(i, j), slope_y(i, j + 1));
  }
  double dy_plus(int i, int j) const {
    return detail::weno5(slope_y(i, j + 2), slope_y(i, j + 1), slope_y(i, j),
                         slope_y(i, j - 1), slope_y(i, j - 2));
  }
};

}  // namespace

LevelSetField hj_weno_advect(const LevelSetField& ls, const VelocityExtensionField& vel,
                             double dt_ls) {
  const UniformGrid2D& g = ls.grid;
  if (static_cast<int>(vel.vx.size()) != g.size() ||
      static_cast<int>(vel.vy.size()) != g.size())
    throw NumericalError("hj_weno_advect: velocity not sampled on this grid");
  const double maxv = vel.max_component();
  if (maxv == 0.0) return ls;  // nothing moves
  if (dt_ls > 0.5 * g.h / maxv * (1.0 + 1e-12))
    throw NumericalError("hj_weno_advect: CFL violation, subcycle the advection");

  auto rhs = [&](const std::vector<double>& f, std::vector<double>& out) {
    WenoContext ctx{&g, &f};
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i < g.nx; ++i) {
        const std::size_t id = static_cast<std::size_t>(g.index(i, j));
        const double ux = vel.vx[id];
        const double uy = vel.vy[id];
        double adv = 0.0;
        if (ux > 0.0)
          adv += ux * ctx.dx_minus(i, j);
        else if (ux < 0.0)
          adv += ux * ctx.dx_plus(i, j);
        if (uy > 0.0)
          adv += uy * ctx.dy_minus(i, j);
        else if (uy < 0.0)
          adv += uy * ctx.dy_plus(i, j);
        out[id] = -adv;
      }
    }
  };

  const std::size_t n = ls.values.size();
  std::vector<double> l(n), u1(n), u2(n);
  LevelSetField out = ls;

  rhs(ls.values, l);
  for (std::size_t k = 0; k < n; ++k) u1[k] = ls.values[k] + dt_ls * l[k];
  rhs(u1, l);
  for (std::size_t k = 0; k < n; ++k)
    u2[k] = 0.75 * ls.values[k] + 0.25 * (u1[k] + dt_ls * l[k]);
  rhs(u2, l);
  for (std::size_t k = 0; k < n; ++k)
    out.values[k] = ls.values[k] / 3.0 + 2.0 / 3.0 * (u2[k] + dt_ls * l[k]);
  return out;
}

LevelSetField reinitialize(const LevelSetField& ls, int n_iter) {
  if (n_iter < 1) throw NumericalError("reinitialize: n_iter must be >= 1");
  if (!ls.has_sign_change())
    throw NumericalError("reinitialize: level set has no interface");
  const UniformGrid2D& g = ls.grid;
  const std::size_t n = ls.values.size();

  std::vector<double> sign(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double r0 = ls.values[k];
    sign[k] = r0 / std::sqrt(r0 * r0 + g.h * g.h);
  }

  // Updates run in the narrow band only, with a smooth taper. Far from the
  // interface the field only carries sign information, and relaxing it
  // there makes O(1) adjustments (distance corner fans) that seed spurious
  // sign changes over many calls. The band is taken from the input values
  // alone; normalizing by the local gradient turns out to let inflated
  // gradients pull far nodes into the band, which feeds back on itself.
  std::vector<double> weight(n, 0.0);
  for (int j = 3; j < g.ny - 3; ++j)
    for (int i = 3; i < g.nx - 3; ++i) {
      const std::size_t id = static_cast<std::size_t>(g.index(i, j));
      const double d = std::abs(ls.values[id]);
      if (d <= 12.0 * g.h)
        weight[id] = 1.0;
      else if (d < 18.0 * g.h)
        weight[id] = 0.5 * (1.0 + std::cos(3.14159265358979323846 *
                                           (d - 12.0 * g.h) / (6.0 * g.h)));
    }

  const double dtau = 0.5 * g.h;
  LevelSetField cur = ls;
  std::vector<double> next(n);
  for (int it = 0; it < n_iter; ++it) {
    WenoContext ctx{&g, &cur.values};
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i < g.nx; ++i) {
        const std::size_t id = static_cast<std::size_t>(g.index(i, j));
        if (weight[id] == 0.0) {
          next[id] = cur.values[id];
          continue;
        }
        const double s = sign[id];
        if (s == 0.0) {
          next[id] = cur.values[id];
          continue;
        }
        const double a = ctx.dx_minus(i, j), b = ctx.dx_plus(i, j);
        const double c = ctx.dy_minus(i, j), d = ctx.dy_plus(i, j);
        double gx2, gy2;
        if (s > 0.0) {
          gx2 = std::max(std::max(a, 0.0) * std::max(a, 0.0),
                         std::min(b, 0.0) * std::min(b, 0.0));
          gy2 = std::max(std::max(c, 0.0) * std::max(c, 0.0),
                         std::min(d, 0.0) * std::min(d, 0.0));
        } else {
          gx2 = std::max(std::min(a, 0.0) * std::min(a, 0.0),
                         std::max(b, 0.0) * std::max(b, 0.0));
          gy2 = std::max(std::min(c, 0.0) * std::min(c, 0.0),
                         std::max(d, 0.0) * std::max(d, 0.0));
        }
        next[id] = cur.values[id] - weight[id] * dtau * s * (std::sqrt(gx2 + gy2) - 1.0);
      }
    }
    cur.values.swap(next);
  }
  return cur;
}

std::vector<double> extend_speed(const std::vector<CrossingSample>& samples,
                                 const LevelSetField& ls, int n_iter, double band_in_h) {
  const UniformGrid2D& g = ls.grid;
  if (!ls.has_sign_change()) throw NumericalError("extend_speed: no interface");
  if (samples.empty()) throw NumericalError("extend_speed: no interface samples");
  const std::size_t n = ls.values.size();
  const double band = band_in_h * g.h;

  // nodes adjacent to a sign change get seeded and held
  std::vector<char> front(n, 0);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const bool in0 = ls.inside(i, j);
      if (i + 1 < g.nx && ls.inside(i + 1, j) != in0) {
        front[static_cast<std::size_t>(g.index(i, j))] = 1;
        front[static_cast<std::size_t>(g.index(i + 1, j))] = 1;
      }
      if (j + 1 < g.ny && ls.inside(i, j + 1) != in0) {
        front[static_cast<std::size_t>(g.index(i, j))] = 1;
        front[static_cast<std::size_t>(g.index(i, j + 1))] = 1;
      }
    }

  // bucket the samples on the grid cells for local lookups
  std::vector<std::vector<int>> buckets(n);
  for (int s = 0; s < static_cast<int>(samples.size()); ++s) {
    const int ic = std::clamp(static_cast<int>(std::floor((samples[static_cast<std::size_t>(s)].x - g.x_lo) / g.h)), 0, g.nx - 1);
    const int jc = std::clamp(static_cast<int>(std::floor((samples[static_cast<std::size_t>(s)].y - g.y_lo) / g.h)), 0, g.ny - 1);
    buckets[static_cast<std::size_t>(g.index(ic, jc))].push_back(s);
  }
  // a front node takes the sample average around its own foot point on the
  // interface, which keeps the tangential interpolation error second order
  auto seed_value = [&](int i, int j, bool* ok) {
    double px = g.x(i), py = g.y(j);
    try {
      const std::array<double, 2> foot = closest_boundary_point(ls, px, py);
      px = foot[0];
      py = foot[1];
    } catch (const NumericalError&) {
      // fall back to the node itself when the normal degenerates
    }
    const double radius = 2.0 * g.h;
    const int ic = std::clamp(static_cast<int>(std::floor((px - g.x_lo) / g.h)), 0, g.nx - 1);
    const int jc = std::clamp(static_cast<int>(std::floor((py - g.y_lo) / g.h)), 0, g.ny - 1);
    double wsum = 0.0, vsum = 0.0;
    for (int b = std::max(0, jc - 2); b <= std::min(g.ny - 1, jc + 2); ++b)
      for (int a = std::max(0, ic - 2); a <= std::min(g.nx - 1, ic + 2); ++a)
        for (int s : buckets[static_cast<std::size_t>(g.index(a, b))]) {
          const CrossingSample& cs = samples[static_cast<std::size_t>(s)];
          const double d = std::sqrt((cs.x - px) * (cs.x - px) + (cs.y - py) * (cs.y - py));
          if (d > radius) continue;
          const double w = 1.0 / (d + 0.01 * g.h);
          wsum += w;
          vsum += w * cs.value;
        }
    *ok = wsum > 0.0;
    return *ok ? vsum / wsum : 0.0;
  };

  std::vector<double> q(n, 0.0);
  std::vector<char> held(n, 0);
  int seeded = 0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const std::size_t id = static_cast<std::size_t>(g.index(i, j));
      if (!front[id]) continue;
      bool ok = false;
      const double v = seed_value(i, j, &ok);
      if (ok) {
        q[id] = v;
        held[id] = 1;
        ++seeded;
      }
    }
  if (seeded == 0) throw NumericalError("extend_speed: no front node received a sample");

  // upwind transport along the outward normal on both sides of the interface
  std::vector<double> wx(n, 0.0), wy(n, 0.0);
  std::vector<char> active(n, 0);
  int degenerate = 0, band_count = 0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const std::size_t id = static_cast<std::size_t>(g.index(i, j));
      if (std::abs(ls.values[id]) > band) continue;
      ++band_count;
      if (held[id]) continue;
      const double gx = nodal_grad_x(ls, i, j);
      const double gy = nodal_grad_y(ls, i, j);
      const double norm = std::sqrt(gx * gx + gy * gy);
      if (norm < 1e-12) {
        ++degenerate;
        continue;
      }
      const double s = ls.values[id] / std::sqrt(ls.values[id] * ls.values[id] + g.h * g.h);
      wx[id] = s * gx / norm;
      wy[id] = s * gy / norm;
      active[id] = 1;
    }
  if (band_count > 0 && degenerate > band_count / 100)
    throw NumericalError("extend_speed: too many degenerate normals in the band");

  const double dtau = 0.5 * g.h;
  std::vector<double> qn(n);
  for (int it = 0; it < n_iter; ++it) {
    qn = q;
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const std::size_t id = static_cast<std::size_t>(g.index(i, j));
        if (!active[id]) continue;
        const double a = wx[id], b = wy[id];
        double dqx = 0.0, dqy = 0.0;
        if (a > 0.0 && i > 0)
          dqx = (q[id] - q[id - 1]) / g.h;
        else if (a < 0.0 && i + 1 < g.nx)
          dqx = (q[static_cast<std::size_t>(g.index(i + 1, j))] - q[id]) / g.h;
        if (b > 0.0 && j > 0)
          dqy = (q[id] - q[id - static_cast<std::size_t>(g.nx)]) / g.h;
        else if (b < 0.0 && j + 1 < g.ny)
          dqy = (q[static_cast<std::size_t>(g.index(i, j + 1))] - q[id]) / g.h;
        qn[id] = q[id] - dtau * (a * dqx + b * dqy);
      }
    q.swap(qn);
  }
  return q;
}

namespace {

// second-order one-sided/central directional derivatives for the
// extrapolation cascade
double dir_deriv(const UniformGrid2D& g, std::span<const double> f,
                 const std::vector<char>& ok, int i, int j, bool axis_x,
                 bool* valid) {
  auto get = [&](int a, int b) { return f[static_cast<std::size_t>(g.index(a, b))]; };
  auto usable = [&](int a, int b) {
    return g.in_grid(a, b) && ok[static_cast<std::size_t>(g.index(a, b))];
  };
  const int di = axis_x ? 1 : 0, dj = axis_x ? 0 : 1;
  const bool p1 = usable(i + di, j + dj), m1 = usable(i - di, j - dj);
  *valid = true;
  if (p1 && m1) return (get(i + di, j + dj) - get(i - di, j - dj)) / (2 * g.h);
  if (p1 && usable(i + 2 * di, j + 2 * dj))
    return (-3 * get(i, j) + 4 * get(i + di, j + dj) - get(i + 2 * di, j + 2 * dj)) /
           (2 * g.h);
  if (m1 && usable(i - 2 * di, j - 2 * dj))
    return (3 * get(i, j) - 4 * get(i - di, j - dj) + get(i - 2 * di, j - 2 * dj)) /
           (2 * g.h);
  if (p1) return (get(i + di, j + dj) - get(i, j)) / g.h;
  if (m1) return (get(i, j) - get(i - di, j - dj)) / g.h;
  *valid = false;
  return 0.0;
}

// Advect q to steady state along the normal field with source s:
// q_tau + (n . grad q - s) = 0 on update nodes; held nodes stay fixed.
void extend_along_normal(const UniformGrid2D& g, std::vector<double>& q,
                         std::span<const double> source, const std::vector<char>& hold,
                         const std::vector<char>& update, std::span<const double> nx,
                         std::span<const double> ny, int n_iter) {
  const std::size_t n = q.size();
  const double dtau = 0.4 * g.h;
  std::vector<double> qn(n);
  auto one_sided = [&](const std::vector<double>& f, int i, int j, int di, int dj,
                       bool backward) {
    // backward: stencil i, i-1, i-2 in the (di,dj) sense
    const int s1i = backward ? i - di : i + di, s1j = backward ? j - dj : j + dj;
    const int s2i = backward ? i - 2 * di : i + 2 * di,
              s2j = backward ? j - 2 * dj : j + 2 * dj;
    const double f0 = f[static_cast<std::size_t>(g.index(i, j))];
    if (!g.in_grid(s2i, s2j)) {
      if (!g.in_grid(s1i, s1j)) return 0.0;
      const double f1 = f[static_cast<std::size_t>(g.index(s1i, s1j))];
      return backward ? (f0 - f1) / g.h : (f1 - f0) / g.h;
    }
    const double f1 = f[static_cast<std::size_t>(g.index(s1i, s1j))];
    const double f2 = f[static_cast<std::size_t>(g.index(s2i, s2j))];
    const double d = (3 * f0 - 4 * f1 + f2) / (2 * g.h);
    return backward ? d : -d;
  };
  for (int it = 0; it < n_iter; ++it) {
    qn = q;
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const std::size_t id = static_cast<std::size_t>(g.index(i, j));
        if (!update[id] || hold[id]) continue;
        const double a = nx[id], b = ny[id];
        double dqx = 0.0, dqy = 0.0;
        if (a > 0.0)
          dqx = one_sided(q, i, j, 1, 0, true);
        else if (a < 0.0)
          dqx = one_sided(q, i, j, 1, 0, false);
        if (b > 0.0)
          dqy = one_sided(q, i, j, 0, 1, true);
        else if (b < 0.0)
          dqy = one_sided(q, i, j, 0, 1, false);
        qn[id] = q[id] - dtau * (a * dqx + b * dqy - source[id]);
      }
    q.swap(qn);
  }
}

}  // namespace

std::vector<double> extrapolate_quadratic(const UniformGrid2D& grid,
                                          std::span<const double> u,
                                          const std::vector<char>& donor_mask,
                                          const LevelSetField& ls_new,
                                          double band_in_h) {
  if (static_cast<int>(u.size()) != grid.size() ||
      static_cast<int>(donor_mask.size()) != grid.size())
    throw NumericalError("extrapolate_quadratic: field not sampled on this grid");
  const std::size_t n = u.size();
  const double band = band_in_h * grid.h;

  // normal field of the new level set
  std::vector<double> nx(n, 0.0), ny(n, 0.0);
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      const std::size_t id = static_cast<std::size_t>(grid.index(i, j));
      const double gx = nodal_grad_x(ls_new, i, j);
      const double gy = nodal_grad_y(ls_new, i, j);
      const double norm = std::sqrt(gx * gx + gy * gy);
      if (norm > 1e-12) {
        nx[id] = gx / norm;
        ny[id] = gy / norm;
      }
    }

  std::vector<char> update(n, 0);
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      const std::size_t id = static_cast<std::size_t>(grid.index(i, j));
      update[id] = std::abs(ls_new.values[id]) <= band ? 1 : 0;
    }

  // u_n = n . grad u where the stencil stays in the donor region
  std::vector<double> un(n, 0.0);
  std::vector<char> d1(n, 0);
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      const std::size_t id = static_cast<std::size_t>(grid.index(i, j));
      if (!donor_mask[id]) continue;
      bool okx = false, oky = false;
      const double dx = dir_deriv(grid, u, donor_mask, i, j, true, &okx);
      const double dy = dir_deriv(grid, u, donor_mask, i, j, false, &oky);
      if (okx && oky) {
        un[id] = nx[id] * dx + ny[id] * dy;
        d1[id] = 1;
      }
    }

  // u_nn on the subset where the u_n stencil is available
  std::vector<double> unn(n, 0.0);
  std::vector<char> d2(n, 0);
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      const std::size_t id = static_cast<std::size_t>(grid.index(i, j));
      if (!d1[id]) continue;
      bool okx = false, oky = false;
      const double dx = dir_deriv(grid, un, d1, i, j, true, &okx);
      const double dy = dir_deriv(grid, un, d1, i, j, false, &oky);
      if (okx && oky) {
        unn[id] = nx[id] * dx + ny[id] * dy;
        d2[id] = 1;
      }
    }

  const int iters = std::max(60, static_cast<int>(4.0 * band_in_h));
  const std::vector<double> zero(n, 0.0);
  extend_along_normal(grid, unn, zero, d2, update, nx, ny, iters);
  extend_along_normal(grid, un, unn, d1, update, nx, ny, iters);
  std::vector<double> out(u.begin(), u.end());
  extend_along_normal(grid, out, un, donor_mask, update, nx, ny, iters);
  return out;
}

InterfaceMetrics interface_metrics(const LevelSetField& ls) {
  if (!ls.has_sign_change()) throw NumericalError("interface_metrics: no interface");
  const UniformGrid2D& g = ls.grid;
  const double eps = 1.5 * g.h;
  const double pi = 3.14159265358979323846;
  double area = 0.0, perim = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double r = ls.at(i, j);
      const double m = -r;  // positive inside
      double hval;
      if (m < -eps)
        hval = 0.0;
      else if (m > eps)
        hval = 1.0;
      else
        hval = 0.5 * (1.0 + m / eps + std::sin(pi * m / eps) / pi);
      area += hval;
      if (std::abs(r) <= eps) {
        const double gx = nodal_grad_x(ls, i, j);
        const double gy = nodal_grad_y(ls, i, j);
        const double delta = (1.0 + std::cos(pi * r / eps)) / (2.0 * eps);
        perim += delta * std::sqrt(gx * gx + gy * gy);
      }
    }
  const double h2 = g.h * g.h;
  InterfaceMetrics m;
  m.area = area * h2;
  m.perimeter = perim * h2;
  m.isoperimetric_ratio = m.perimeter > 0.0 ? 4.0 * pi * m.area / (m.perimeter * m.perimeter) : 0.0;
  return m;
}

}  // namespace ebrd
