#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "ebrd/common.hpp"

namespace ebrd {

// Uniform Cartesian grid over [x_lo, x_lo+(nx-1)h] x [y_lo, y_lo+(ny-1)h].
// Node (i,j) sits at (x_lo + i*h, y_lo + j*h); fields are stored x-fastest.
struct UniformGrid2D {
  double x_lo = 0.0;
  double y_lo = 0.0;
  double h = 1.0;
  int nx = 0;
  int ny = 0;

  UniformGrid2D() = default;
  UniformGrid2D(double x_lo_, double y_lo_, double h_, int nx_, int ny_);

  int size() const { return nx * ny; }
  int index(int i, int j) const { return j * nx + i; }
  double x(int i) const { return x_lo + i * h; }
  double y(int j) const { return y_lo + j * h; }
  bool in_grid(int i, int j) const { return i >= 0 && i < nx && j >= 0 && j < ny; }
  bool on_rim(int i, int j) const { return i == 0 || j == 0 || i == nx - 1 || j == ny - 1; }
};

enum class Axis : std::uint8_t { X, Y };

// Grid-sampled level set; rho < 0 inside, rho > 0 outside. A node with
// rho exactly 0 counts as inside (closed-domain convention).
struct LevelSetField {
  UniformGrid2D grid;
  std::vector<double> values;

  LevelSetField() = default;
  LevelSetField(const UniformGrid2D& g, std::function<double(double, double)> rho);

  double at(int i, int j) const { return values[static_cast<std::size_t>(grid.index(i, j))]; }
  double& at(int i, int j) { return values[static_cast<std::size_t>(grid.index(i, j))]; }
  bool inside(int i, int j) const { return at(i, j) <= 0.0; }

  // Bilinear interpolation of the nodal values; clamps to the grid box.
  double interpolate(double x, double y) const;
  // Central-difference nodal gradient, bilinearly interpolated off-node.
  std::array<double, 2> gradient(double x, double y) const;
  // Cubic interpolation along grid line `other` (row index for Axis::X,
  // column index for Axis::Y) evaluated at axis coordinate s.
  double line_interpolant(Axis axis, int other, double s) const;

  bool has_sign_change() const;
};

// Central-difference nodal derivatives of rho, one-sided on the rim.
double nodal_grad_x(const LevelSetField& f, int i, int j);
double nodal_grad_y(const LevelSetField& f, int i, int j);

enum class PointClass : std::uint8_t { Outside, InteriorGhost, Computational };

// Per-node classification. Computational nodes carry the PDE stencil;
// interior ghost values get eliminated through boundary interpolation.
// Nodes on the outermost ring are never Computational.
std::vector<PointClass> classify_points(const UniformGrid2D& grid, const LevelSetField& ls);

struct BoundaryCrossing {
  Axis axis = Axis::X;
  int inside_i = 0, inside_j = 0;
  int outside_i = 0, outside_j = 0;
  double gamma_coord = 0.0;  // crossing coordinate along the axis
  double bx = 0.0, by = 0.0; // crossing location on the boundary
};

// Root of the cubic line interpolant of rho on the segment between an
// inside node (rho < 0) and its axis neighbor (rho >= 0). A neighbor with
// rho exactly 0 returns the neighbor location itself.
BoundaryCrossing find_crossing(const LevelSetField& ls, int inside_i, int inside_j,
                               int outside_i, int outside_j);

// Projects p onto the zero level set along the interpolated normal.
// Throws NumericalError on a degenerate gradient or stalled iteration.
std::array<double, 2> closest_boundary_point(const LevelSetField& ls, double px, double py);

// Every axis segment of the grid whose endpoints straddle the interface,
// each reported once with its boundary crossing. A segment whose inside
// endpoint sits exactly on the boundary reports that node as the crossing.
std::vector<BoundaryCrossing> enumerate_crossings(const LevelSetField& ls);

}  // namespace ebrd
