#pragma once

#include <span>
#include <vector>

#include "ebrd/geometry.hpp"

namespace ebrd {

// Grid-sampled advection velocity, extended off the interface.
struct VelocityExtensionField {
  UniformGrid2D grid;
  std::vector<double> vx;
  std::vector<double> vy;
  double max_component() const;
};

struct NarrowBand {
  double width = 0.0;       // physical units
  std::vector<char> mask;   // per-node membership
  std::vector<int> nodes;
};

NarrowBand build_narrow_band(const LevelSetField& ls, double width_in_h = 8.0);

// One explicit advection step of rho_t + v . grad(rho) = 0 with fifth-order
// HJ-WENO upwind derivatives and third-order TVD Runge-Kutta.
// Requires dt_ls <= 0.5 h / max|v| (caller subcycles).
LevelSetField hj_weno_advect(const LevelSetField& ls, const VelocityExtensionField& vel,
                             double dt_ls);

// Iterates rho_tau + S(rho0)(|grad rho| - 1) = 0 with the smoothed sign,
// Godunov Hamiltonian and pseudo-step 0.5h. Requires a sign change.
LevelSetField reinitialize(const LevelSetField& ls, int n_iter = 10);

struct CrossingSample {
  double x, y;
  double value;
};

// Extends interface samples to the band by relaxing q_tau + S(rho)(n . grad q) = 0;
// nodes adjacent to the interface are seeded from the samples and held.
std::vector<double> extend_speed(const std::vector<CrossingSample>& samples,
                                 const LevelSetField& ls, int n_iter = 20,
                                 double band_in_h = 8.0);

// Aslam-style quadratic extrapolation of u across the zero level set of
// ls_new: u_nn is extended constant along the normal, then u_n with slope
// u_nn, then u with slope u_n. Exact for globally quadratic fields when the
// normal field is straight.
std::vector<double> extrapolate_quadratic(const UniformGrid2D& grid,
                                          std::span<const double> u,
                                          const std::vector<char>& donor_mask,
                                          const LevelSetField& ls_new,
                                          double band_in_h = 8.0);

struct InterfaceMetrics {
  double area = 0.0;
  double perimeter = 0.0;
  double isoperimetric_ratio = 0.0;  // 4 pi area / perimeter^2
};

// Smoothed Heaviside / delta quadrature with smoothing width 1.5h.
InterfaceMetrics interface_metrics(const LevelSetField& ls);

namespace detail {
// Fifth-order WENO reconstruction from five consecutive one-sided slopes.
double weno5(double v1, double v2, double v3, double v4, double v5);
}  // namespace detail

}  // namespace ebrd
