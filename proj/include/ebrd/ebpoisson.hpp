#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <unordered_map>
#include <vector>

#include "ebrd/geometry.hpp"
#include "ebrd/sparse.hpp"

namespace ebrd {

// Dirichlet data on the moving/static boundary, optionally time-dependent.
struct DirichletData {
  std::function<double(double x, double y, double t)> value;
  double operator()(double x, double y, double t) const { return value(x, y, t); }
};

using BetaFn = std::function<double(double, double)>;

// load(dof) += weight * u_D(x, y, t)
struct BoundaryTerm {
  int dof;
  double weight;
  double x, y;
};

// Descriptor of a computational node's face whose neighbor was eliminated.
struct FaceRecord {
  enum class Kind : std::uint8_t { Interior, Line, Rbf };
  Kind kind = Kind::Interior;
  // Line: boundary crossing along the axis
  double gamma = 0.0;
  double bx = 0.0, by = 0.0;
  // Rbf: ghost reconstruction u_GP = w_node u_node + w1 u_D(p1) + w2 u_D(p2)
  double w_node = 0.0, w1 = 0.0, w2 = 0.0;
  double p1x = 0.0, p1y = 0.0, p2x = 0.0, p2y = 0.0;
};

// Directions are ordered +x, -x, +y, -y.
inline constexpr int kDirDi[4] = {1, -1, 0, 0};
inline constexpr int kDirDj[4] = {0, 0, 1, -1};

struct EmbeddedOperator {
  UniformGrid2D grid;
  std::vector<PointClass> classes;
  std::vector<int> dof_of_node;  // -1 for non-computational nodes
  std::vector<int> node_of_dof;
  SymSparseMatrix matrix;        // discrete div(beta grad), symmetric
  std::vector<double> beta_face_x;  // beta((x_i+x_{i+1})/2, y_j), indexed by node (i,j)
  std::vector<double> beta_face_y;  // beta(x_i, (y_j+y_{j+1})/2)
  std::vector<BoundaryTerm> boundary_terms;
  std::vector<double> boundary_load;  // evaluated through bc at t = 0
  // faces whose neighbor is not a dof, keyed by 4*dof + direction
  std::unordered_map<int, FaceRecord> special_faces;

  int num_dofs() const { return static_cast<int>(node_of_dof.size()); }
  // matrix * U + boundary_load(t) approximates div(beta grad u)
  std::vector<double> refresh_load(const DirichletData& bc, double t) const;
};

// Second-order symmetric embedded-boundary discretization of div(beta grad u)
// with Dirichlet data on the zero level set.
EmbeddedOperator assemble(const UniformGrid2D& grid, const LevelSetField& ls,
                          const BetaFn& beta, const DirichletData& bc);

// Case-1 five-point row: {center, east, west, north, south} weights (1/h^2 included).
std::array<double, 5> stencil_interior(const UniformGrid2D& grid, const BetaFn& beta,
                                       int i, int j);

// Case-2 two-point Lagrange elimination: u_GP = g_gamma u_Gamma + g_1 u_node,
// for the ghost at s_ghost with the crossing at gamma past it.
struct LineCoeffs {
  double g_gamma;
  double g_1;
};
LineCoeffs line_lagrange_coeffs(double s_node, double s_ghost, double gamma);

// Case-3 RBF elimination: u_GP = w_node u_node + w1 u_D(q1) + w2 u_D(q2).
// Multiquadric kernel with shape parameter c and a linear polynomial tail.
struct RbfWeights {
  double w_node, w1, w2;
  double cond;  // 1-norm condition estimate of the interpolation system
};
RbfWeights rbf_ghost_weights(std::array<double, 2> ghost, std::array<double, 2> node,
                             std::array<double, 2> q1, std::array<double, 2> q2, double c);

// Per-dof gradient: central differences in the interior, one-sided against
// the boundary data next to the interface.
std::vector<std::array<double, 2>> evaluate_gradient(std::span<const double> u,
                                                     const EmbeddedOperator& op,
                                                     const LevelSetField& ls,
                                                     const DirichletData& bc, double t);

}  // namespace ebrd
