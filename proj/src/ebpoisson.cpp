#include "ebrd/ebpoisson.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

namespace ebrd {

namespace {

// the midpoint is formed symmetrically from the two node coordinates so both
// sides of a face evaluate beta at the bit-identical point
double face_beta(const BetaFn& beta, const UniformGrid2D& g, int i, int j, int dir) {
  switch (dir) {
    case 0: return beta(0.5 * (g.x(i) + g.x(i + 1)), g.y(j));
    case 1: return beta(0.5 * (g.x(i - 1) + g.x(i)), g.y(j));
    case 2: return beta(g.x(i), 0.5 * (g.y(j) + g.y(j + 1)));
    default: return beta(g.x(i), 0.5 * (g.y(j - 1) + g.y(j)));
  }
}

std::string node_name(const UniformGrid2D& g, int i, int j) {
  return "(" + std::to_string(i) + "," + std::to_string(j) + ") at (" +
         std::to_string(g.x(i)) + "," + std::to_string(g.y(j)) + ")";
}

double multiquadric(double r2, double c2) { return std::sqrt(r2 + c2); }

double dist2(std::array<double, 2> a, std::array<double, 2> b) {
  const double dx = a[0] - b[0], dy = a[1] - b[1];
  return dx * dx + dy * dy;
}

}  // namespace

std::array<double, 5> stencil_interior(const UniformGrid2D& grid, const BetaFn& beta,
                                       int i, int j) {
  const double h2 = grid.h * grid.h;
  const double be = face_beta(beta, grid, i, j, 0);
  const double bw = face_beta(beta, grid, i, j, 1);
  const double bn = face_beta(beta, grid, i, j, 2);
  const double bs = face_beta(beta, grid, i, j, 3);
  return {-(be + bw + bn + bs) / h2, be / h2, bw / h2, bn / h2, bs / h2};
}

LineCoeffs line_lagrange_coeffs(double s_node, double s_ghost, double gamma) {
  const double denom = gamma - s_node;
  const double h = s_ghost - s_node;
  if (std::abs(denom) < 1e-12 * std::abs(h))
    throw NumericalError("line_lagrange_coeffs: degenerate denominator");
  // the crossing must lie at or past the ghost node
  if (std::abs(denom) < std::abs(h) * (1.0 - 1e-12))
    throw NumericalError("line_lagrange_coeffs: crossing between node and ghost");
  return {h / denom, (gamma - s_ghost) / denom};
}

RbfWeights rbf_ghost_weights(std::array<double, 2> ghost, std::array<double, 2> node,
                             std::array<double, 2> q1, std::array<double, 2> q2, double c) {
  const double c2 = c * c;
  const double dup2 = 1e-6 * c * c;  // centers closer than 1e-3*c collapse

  std::array<std::array<double, 2>, 3> centers = {node, q1, q2};
  bool drop_q2 = dist2(q1, q2) < dup2 || dist2(node, q2) < dup2;
  bool drop_q1 = dist2(node, q1) < dup2;

  if (drop_q1 && drop_q2) {
    // ghost, node and both boundary feet essentially coincide
    return {0.0, 1.0, 0.0, 1.0};
  }
  if (drop_q1 && !drop_q2) {  // keep q2 as the single boundary center
    std::swap(centers[1], centers[2]);
    drop_q2 = true;
    drop_q1 = false;
    // weights for q2 land in w1 slot; caller remaps via returned order below
    const double bx = centers[1][0] - node[0], by = centers[1][1] - node[1];
    const double bb = bx * bx + by * by;
    const double t = ((ghost[0] - node[0]) * bx + (ghost[1] - node[1]) * by) / bb;
    return {1.0 - t, 0.0, t, 1.0};
  }
  if (drop_q2) {
    // two-center path: linear interpolation along the node -> q1 direction,
    // evaluated at the projection of the ghost
    const double bx = centers[1][0] - node[0], by = centers[1][1] - node[1];
    const double bb = bx * bx + by * by;
    if (bb < dup2) return {0.0, 1.0, 0.0, 1.0};
    const double t = ((ghost[0] - node[0]) * bx + (ghost[1] - node[1]) * by) / bb;
    return {1.0 - t, t, 0.0, 1.0};
  }

  // full 3-center multiquadric system with linear tail
  DenseMatrix b(6, 6);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) b(i, j) = multiquadric(dist2(centers[i], centers[j]), c2);
    b(i, 3) = b(3, i) = 1.0;
    b(i, 4) = b(4, i) = centers[static_cast<std::size_t>(i)][0];
    b(i, 5) = b(5, i) = centers[static_cast<std::size_t>(i)][1];
  }
  DenseMatrix rhs(6, 1);
  for (int i = 0; i < 3; ++i) rhs(i, 0) = multiquadric(dist2(ghost, centers[i]), c2);
  rhs(3, 0) = 1.0;
  rhs(4, 0) = ghost[0];
  rhs(5, 0) = ghost[1];

  const double cond = cond_1(b);
  if (!(cond < 1e12))
    throw NumericalError("rbf_ghost_weights: interpolation system ill-conditioned (cond " +
                         std::to_string(cond) + ")");
  DenseMatrix w = lu_solve(std::move(b), std::move(rhs));
  return {w(0, 0), w(1, 0), w(2, 0), cond};
}

std::vector<double> EmbeddedOperator::refresh_load(const DirichletData& bc, double t) const {
  std::vector<double> load(static_cast<std::size_t>(num_dofs()), 0.0);
  for (const BoundaryTerm& term : boundary_terms)
    load[static_cast<std::size_t>(term.dof)] += term.weight * bc(term.x, term.y, t);
  return load;
}

namespace {

// Fallback boundary feet for the RBF elimination: the nearest interface
// crossing, found through the bracketed root finder, which cannot stall the
// way the normal projection can on rough fields.
class CrossingLocator {
 public:
  explicit CrossingLocator(const LevelSetField& ls) : grid_(ls.grid) {
    crossings_ = enumerate_crossings(ls);
    cells_.resize(static_cast<std::size_t>(grid_.size()));
    for (int k = 0; k < static_cast<int>(crossings_.size()); ++k) {
      const auto& c = crossings_[static_cast<std::size_t>(k)];
      const int i = std::clamp(
          static_cast<int>(std::floor((c.bx - grid_.x_lo) / grid_.h)), 0, grid_.nx - 1);
      const int j = std::clamp(
          static_cast<int>(std::floor((c.by - grid_.y_lo) / grid_.h)), 0, grid_.ny - 1);
      cells_[static_cast<std::size_t>(grid_.index(i, j))].push_back(k);
    }
  }

  std::array<double, 2> nearest(double px, double py) const {
    const int ic = std::clamp(
        static_cast<int>(std::floor((px - grid_.x_lo) / grid_.h)), 0, grid_.nx - 1);
    const int jc = std::clamp(
        static_cast<int>(std::floor((py - grid_.y_lo) / grid_.h)), 0, grid_.ny - 1);
    int best = -1;
    double best_d = 1e300;
    for (int ring = 1; ring <= 4; ++ring) {
      for (int j = std::max(0, jc - ring); j <= std::min(grid_.ny - 1, jc + ring); ++j)
        for (int i = std::max(0, ic - ring); i <= std::min(grid_.nx - 1, ic + ring); ++i)
          for (int k : cells_[static_cast<std::size_t>(grid_.index(i, j))]) {
            const auto& c = crossings_[static_cast<std::size_t>(k)];
            const double d = (c.bx - px) * (c.bx - px) + (c.by - py) * (c.by - py);
            if (d < best_d) {
              best_d = d;
              best = k;
            }
          }
      if (best >= 0) break;
    }
    if (best < 0)
      throw NumericalError("assemble: no interface crossing near the ghost");
    const auto& c = crossings_[static_cast<std::size_t>(best)];
    return {c.bx, c.by};
  }

 private:
  const UniformGrid2D& grid_;
  std::vector<BoundaryCrossing> crossings_;
  std::vector<std::vector<int>> cells_;
};

}  // namespace

EmbeddedOperator assemble(const UniformGrid2D& grid, const LevelSetField& ls,
                          const BetaFn& beta, const DirichletData& bc) {
  EmbeddedOperator op;
  op.grid = grid;
  op.classes = classify_points(grid, ls);
  op.dof_of_node.assign(static_cast<std::size_t>(grid.size()), -1);
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      const int node = grid.index(i, j);
      if (op.classes[static_cast<std::size_t>(node)] == PointClass::Computational) {
        op.dof_of_node[static_cast<std::size_t>(node)] =
            static_cast<int>(op.node_of_dof.size());
        op.node_of_dof.push_back(node);
      }
    }
  if (op.node_of_dof.empty())
    throw NumericalError("assemble: empty domain, no computational points");

  op.beta_face_x.assign(static_cast<std::size_t>(grid.size()), 0.0);
  op.beta_face_y.assign(static_cast<std::size_t>(grid.size()), 0.0);
  const double h2 = grid.h * grid.h;
  std::vector<Triplet> triplets;
  triplets.reserve(op.node_of_dof.size() * 5);
  std::optional<CrossingLocator> locator;  // built on first projection failure

  for (int dof = 0; dof < op.num_dofs(); ++dof) {
    const int node = op.node_of_dof[static_cast<std::size_t>(dof)];
    const int i = node % grid.nx;
    const int j = node / grid.nx;
    double diag = 0.0;
    for (int dir = 0; dir < 4; ++dir) {
      const int a = i + kDirDi[dir], b = j + kDirDj[dir];
      const double bf = face_beta(beta, grid, i, j, dir);
      if (!(bf > 0.0))
        throw NumericalError("assemble: beta not positive at a face of node " +
                             node_name(grid, i, j));
      // canonical face storage (face belongs to its lower-index node)
      if (dir == 0) op.beta_face_x[static_cast<std::size_t>(node)] = bf;
      if (dir == 1) op.beta_face_x[static_cast<std::size_t>(grid.index(a, b))] = bf;
      if (dir == 2) op.beta_face_y[static_cast<std::size_t>(node)] = bf;
      if (dir == 3) op.beta_face_y[static_cast<std::size_t>(grid.index(a, b))] = bf;

      const PointClass nb = op.classes[static_cast<std::size_t>(grid.index(a, b))];
      if (nb == PointClass::Computational) {
        diag -= bf / h2;
        triplets.push_back({dof, op.dof_of_node[static_cast<std::size_t>(grid.index(a, b))],
                            bf / h2});
        continue;
      }
      if (nb == PointClass::Outside)
        throw NumericalError("assemble: interface touches the computational box rim near " +
                             node_name(grid, i, j));

      // interior ghost neighbor: eliminate its value
      const int bi = a + kDirDi[dir];
      const int bj = b + kDirDj[dir];
      if (!grid.in_grid(bi, bj))
        throw NumericalError("assemble: ghost on the box rim near " + node_name(grid, a, b));
      FaceRecord rec;
      if (!ls.inside(bi, bj)) {
        // Case 2: the ghost borders the interface along this direction
        const bool axis_x = kDirDj[dir] == 0;
        const double s_node = axis_x ? grid.x(i) : grid.y(j);
        const double s_ghost = axis_x ? grid.x(a) : grid.y(b);
        double gamma, bx, by;
        if (ls.at(a, b) == 0.0) {
          gamma = s_ghost;  // boundary exactly on the ghost node
          bx = grid.x(a);
          by = grid.y(b);
        } else {
          const BoundaryCrossing cr = find_crossing(ls, a, b, bi, bj);
          gamma = cr.gamma_coord;
          bx = cr.bx;
          by = cr.by;
        }
        const LineCoeffs lc = line_lagrange_coeffs(s_node, s_ghost, gamma);
        diag -= bf * (1.0 - lc.g_1) / h2;
        op.boundary_terms.push_back({dof, bf * lc.g_gamma / h2, bx, by});
        rec.kind = FaceRecord::Kind::Line;
        rec.gamma = gamma;
        rec.bx = bx;
        rec.by = by;
      } else {
        // Case 3: ghost away from the interface along this direction
        const std::array<double, 2> ghost_pt = {grid.x(a), grid.y(b)};
        const std::array<double, 2> node_pt = {grid.x(i), grid.y(j)};
        auto project = [&](const std::array<double, 2>& p) {
          try {
            return closest_boundary_point(ls, p[0], p[1]);
          } catch (const NumericalError&) {
            if (!locator) locator.emplace(ls);
            return locator->nearest(p[0], p[1]);
          }
        };
        const std::array<double, 2> q1 = project(ghost_pt);
        const std::array<double, 2> q2 = project(node_pt);
        RbfWeights w;
        try {
          w = rbf_ghost_weights(ghost_pt, node_pt, q1, q2, grid.h);
        } catch (const NumericalError& e) {
          throw NumericalError("assemble: RBF system failed at node " +
                               node_name(grid, i, j) + ": " + e.what());
        }
        diag -= bf * (1.0 - w.w_node) / h2;
        if (w.w1 != 0.0) op.boundary_terms.push_back({dof, bf * w.w1 / h2, q1[0], q1[1]});
        if (w.w2 != 0.0) op.boundary_terms.push_back({dof, bf * w.w2 / h2, q2[0], q2[1]});
        rec.kind = FaceRecord::Kind::Rbf;
        rec.w_node = w.w_node;
        rec.w1 = w.w1;
        rec.w2 = w.w2;
        rec.p1x = q1[0];
        rec.p1y = q1[1];
        rec.p2x = q2[0];
        rec.p2y = q2[1];
      }
      op.special_faces.emplace(4 * dof + dir, rec);
    }
    triplets.push_back({dof, dof, diag});
  }
  op.matrix = SymSparseMatrix::from_triplets(op.num_dofs(), std::move(triplets));
  op.boundary_load = op.refresh_load(bc, 0.0);
  return op;
}

namespace {

struct SideValue {
  double value;
  double pos;  // axis coordinate the value lives at
};

SideValue side_value(const EmbeddedOperator& op, std::span<const double> u,
                     const DirichletData& bc, double t, int dof, int i, int j, int dir) {
  const UniformGrid2D& g = op.grid;
  const bool axis_x = kDirDj[dir] == 0;
  const int a = i + kDirDi[dir], b = j + kDirDj[dir];
  const auto it = op.special_faces.find(4 * dof + dir);
  if (it == op.special_faces.end()) {
    const int nb_dof = op.dof_of_node[static_cast<std::size_t>(g.index(a, b))];
    return {u[static_cast<std::size_t>(nb_dof)], axis_x ? g.x(a) : g.y(b)};
  }
  const FaceRecord& rec = it->second;
  if (rec.kind == FaceRecord::Kind::Line)
    return {bc(rec.bx, rec.by, t), rec.gamma};
  const double ghost_val = rec.w_node * u[static_cast<std::size_t>(dof)] +
                           rec.w1 * bc(rec.p1x, rec.p1y, t) +
                           rec.w2 * bc(rec.p2x, rec.p2y, t);
  return {ghost_val, axis_x ? g.x(a) : g.y(b)};
}

}  // namespace

std::vector<std::array<double, 2>> evaluate_gradient(std::span<const double> u,
                                                     const EmbeddedOperator& op,
                                                     const LevelSetField& ls,
                                                     const DirichletData& bc, double t) {
  (void)ls;
  const UniformGrid2D& g = op.grid;
  std::vector<std::array<double, 2>> grad(static_cast<std::size_t>(op.num_dofs()));
  for (int dof = 0; dof < op.num_dofs(); ++dof) {
    const int node = op.node_of_dof[static_cast<std::size_t>(dof)];
    const int i = node % g.nx;
    const int j = node / g.nx;
    for (int axis = 0; axis < 2; ++axis) {
      const int dp = axis == 0 ? 0 : 2;  // +x or +y
      const int dm = dp + 1;
      const bool plus_line =
          op.special_faces.count(4 * dof + dp) &&
          op.special_faces.at(4 * dof + dp).kind == FaceRecord::Kind::Line;
      const bool minus_line =
          op.special_faces.count(4 * dof + dm) &&
          op.special_faces.at(4 * dof + dm).kind == FaceRecord::Kind::Line;
      const double s0 = axis == 0 ? g.x(i) : g.y(j);
      double d;
      if (plus_line && !minus_line) {
        // one-sided difference against the interface value
        const FaceRecord& rec = op.special_faces.at(4 * dof + dp);
        d = (bc(rec.bx, rec.by, t) - u[static_cast<std::size_t>(dof)]) / (rec.gamma - s0);
      } else if (minus_line && !plus_line) {
        const FaceRecord& rec = op.special_faces.at(4 * dof + dm);
        d = (u[static_cast<std::size_t>(dof)] - bc(rec.bx, rec.by, t)) / (s0 - rec.gamma);
      } else {
        const SideValue vp = side_value(op, u, bc, t, dof, i, j, dp);
        const SideValue vm = side_value(op, u, bc, t, dof, i, j, dm);
        d = (vp.value - vm.value) / (vp.pos - vm.pos);
      }
      grad[static_cast<std::size_t>(dof)][static_cast<std::size_t>(axis)] = d;
    }
  }
  return grad;
}

}  // namespace ebrd
