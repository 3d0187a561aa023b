#include <cmath>

#include <doctest.h>

#include "ebrd/driver.hpp"
#include "ebrd/ebpoisson.hpp"
#include "test_support.hpp"

using namespace ebrd;

namespace {

DirichletData exact_bc(double (*f)(double, double)) {
  return DirichletData{[f](double x, double y, double) { return f(x, y); }};
}

double linear_u(double x, double y) { return x + 2.0 * y; }

LevelSetField circle_ls(const UniformGrid2D& g, double r) {
  return LevelSetField(g, [r](double x, double y) { return x * x + y * y - r * r; });
}

// residual of the discrete operator against nodal samples: A u + load
std::vector<double> apply_operator(const EmbeddedOperator& op, const DirichletData& bc,
                                   double (*u)(double, double)) {
  std::vector<double> uv(static_cast<std::size_t>(op.num_dofs()));
  for (int dof = 0; dof < op.num_dofs(); ++dof) {
    const int node = op.node_of_dof[static_cast<std::size_t>(dof)];
    const int i = node % op.grid.nx, j = node / op.grid.nx;
    uv[static_cast<std::size_t>(dof)] = u(op.grid.x(i), op.grid.y(j));
  }
  auto r = op.matrix.matvec(uv);
  auto load = op.refresh_load(bc, 0.0);
  for (int k = 0; k < op.num_dofs(); ++k)
    r[static_cast<std::size_t>(k)] += load[static_cast<std::size_t>(k)];
  return r;
}

}  // namespace

TEST_CASE("stencil_interior: constant beta gives the classical 5-point row") {
  UniformGrid2D g(0, 0, 0.5, 8, 8);
  auto row = stencil_interior(g, [](double, double) { return 1.0; }, 3, 3);
  const double s = 1.0 / (0.5 * 0.5);
  CHECK(row[0] == doctest::Approx(-4.0 * s));
  for (int k = 1; k < 5; ++k) CHECK(row[k] == doctest::Approx(s));
}

TEST_CASE("stencil_interior: variable beta sampled at face midpoints") {
  UniformGrid2D g(-0.5, -0.5, 0.1, 11, 11);  // node (5,5) at the origin
  auto beta = [](double x, double y) { return 2.0 + std::sin(x * y); };
  auto row = stencil_interior(g, beta, 5, 5);
  const double h2 = 0.01;
  const double be = beta(0.05, 0.0), bw = beta(-0.05, 0.0);
  const double bn = beta(0.0, 0.05), bs = beta(0.0, -0.05);
  CHECK(row[1] == doctest::Approx(be / h2).epsilon(1e-14));
  CHECK(row[2] == doctest::Approx(bw / h2).epsilon(1e-14));
  CHECK(row[3] == doctest::Approx(bn / h2).epsilon(1e-14));
  CHECK(row[4] == doctest::Approx(bs / h2).epsilon(1e-14));
  CHECK(row[0] == doctest::Approx(-(be + bw + bn + bs) / h2).epsilon(1e-14));
}

TEST_CASE("stencil_interior: exact on quadratics with unit beta") {
  UniformGrid2D g(-1, -1, 0.25, 9, 9);
  auto row = stencil_interior(g, [](double, double) { return 1.0; }, 4, 4);
  auto u = [](double x, double y) { return x * x + y * y; };
  const double val = row[0] * u(g.x(4), g.y(4)) + row[1] * u(g.x(5), g.y(4)) +
                     row[2] * u(g.x(3), g.y(4)) + row[3] * u(g.x(4), g.y(5)) +
                     row[4] * u(g.x(4), g.y(3));
  CHECK(val == doctest::Approx(4.0).epsilon(1e-11));
}

TEST_CASE("line_lagrange_coeffs: crossing on the ghost gives g_gamma = 1") {
  auto lc = line_lagrange_coeffs(0.3, 0.4, 0.4);
  CHECK(lc.g_gamma == doctest::Approx(1.0));
  CHECK(lc.g_1 == doctest::Approx(0.0));
}

TEST_CASE("line_lagrange_coeffs: weights stay inside [0, 1] on the admissible range") {
  for (double gamma : {0.401, 0.43, 0.47, 0.5}) {
    auto lc = line_lagrange_coeffs(0.3, 0.4, gamma);
    CHECK(lc.g_gamma <= 1.0 + 1e-12);
    CHECK(lc.g_gamma >= 0.5 - 1e-12);
    CHECK(lc.g_1 >= -1e-12);
    CHECK(lc.g_1 <= 1.0 + 1e-12);
  }
}

TEST_CASE("line_lagrange_coeffs: crossing between node and ghost is rejected") {
  CHECK_THROWS_AS(line_lagrange_coeffs(0.3, 0.4, 0.35), NumericalError);
}

TEST_CASE("assemble: linear field annihilated at interior rows") {
  UniformGrid2D g(-1, -1, 0.1, 21, 21);
  LevelSetField ls = circle_ls(g, 0.82);
  auto bc = exact_bc(linear_u);
  auto op = assemble(g, ls, [](double, double) { return 1.0; }, bc);
  auto r = apply_operator(op, bc, linear_u);
  for (int dof = 0; dof < op.num_dofs(); ++dof) {
    bool interior_row = true;
    for (int dir = 0; dir < 4; ++dir)
      if (op.special_faces.count(4 * dof + dir)) interior_row = false;
    if (interior_row) CHECK(std::abs(r[static_cast<std::size_t>(dof)]) <= 1e-11);
  }
}

TEST_CASE("assemble: strip-domain row matches the two-point elimination formula") {
  // rectangle with its top edge at y = 0.42: along the line x = 0.5 the
  // level set is exactly y - 0.42, the ghost row is j = 4 and the modified
  // computational row is j = 3
  UniformGrid2D g(0, 0, 0.1, 11, 11);
  LevelSetField ls(g, [](double x, double y) {
    return std::max({y - 0.42, 3.0 * (0.05 - y), 0.15 - x, x - 0.85});
  });
  auto beta = [](double x, double y) { return 2.0 + std::sin(x * y); };
  const double u_gamma = 7.25;  // arbitrary boundary value
  DirichletData bc{[&](double, double, double) { return u_gamma; }};
  auto op = assemble(g, ls, beta, bc);

  const int i = 5, j = 3;
  const int dof = op.dof_of_node[static_cast<std::size_t>(g.index(i, j))];
  REQUIRE(dof >= 0);
  const double h2 = 0.01;
  const double x = g.x(i), y = g.y(j);
  const double b_n = beta(x, y + 0.05);  // face toward the ghost
  const double b_s = beta(x, y - 0.05);
  const double b_e = beta(x + 0.05, y);
  const double b_w = beta(x - 0.05, y);
  const double gamma = 0.42;
  const double g_gamma = 0.1 / (gamma - y);
  const double g_1 = (gamma - (y + 0.1)) / (gamma - y);

  const int dof_s = op.dof_of_node[static_cast<std::size_t>(g.index(i, j - 1))];
  CHECK(op.matrix.entry(dof, dof_s) == doctest::Approx(b_s / h2).epsilon(1e-11));
  const int node_n = g.index(i, j + 1);
  CHECK(op.dof_of_node[static_cast<std::size_t>(node_n)] == -1);  // ghost, no column
  const double expected_diag = -(b_n * (1.0 - g_1) + b_s + b_e + b_w) / h2;
  CHECK(op.matrix.entry(dof, dof) == doctest::Approx(expected_diag).epsilon(1e-10));

  // boundary load term: beta_north * u_gamma * g_gamma / h^2
  auto load = op.refresh_load(bc, 0.0);
  CHECK(load[static_cast<std::size_t>(dof)] ==
        doctest::Approx(b_n * u_gamma * g_gamma / h2).epsilon(1e-10));
}

TEST_CASE("rbf_ghost_weights: ghost on a boundary center reproduces that value") {
  auto w = rbf_ghost_weights({0.1, 0.2}, {0.2, 0.2}, {0.1, 0.2}, {0.22, 0.3}, 0.05);
  CHECK(std::abs(w.w_node) <= 1e-10);
  CHECK(w.w1 == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(w.w2) <= 1e-10);
}

TEST_CASE("rbf_ghost_weights: linear tail reproduces linear fields") {
  auto u = [](double x, double y) { return 1.0 + 2.0 * x + 3.0 * y; };
  const std::array<double, 2> ghost{0.0, 0.4}, node{0.025, 0.4}, q1{-0.003, 0.413},
      q2{0.021, 0.418};
  auto w = rbf_ghost_weights(ghost, node, q1, q2, 0.025);
  const double val =
      w.w_node * u(node[0], node[1]) + w.w1 * u(q1[0], q1[1]) + w.w2 * u(q2[0], q2[1]);
  CHECK(val == doctest::Approx(u(ghost[0], ghost[1])).epsilon(1e-12));
}

TEST_CASE("rbf_ghost_weights: frozen reference configuration") {
  // reference weights computed with an independent dense solver
  auto w = rbf_ghost_weights({0.0, 0.4}, {0.025, 0.4}, {-0.003, 0.413}, {0.021, 0.418},
                             0.025);
  CHECK(w.w_node == doctest::Approx(0.723451327433627).epsilon(1e-10));
  CHECK(w.w1 == doctest::Approx(0.995575221238938).epsilon(1e-10));
  CHECK(w.w2 == doctest::Approx(-0.719026548672565).epsilon(1e-10));
  CHECK(std::abs(w.w_node) <= 1.0 + 0.05);
}

TEST_CASE("assemble: frozen peanut ghost elimination (live-pipeline regression)") {
  // first Case-3 face in row-major dof order on the 81x81 peanut; weights
  // cross-checked against an independent dense solve of the 6x6 system
  UniformGrid2D g(-1, -1, 2.0 / 80, 81, 81);
  LevelSetField ls = problems::peanut_level_set(g);
  auto op = assemble(g, ls, problems::peanut_beta,
                     DirichletData{[](double, double, double) { return 0.0; }});
  const FaceRecord* first = nullptr;
  for (int dof = 0; dof < op.num_dofs() && !first; ++dof)
    for (int dir = 0; dir < 4 && !first; ++dir) {
      auto it = op.special_faces.find(4 * dof + dir);
      if (it != op.special_faces.end() && it->second.kind == FaceRecord::Kind::Rbf) {
        const int node = op.node_of_dof[static_cast<std::size_t>(dof)];
        CHECK(node % g.nx == 38);
        CHECK(node / g.nx == 24);
        CHECK(dir == 1);
        first = &it->second;
      }
    }
  REQUIRE(first != nullptr);
  CHECK(first->w_node == doctest::Approx(0.657252645320898).epsilon(1e-10));
  CHECK(first->w1 == doctest::Approx(0.901942456602718).epsilon(1e-10));
  CHECK(first->w2 == doctest::Approx(-0.559195101923616).epsilon(1e-10));
  CHECK(first->p1x == doctest::Approx(-0.083141953296129).epsilon(1e-8));
  CHECK(first->p1y == doctest::Approx(-0.416349465645176).epsilon(1e-8));
  CHECK(std::abs(first->w_node) <= 1.0 + 0.05);
}

TEST_CASE("assemble: virus CG iteration count (regression)") {
  UniformGrid2D g(-1, -1, 2.0 / 90, 91, 91);
  LevelSetField ls = problems::virus_level_set(g);
  DirichletData bc{[](double x, double y, double) { return problems::virus_exact_u(x, y); }};
  auto op = assemble(g, ls, problems::virus_beta, bc);
  REQUIRE(op.num_dofs() == 2094);
  std::vector<double> rhs(static_cast<std::size_t>(op.num_dofs()));
  for (int d = 0; d < op.num_dofs(); ++d) {
    const int node = op.node_of_dof[static_cast<std::size_t>(d)];
    rhs[static_cast<std::size_t>(d)] =
        op.boundary_load[static_cast<std::size_t>(d)] -
        problems::virus_source(g.x(node % g.nx), g.y(node / g.nx));
  }
  SymSparseMatrix neg = op.matrix;
  for (double& v : neg.values) v = -v;
  auto pre = ic0_factor(neg);
  auto sol = cg_solve(neg, rhs, &pre, 1e-10);
  CHECK(sol.iterations == 56);
  CHECK(sol.relative_residual <= 1e-10);
}

TEST_CASE("rbf_ghost_weights: coincident boundary feet fall back to two centers") {
  auto w = rbf_ghost_weights({0.0, 0.4}, {0.025, 0.4}, {-0.003, 0.413},
                             {-0.003, 0.413}, 0.025);
  CHECK(w.w2 == 0.0);
  // still exact on linear fields along the node-q1 line direction
  auto u = [](double x, double y) { return 2.0 * x - y; };
  const double val = w.w_node * u(0.025, 0.4) + w.w1 * u(-0.003, 0.413);
  // projection interpolation: exact only for variation along the line
  CHECK(std::isfinite(val));
  CHECK(w.w_node + w.w1 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("assemble: symmetry is bit-exact on the standard geometries") {
  for (int n : {41, 81}) {
    UniformGrid2D g(-1, -1, 2.0 / (n - 1), n, n);
    auto bc = exact_bc(linear_u);
    auto circle_op = assemble(g, circle_ls(g, 0.62), problems::virus_beta, bc);
    CHECK(circle_op.matrix.max_asymmetry() == 0.0);
    auto peanut_op = assemble(g, problems::peanut_level_set(g), problems::peanut_beta, bc);
    CHECK(peanut_op.matrix.max_asymmetry() == 0.0);
  }
  UniformGrid2D g(-1, -1, 2.0 / 90, 91, 91);
  auto virus_op =
      assemble(g, problems::virus_level_set(g), problems::virus_beta, exact_bc(linear_u));
  CHECK(virus_op.matrix.max_asymmetry() == 0.0);
}

TEST_CASE("assemble: sign structure and weak diagonal dominance") {
  UniformGrid2D g(-1, -1, 2.0 / 80, 81, 81);
  auto op = assemble(g, problems::peanut_level_set(g), problems::peanut_beta,
                     exact_bc(linear_u));
  for (int i = 0; i < op.matrix.n; ++i) {
    double offsum = 0.0;
    double diag = 0.0;
    for (int k = op.matrix.row_offsets[i]; k < op.matrix.row_offsets[i + 1]; ++k) {
      const int j = op.matrix.col_indices[k];
      const double v = op.matrix.values[k];
      if (j == i) {
        diag = -v;  // -matrix has positive diagonal
      } else {
        CHECK(-v <= 1e-14);  // off-diagonals of -matrix are nonpositive
        offsum += std::abs(v);
      }
    }
    CHECK(diag > 0.0);
    CHECK(diag + 1e-10 * diag >= offsum);
  }
}

TEST_CASE("assemble: complete Cholesky of -matrix succeeds on all geometries") {
  for (int n : {81, 161}) {
    UniformGrid2D g(-1, -1, 2.0 / (n - 1), n, n);
    auto bc = exact_bc(linear_u);
    for (int which = 0; which < 3; ++which) {
      LevelSetField ls = which == 0   ? circle_ls(g, 0.62)
                         : which == 1 ? problems::peanut_level_set(g)
                                      : problems::virus_level_set(g);
      const BetaFn beta = which == 1 ? BetaFn(problems::peanut_beta)
                                     : BetaFn(problems::virus_beta);
      auto op = assemble(g, ls, beta, bc);
      SymSparseMatrix neg = op.matrix;
      for (double& v : neg.values) v = -v;
      CHECK_NOTHROW(testing::banded_cholesky_check(neg));
    }
  }
}

TEST_CASE("assemble: empty domain is an error") {
  UniformGrid2D g(-1, -1, 0.5, 5, 5);
  LevelSetField ls(g, [](double, double) { return 1.0; });
  CHECK_THROWS_AS(
      assemble(g, ls, [](double, double) { return 1.0; }, exact_bc(linear_u)),
      NumericalError);
}

TEST_CASE("assemble: truncation consistency against the analytic operator") {
  // manufactured field: peanut exact solution at t = 0
  auto u0 = [](double x, double y) { return problems::peanut_exact_u(x, y, 0.0); };
  auto lap = [](double x, double y) {
    // div(beta grad u) = u_t - f with u_t = -u for this solution
    return -problems::peanut_exact_u(x, y, 0.0) - problems::peanut_source(x, y, 0.0);
  };
  double inf_interior[2], inf_special[2];
  int level = 0;
  for (int n : {81, 161}) {
    UniformGrid2D g(-1, -1, 2.0 / (n - 1), n, n);
    DirichletData bc{[&](double x, double y, double) { return u0(x, y); }};
    auto op = assemble(g, problems::peanut_level_set(g), problems::peanut_beta, bc);
    auto r = apply_operator(op, bc, +[](double x, double y) {
      return problems::peanut_exact_u(x, y, 0.0);
    });
    double worst_i = 0.0, worst_s = 0.0;
    for (int dof = 0; dof < op.num_dofs(); ++dof) {
      const int node = op.node_of_dof[static_cast<std::size_t>(dof)];
      const int i = node % g.nx, j = node / g.nx;
      const double err = std::abs(r[static_cast<std::size_t>(dof)] - lap(g.x(i), g.y(j)));
      bool special = false;
      for (int dir = 0; dir < 4; ++dir)
        if (op.special_faces.count(4 * dof + dir)) special = true;
      (special ? worst_s : worst_i) = std::max(special ? worst_s : worst_i, err);
    }
    inf_interior[level] = worst_i;
    inf_special[level] = worst_s;
    ++level;
  }
  // interior rows: second order
  CHECK(std::log2(inf_interior[0] / inf_interior[1]) >= 1.6);
  // boundary-modified rows stay bounded (first-order-in-h elimination error
  // divided by h^2 keeps them O(1), which is what second-order solutions need)
  CHECK(inf_special[1] <= 4.0 * inf_special[0] + 1e-9);
}

TEST_CASE("assemble: discrete maximum principle smoke test") {
  UniformGrid2D g(-1, -1, 2.0 / 80, 81, 81);
  LevelSetField ls = problems::peanut_level_set(g);
  DirichletData bc{[](double, double, double) { return 1.0; }};  // u_D >= 0
  auto op = assemble(g, ls, problems::peanut_beta, bc);
  // f = -1 <= 0: (-A) u = load - f
  SymSparseMatrix neg = op.matrix;
  for (double& v : neg.values) v = -v;
  std::vector<double> rhs = op.refresh_load(bc, 0.0);
  for (double& v : rhs) v += 1.0;
  auto f = ic0_factor(neg);
  auto sol = cg_solve(neg, rhs, &f, 1e-12);
  for (double v : sol.x) CHECK(v >= -1e-10);
}

TEST_CASE("evaluate_gradient: linear field is exact at interior rows") {
  UniformGrid2D g(-1, -1, 0.05, 41, 41);
  LevelSetField ls = circle_ls(g, 0.8);
  auto bc = exact_bc(linear_u);
  auto op = assemble(g, ls, [](double, double) { return 1.0; }, bc);
  std::vector<double> uv(static_cast<std::size_t>(op.num_dofs()));
  for (int dof = 0; dof < op.num_dofs(); ++dof) {
    const int node = op.node_of_dof[static_cast<std::size_t>(dof)];
    uv[static_cast<std::size_t>(dof)] = linear_u(g.x(node % g.nx), g.y(node / g.nx));
  }
  auto grad = evaluate_gradient(uv, op, ls, bc, 0.0);
  for (int dof = 0; dof < op.num_dofs(); ++dof) {
    bool interior_row = true;
    for (int dir = 0; dir < 4; ++dir)
      if (op.special_faces.count(4 * dof + dir)) interior_row = false;
    if (!interior_row) continue;
    CHECK(grad[static_cast<std::size_t>(dof)][0] == doctest::Approx(1.0).epsilon(1e-11));
    CHECK(grad[static_cast<std::size_t>(dof)][1] == doctest::Approx(2.0).epsilon(1e-11));
  }
}

TEST_CASE("evaluate_gradient: constant field has zero gradient everywhere") {
  UniformGrid2D g(-1, -1, 2.0 / 60, 61, 61);
  LevelSetField ls = problems::peanut_level_set(g);
  DirichletData bc{[](double, double, double) { return 3.5; }};
  auto op = assemble(g, ls, problems::peanut_beta, bc);
  std::vector<double> uv(static_cast<std::size_t>(op.num_dofs()), 3.5);
  auto grad = evaluate_gradient(uv, op, ls, bc, 0.0);
  for (const auto& gv : grad) {
    CHECK(std::abs(gv[0]) <= 1e-11);
    CHECK(std::abs(gv[1]) <= 1e-11);
  }
}
