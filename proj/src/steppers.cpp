#include "ebrd/steppers.hpp"

#include <algorithm>
#include <cmath>

namespace ebrd {

namespace {

std::vector<double> eval_f(const SemiDiscreteSystem& sys, std::span<const double> u, double t) {
  std::vector<double> f(static_cast<std::size_t>(sys.dim));
  sys.nonlinear(u, t, f);
  return f;
}

void record_history(StepperState& state, std::vector<double> fn) {
  state.f_history.push_front(std::move(fn));
  while (state.f_history.size() > 3) state.f_history.pop_back();
}

std::vector<double> combine(const SemiDiscreteSystem& sys, const StepperState& state,
                            double scale, std::vector<std::vector<double>> vectors) {
  PhiCombinationRequest req;
  req.apply_op = sys.linear_op;
  req.vectors = std::move(vectors);
  req.scale = scale;
  req.tolerance = state.krylov_tol;
  req.max_krylov_dim = state.max_krylov_dim;
  return phi_combination(req);
}

std::vector<double> scaled(double a, std::span<const double> x) {
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = a * x[i];
  return y;
}

}  // namespace

void etd1_step(const SemiDiscreteSystem& sys, StepperState& state, double dt) {
  if (!(dt > 0.0)) throw NumericalError("etd1_step: dt must be positive");
  std::vector<double> fn = eval_f(sys, state.u, state.t);
  state.u = combine(sys, state, dt, {state.u, scaled(dt, fn)});
  state.t += dt;
  record_history(state, std::move(fn));
}

void etd2_step(const SemiDiscreteSystem& sys, StepperState& state, double dt) {
  if (!(dt > 0.0)) throw NumericalError("etd2_step: dt must be positive");
  if (state.f_history.empty())
    throw StartupError("etd2_step: missing F history; bootstrap the first step");
  std::vector<double> fn = eval_f(sys, state.u, state.t);
  const std::vector<double>& fm = state.f_history.front();
  std::vector<double> diff(fn.size());
  for (std::size_t i = 0; i < fn.size(); ++i) diff[i] = dt * (fn[i] - fm[i]);
  state.u = combine(sys, state, dt, {state.u, scaled(dt, fn), std::move(diff)});
  state.t += dt;
  record_history(state, std::move(fn));
}

void etd_multistep_step(const SemiDiscreteSystem& sys, StepperState& state, double dt, int s) {
  if (!(dt > 0.0)) throw NumericalError("etd_multistep_step: dt must be positive");
  if (s < 1 || s > 4) throw NumericalError("etd_multistep_step: order must be in [1, 4]");
  if (static_cast<int>(state.f_history.size()) < s - 1)
    throw StartupError("etd_multistep_step: insufficient F history for order " +
                       std::to_string(s));
  const std::size_t n = state.u.size();
  std::vector<double> fn = eval_f(sys, state.u, state.t);

  // backward differences del[m] = ∇^m F_n
  std::vector<std::vector<double>> del(static_cast<std::size_t>(s));
  del[0] = fn;
  static const double kBinom[4][4] = {
      {1, 0, 0, 0}, {1, -1, 0, 0}, {1, -2, 1, 0}, {1, -3, 3, -1}};
  for (int m = 1; m < s; ++m) {
    del[static_cast<std::size_t>(m)].assign(n, 0.0);
    for (int i = 0; i <= m; ++i) {
      const std::vector<double>& fi =
          i == 0 ? fn : state.f_history[static_cast<std::size_t>(i - 1)];
      const double c = kBinom[m][i];
      for (std::size_t r = 0; r < n; ++r) del[static_cast<std::size_t>(m)][r] += c * fi[r];
    }
  }

  // expansion of binom(-lambda, m) in powers of lambda;
  // g_m = (-1)^m sum_k c[m][k] phi_{k+1}
  static const double kC[4][4] = {{1.0, 0.0, 0.0, 0.0},
                                  {0.0, -1.0, 0.0, 0.0},
                                  {0.0, 0.5, 0.5, 0.0},
                                  {0.0, -1.0 / 3.0, -0.5, -1.0 / 6.0}};
  std::vector<std::vector<double>> vectors;
  vectors.push_back(state.u);
  for (int k = 0; k < s; ++k) {
    std::vector<double> w(n, 0.0);
    for (int m = k; m < s; ++m) {
      const double coef = (m % 2 == 0 ? 1.0 : -1.0) * kC[m][k];
      if (coef == 0.0) continue;
      const std::vector<double>& dm = del[static_cast<std::size_t>(m)];
      for (std::size_t r = 0; r < n; ++r) w[r] += coef * dm[r];
    }
    for (double& x : w) x *= dt;
    vectors.push_back(std::move(w));
  }
  state.u = combine(sys, state, dt, std::move(vectors));
  state.t += dt;
  record_history(state, std::move(fn));
}

void etd2rk_step(const SemiDiscreteSystem& sys, StepperState& state, double dt) {
  if (!(dt > 0.0)) throw NumericalError("etd2rk_step: dt must be positive");
  std::vector<double> fn = eval_f(sys, state.u, state.t);
  std::vector<double> a = combine(sys, state, dt, {state.u, scaled(dt, fn)});
  std::vector<double> fa = eval_f(sys, a, state.t + dt);
  std::vector<double> diff(fn.size());
  for (std::size_t i = 0; i < fn.size(); ++i) diff[i] = dt * (fa[i] - fn[i]);
  state.u = combine(sys, state, dt, {state.u, scaled(dt, fn), std::move(diff)});
  state.t += dt;
  record_history(state, std::move(fn));
}

void etd3rk_step(const SemiDiscreteSystem& sys, StepperState& state, double dt) {
  if (!(dt > 0.0)) throw NumericalError("etd3rk_step: dt must be positive");
  const std::size_t n = state.u.size();
  std::vector<double> fn = eval_f(sys, state.u, state.t);
  std::vector<double> a =
      combine(sys, state, 0.5 * dt, {state.u, scaled(0.5 * dt, fn)});
  std::vector<double> fa = eval_f(sys, a, state.t + 0.5 * dt);
  std::vector<double> v1b(n);
  for (std::size_t i = 0; i < n; ++i) v1b[i] = dt * (2.0 * fa[i] - fn[i]);
  std::vector<double> b = combine(sys, state, dt, {state.u, std::move(v1b)});
  std::vector<double> fb = eval_f(sys, b, state.t + dt);
  std::vector<double> v2(n), v3(n);
  for (std::size_t i = 0; i < n; ++i) {
    v2[i] = dt * (-3.0 * fn[i] + 4.0 * fa[i] - fb[i]);
    v3[i] = dt * (2.0 * fn[i] - 4.0 * fa[i] + 2.0 * fb[i]);
  }
  state.u = combine(sys, state, dt,
                    {state.u, scaled(dt, fn), std::move(v2), std::move(v3)});
  state.t += dt;
  record_history(state, std::move(fn));
}

void etd4rk_step(const SemiDiscreteSystem& sys, StepperState& state, double dt) {
  if (!(dt > 0.0)) throw NumericalError("etd4rk_step: dt must be positive");
  const std::size_t n = state.u.size();
  std::vector<double> fn = eval_f(sys, state.u, state.t);
  std::vector<double> a =
      combine(sys, state, 0.5 * dt, {state.u, scaled(0.5 * dt, fn)});
  std::vector<double> fa = eval_f(sys, a, state.t + 0.5 * dt);
  std::vector<double> b =
      combine(sys, state, 0.5 * dt, {state.u, scaled(0.5 * dt, fa)});
  std::vector<double> fb = eval_f(sys, b, state.t + 0.5 * dt);
  std::vector<double> vc(n);
  for (std::size_t i = 0; i < n; ++i) vc[i] = 0.5 * dt * (2.0 * fb[i] - fn[i]);
  std::vector<double> c = combine(sys, state, 0.5 * dt, {a, std::move(vc)});
  std::vector<double> fc = eval_f(sys, c, state.t + dt);
  std::vector<double> v2(n), v3(n);
  for (std::size_t i = 0; i < n; ++i) {
    v2[i] = dt * (-3.0 * fn[i] + 2.0 * (fa[i] + fb[i]) - fc[i]);
    v3[i] = dt * (2.0 * fn[i] - 2.0 * (fa[i] + fb[i]) + 2.0 * fc[i]);
  }
  state.u = combine(sys, state, dt,
                    {state.u, scaled(dt, fn), std::move(v2), std::move(v3)});
  state.t += dt;
  record_history(state, std::move(fn));
}

CnWorkspace::CnWorkspace(const SymSparseMatrix& c, double dt_, double cg_tol_)
    : dt(dt_), cg_tol(cg_tol_) {
  std::vector<Triplet> ts;
  ts.reserve(c.values.size() + static_cast<std::size_t>(c.n));
  for (int i = 0; i < c.n; ++i) {
    ts.push_back({i, i, 1.0});
    for (int k = c.row_offsets[static_cast<std::size_t>(i)];
         k < c.row_offsets[static_cast<std::size_t>(i) + 1]; ++k)
      ts.push_back({i, c.col_indices[static_cast<std::size_t>(k)],
                    -0.5 * dt * c.values[static_cast<std::size_t>(k)]});
  }
  lhs = SymSparseMatrix::from_triplets(c.n, std::move(ts));
  precond = ic0_factor(lhs);
}

void cn_step(const SemiDiscreteSystem& sys, StepperState& state, double dt,
             CnWorkspace* ws, double cg_tol) {
  if (!(dt > 0.0)) throw NumericalError("cn_step: dt must be positive");
  if (sys.f_depends_on_state)
    throw NumericalError("cn_step: unsupported configuration, F must not depend on U");
  if (!sys.linear_matrix)
    throw NumericalError("cn_step: explicit matrix for C required");
  std::optional<CnWorkspace> local;
  if (!ws) {
    local.emplace(*sys.linear_matrix, dt, cg_tol);
    ws = &*local;
  }
  if (std::abs(ws->dt - dt) > 1e-15 * std::abs(dt))
    throw NumericalError("cn_step: workspace factored for a different dt");

  const std::size_t n = state.u.size();
  std::vector<double> fn = eval_f(sys, state.u, state.t);
  std::vector<double> fn1 = eval_f(sys, state.u, state.t + dt);
  std::vector<double> cu(n);
  sys.linear_op(state.u, cu);
  std::vector<double> rhs(n);
  for (std::size_t i = 0; i < n; ++i)
    rhs[i] = state.u[i] + 0.5 * dt * (cu[i] + fn[i] + fn1[i]);
  CgResult sol = cg_solve(ws->lhs, rhs, &ws->precond, ws->cg_tol);
  state.u = std::move(sol.x);
  state.t += dt;
  record_history(state, std::move(fn));
}

void rk4_step(const SemiDiscreteSystem& sys, StepperState& state, double dt) {
  if (!(dt > 0.0)) throw NumericalError("rk4_step: dt must be positive");
  const std::size_t n = state.u.size();
  auto rhs = [&](std::span<const double> u, double t) {
    std::vector<double> g(n);
    sys.linear_op(u, g);
    std::vector<double> f(n);
    sys.nonlinear(u, t, f);
    for (std::size_t i = 0; i < n; ++i) g[i] += f[i];
    return g;
  };
  auto shifted = [&](std::span<const double> u, double a, std::span<const double> k) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = u[i] + a * k[i];
    return v;
  };
  std::vector<double> k1 = rhs(state.u, state.t);
  std::vector<double> k2 = rhs(shifted(state.u, 0.5 * dt, k1), state.t + 0.5 * dt);
  std::vector<double> k3 = rhs(shifted(state.u, 0.5 * dt, k2), state.t + 0.5 * dt);
  std::vector<double> k4 = rhs(shifted(state.u, dt, k3), state.t + dt);
  double norm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    state.u[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    norm = std::max(norm, std::abs(state.u[i]));
  }
  state.t += dt;
  if (!std::isfinite(norm) || norm > 1e10)
    throw BlowUpError("rk4_step: solution blew up (max-norm " + std::to_string(norm) + ")",
                      state.t, norm);
}

Scheme parse_scheme(const std::string& name) {
  if (name == "etd1") return Scheme::Etd1;
  if (name == "etd2") return Scheme::Etd2;
  if (name == "etd_ms3") return Scheme::EtdMs3;
  if (name == "etd_ms4") return Scheme::EtdMs4;
  if (name == "etd2rk") return Scheme::Etd2Rk;
  if (name == "etd3rk") return Scheme::Etd3Rk;
  if (name == "etd4rk") return Scheme::Etd4Rk;
  if (name == "cn") return Scheme::Cn;
  if (name == "rk4") return Scheme::Rk4;
  throw ConfigError("unknown scheme '" + name + "'");
}

std::string scheme_name(Scheme s) {
  switch (s) {
    case Scheme::Etd1: return "etd1";
    case Scheme::Etd2: return "etd2";
    case Scheme::EtdMs3: return "etd_ms3";
    case Scheme::EtdMs4: return "etd_ms4";
    case Scheme::Etd2Rk: return "etd2rk";
    case Scheme::Etd3Rk: return "etd3rk";
    case Scheme::Etd4Rk: return "etd4rk";
    case Scheme::Cn: return "cn";
    case Scheme::Rk4: return "rk4";
  }
  throw ConfigError("unknown scheme enumerator");
}

void step_with_scheme(Scheme scheme, const SemiDiscreteSystem& sys, StepperState& state,
                      double dt, CnWorkspace* cn_ws) {
  const auto history = static_cast<int>(state.f_history.size());
  switch (scheme) {
    case Scheme::Etd1:
      etd1_step(sys, state, dt);
      return;
    case Scheme::Etd2:
      if (history < 1) return etd2rk_step(sys, state, dt);
      return etd2_step(sys, state, dt);
    case Scheme::EtdMs3:
      if (history < 2) return etd3rk_step(sys, state, dt);
      return etd_multistep_step(sys, state, dt, 3);
    case Scheme::EtdMs4:
      if (history < 3) return etd4rk_step(sys, state, dt);
      return etd_multistep_step(sys, state, dt, 4);
    case Scheme::Etd2Rk:
      return etd2rk_step(sys, state, dt);
    case Scheme::Etd3Rk:
      return etd3rk_step(sys, state, dt);
    case Scheme::Etd4Rk:
      return etd4rk_step(sys, state, dt);
    case Scheme::Cn:
      return cn_step(sys, state, dt, cn_ws);
    case Scheme::Rk4:
      return rk4_step(sys, state, dt);
  }
}

}  // namespace ebrd
