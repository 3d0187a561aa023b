#pragma once

#include <deque>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ebrd/common.hpp"
#include "ebrd/phifun.hpp"
#include "ebrd/sparse.hpp"

namespace ebrd {

// Semi-discrete system U_t = C U + F(U, t).
struct SemiDiscreteSystem {
  int dim = 0;
  MatrixAction linear_op;  // y = C x
  std::function<void(std::span<const double>, double, std::span<double>)> nonlinear;
  bool f_depends_on_state = true;
  // Explicit matrix for C; only the Crank-Nicolson path needs it.
  const SymSparseMatrix* linear_matrix = nullptr;
};

struct StepperState {
  std::vector<double> u;
  double t = 0.0;
  // F_{n-1} at the front, then F_{n-2}, ... (multistep history)
  std::deque<std::vector<double>> f_history;
  double krylov_tol = 1e-8;
  int max_krylov_dim = 128;
};

class StartupError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class BlowUpError : public NumericalError {
 public:
  BlowUpError(const std::string& what, double t, double norm)
      : NumericalError(what), t(t), norm(norm) {}
  double t;
  double norm;
};

// Every step advances state.u and state.t by dt and records F(U_n, t_n)
// into the history (so multistep schemes can follow any starter).
void etd1_step(const SemiDiscreteSystem& sys, StepperState& state, double dt);
void etd2_step(const SemiDiscreteSystem& sys, StepperState& state, double dt);
void etd_multistep_step(const SemiDiscreteSystem& sys, StepperState& state, double dt, int s);
void etd2rk_step(const SemiDiscreteSystem& sys, StepperState& state, double dt);
void etd3rk_step(const SemiDiscreteSystem& sys, StepperState& state, double dt);
void etd4rk_step(const SemiDiscreteSystem& sys, StepperState& state, double dt);

// Crank-Nicolson comparison baseline; requires F independent of U and the
// explicit matrix. The workspace caches the factorization of I - dt/2 C.
struct CnWorkspace {
  CnWorkspace(const SymSparseMatrix& c, double dt, double cg_tol);
  SymSparseMatrix lhs;  // I - dt/2 C
  IC0Factor precond;
  double dt;
  double cg_tol;
};

void cn_step(const SemiDiscreteSystem& sys, StepperState& state, double dt,
             CnWorkspace* ws = nullptr, double cg_tol = 1e-10);

// Classical explicit four-stage Runge-Kutta on the full right-hand side.
// Throws BlowUpError when the state leaves [-1e10, 1e10] or turns non-finite.
void rk4_step(const SemiDiscreteSystem& sys, StepperState& state, double dt);

enum class Scheme { Etd1, Etd2, EtdMs3, EtdMs4, Etd2Rk, Etd3Rk, Etd4Rk, Cn, Rk4 };

Scheme parse_scheme(const std::string& name);  // throws ConfigError
std::string scheme_name(Scheme s);

// Dispatch with automatic multistep bootstrap: while the history is shorter
// than the scheme needs, the step runs the self-starting RK variant of the
// same order instead.
void step_with_scheme(Scheme scheme, const SemiDiscreteSystem& sys, StepperState& state,
                      double dt, CnWorkspace* cn_ws = nullptr);

}  // namespace ebrd
