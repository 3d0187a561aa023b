#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "ebrd/ebpoisson.hpp"
#include "ebrd/geometry.hpp"
#include "ebrd/levelset.hpp"
#include "ebrd/steppers.hpp"

namespace ebrd {

struct ExperimentConfig {
  std::string experiment;
  int n = 0;             // grid nodes per axis; 0 selects the experiment's ladder/default
  double dt = 0.0;       // 0 selects the experiment default (dt = h for convergence runs)
  double t_end = 0.0;    // 0 selects the experiment default
  std::string scheme = "etd2";
  double krylov_tol = 1e-8;
  double cg_tol = 1e-10;
  std::string out_dir = "out";
  int dump_every = 0;    // 0 disables field dumps
};

// Flat key=value file; '#' starts a comment. Unknown keys are an error.
ExperimentConfig parse_config_file(const std::string& path);
void apply_config_entry(ExperimentConfig& cfg, const std::string& key,
                        const std::string& value);
void validate_config(const ExperimentConfig& cfg);

struct ErrorReport {
  double l_inf = 0.0;
  double l_2 = 0.0;  // sqrt(h^2 sum e^2) over computational nodes
  std::optional<double> rate_inf;
  std::optional<double> rate_2;
};

// ---- file output ------------------------------------------------------

// Legacy VTK ASCII structured-points dump with point-data scalars u and rho
// in x-fastest order.
void write_field_dump(const std::vector<double>& u_grid, const LevelSetField& ls,
                      const std::string& path);

// CSV with a header row, '.' decimal separator, LF line endings.
void write_csv_table(const std::vector<std::vector<std::string>>& rows,
                     const std::string& path);

std::string format_double(double v);

// least-squares slope of log(err) against log(h)
double fit_loglog_slope(const std::vector<double>& h, const std::vector<double>& err);

// ---- test problems -----------------------------------------------------

namespace problems {

LevelSetField peanut_level_set(const UniformGrid2D& grid);
double peanut_rho(double x, double y);
double peanut_beta(double x, double y);
double peanut_exact_u(double x, double y, double t);
double peanut_source(double x, double y, double t);

LevelSetField virus_level_set(const UniformGrid2D& grid);
double virus_beta(double x, double y);
double virus_exact_u(double x, double y);
std::array<double, 2> virus_exact_grad(double x, double y);
double virus_source(double x, double y);

}  // namespace problems

// ---- experiments -------------------------------------------------------

struct PoissonSweepResult {
  std::vector<int> cells;  // N (nodes are N+1 per axis)
  std::vector<double> hs;
  std::vector<double> err_u_inf, err_u_2;
  std::vector<double> err_grad_inf, err_grad_2;
  double slope_u_inf = 0.0, slope_u_2 = 0.0;
  double slope_grad_inf = 0.0, slope_grad_2 = 0.0;
};
PoissonSweepResult run_poisson_virus(const ExperimentConfig& cfg);

struct RdRunResult {
  std::string scheme;
  int n = 0;
  double dt = 0.0;
  bool diverged = false;
  double blowup_norm = 0.0;
  ErrorReport errors;
};
// rd_peanut_convergence: resolution ladder at dt = h;
// rd_peanut_stability: dt ladder at fixed resolution.
std::vector<RdRunResult> run_rd_peanut(const ExperimentConfig& cfg);

struct EfficiencyRow {
  std::string scheme;
  int n = 0;
  int steps = 0;
  double seconds = 0.0;
};
std::vector<EfficiencyRow> run_efficiency(const ExperimentConfig& cfg);

struct StefanSeriesRow {
  int step = 0;
  double t = 0.0;
  double area = 0.0;
  double perimeter = 0.0;
  double isoperimetric_ratio = 0.0;
  double max_u = 0.0;
  double min_u = 0.0;
};
struct StefanOptions {
  double diffusion = 1.5;  // D
  double mu = 1.0;
  double growth = 1.0;     // a
  double damping = 1.0;    // b
};
std::vector<StefanSeriesRow> run_stefan_square(const ExperimentConfig& cfg,
                                               const StefanOptions& opts = {});

// Runs the experiment named in cfg.experiment; returns a process exit code.
int run_experiment(const ExperimentConfig& cfg);

}  // namespace ebrd
