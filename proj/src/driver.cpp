#include "ebrd/driver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace ebrd {

void apply_config_entry(ExperimentConfig& cfg, const std::string& key,
                        const std::string& value) {
  auto to_int = [&](const std::string& v) {
    try {
      std::size_t pos = 0;
      const int r = std::stoi(v, &pos);
      if (pos != v.size()) throw std::invalid_argument(v);
      return r;
    } catch (const std::exception&) {
      throw ConfigError("bad integer for '" + key + "': " + v);
    }
  };
  auto to_double = [&](const std::string& v) {
    try {
      std::size_t pos = 0;
      const double r = std::stod(v, &pos);
      if (pos != v.size()) throw std::invalid_argument(v);
      return r;
    } catch (const std::exception&) {
      throw ConfigError("bad number for '" + key + "': " + v);
    }
  };
  if (key == "experiment")
    cfg.experiment = value;
  else if (key == "n")
    cfg.n = to_int(value);
  else if (key == "dt")
    cfg.dt = to_double(value);
  else if (key == "t_end")
    cfg.t_end = to_double(value);
  else if (key == "scheme")
    cfg.scheme = value;
  else if (key == "krylov_tol")
    cfg.krylov_tol = to_double(value);
  else if (key == "cg_tol")
    cfg.cg_tol = to_double(value);
  else if (key == "out")
    cfg.out_dir = value;
  else if (key == "dump_every")
    cfg.dump_every = to_int(value);
  else
    throw ConfigError("unknown config key '" + key + "'");
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  ExperimentConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    apply_config_entry(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.n != 0 && cfg.n < 8) throw ConfigError("n must be >= 8");
  if (cfg.dt < 0.0) throw ConfigError("dt must be positive");
  if (cfg.t_end != 0.0 && cfg.dt != 0.0 && cfg.t_end < cfg.dt)
    throw ConfigError("t_end must be at least dt");
  if (!(cfg.krylov_tol > 0.0)) throw ConfigError("krylov_tol must be positive");
  if (!(cfg.cg_tol > 0.0)) throw ConfigError("cg_tol must be positive");
  if (cfg.dump_every < 0) throw ConfigError("dump_every must be >= 0");
  std::error_code ec;
  std::filesystem::create_directories(cfg.out_dir, ec);
  if (ec) throw IoError("cannot create output directory '" + cfg.out_dir + "'");
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12e", v);
  return buf;
}

void write_csv_table(const std::vector<std::vector<std::string>>& rows,
                     const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // binary keeps LF endings everywhere
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << row[i];
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

void write_field_dump(const std::vector<double>& u_grid, const LevelSetField& ls,
                      const std::string& path) {
  const UniformGrid2D& g = ls.grid;
  if (static_cast<int>(u_grid.size()) != g.size())
    throw IoError("write_field_dump: field size does not match grid for '" + path + "'");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "# vtk DataFile Version 3.0\n";
  out << "ebrd field dump\n";
  out << "ASCII\n";
  out << "DATASET STRUCTURED_POINTS\n";
  out << "DIMENSIONS " << g.nx << ' ' << g.ny << " 1\n";
  out << "ORIGIN " << format_double(g.x_lo) << ' ' << format_double(g.y_lo) << " 0\n";
  out << "SPACING " << format_double(g.h) << ' ' << format_double(g.h) << " 1\n";
  out << "POINT_DATA " << g.size() << '\n';
  out << "SCALARS u double 1\nLOOKUP_TABLE default\n";
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      out << format_double(u_grid[static_cast<std::size_t>(g.index(i, j))]) << '\n';
  out << "SCALARS rho double 1\nLOOKUP_TABLE default\n";
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      out << format_double(ls.values[static_cast<std::size_t>(g.index(i, j))]) << '\n';
  if (!out) throw IoError("write failed for '" + path + "'");
}

double fit_loglog_slope(const std::vector<double>& h, const std::vector<double>& err) {
  if (h.size() != err.size() || h.size() < 2)
    throw NumericalError("fit_loglog_slope: need at least two samples");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double x = std::log(h[i]), y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace problems {

double peanut_rho(double x, double y) {
  return 0.5 - std::exp(-20.0 * (x * x + (y - 0.25) * (y - 0.25))) -
         std::exp(-20.0 * (x * x + (y + 0.25) * (y + 0.25)));
}

LevelSetField peanut_level_set(const UniformGrid2D& grid) {
  return LevelSetField(grid, peanut_rho);
}

double peanut_beta(double x, double y) { return 0.25 - x * x - y * y; }

double peanut_exact_u(double x, double y, double t) {
  return std::exp(-t) * (x * x + y * y - 0.25);
}

double peanut_source(double x, double y, double t) {
  // u_t - div(beta grad u) for the exact solution above
  return std::exp(-t) * (7.0 * (x * x + y * y) - 0.75);
}

namespace {

// boundary curve of the virus-shaped domain
std::array<double, 2> virus_curve(double theta) {
  const double s = std::sin(12.0 * theta);
  return {(0.6 + 0.1 * s) * std::cos(theta), (0.6 + 0.05 * s) * std::sin(theta)};
}

struct VirusPolyline {
  std::vector<std::array<double, 2>> fine;    // closed, counterclockwise
  std::vector<std::array<double, 2>> coarse;  // subsampled for the search
  int stride = 0;

  VirusPolyline() {
    const int m = 8192, mc = 256;
    stride = m / mc;
    fine.resize(m);
    const double two_pi = 2.0 * 3.14159265358979323846;
    for (int k = 0; k < m; ++k) fine[static_cast<std::size_t>(k)] = virus_curve(two_pi * k / m);
    coarse.resize(mc);
    for (int k = 0; k < mc; ++k) coarse[static_cast<std::size_t>(k)] = fine[static_cast<std::size_t>(k * stride)];
  }

  // signed distance: negative inside; sign from the side of the nearest segment
  double signed_distance(double px, double py) const {
    const int m = static_cast<int>(fine.size());
    int best_c = 0;
    double best_d = 1e300;
    for (int k = 0; k < static_cast<int>(coarse.size()); ++k) {
      const double dx = px - coarse[static_cast<std::size_t>(k)][0];
      const double dy = py - coarse[static_cast<std::size_t>(k)][1];
      const double d = dx * dx + dy * dy;
      if (d < best_d) {
        best_d = d;
        best_c = k;
      }
    }
    const int center = best_c * stride;
    double best = 1e300;
    double side = 1.0;
    for (int o = -stride - 2; o <= stride + 2; ++o) {
      const int k = ((center + o) % m + m) % m;
      const auto& a = fine[static_cast<std::size_t>(k)];
      const auto& b = fine[static_cast<std::size_t>((k + 1) % m)];
      const double ex = b[0] - a[0], ey = b[1] - a[1];
      const double wx = px - a[0], wy = py - a[1];
      const double ee = ex * ex + ey * ey;
      double t = ee > 0.0 ? (wx * ex + wy * ey) / ee : 0.0;
      t = std::clamp(t, 0.0, 1.0);
      const double cx = a[0] + t * ex - px, cy = a[1] + t * ey - py;
      const double d2 = cx * cx + cy * cy;
      if (d2 < best) {
        best = d2;
        side = (ex * wy - ey * wx) >= 0.0 ? -1.0 : 1.0;  // left of CCW edge = inside
      }
    }
    return side * std::sqrt(best);
  }
};

}  // namespace

LevelSetField virus_level_set(const UniformGrid2D& grid) {
  static const VirusPolyline poly;
  return LevelSetField(grid,
                       [&](double x, double y) { return poly.signed_distance(x, y); });
}

double virus_beta(double x, double y) { return 2.0 + std::sin(x * y); }

double virus_exact_u(double x, double y) {
  return std::exp(x) * (x * x * std::sin(y) + y * y);
}

std::array<double, 2> virus_exact_grad(double x, double y) {
  const double ex = std::exp(x);
  return {ex * ((x * x + 2.0 * x) * std::sin(y) + y * y),
          ex * (x * x * std::cos(y) + 2.0 * y)};
}

double virus_source(double x, double y) {
  const double ex = std::exp(x);
  const double lap = ex * ((4.0 * x + 2.0) * std::sin(y) + y * y + 2.0);
  const auto grad = virus_exact_grad(x, y);
  const double bx = y * std::cos(x * y);
  const double by = x * std::cos(x * y);
  return virus_beta(x, y) * lap + bx * grad[0] + by * grad[1];
}

}  // namespace problems

}  // namespace ebrd
