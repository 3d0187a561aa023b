#include <cstdio>
#include <filesystem>
#include <fstream>

#include <doctest.h>

#include "ebrd/driver.hpp"
#include "test_support.hpp"

using namespace ebrd;

namespace {

std::string temp_dir(const char* name) {
  auto p = std::filesystem::temp_directory_path() / name;
  std::filesystem::create_directories(p);
  return p.string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("config: file parsing with comments and whitespace") {
  const std::string dir = temp_dir("ebrd_cfg");
  const std::string path = dir + "/run.cfg";
  {
    std::ofstream out(path);
    out << "# demo configuration\n";
    out << "n = 33\n";
    out << "dt=0.5   # trailing comment\n";
    out << "scheme = etd2rk\n";
    out << "out = " << dir << "\n";
  }
  auto cfg = parse_config_file(path);
  CHECK(cfg.n == 33);
  CHECK(cfg.dt == doctest::Approx(0.5));
  CHECK(cfg.scheme == "etd2rk");
  CHECK(cfg.out_dir == dir);
}

TEST_CASE("config: unknown keys and malformed values are rejected") {
  ExperimentConfig cfg;
  CHECK_THROWS_AS(apply_config_entry(cfg, "frobnicate", "1"), ConfigError);
  CHECK_THROWS_AS(apply_config_entry(cfg, "n", "12x"), ConfigError);
  CHECK_THROWS_AS(apply_config_entry(cfg, "dt", "fast"), ConfigError);
}

TEST_CASE("config: validation rejects bad combinations") {
  ExperimentConfig cfg;
  cfg.experiment = "poisson_virus";
  cfg.out_dir = temp_dir("ebrd_vcfg");
  cfg.n = 4;
  CHECK_THROWS_AS(validate_config(cfg), ConfigError);
  cfg.n = 0;
  cfg.krylov_tol = -1.0;
  CHECK_THROWS_AS(validate_config(cfg), ConfigError);
  cfg.krylov_tol = 1e-8;
  cfg.dt = 0.5;
  cfg.t_end = 0.1;
  CHECK_THROWS_AS(validate_config(cfg), ConfigError);
}

TEST_CASE("csv: header row, comma separation, LF endings, dot decimals") {
  const std::string dir = temp_dir("ebrd_csv");
  const std::string path = dir + "/table.csv";
  write_csv_table({{"resolution", "l_inf", "order_inf", "l_2", "order_2"},
                   {"81", format_double(8.234e-4), "-", format_double(2.58e-4), "-"}},
                  path);
  const std::string text = slurp(path);
  CHECK(text.find("resolution,l_inf,order_inf,l_2,order_2\n") == 0);
  CHECK(text.find('\r') == std::string::npos);
  CHECK(text.find("8.234000000000e-04") != std::string::npos);
  CHECK(text.back() == '\n');
}

TEST_CASE("vtk: structured-points dump round-trips through a reader") {
  const std::string dir = temp_dir("ebrd_vtk");
  const std::string path = dir + "/dump.vtk";
  UniformGrid2D g(-1.0, 0.5, 0.25, 4, 4);
  LevelSetField ls(g, [](double x, double y) { return x + y; });
  std::vector<double> u(static_cast<std::size_t>(g.size()));
  for (int k = 0; k < g.size(); ++k) u[static_cast<std::size_t>(k)] = 0.5 * k - 3.0;
  write_field_dump(u, ls, path);
  auto dump = testing::read_vtk_dump(path);
  CHECK(dump.nx == 4);
  CHECK(dump.ny == 4);
  CHECK(dump.origin_x == doctest::Approx(-1.0));
  CHECK(dump.origin_y == doctest::Approx(0.5));
  CHECK(dump.spacing == doctest::Approx(0.25));
  REQUIRE(dump.u.size() == 16);
  REQUIRE(dump.rho.size() == 16);
  for (int k = 0; k < 16; ++k) {
    CHECK(dump.u[static_cast<std::size_t>(k)] == doctest::Approx(u[static_cast<std::size_t>(k)]).epsilon(1e-12));
    CHECK(dump.rho[static_cast<std::size_t>(k)] ==
          doctest::Approx(ls.values[static_cast<std::size_t>(k)]).epsilon(1e-12));
  }
}

TEST_CASE("poisson_virus: smoke run at a coarse resolution emits files") {
  ExperimentConfig cfg;
  cfg.experiment = "poisson_virus";
  cfg.n = 17;  // 16 cells
  cfg.out_dir = temp_dir("ebrd_virus_smoke");
  cfg.dump_every = 1;
  validate_config(cfg);
  auto res = run_poisson_virus(cfg);
  REQUIRE(res.hs.size() == 1);
  CHECK(res.err_u_inf[0] < 1.0);
  CHECK(std::filesystem::exists(cfg.out_dir + "/virus_solution_errors.csv"));
  CHECK(std::filesystem::exists(cfg.out_dir + "/virus_gradient_errors.csv"));
  CHECK(std::filesystem::exists(cfg.out_dir + "/virus_u_n17.vtk"));
  auto dump = testing::read_vtk_dump(cfg.out_dir + "/virus_u_n17.vtk");
  CHECK(dump.nx == 17);
}

TEST_CASE("rd_peanut: identical configurations give bitwise-identical tables") {
  ExperimentConfig cfg;
  cfg.experiment = "rd_peanut_convergence";
  cfg.n = 41;
  cfg.scheme = "etd2";
  for (const char* dir : {"ebrd_det_a", "ebrd_det_b"}) {
    cfg.out_dir = temp_dir(dir);
    validate_config(cfg);
    run_rd_peanut(cfg);
  }
  const std::string a = slurp(std::string(std::filesystem::temp_directory_path() /
                                          "ebrd_det_a/peanut_errors_etd2.csv"));
  const std::string b = slurp(std::string(std::filesystem::temp_directory_path() /
                                          "ebrd_det_b/peanut_errors_etd2.csv"));
  CHECK(a == b);
  CHECK(!a.empty());
}

TEST_CASE("stefan_square: frozen boundary with mu = 0 keeps the domain fixed") {
  ExperimentConfig cfg;
  cfg.experiment = "stefan_square";
  cfg.n = 101;
  cfg.dt = 0.02;
  cfg.t_end = 0.2;
  cfg.krylov_tol = 1e-10;
  cfg.out_dir = temp_dir("ebrd_stefan_mu0");
  validate_config(cfg);
  StefanOptions opts;
  opts.mu = 0.0;
  auto series = run_stefan_square(cfg, opts);
  REQUIRE(series.size() >= 2);
  for (const auto& row : series) {
    CHECK(std::abs(row.area - series.front().area) <= 1e-12);
    CHECK(row.min_u >= -1e-8);
    CHECK(row.max_u <= 1.25 + 1e-6);
  }
  // u relaxes toward the Dirichlet-constrained steady state, away from the cap
  CHECK(series.back().max_u < series.front().max_u);
}

TEST_CASE("run_experiment: unknown experiment is a configuration error") {
  ExperimentConfig cfg;
  cfg.experiment = "warp_drive";
  cfg.out_dir = temp_dir("ebrd_unknown");
  CHECK_THROWS_AS(run_experiment(cfg), ConfigError);
}
