#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rendezvous/runner.hpp"
#include "rendezvous/version.hpp"

namespace fs = std::filesystem;
using namespace rendezvous;

namespace {

constexpr double kRad2Deg = 180.0 / M_PI;

struct CommonFlags {
  std::string scenario{"straight"};
  double k_aggr{0.0};
  bool k_set{false};
  int max_newton{-1};
  double grad_tol{-1.0};
  double step{-1.0};
  long seed{20240817};
};

Scenario resolve_scenario(const CommonFlags& flags) {
  Scenario s;
  if (flags.scenario == "straight") {
    s = preset_straight();
  } else if (flags.scenario == "turn90") {
    s = preset_turn90();
  } else if (flags.scenario.rfind("file:", 0) == 0) {
    const std::string path = flags.scenario.substr(5);
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open scenario file: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    s = load_scenario(buffer.str());
    s.name = fs::path(path).stem().string();
  } else {
    throw ValidationError("scenario: expected straight, turn90 or file:PATH");
  }
  if (flags.k_set) {
    if (flags.k_aggr < 0.0 || flags.k_aggr > 1.0) {
      throw ValidationError("k_aggr out of [0,1]");
    }
    s.spec.k_aggr = flags.k_aggr;
  }
  if (flags.max_newton > 0) s.solver.max_newton = flags.max_newton;
  if (flags.grad_tol > 0.0) s.solver.grad_tol = flags.grad_tol;
  if (flags.step > 0.0) s.grid_step = flags.step;
  return s;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void write_artifacts(const SolveArtifacts& art, const fs::path& dir) {
  fs::create_directories(dir);
  {
    std::ofstream csv(dir / "trajectory.csv");
    write_trajectory_csv(csv, art.full, art.scenario.path, art.scenario.wind,
                         art.scenario.params);
  }
  write_file(dir / "report.json", report_to_json(art.report));
  write_file(dir / "manifest.json",
             manifest_to_json(art.scenario, art.report,
                              {"trajectory.csv", "report.json", "manifest.json"}));
}

int cmd_solve(const CommonFlags& flags, const std::string& out_dir) {
  const Scenario s = resolve_scenario(flags);
  const SolveArtifacts art = run_solve(s);
  write_artifacts(art, out_dir);
  std::printf("scenario %s k_aggr %.3g: %s, rendezvous %.2f s (predicted %.2f s), "
              "cost %.6g, %d iterations\n",
              art.scenario.name.c_str(), art.scenario.spec.k_aggr,
              art.report.status.c_str(), art.report.rendezvous_time,
              art.report.predicted_time, art.report.final_cost,
              art.report.total_iterations);
  return art.report.status == "converged" ? 0 : 2;
}

int cmd_predict(const CommonFlags& flags, const std::vector<double>& ks) {
  const Scenario s = resolve_scenario(flags);
  std::printf("%8s %14s %12s %12s\n", "k_aggr", "gamma_d [deg]", "s_r [m]", "T_r_d [s]");
  for (double k : ks) {
    if (k < 0.0 || k > 1.0) throw ValidationError("k_aggr out of [0,1]");
    RendezvousSpec spec = s.spec;
    spec.k_aggr = k;
    const DesiredProfiles profiles(spec, s.params, s.limits);
    std::printf("%8.3f %14.4f %12.2f %12.2f\n", k, profiles.gamma_d() * kRad2Deg,
                profiles.s_r(), profiles.rendezvous_time());
  }
  return 0;
}

std::string k_dir_name(double k) {
  std::ostringstream name;
  name << "k_" << k;
  return name.str();
}

int cmd_sweep(const CommonFlags& flags, const std::vector<double>& ks,
              const std::string& out_dir) {
  const Scenario base = resolve_scenario(flags);
  for (double k : ks) {
    if (k < 0.0 || k > 1.0) throw ValidationError("k_aggr out of [0,1]");
  }
  std::vector<SolveArtifacts> artifacts;
  const std::vector<SweepEntry> rows = run_sweep(base, ks, 0, &artifacts);

  fs::create_directories(out_dir);
  std::ofstream summary(fs::path(out_dir) / "sweep_summary.csv");
  summary << "k,T_pred,T_achieved,iterations,worst_residual\n";
  bool all_ok = true;
  for (size_t i = 0; i < rows.size(); ++i) {
    const SweepEntry& row = rows[i];
    char line[160];
    std::snprintf(line, sizeof(line), "%.12g,%.12g,%.12g,%d,%.12g\n", row.k,
                  row.predicted, row.achieved, row.iterations, row.worst_residual);
    summary << line;
    if (row.status == "converged") {
      write_artifacts(artifacts[i], fs::path(out_dir) / k_dir_name(row.k));
    } else {
      all_ok = false;
      std::fprintf(stderr, "k = %g failed: %s\n", row.k, row.status.c_str());
      if (row.status == "max_iterations") {
        write_artifacts(artifacts[i], fs::path(out_dir) / k_dir_name(row.k));
      }
    }
    std::printf("k %.3g: %s, achieved %.2f s (predicted %.2f s)\n", row.k,
                row.status.c_str(), row.achieved, row.predicted);
  }
  return all_ok ? 0 : 2;
}

// ---------------------------------------------------------------------------
// validate: invariant battery runnable from a fresh checkout.
// ---------------------------------------------------------------------------

class EyFlipModel final : public DynamicsModel {
 public:
  explicit EyFlipModel(const CoupledModel& inner) : inner_(inner) {}
  Vec9 rhs(const Vec9& x, const Vec4& u) const override {
    Vec9 dx = inner_.rhs(x, u);
    dx[1] = -dx[1];
    return dx;
  }
  void jacobians(const Vec9& x, const Vec4& u, Mat9& A, Mat94& B) const override {
    inner_.jacobians(x, u, A, B);
    A.row(1) = -A.row(1);
    B.row(1) = -B.row(1);
  }

 private:
  const CoupledModel& inner_;
};

bool suite_trim_fixed_points() {
  const VehicleParams params = VehicleParams::zagi();
  const Limits limits = Limits::standard();

  const auto drift = [&](UavState x, const UavInput& u, const Wind& wind) {
    Eigen::Matrix<double, 7, 1> y;
    y << x.x_A, x.y_A, x.z_A, x.v_A, x.gamma_A, x.chi_A, x.phi_A;
    const auto rhs = [&](const Eigen::Matrix<double, 7, 1>& z) {
      UavState st{z[0], z[1], z[2], z[3], z[4], z[5], z[6]};
      return uav_dynamics(st, u, wind, params);
    };
    const double h = 0.01;
    for (int k = 0; k < 1000; ++k) {
      const auto k1 = rhs(y);
      const auto k2 = rhs(y + 0.5 * h * k1);
      const auto k3 = rhs(y + 0.5 * h * k2);
      const auto k4 = rhs(y + h * k3);
      y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return std::max(std::abs(y[3] - x.v_A), std::abs(y[4] - x.gamma_A));
  };

  // Level trim, zero wind.
  const TrimInputs level = trim_level(18.0, params, limits);
  const double d1 = drift({0, 0, -50, 18, 0, 0.3, 0}, {level.u1, 0.0, level.u3}, Wind{});

  // Level trim in the reference wind.
  const Wind wind{-4.33, 2.5, 0.0};
  const AirData air = wind_triangle(18.0, M_PI / 4.0, 0.0, wind);
  const TrimInputs levelw = trim_level(air.v_a, params, limits);
  const double d2 =
      drift({0, 0, -50, 18, 0, M_PI / 4.0, 0}, {levelw.u1, 0.0, levelw.u3}, wind);

  // Descent trim at the zero-thrust boundary.
  const double g1 = gamma_one(params, limits.v_max);
  const TrimInputs descent = trim_descent(20.0, g1, params);
  const double d3 =
      drift({0, 0, -50, 20, g1, 0.1, 0}, {descent.u1, 0.0, descent.u3}, Wind{});

  return std::max({d1, d2, d3}) < 1e-6;
}

bool suite_equivalence(bool mutate_ey) {
  const VehicleParams params = VehicleParams::zagi();
  const Limits limits = Limits::standard();
  const Wind wind{-4.33, 2.5, 0.0};
  const TimeGrid grid{0.0, 0.01, 1001};

  // Straight path, trim inputs with a small roll-rate wiggle.
  {
    const Path path({{800.0, 0.0}}, 0.0, 0.0, M_PI / 4.0);
    const AirData air = wind_triangle(18.0, M_PI / 4.0, 0.0, wind);
    const TrimInputs trim = trim_level(air.v_a, params, limits);
    std::vector<CoupledInput> u(grid.nodes, {trim.u1, 0.0, trim.u3, 0.0});
    for (int k = 0; k < grid.nodes; ++k) {
      u[k].u2 = 0.02 * std::sin(0.2 * grid.time(k));
    }
    const CoupledState x0{0.0, 2.0, -50.0, 0.0, 0.0, 0.1, 0.0, 18.0, 30.0};
    const CoupledModel model(path, wind, params);
    const EyFlipModel mutated(model);
    const DynamicsModel& used =
        mutate_ey ? static_cast<const DynamicsModel&>(mutated) : model;
    if (equivalence_check(used, x0, u, grid, wind, path, params) >= 1e-6) return false;
  }

  // Single long arc (sigma = 1/35), constant inputs, 5 s.
  {
    const Path path({{600.0, 1.0 / 35.0}}, 0.0, 0.0, 0.0);
    const TimeGrid arc_grid{0.0, 0.01, 501};
    const TrimInputs trim = trim_level(14.0, params, limits);
    const std::vector<CoupledInput> u(arc_grid.nodes, {trim.u1, 0.0, trim.u3, 0.1});
    const CoupledState x0{1.0, -2.0, -40.0, 1.0, 0.02, 0.05, 0.05, 10.0, 50.0};
    if (equivalence_check(x0, u, arc_grid, wind, path, params) >= 1e-6) return false;
  }
  return true;
}

bool suite_linearization_fd(double fd_tol, long seed) {
  const VehicleParams params = VehicleParams::zagi();
  const Wind wind{-4.33, 2.5, 0.0};
  const Path path({{3000.0, 0.0}}, 0.0, 0.0, M_PI / 4.0);
  std::mt19937 rng(static_cast<unsigned>(seed));
  std::uniform_real_distribution<double> uni(-1.0, 1.0);

  for (int trial = 0; trial < 20; ++trial) {
    Vec9 x;
    x << 20.0 * uni(rng), 20.0 * uni(rng), -40.0 + 10.0 * uni(rng), 1.5 * uni(rng),
        0.06 * uni(rng), 0.25 * uni(rng), 0.3 * uni(rng), 16.0 + 2.0 * uni(rng),
        500.0 + 400.0 * uni(rng);
    Vec4 u;
    u << 1.0 + 0.8 * uni(rng), 0.05 * uni(rng), 0.35 + 0.2 * uni(rng), 1.5 * uni(rng);

    const CoupledModel model(path, wind, params);
    Mat9 A;
    Mat94 B;
    model.jacobians(x, u, A, B);

    const double h = 1e-6;
    for (int j = 0; j < 13; ++j) {
      Vec9 xp = x, xm = x;
      Vec4 up = u, um = u;
      if (j < 9) {
        xp[j] += h;
        xm[j] -= h;
      } else {
        up[j - 9] += h;
        um[j - 9] -= h;
      }
      const Vec9 fd = (model.rhs(xp, up) - model.rhs(xm, um)) / (2.0 * h);
      for (int i = 0; i < 9; ++i) {
        const double an = j < 9 ? A(i, j) : B(i, j - 9);
        if (std::abs(fd[i] - an) > std::max(1e-7, fd_tol * std::abs(an))) {
          return false;
        }
      }
    }
  }
  return true;
}

bool suite_barrier_gluing() {
  const double deltas[] = {0.05, 0.01, 0.002};
  for (double delta : deltas) {
    const double z = delta;
    const double q = (z - 2.0 * delta) / delta;
    const double left = 0.5 * (q * q - 1.0) - std::log(delta);
    if (std::abs(relaxed_log_barrier(z, delta) - left) > 1e-12) return false;
    if (std::abs(relaxed_log_barrier_d1(z, delta) - (-1.0 / z)) > 1e-12) return false;
    if (std::abs(relaxed_log_barrier_d2(z, delta) - 1.0 / (z * z)) > 1e-12) return false;
  }
  return true;
}

bool suite_transform_roundtrip(long seed) {
  std::mt19937 rng(static_cast<unsigned>(seed));
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const UgvState g{500.0 * uni(rng), 500.0 * uni(rng), 15.0, 6.0 * uni(rng)};
    const Eigen::Vector3d e{100.0 * uni(rng), 100.0 * uni(rng), 50.0 * uni(rng)};
    const Eigen::Vector3d back = inertial_to_error(error_to_inertial(e, g), g);
    if ((back - e).cwiseAbs().maxCoeff() > 1e-12) return false;
  }
  return true;
}

bool suite_rk4_order() {
  const VehicleParams params = VehicleParams::zagi();
  const Path path({{3000.0, 0.0}}, 0.0, 0.0, 0.0);
  const Wind wind{};
  const CoupledModel model(path, wind, params);

  const double g1 = gamma_one(params, 20.0);
  const TrimInputs descent = trim_descent(20.0, g1, params);
  Vec9 x0;
  x0 << 0.0, 0.0, -50.0, 2.0, g1, 0.05, 0.02, 18.0, 100.0;
  Vec4 u;
  u << descent.u1, 0.0, descent.u3, 0.0;

  const double T = 10.0;
  const auto endpoint = [&](double h) {
    const int steps = static_cast<int>(std::round(T / h));
    const TimeGrid grid{0.0, h, steps + 1};
    const std::vector<Vec4> inputs(grid.nodes, u);
    return integrate(model, x0, inputs, grid).x.back();
  };

  const Vec9 ref = endpoint(0.025);
  const double e1 = (endpoint(0.2) - ref).cwiseAbs().maxCoeff();
  const double e2 = (endpoint(0.1) - ref).cwiseAbs().maxCoeff();
  const double order = std::log2(e1 / e2);
  return order >= 3.7;
}

int cmd_validate(double fd_tol, long seed, bool mutate_ey) {
  struct Suite {
    const char* name;
    bool passed;
  };
  const Suite suites[] = {
      {"trim_fixed_points", suite_trim_fixed_points()},
      {"equivalence", suite_equivalence(mutate_ey)},
      {"linearization_fd", suite_linearization_fd(fd_tol, seed)},
      {"barrier_gluing", suite_barrier_gluing()},
      {"transform_roundtrip", suite_transform_roundtrip(seed)},
      {"rk4_order", suite_rk4_order()},
  };
  bool all = true;
  for (const Suite& s : suites) {
    std::printf("%s %s\n", s.passed ? "PASS" : "FAIL", s.name);
    all = all && s.passed;
  }
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Constrained rendezvous trajectory generation for a fixed-wing UAV "
               "landing on a moving ground vehicle"};
  app.set_version_flag("--version", std::string("rendezvous ") + kVersion);
  app.require_subcommand(1);

  CommonFlags flags;
  std::string out_dir = "out";
  std::vector<double> ks{0.0};
  double fd_tol = 1e-5;
  bool mutate_ey = false;

  const auto add_common = [&](CLI::App* cmd, bool with_k) {
    cmd->add_option("--scenario", flags.scenario,
                    "straight, turn90, or file:PATH (JSON config)");
    if (with_k) {
      cmd->add_option("--k-aggr", flags.k_aggr, "aggressiveness index in [0,1]")
          ->each([&](const std::string&) { flags.k_set = true; });
    }
    cmd->add_option("--max-newton", flags.max_newton, "Newton iteration cap per stage");
    cmd->add_option("--grad-tol", flags.grad_tol, "stationarity tolerance");
    cmd->add_option("--step", flags.step, "grid step [s]");
    cmd->add_option("--seed", flags.seed, "seed for randomized validation suites");
  };

  CLI::App* solve = app.add_subcommand("solve", "run one constrained solve");
  add_common(solve, true);
  solve->add_option("--out", out_dir, "output directory");

  CLI::App* predict = app.add_subcommand(
      "predict", "closed-form descent angle, rendezvous space and time (no solver)");
  add_common(predict, false);
  predict->add_option("--k-aggr", ks, "comma-separated aggressiveness indices")
      ->delimiter(',');

  CLI::App* sweep = app.add_subcommand("sweep", "independent solves over k values");
  add_common(sweep, false);
  sweep->add_option("--k-aggr", ks, "comma-separated aggressiveness indices")
      ->delimiter(',');
  sweep->add_option("--out", out_dir, "output directory");

  CLI::App* validate = app.add_subcommand("validate", "run the invariant suites");
  validate->add_option("--fd-tol", fd_tol,
                       "relative tolerance for the finite-difference suites");
  validate->add_option("--seed", flags.seed, "seed for randomized suites");
  validate->add_flag("--mutate-ey", mutate_ey,
                     "test fixture: flip the lateral error derivative sign")
      ->group("");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return cmd_solve(flags, out_dir);
    if (predict->parsed()) return cmd_predict(flags, ks);
    if (sweep->parsed()) return cmd_sweep(flags, ks, out_dir);
    if (validate->parsed()) return cmd_validate(fd_tol, flags.seed, mutate_ey);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
