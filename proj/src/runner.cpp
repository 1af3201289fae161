#include "rendezvous/runner.hpp"

#include <cmath>
#include <cstdlib>
#include <ctime>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "rendezvous/version.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rendezvous {

namespace {

using nlohmann::ordered_json;

TimeGrid optimization_grid(const Scenario& s) {
  const int steps = static_cast<int>(std::round((s.spec.T - s.spec.t0) / s.grid_step));
  if (steps < 1) {
    throw ValidationError("spec.T: horizon leaves no room for the maneuver");
  }
  return TimeGrid{s.spec.t0, s.grid_step, steps + 1};
}

}  // namespace

double extract_rendezvous_time(const Curve& traj, double t0) {
  constexpr double kThreshold = -0.1;  // e_z >= -0.1 m counts as touchdown
  for (int k = 1; k < traj.grid.nodes; ++k) {
    const double t = traj.grid.time(k);
    if (t <= t0) continue;
    const double ez = traj.x[k][2];
    if (ez >= kThreshold) {
      const double ez_prev = traj.x[k - 1][2];
      double t_cross = t;
      if (ez > kThreshold && ez_prev < kThreshold) {
        const double frac = (kThreshold - ez_prev) / (ez - ez_prev);
        t_cross = traj.grid.time(k - 1) + frac * traj.grid.h;
      }
      return std::max(t_cross, t0) - t0;
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

SolveArtifacts run_solve(Scenario scenario) {
  SolveArtifacts art;
  art.scenario = std::move(scenario);
  Scenario& s = art.scenario;

  // Terminal straight extension so a solve never runs off the path end.
  const double required = 1.5 * s.spec.v0 * s.spec.T + 500.0;
  if (s.path.extend_to(required)) {
    std::ostringstream warning;
    warning << "warning: path extended with a terminal straight segment to " << required
            << " m to cover the horizon\n";
    std::cerr << warning.str();
  }

  const TimeGrid grid = optimization_grid(s);
  art.desired = desired_curve(s.spec, s.path, s.wind, s.params, s.limits, grid);
  const Trajectory initial =
      initial_trajectory(s.spec, s.path, s.wind, s.params, s.limits, grid);

  const CoupledModel model(s.path, s.wind, s.params);
  const ConstraintSet constraints(s.limits, s.path, s.wind, s.params);

  SolveOutput out =
      solve_tracking(model, &constraints, art.desired, initial, s.weights, s.solver);
  art.trajectory = std::move(out.trajectory);
  art.report = std::move(out.report);
  art.report.predicted_time = predicted_time(s.spec, s.params, s.limits);
  art.report.rendezvous_time = extract_rendezvous_time(art.trajectory, s.spec.t0);

  // Quiescent lead-in [0, t0) for plot-ready output spanning the full run.
  const int lead_steps = static_cast<int>(std::round(s.spec.t0 / s.grid_step));
  art.full.grid = TimeGrid{0.0, s.grid_step, lead_steps + grid.nodes};
  art.full.anchor = UgvState{s.path.x0(), s.path.y0(), s.spec.v0, s.path.chi0()};
  art.full.x.reserve(art.full.grid.nodes);
  art.full.u.reserve(art.full.grid.nodes);
  const double chi_A0 = s.path.heading(0.0);
  const AirData air0 = wind_triangle(s.spec.v0, chi_A0, 0.0, s.wind);
  const TrimInputs trim0 = trim_level(air0.v_a, s.params, s.limits);
  for (int k = 0; k < lead_steps; ++k) {
    Vec9 x;
    x << 0.0, 0.0, s.spec.z0, 0.0, 0.0, 0.0, 0.0, s.spec.v0,
        s.spec.v0 * art.full.grid.time(k);
    Vec4 u;
    u << trim0.u1, 0.0, trim0.u3, 0.0;
    art.full.x.push_back(x);
    art.full.u.push_back(u);
  }
  for (int k = 0; k < grid.nodes; ++k) {
    art.full.x.push_back(art.trajectory.x[k]);
    art.full.u.push_back(art.trajectory.u[k]);
  }
  return art;
}

std::vector<SweepEntry> run_sweep(const Scenario& base, const std::vector<double>& ks,
                                  int threads, std::vector<SolveArtifacts>* artifacts) {
  const int n = static_cast<int>(ks.size());
  std::vector<SweepEntry> rows(n);
  if (artifacts != nullptr) artifacts->resize(n);

#ifdef _OPENMP
  int max_threads = omp_get_max_threads();
  if (const char* env = std::getenv("RENDEZVOUS_NUM_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) max_threads = cap;
  }
  if (threads > 0) max_threads = threads;
  const int team = std::min(n, max_threads);
#else
  const int team = 1;
  (void)threads;
#endif

#pragma omp parallel for schedule(dynamic, 1) num_threads(team)
  for (int i = 0; i < n; ++i) {
    SweepEntry row;
    row.k = ks[i];
    try {
      Scenario s = base;
      s.spec.k_aggr = ks[i];
      SolveArtifacts art = run_solve(std::move(s));
      row.status = art.report.status;
      row.predicted = art.report.predicted_time;
      row.achieved = art.report.rendezvous_time;
      row.iterations = art.report.total_iterations;
      row.worst_residual = art.report.worst_residual;
      if (artifacts != nullptr) (*artifacts)[i] = std::move(art);
    } catch (const std::exception& e) {
      row.status = std::string("error: ") + e.what();
      row.predicted = std::numeric_limits<double>::quiet_NaN();
      row.achieved = std::numeric_limits<double>::quiet_NaN();
      row.iterations = 0;
      row.worst_residual = std::numeric_limits<double>::quiet_NaN();
    }
    rows[i] = std::move(row);
  }
  return rows;
}

std::string report_to_json(const SolverReport& report) {
  ordered_json j;
  j["status"] = report.status;
  j["final_cost"] = report.final_cost;
  j["total_iterations"] = report.total_iterations;
  j["rendezvous_time"] = report.rendezvous_time;
  j["predicted_time"] = report.predicted_time;
  j["worst_residual"] = report.worst_residual;
  j["reintegration_defect"] = report.reintegration_defect;
  ordered_json stages = ordered_json::array();
  for (const StageRecord& stage : report.stages) {
    ordered_json iters = ordered_json::array();
    for (const IterationRecord& it : stage.iterations) {
      iters.push_back({{"cost", it.cost},
                       {"barrier_mu", it.barrier_mu},
                       {"grad_norm", it.grad_norm},
                       {"step", it.step}});
    }
    stages.push_back(
        {{"mu", stage.mu}, {"delta", stage.delta}, {"iterations", iters}});
  }
  j["stages"] = stages;
  ordered_json activity = ordered_json::array();
  for (const ConstraintActivity& a : report.activity) {
    ordered_json intervals = ordered_json::array();
    for (const auto& iv : a.intervals) intervals.push_back({iv.first, iv.second});
    activity.push_back({{"constraint", a.constraint},
                        {"intervals", intervals},
                        {"worst_residual", a.worst_residual}});
  }
  j["activity"] = activity;
  return j.dump(2);
}

std::string manifest_to_json(const Scenario& scenario, const SolverReport& report,
                             const std::vector<std::string>& outputs) {
  ordered_json j;
  j["tool"] = "rendezvous";
  j["version"] = kVersion;
  std::time_t now = std::time(nullptr);
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    now = static_cast<std::time_t>(std::atoll(epoch));
  }
  char stamp[32];
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  j["timestamp"] = stamp;
  j["scenario"] = ordered_json::parse(scenario_to_json(scenario));
  j["outputs"] = outputs;
  ordered_json summary;
  summary["status"] = report.status;
  summary["rendezvous_time"] = report.rendezvous_time;
  summary["predicted_time"] = report.predicted_time;
  summary["final_cost"] = report.final_cost;
  summary["iterations"] = report.total_iterations;
  summary["worst_residual"] = report.worst_residual;
  ordered_json active = ordered_json::array();
  for (const ConstraintActivity& a : report.activity) active.push_back(a.constraint);
  summary["active_constraints"] = active;
  j["summary"] = summary;
  return j.dump(2);
}

}  // namespace rendezvous
