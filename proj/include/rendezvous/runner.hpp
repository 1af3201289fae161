#pragma once

#include <string>
#include <vector>

#include "rendezvous/scenarios.hpp"

// Orchestration shared by the CLI and the acceptance suite: single solves,
// aggressiveness sweeps, and artifact serialization.

namespace rendezvous {

struct SolveArtifacts {
  Scenario scenario;      // resolved, path possibly extended
  Trajectory trajectory;  // optimized segment on [t0, T]
  Curve full;             // quiescent lead-in [0, t0) prepended, for plots/CSV
  Curve desired;          // desired curve on the optimization grid
  SolverReport report;
};

// First t > t0 with -e_z <= 0.1 m, linearly interpolated between nodes,
// reported as t - t0. NaN when the trajectory never reaches the threshold.
double extract_rendezvous_time(const Curve& traj, double t0);

// Runs one solve for the scenario's aggressiveness index.
SolveArtifacts run_solve(Scenario scenario);

struct SweepEntry {
  double k;
  std::string status;  // "converged", "max_iterations", or "error: ..."
  double predicted;
  double achieved;
  int iterations;
  double worst_residual;
};

// Independent solves over a list of aggressiveness indices; rows come back in
// input order. threads <= 0 picks the hardware default.
std::vector<SweepEntry> run_sweep(const Scenario& base, const std::vector<double>& ks,
                                  int threads, std::vector<SolveArtifacts>* artifacts);

// Serialization helpers.
std::string report_to_json(const SolverReport& report);
std::string manifest_to_json(const Scenario& scenario, const SolverReport& report,
                             const std::vector<std::string>& outputs);

}  // namespace rendezvous
