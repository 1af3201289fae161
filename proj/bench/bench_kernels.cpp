// Timing comparison of the serial reference kernels against their OpenMP
// variants on a full-size trajectory.

#include <chrono>
#include <cstdio>

#include "rendezvous/batch.hpp"
#include "rendezvous/runner.hpp"

using namespace rendezvous;
using Clock = std::chrono::steady_clock;

namespace {

template <class Fn>
double time_ms(const Fn& fn, int reps) {
  fn();  // warm up
  const auto start = Clock::now();
  for (int i = 0; i < reps; ++i) fn();
  const auto stop = Clock::now();
  return std::chrono::duration<double, std::milli>(stop - start).count() / reps;
}

}  // namespace

int main() {
  Scenario s = preset_turn90();
  s.path.extend_to(1.5 * s.spec.v0 * s.spec.T + 500.0);
  const TimeGrid grid{s.spec.t0, s.grid_step,
                      static_cast<int>(std::round((s.spec.T - s.spec.t0) / s.grid_step)) + 1};

  const Trajectory traj =
      initial_trajectory(s.spec, s.path, s.wind, s.params, s.limits, grid);
  const Curve desired = desired_curve(s.spec, s.path, s.wind, s.params, s.limits, grid);
  const CoupledModel model(s.path, s.wind, s.params);
  const ConstraintSet constraints(s.limits, s.path, s.wind, s.params);

  std::printf("trajectory nodes: %d\n", grid.nodes);
  std::printf("%-22s %12s %12s %8s\n", "kernel", "serial [ms]", "openmp [ms]", "speedup");

  const int reps = 5;
  struct Row {
    const char* name;
    double serial;
    double parallel;
  };
  const Row rows[] = {
      {"discrete_jacobians",
       time_ms([&] { discrete_jacobians(model, traj, Exec::Serial); }, reps),
       time_ms([&] { discrete_jacobians(model, traj, Exec::Parallel); }, reps)},
      {"linearize_along",
       time_ms([&] { linearize_along(model, traj, Exec::Serial); }, reps),
       time_ms([&] { linearize_along(model, traj, Exec::Parallel); }, reps)},
      {"cost_quadratics",
       time_ms(
           [&] {
             cost_quadratics(traj, desired, s.weights, &constraints, 0.1, 0.05,
                             Exec::Serial);
           },
           reps),
       time_ms(
           [&] {
             cost_quadratics(traj, desired, s.weights, &constraints, 0.1, 0.05,
                             Exec::Parallel);
           },
           reps)},
      {"cost_terms",
       time_ms(
           [&] {
             cost_terms(traj, desired, s.weights, &constraints, 0.1, 0.05, Exec::Serial);
           },
           reps),
       time_ms(
           [&] {
             cost_terms(traj, desired, s.weights, &constraints, 0.1, 0.05,
                        Exec::Parallel);
           },
           reps)},
      {"residual_table",
       time_ms([&] { residual_table(traj, constraints, Exec::Serial); }, reps),
       time_ms([&] { residual_table(traj, constraints, Exec::Parallel); }, reps)},
  };
  for (const Row& row : rows) {
    std::printf("%-22s %12.2f %12.2f %8.2fx\n", row.name, row.serial, row.parallel,
                row.serial / row.parallel);
  }
  return 0;
}
