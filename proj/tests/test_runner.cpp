#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "rendezvous/runner.hpp"

using namespace rendezvous;

namespace {

// Small straight-line rendezvous that solves in a few seconds.
Scenario small_scenario() {
  return load_scenario(R"({
    "scenario": "straight",
    "k_aggr": 0.5,
    "spec": {"z0": -15.0, "s_f": 500.0, "t0": 5.0, "T": 45.0}
  })");
}

}  // namespace

TEST_CASE("run_solve artifacts are consistent") {
  const SolveArtifacts art = run_solve(small_scenario());

  CHECK(art.report.status == "converged");
  CHECK(art.report.reintegration_defect < 1e-8);
  CHECK(art.report.worst_residual <= 1e-3);

  // The full curve prepends the quiescent lead-in and carries the optimized
  // segment verbatim.
  CHECK(art.full.grid.t_start == 0.0);
  CHECK(art.full.grid.t_end() == doctest::Approx(art.scenario.spec.T));
  const int lead = art.full.grid.nodes - art.trajectory.grid.nodes;
  CHECK(art.full.grid.time(lead) == doctest::Approx(art.scenario.spec.t0));
  for (int k = 0; k < art.trajectory.grid.nodes; ++k) {
    CHECK(art.full.x[lead + k] == art.trajectory.x[k]);
  }

  // Summary metrics are recomputable from the serialized trajectory.
  std::stringstream csv;
  write_trajectory_csv(csv, art.full, art.scenario.path, art.scenario.wind,
                       art.scenario.params);
  const Curve back = read_trajectory_csv(csv);
  const double t_rdv = extract_rendezvous_time(back, art.scenario.spec.t0);
  CHECK(t_rdv == doctest::Approx(art.report.rendezvous_time).epsilon(1e-9));

  // Reports serialize to parseable JSON.
  const std::string report = report_to_json(art.report);
  CHECK(report.find("\"status\": \"converged\"") != std::string::npos);
  const std::string manifest =
      manifest_to_json(art.scenario, art.report, {"trajectory.csv"});
  CHECK(manifest.find("\"rendezvous_time\"") != std::string::npos);
}

TEST_CASE("identical scenarios solve to bit-identical serializations") {
  const SolveArtifacts a = run_solve(small_scenario());
  const SolveArtifacts b = run_solve(small_scenario());

  std::stringstream csv_a, csv_b;
  write_trajectory_csv(csv_a, a.full, a.scenario.path, a.scenario.wind,
                       a.scenario.params);
  write_trajectory_csv(csv_b, b.full, b.scenario.path, b.scenario.wind,
                       b.scenario.params);
  CHECK(csv_a.str() == csv_b.str());
  CHECK(report_to_json(a.report) == report_to_json(b.report));
}

TEST_CASE("sweep rows come back in input order with per-k results") {
  Scenario base = small_scenario();
  std::vector<SolveArtifacts> artifacts;
  const std::vector<double> ks{0.2, 0.8};
  const auto rows = run_sweep(base, ks, 2, &artifacts);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].k == 0.2);
  CHECK(rows[1].k == 0.8);
  CHECK(rows[0].status == "converged");
  CHECK(rows[1].status == "converged");
  // More aggressive descents rendezvous sooner.
  CHECK(rows[1].achieved < rows[0].achieved);
  CHECK(rows[1].predicted < rows[0].predicted);
  CHECK(artifacts[0].scenario.spec.k_aggr == 0.2);
}
