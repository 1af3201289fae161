#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>

#include "rendezvous/scenarios.hpp"

using namespace rendezvous;

namespace {

double simpson_fixed(const std::function<double(double)>& f, double a, double b, int n) {
  double sum = f(a) + f(b);
  const double h = (b - a) / n;
  for (int i = 1; i < n; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return sum * h / 3.0;
}

}  // namespace

TEST_CASE("path lookup") {
  SUBCASE("straight segment advances linearly") {
    const Path path({{100.0, 0.0}}, 2.0, 3.0, 0.5);
    const PathPose pose = path.lookup(40.0);
    CHECK(pose.sigma == 0.0);
    CHECK(pose.chi == 0.5);
    CHECK(pose.x == doctest::Approx(2.0 + 40.0 * std::cos(0.5)).epsilon(1e-15));
    CHECK(pose.y == doctest::Approx(3.0 + 40.0 * std::sin(0.5)).epsilon(1e-15));
  }
  SUBCASE("quarter arc turns the heading by pi/2 exactly") {
    const double arc_len = 35.0 * M_PI / 2.0;
    const Path path({{arc_len, 1.0 / 35.0}}, 0.0, 0.0, 0.0);
    CHECK(path.heading(arc_len) == doctest::Approx(M_PI / 2.0).epsilon(1e-15));
  }
  SUBCASE("turn-scenario lookup mid-arc") {
    const double arc_len = 35.0 * M_PI / 2.0;
    const Path path({{1200.0, 0.0}, {arc_len, 1.0 / 35.0}, {1200.0, 0.0}}, 0, 0, 0.0);
    const double s = 1200.0 + 35.0 * M_PI / 4.0;
    const PathPose pose = path.lookup(s);
    CHECK(pose.chi == doctest::Approx(M_PI / 4.0).epsilon(1e-14));
    // Circle geometry: center at (1200, 35).
    CHECK(pose.x == doctest::Approx(1200.0 + 35.0 * std::sin(M_PI / 4.0)).epsilon(1e-13));
    CHECK(pose.y == doctest::Approx(35.0 * (1.0 - std::cos(M_PI / 4.0))).epsilon(1e-13));
    CHECK(pose.sigma == doctest::Approx(1.0 / 35.0));
    CHECK(path.curvature(1210.0) == doctest::Approx(1.0 / 35.0));
  }
  SUBCASE("heading is continuous across joints, curvature may jump") {
    const Path path({{100.0, 0.0}, {50.0, 0.02}, {100.0, 0.0}}, 0, 0, 0.0);
    const double eps = 1e-9;
    for (double joint : {100.0, 150.0}) {
      CHECK(std::abs(path.heading(joint + eps) - path.heading(joint - eps)) < 1e-7);
    }
    CHECK(path.curvature(100.0 - eps) == 0.0);
    CHECK(path.curvature(100.0 + eps) == 0.02);
  }
  SUBCASE("position equals numeric integration of the heading") {
    // Integrated segment by segment so the quadrature never straddles a
    // heading-slope corner.
    const Path path({{120.0, 0.0}, {80.0, -0.015}, {60.0, 0.03}}, 1.0, -2.0, 0.4);
    const double starts[] = {0.0, 120.0, 200.0};
    for (double s : {30.0, 130.0, 150.0, 220.0, 259.9}) {
      double x_num = 1.0, y_num = -2.0;
      for (int seg = 0; seg < 3; ++seg) {
        const double a = starts[seg];
        if (s <= a) break;
        const double b = std::min(s, seg < 2 ? starts[seg + 1] : 260.0);
        x_num += simpson_fixed([&](double q) { return std::cos(path.heading(q)); }, a, b,
                               4000);
        y_num += simpson_fixed([&](double q) { return std::sin(path.heading(q)); }, a, b,
                               4000);
      }
      const PathPose pose = path.lookup(s);
      CHECK(std::abs(pose.x - x_num) < 1e-9);
      CHECK(std::abs(pose.y - y_num) < 1e-9);
    }
  }
  SUBCASE("out-of-range queries throw") {
    const Path path({{100.0, 0.0}}, 0, 0, 0.0);
    CHECK_THROWS_AS(path.lookup(-1.0), RangeError);
    CHECK_THROWS_AS(path.lookup(100.5), RangeError);
    CHECK_NOTHROW(path.lookup(100.0));
  }
  SUBCASE("terminal extension preserves the end pose") {
    Path path({{100.0, 0.01}}, 0, 0, 0.0);
    const PathPose end = path.lookup(100.0);
    CHECK(path.extend_to(150.0));
    CHECK_FALSE(path.extend_to(120.0));
    const PathPose ext = path.lookup(120.0);
    CHECK(ext.chi == doctest::Approx(end.chi).epsilon(1e-15));
    CHECK(ext.x == doctest::Approx(end.x + 20.0 * std::cos(end.chi)).epsilon(1e-12));
    CHECK(ext.sigma == 0.0);
  }
}

TEST_CASE("preset literals") {
  SUBCASE("straight") {
    const Scenario s = preset_straight();
    CHECK(s.spec.s_f == 2000.0);
    CHECK(s.spec.v0 == 18.0);
    CHECK(s.spec.vf == doctest::Approx(13.8).epsilon(1e-14));
    CHECK(s.spec.t0 == 50.0);
    CHECK(s.spec.z0 == -50.0);
    CHECK(s.wind.w_x == -4.33);
    CHECK(s.wind.w_y == 2.5);
    CHECK(s.wind.w_z == 0.0);
    CHECK(s.path.chi0() == doctest::Approx(M_PI / 4.0));
    CHECK(s.uav0.chi_A == doctest::Approx(M_PI / 4.0));
    CHECK(s.uav0.z_A == -50.0);
    CHECK(s.uav0.gamma_A == 0.0);
    CHECK(s.uav0.phi_A == 0.0);
    CHECK(s.ugv0.x_G == 0.0);
    CHECK(s.ugv0.y_G == 0.0);
    CHECK(s.params.m == 1.56);
    CHECK(s.params.S == 0.2589);
    CHECK(s.limits.v_min == 12.0);
    CHECK(s.limits.v_max == 20.0);
    CHECK(s.limits.u1_max == 2.0);
    CHECK(s.limits.a_max == 3.0);
    CHECK(s.limits.ebar_chi == doctest::Approx(2.0 * M_PI / 180.0));
    CHECK(s.spec.T > s.spec.t0 + 126.5);  // horizon covers the slowest maneuver
  }
  SUBCASE("turn90") {
    const Scenario s = preset_turn90();
    CHECK(s.path.segments().size() == 3);
    CHECK(s.path.total_length() ==
          doctest::Approx(2400.0 + 35.0 * M_PI / 2.0).epsilon(1e-12));
    CHECK(s.path.curvature(1210.0) == doctest::Approx(1.0 / 35.0));
    CHECK(s.uav0.chi_A == 0.0);
    CHECK(s.spec.s_f == 2000.0);
    CHECK(s.spec.vf == doctest::Approx(13.8).epsilon(1e-14));
  }
}

TEST_CASE("load_scenario") {
  SUBCASE("minimal config equals the preset") {
    const Scenario s = load_scenario(R"({"scenario": "straight"})");
    const Scenario p = preset_straight();
    CHECK(s.spec.k_aggr == p.spec.k_aggr);
    CHECK(s.spec.T == p.spec.T);
    CHECK(s.wind.w_x == p.wind.w_x);
    CHECK(s.weights.Q == p.weights.Q);
    CHECK(s.path.total_length() == p.path.total_length());
  }
  SUBCASE("final speed below stall is rejected by name") {
    try {
      load_scenario(R"({"scenario": "straight", "spec": {"vf": 10.0}})");
      FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find("vf") != std::string::npos);
    }
  }
  SUBCASE("wind override keeps everything else") {
    const Scenario s = load_scenario(
        R"({"scenario": "straight", "wind": {"wx": 0.0, "wy": 0.0, "wz": 0.0}})");
    CHECK(s.wind.w_x == 0.0);
    CHECK(s.wind.w_y == 0.0);
    CHECK(s.spec.v0 == 18.0);
  }
  SUBCASE("unknown keys are rejected") {
    try {
      load_scenario(R"({"scenario": "straight", "winds": {}})");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("winds") != std::string::npos);
    }
    CHECK_THROWS_AS(load_scenario(R"({"spec": {"zz0": 1.0}})"), ParseError);
  }
  SUBCASE("aggressiveness index is validated") {
    try {
      load_scenario(R"({"scenario": "straight", "k_aggr": 1.5})");
      FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find("k_aggr out of [0,1]") != std::string::npos);
    }
  }
  SUBCASE("malformed json is a parse error") {
    CHECK_THROWS_AS(load_scenario("{ not json"), ParseError);
    CHECK_THROWS_AS(load_scenario(R"({"k_aggr": "high"})"), ParseError);
  }
  SUBCASE("custom path and weights") {
    const Scenario s = load_scenario(R"({
      "scenario": "turn90",
      "path": {"x0": 1.0, "y0": 2.0, "chi0": 0.1,
               "segments": [{"length": 3000.0, "curvature": 0.0}]},
      "weights": {"Q": [1,1,1,1,1,1,1,1,0]},
      "solver": {"barrier": {"stages": 4}}
    })");
    CHECK(s.path.total_length() == 3000.0);
    CHECK(s.path.x0() == 1.0);
    CHECK(s.weights.Q[2] == 1.0);
    CHECK(s.solver.barrier.stages == 4);
    CHECK(s.uav0.x_A == 1.0);  // initial poses re-derived from the path
    CHECK(s.uav0.chi_A == doctest::Approx(0.1));
  }
  SUBCASE("resolved scenario echo parses back") {
    const Scenario s = preset_turn90();
    const Scenario back = load_scenario(scenario_to_json(s));
    CHECK(back.spec.T == s.spec.T);
    CHECK(back.path.total_length() == doctest::Approx(s.path.total_length()));
    CHECK(back.solver.barrier.stages == s.solver.barrier.stages);
  }
}
