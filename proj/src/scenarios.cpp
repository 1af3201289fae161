#include "rendezvous/scenarios.hpp"

#include <cmath>
#include <set>

#include <json.hpp>

namespace rendezvous {

namespace {

using nlohmann::ordered_json;

double default_horizon(const RendezvousSpec& spec, const VehicleParams& params,
                       const Limits& limits, double step) {
  // Covers the slowest maneuver (k_aggr = 0) with margin, rounded up to the grid.
  RendezvousSpec slowest = spec;
  slowest.k_aggr = 0.0;
  slowest.T = spec.t0 + 1.0;  // placeholder; predicted_time ignores T
  const double t_end = spec.t0 + 1.3 * predicted_time(slowest, params, limits);
  return spec.t0 + std::ceil((t_end - spec.t0) / step) * step;
}

void derive_initial_states(Scenario& s) {
  const double chi = s.path.chi0();
  s.uav0 = UavState{s.path.x0(), s.path.y0(), s.spec.z0, s.spec.v0, 0.0, chi, 0.0};
  s.ugv0 = UgvState{s.path.x0(), s.path.y0(), s.spec.v0, chi};
}

Scenario preset_common() {
  Scenario s;
  s.params = VehicleParams::zagi();
  s.limits = Limits::standard();
  s.wind = Wind{-4.33, 2.5, 0.0};
  s.weights = Weights::defaults();
  s.solver = SolverOptions::defaults();
  s.grid_step = 0.05;
  s.spec.k_aggr = 0.0;
  s.spec.z0 = -50.0;
  s.spec.s_f = 2000.0;
  s.spec.v0 = 18.0;
  s.spec.vf = 1.15 * s.limits.v_min;
  s.spec.t0 = 50.0;
  s.spec.T = 0.0;  // filled below
  return s;
}

void finalize(Scenario& s, bool horizon_given) {
  if (!horizon_given) {
    s.spec.T = default_horizon(s.spec, s.params, s.limits, s.grid_step);
  }
  derive_initial_states(s);
}

void validate(const Scenario& s) {
  const auto fail = [](const std::string& key, const std::string& why) {
    throw ValidationError(key + ": " + why);
  };
  if (!(s.params.m > 0.0)) fail("params.m", "must be positive");
  if (!(s.params.S > 0.0)) fail("params.S", "must be positive");
  if (!(s.params.rho > 0.0)) fail("params.rho", "must be positive");
  if (!(s.params.g > 0.0)) fail("params.g", "must be positive");
  if (!(s.params.C_D0 > 0.0)) fail("params.C_D0", "must be positive");
  if (!(s.params.k_DL > 0.0)) fail("params.k_DL", "must be positive");

  if (!(s.limits.v_min < s.limits.v_max)) fail("limits.v_min", "requires v_min < v_max");
  if (!(s.limits.nlf_min < s.limits.nlf_max)) {
    fail("limits.nlf_min", "requires nlf_min < nlf_max");
  }
  if (!(s.limits.gamma_min < 0.0 && 0.0 < s.limits.gamma_max)) {
    fail("limits.gamma_min", "requires gamma_min < 0 < gamma_max");
  }
  if (!(s.limits.u1_max > 0.0)) fail("limits.u1_max", "must be positive");
  if (!(s.limits.phi_max > 0.0)) fail("limits.phi_max", "must be positive");
  if (!(s.limits.u2_max > 0.0)) fail("limits.u2_max", "must be positive");
  if (!(s.limits.u3_max > 0.0)) fail("limits.u3_max", "must be positive");
  if (!(s.limits.a_max > 0.0)) fail("limits.a_max", "must be positive");
  if (!(s.limits.ebar_x > 0.0 && s.limits.ebar_y > 0.0 && s.limits.ebar_z > 0.0 &&
        s.limits.ebar_chi > 0.0)) {
    fail("limits.ebar_x", "docking tolerances must be positive");
  }

  if (s.spec.k_aggr < 0.0 || s.spec.k_aggr > 1.0) {
    throw ValidationError("k_aggr out of [0,1]");
  }
  if (!(s.spec.z0 < 0.0)) fail("spec.z0", "must be negative (above ground)");
  if (!(s.spec.s_f > 0.0)) fail("spec.s_f", "must be positive");
  if (std::abs(s.spec.z0) > s.spec.s_f) fail("spec.z0", "|z0| must not exceed s_f");
  if (!(s.spec.vf >= s.limits.v_min && s.spec.vf < s.spec.v0)) {
    fail("vf", "must satisfy v_min <= vf < v0");
  }
  if (!(s.spec.v0 > 0.0)) fail("spec.v0", "must be positive");
  if (!(s.spec.t0 < s.spec.T)) fail("spec.t0", "requires t0 < T");

  for (int i = 0; i < 9; ++i) {
    if (s.weights.Q[i] < 0.0) fail("weights.Q", "must be nonnegative");
    if (s.weights.P1[i] < 0.0) fail("weights.P1", "must be nonnegative");
  }
  for (int i = 0; i < 4; ++i) {
    if (!(s.weights.R[i] > 0.0)) fail("weights.R", "must be strictly positive");
  }

  if (!(s.grid_step > 0.0)) fail("solver.step", "must be positive");
  if (!(s.solver.grad_tol > 0.0)) fail("solver.grad_tol", "must be positive");
  if (!(s.solver.step_tol > 0.0)) fail("solver.step_tol", "must be positive");
  if (s.solver.max_newton < 1) fail("solver.max_newton", "must be at least 1");
  const BarrierParams& bp = s.solver.barrier;
  if (!(bp.delta > 0.0)) fail("solver.barrier.delta", "must be positive");
  if (!(bp.mu > 0.0)) fail("solver.barrier.mu", "must be positive");
  if (!(bp.shrink > 0.0 && bp.shrink < 1.0)) {
    fail("solver.barrier.shrink", "must lie in (0,1)");
  }
  if (!(bp.delta_shrink > 0.0 && bp.delta_shrink <= 1.0)) {
    fail("solver.barrier.delta_shrink", "must lie in (0,1]");
  }
  if (bp.stages < 1) fail("solver.barrier.stages", "must be at least 1");
}

void check_keys(const ordered_json& j, const std::set<std::string>& allowed,
                const std::string& ctx) {
  for (const auto& item : j.items()) {
    if (allowed.find(item.key()) == allowed.end()) {
      throw ParseError(ctx + item.key() + ": unknown key");
    }
  }
}

void get_num(const ordered_json& j, const char* key, double& out) {
  if (!j.contains(key)) return;
  if (!j[key].is_number()) throw ParseError(std::string(key) + ": expected a number");
  out = j[key].get<double>();
}

void get_int(const ordered_json& j, const char* key, int& out) {
  if (!j.contains(key)) return;
  if (!j[key].is_number_integer()) {
    throw ParseError(std::string(key) + ": expected an integer");
  }
  out = j[key].get<int>();
}

template <int N>
void get_diag(const ordered_json& j, const char* key, Eigen::Matrix<double, N, 1>& out,
              const std::string& ctx) {
  if (!j.contains(key)) return;
  if (!j[key].is_array() || j[key].size() != N) {
    throw ParseError(ctx + key + ": expected an array of " + std::to_string(N) +
                     " numbers");
  }
  for (int i = 0; i < N; ++i) out[i] = j[key][i].get<double>();
}

}  // namespace

Scenario preset_straight() {
  Scenario s = preset_common();
  s.name = "straight";
  // Long single straight; covers any admissible horizon without extension.
  s.path = Path({{8000.0, 0.0}}, 0.0, 0.0, M_PI / 4.0);
  finalize(s, false);
  return s;
}

Scenario preset_turn90() {
  Scenario s = preset_common();
  s.name = "turn90";
  const double arc_len = 35.0 * M_PI / 2.0;
  s.path = Path({{1200.0, 0.0}, {arc_len, 1.0 / 35.0}, {1200.0, 0.0}}, 0.0, 0.0, 0.0);
  finalize(s, false);
  return s;
}

Scenario load_scenario(const std::string& json_text) {
  ordered_json j;
  try {
    j = ordered_json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("scenario config: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("scenario config: expected a JSON object");

  try {
    check_keys(j, {"scenario", "k_aggr", "wind", "params", "limits", "spec", "path",
                   "weights", "solver"},
               "");

    std::string base = "straight";
    if (j.contains("scenario")) {
      if (!j["scenario"].is_string()) throw ParseError("scenario: expected a string");
      base = j["scenario"].get<std::string>();
    }
    Scenario s;
    if (base == "straight") {
      s = preset_straight();
    } else if (base == "turn90") {
      s = preset_turn90();
    } else {
      throw ValidationError("scenario: unknown preset '" + base + "'");
    }

    get_num(j, "k_aggr", s.spec.k_aggr);

    if (j.contains("wind")) {
      check_keys(j["wind"], {"wx", "wy", "wz"}, "wind.");
      get_num(j["wind"], "wx", s.wind.w_x);
      get_num(j["wind"], "wy", s.wind.w_y);
      get_num(j["wind"], "wz", s.wind.w_z);
    }
    if (j.contains("params")) {
      check_keys(j["params"], {"m", "S", "rho", "g", "C_D0", "k_DL"}, "params.");
      get_num(j["params"], "m", s.params.m);
      get_num(j["params"], "S", s.params.S);
      get_num(j["params"], "rho", s.params.rho);
      get_num(j["params"], "g", s.params.g);
      get_num(j["params"], "C_D0", s.params.C_D0);
      get_num(j["params"], "k_DL", s.params.k_DL);
    }
    if (j.contains("limits")) {
      check_keys(j["limits"],
                 {"v_min", "v_max", "nlf_min", "nlf_max", "gamma_min", "gamma_max",
                  "u1_max", "phi_max", "u2_max", "u3_max", "a_max", "ebar_x", "ebar_y",
                  "ebar_z", "ebar_chi"},
                 "limits.");
      const ordered_json& l = j["limits"];
      get_num(l, "v_min", s.limits.v_min);
      get_num(l, "v_max", s.limits.v_max);
      get_num(l, "nlf_min", s.limits.nlf_min);
      get_num(l, "nlf_max", s.limits.nlf_max);
      get_num(l, "gamma_min", s.limits.gamma_min);
      get_num(l, "gamma_max", s.limits.gamma_max);
      get_num(l, "u1_max", s.limits.u1_max);
      get_num(l, "phi_max", s.limits.phi_max);
      get_num(l, "u2_max", s.limits.u2_max);
      get_num(l, "u3_max", s.limits.u3_max);
      get_num(l, "a_max", s.limits.a_max);
      get_num(l, "ebar_x", s.limits.ebar_x);
      get_num(l, "ebar_y", s.limits.ebar_y);
      get_num(l, "ebar_z", s.limits.ebar_z);
      get_num(l, "ebar_chi", s.limits.ebar_chi);
    }
    bool horizon_given = false;
    if (j.contains("spec")) {
      check_keys(j["spec"], {"z0", "s_f", "v0", "vf", "t0", "T"}, "spec.");
      const ordered_json& sp = j["spec"];
      get_num(sp, "z0", s.spec.z0);
      get_num(sp, "s_f", s.spec.s_f);
      get_num(sp, "v0", s.spec.v0);
      get_num(sp, "vf", s.spec.vf);
      get_num(sp, "t0", s.spec.t0);
      if (sp.contains("T")) {
        get_num(sp, "T", s.spec.T);
        horizon_given = true;
      }
    }
    if (j.contains("path")) {
      check_keys(j["path"], {"x0", "y0", "chi0", "segments"}, "path.");
      double x0 = 0.0, y0 = 0.0, chi0 = 0.0;
      get_num(j["path"], "x0", x0);
      get_num(j["path"], "y0", y0);
      get_num(j["path"], "chi0", chi0);
      if (!j["path"].contains("segments") || !j["path"]["segments"].is_array() ||
          j["path"]["segments"].empty()) {
        throw ParseError("path.segments: expected a non-empty array");
      }
      std::vector<PathSegment> segs;
      for (const auto& seg : j["path"]["segments"]) {
        check_keys(seg, {"length", "curvature"}, "path.segments.");
        PathSegment ps{0.0, 0.0};
        get_num(seg, "length", ps.length);
        get_num(seg, "curvature", ps.curvature);
        segs.push_back(ps);
      }
      s.path = Path(std::move(segs), x0, y0, chi0);
    }
    if (j.contains("weights")) {
      check_keys(j["weights"], {"Q", "R", "P1"}, "weights.");
      get_diag<9>(j["weights"], "Q", s.weights.Q, "weights.");
      get_diag<4>(j["weights"], "R", s.weights.R, "weights.");
      get_diag<9>(j["weights"], "P1", s.weights.P1, "weights.");
    }
    if (j.contains("solver")) {
      check_keys(j["solver"],
                 {"max_newton", "grad_tol", "step_tol", "step", "barrier", "lqr_q",
                  "lqr_r"},
                 "solver.");
      const ordered_json& so = j["solver"];
      get_int(so, "max_newton", s.solver.max_newton);
      get_num(so, "grad_tol", s.solver.grad_tol);
      get_num(so, "step_tol", s.solver.step_tol);
      get_num(so, "step", s.grid_step);
      if (so.contains("barrier")) {
        check_keys(so["barrier"], {"delta", "mu", "shrink", "stages", "delta_shrink"},
                   "solver.barrier.");
        get_num(so["barrier"], "delta", s.solver.barrier.delta);
        get_num(so["barrier"], "mu", s.solver.barrier.mu);
        get_num(so["barrier"], "shrink", s.solver.barrier.shrink);
        get_int(so["barrier"], "stages", s.solver.barrier.stages);
        get_num(so["barrier"], "delta_shrink", s.solver.barrier.delta_shrink);
      }
      get_diag<9>(so, "lqr_q", s.solver.lqr_q, "solver.");
      get_diag<4>(so, "lqr_r", s.solver.lqr_r, "solver.");
    }

    finalize(s, horizon_given);
    validate(s);
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("scenario config: ") + e.what());
  }
}

std::string scenario_to_json(const Scenario& s) {
  ordered_json j;
  j["scenario"] = s.name;
  j["k_aggr"] = s.spec.k_aggr;
  j["wind"] = {{"wx", s.wind.w_x}, {"wy", s.wind.w_y}, {"wz", s.wind.w_z}};
  j["params"] = {{"m", s.params.m},       {"S", s.params.S},
                 {"rho", s.params.rho},   {"g", s.params.g},
                 {"C_D0", s.params.C_D0}, {"k_DL", s.params.k_DL}};
  j["limits"] = {{"v_min", s.limits.v_min},         {"v_max", s.limits.v_max},
                 {"nlf_min", s.limits.nlf_min},     {"nlf_max", s.limits.nlf_max},
                 {"gamma_min", s.limits.gamma_min}, {"gamma_max", s.limits.gamma_max},
                 {"u1_max", s.limits.u1_max},       {"phi_max", s.limits.phi_max},
                 {"u2_max", s.limits.u2_max},       {"u3_max", s.limits.u3_max},
                 {"a_max", s.limits.a_max},         {"ebar_x", s.limits.ebar_x},
                 {"ebar_y", s.limits.ebar_y},       {"ebar_z", s.limits.ebar_z},
                 {"ebar_chi", s.limits.ebar_chi}};
  j["spec"] = {{"z0", s.spec.z0}, {"s_f", s.spec.s_f}, {"v0", s.spec.v0},
               {"vf", s.spec.vf}, {"t0", s.spec.t0},   {"T", s.spec.T}};
  ordered_json segments = ordered_json::array();
  for (const PathSegment& seg : s.path.segments()) {
    segments.push_back({{"length", seg.length}, {"curvature", seg.curvature}});
  }
  j["path"] = {{"x0", s.path.x0()},
               {"y0", s.path.y0()},
               {"chi0", s.path.chi0()},
               {"segments", segments}};
  j["weights"] = {{"Q", std::vector<double>(s.weights.Q.data(), s.weights.Q.data() + 9)},
                  {"R", std::vector<double>(s.weights.R.data(), s.weights.R.data() + 4)},
                  {"P1", std::vector<double>(s.weights.P1.data(), s.weights.P1.data() + 9)}};
  j["solver"] = {
      {"max_newton", s.solver.max_newton},
      {"grad_tol", s.solver.grad_tol},
      {"step_tol", s.solver.step_tol},
      {"step", s.grid_step},
      {"barrier",
       {{"delta", s.solver.barrier.delta},
        {"mu", s.solver.barrier.mu},
        {"shrink", s.solver.barrier.shrink},
        {"stages", s.solver.barrier.stages},
        {"delta_shrink", s.solver.barrier.delta_shrink}}},
      {"lqr_q", std::vector<double>(s.solver.lqr_q.data(), s.solver.lqr_q.data() + 9)},
      {"lqr_r", std::vector<double>(s.solver.lqr_r.data(), s.solver.lqr_r.data() + 4)}};
  return j.dump(2);
}

}  // namespace rendezvous
