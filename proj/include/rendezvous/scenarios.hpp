#pragma once

#include <string>

#include "rendezvous/guidance.hpp"
#include "rendezvous/path.hpp"
#include "rendezvous/trajopt.hpp"

// Scenario presets matching the reference computations, and JSON
// configuration ingestion.

namespace rendezvous {

struct Scenario {
  std::string name;  // "straight", "turn90", or the config file stem
  Path path;
  Wind wind;
  VehicleParams params;
  Limits limits;
  RendezvousSpec spec;
  UavState uav0;  // derived from the path start and spec, kept for inspection
  UgvState ugv0;
  Weights weights;
  SolverOptions solver;
  double grid_step{0.05};
};

// UGV on a straight line; UAV aligned overhead at -50 m, course pi/4,
// planar wind (-4.33, 2.5, 0), maneuver start t0 = 50 s.
Scenario preset_straight();

// 1200 m straight, 90-degree turn of radius 35 m, 1200 m straight; course 0.
Scenario preset_turn90();

// Parses and validates a JSON scenario document. Unspecified fields take the
// preset defaults; unknown keys are rejected; validation failures name the
// offending key.
Scenario load_scenario(const std::string& json_text);

// Resolved scenario echo (used by the run manifest).
std::string scenario_to_json(const Scenario& scenario);

}  // namespace rendezvous
