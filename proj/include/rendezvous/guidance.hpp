#pragma once

#include "rendezvous/error_space.hpp"

// Aggressiveness-indexed desired flight-path angle, rendezvous space, desired
// speed/vertical profiles, space-to-time mapping, closed-form rendezvous-time
// prediction, the desired curve, and the dynamically feasible initial
// trajectory.

namespace rendezvous {

struct RendezvousSpec {
  double k_aggr;  // aggressiveness index in [0, 1]
  double z0;      // initial UAV altitude coordinate [m], negative above ground
  double s_f;     // maximum rendezvous space [m]
  double v0;      // initial ground speed [m/s]
  double vf;      // final rendezvous speed [m/s]
  double t0;      // maneuver start time [s]
  double T;       // horizon end [s]
};

// Gentlest feasible descent: the rendezvous completes exactly at s_f.
double gamma_zero(double z0, double s_f);

// Affine interpolation between the gentlest (gamma0) and the zero-thrust
// steepest (gamma1) descent angles.
double desired_gamma(double k_aggr, double gamma0, double gamma1);

// Arc length over which the desired descent brings the vertical error to zero.
double rendezvous_space(double z0, double gamma_d);

// Closed-form desired profiles for one rendezvous spec. Space arguments are
// measured from the maneuver start; time arguments from t0.
class DesiredProfiles {
 public:
  DesiredProfiles(const RendezvousSpec& spec, const VehicleParams& params,
                  const Limits& limits);

  double gamma_d() const { return gamma_d_; }
  double gamma0() const { return gamma0_; }
  double gamma1() const { return gamma1_; }
  double s_r() const { return s_r_; }
  double rendezvous_time() const { return T_r_; }  // T_r^d

  // v^d(s): affine from v0 at s = 0 to vf at s = s_r, held at vf beyond.
  double speed_of_s(double s) const;
  // t(s) = integral of ds/v^d, closed form; strictly increasing.
  double time_of_s(double s) const;
  // Inverse mapping; extends linearly at v0 before the maneuver and at vf
  // after the rendezvous.
  double s_of_time(double t) const;
  double speed_of_time(double t) const;
  double e_z_of_s(double s) const;
  double e_z_of_time(double t) const;

 private:
  RendezvousSpec spec_;
  double gamma0_;
  double gamma1_;
  double gamma_d_;
  double s_r_;
  double T_r_;
  bool degenerate_;  // vf == v0
};

inline double desired_speed(double s_G, const DesiredProfiles& profiles) {
  return profiles.speed_of_s(s_G);
}
inline double space_to_time(double s_G, const DesiredProfiles& profiles) {
  return profiles.time_of_s(s_G);
}

// T_r^d as a function of the aggressiveness index; vf == v0 degenerates to
// the constant-speed limit s_r / v0.
double predicted_time(const RendezvousSpec& spec, const VehicleParams& params,
                      const Limits& limits);

// Desired state-input curve on the grid: e_z and UGV speed follow the
// profiles mapped through time, all other error states are zero, inputs from
// level trim at the wind-corrected desired airspeed. Not a trajectory.
Curve desired_curve(const RendezvousSpec& spec, const Path& path, const Wind& wind,
                    const VehicleParams& params, const Limits& limits,
                    const TimeGrid& grid);

// Level constant-speed flight for the UAV over a UGV tracking the path at v0;
// satisfies the coupled dynamics by construction.
Trajectory initial_trajectory(const RendezvousSpec& spec, const Path& path,
                              const Wind& wind, const VehicleParams& params,
                              const Limits& limits, const TimeGrid& grid);

}  // namespace rendezvous
