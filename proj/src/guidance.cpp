#include "rendezvous/guidance.hpp"

#include <cmath>
#include <sstream>

namespace rendezvous {

double gamma_zero(double z0, double s_f) {
  if (std::abs(z0) > s_f) {
    std::ostringstream msg;
    msg << "gamma_zero: |z0| = " << std::abs(z0) << " exceeds s_f = " << s_f;
    throw DomainError(msg.str());
  }
  return std::asin(z0 / s_f);
}

double desired_gamma(double k_aggr, double gamma0, double gamma1) {
  return k_aggr * gamma1 + (1.0 - k_aggr) * gamma0;
}

double rendezvous_space(double z0, double gamma_d) {
  if (!(gamma_d < 0.0)) {
    throw DomainError("rendezvous_space: desired flight path angle must be negative");
  }
  if (!(z0 < 0.0)) {
    throw DomainError("rendezvous_space: initial altitude coordinate must be negative");
  }
  return z0 / std::sin(gamma_d);
}

DesiredProfiles::DesiredProfiles(const RendezvousSpec& spec, const VehicleParams& params,
                                 const Limits& limits)
    : spec_(spec) {
  gamma0_ = gamma_zero(spec.z0, spec.s_f);
  gamma1_ = gamma_one(params, limits.v_max);
  gamma_d_ = desired_gamma(spec.k_aggr, gamma0_, gamma1_);
  s_r_ = rendezvous_space(spec.z0, gamma_d_);
  degenerate_ = spec.vf == spec.v0;
  T_r_ = degenerate_ ? s_r_ / spec.v0
                     : s_r_ / (spec.vf - spec.v0) * std::log(spec.vf / spec.v0);
}

double DesiredProfiles::speed_of_s(double s) const {
  if (s <= 0.0) return spec_.v0;
  if (s >= s_r_) return spec_.vf;
  return spec_.v0 + (spec_.vf - spec_.v0) * s / s_r_;
}

double DesiredProfiles::time_of_s(double s) const {
  if (s <= 0.0) return s / spec_.v0;
  if (degenerate_) {
    return std::min(s, s_r_) / spec_.v0 + std::max(0.0, s - s_r_) / spec_.vf;
  }
  if (s >= s_r_) {
    return T_r_ + (s - s_r_) / spec_.vf;
  }
  return s_r_ / (spec_.vf - spec_.v0) * std::log(speed_of_s(s) / spec_.v0);
}

double DesiredProfiles::s_of_time(double t) const {
  if (t <= 0.0) return spec_.v0 * t;
  if (degenerate_) return spec_.v0 * t;
  if (t >= T_r_) return s_r_ + spec_.vf * (t - T_r_);
  const double rate = (spec_.vf - spec_.v0) / s_r_;
  return s_r_ * spec_.v0 * (std::exp(rate * t) - 1.0) / (spec_.vf - spec_.v0);
}

double DesiredProfiles::speed_of_time(double t) const {
  if (t <= 0.0) return spec_.v0;
  if (degenerate_) return spec_.v0;
  if (t >= T_r_) return spec_.vf;
  const double rate = (spec_.vf - spec_.v0) / s_r_;
  return spec_.v0 * std::exp(rate * t);
}

double DesiredProfiles::e_z_of_s(double s) const {
  if (s <= 0.0) return spec_.z0;
  if (s >= s_r_) return 0.0;
  return spec_.z0 - s * std::sin(gamma_d_);
}

double DesiredProfiles::e_z_of_time(double t) const { return e_z_of_s(s_of_time(t)); }

double predicted_time(const RendezvousSpec& spec, const VehicleParams& params,
                      const Limits& limits) {
  return DesiredProfiles(spec, params, limits).rendezvous_time();
}

Curve desired_curve(const RendezvousSpec& spec, const Path& path, const Wind& wind,
                    const VehicleParams& params, const Limits& limits,
                    const TimeGrid& grid) {
  const DesiredProfiles profiles(spec, params, limits);
  const double s_anchor = spec.v0 * spec.t0;  // lead-in at constant v0 from path start

  Curve curve;
  curve.grid = grid;
  curve.x.resize(grid.nodes);
  curve.u.resize(grid.nodes);
  for (int k = 0; k < grid.nodes; ++k) {
    const double tau = grid.time(k) - spec.t0;
    const double e_z = profiles.e_z_of_time(tau);
    const double v = profiles.speed_of_time(tau);
    const double s = s_anchor + profiles.s_of_time(tau);
    const double chi = path.heading(s);
    const AirData air = wind_triangle(v, chi, 0.0, wind);
    const TrimInputs trim = trim_level(air.v_a, params, limits);

    Vec9 x;
    x << 0.0, 0.0, e_z, 0.0, 0.0, 0.0, 0.0, v, s;
    Vec4 u;
    u << trim.u1, 0.0, trim.u3, 0.0;
    curve.x[k] = x;
    curve.u[k] = u;
  }
  const double s0 = curve.x[0][8];
  const PathPose pose = path.lookup(s0);
  curve.anchor = UgvState{pose.x, pose.y, curve.x[0][7], pose.chi};
  return curve;
}

Trajectory initial_trajectory(const RendezvousSpec& spec, const Path& path,
                              const Wind& wind, const VehicleParams& params,
                              const Limits& limits, const TimeGrid& grid) {
  const double s_start = spec.v0 * grid.t_start;
  const double chi_A = path.heading(s_start);
  const AirData air = wind_triangle(spec.v0, chi_A, 0.0, wind);
  const TrimInputs trim = trim_level(air.v_a, params, limits);

  Vec9 x0;
  x0 << 0.0, 0.0, spec.z0, 0.0, 0.0, 0.0, 0.0, spec.v0, s_start;
  Vec4 u;
  u << trim.u1, 0.0, trim.u3, 0.0;
  const std::vector<Vec4> inputs(grid.nodes, u);
  return integrate(CoupledModel(path, wind, params), x0, inputs, grid);
}

}  // namespace rendezvous
