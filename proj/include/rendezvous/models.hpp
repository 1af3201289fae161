#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "rendezvous/errors.hpp"

// Vehicle parameter set, aerodynamic forces, wind triangle, the decoupled
// UAV/UGV equations of motion and trim analysis.

namespace rendezvous {

struct VehicleParams {
  double m;     // mass [kg]
  double S;     // wing area [m^2]
  double rho;   // air density [kg/m^3]
  double g;     // gravitational acceleration [m/s^2]
  double C_D0;  // zero-lift drag coefficient
  double k_DL;  // induced drag factor

  // "Zagi" flying-wing parameter set.
  static VehicleParams zagi() {
    return {1.56, 0.2589, 1.225, 9.81, 0.01631, 0.04525};
  }
};

struct Limits {
  double v_min;      // airspeed lower bound [m/s]
  double v_max;      // airspeed upper bound [m/s]
  double nlf_min;    // load factor lower bound
  double nlf_max;    // load factor upper bound
  double gamma_min;  // flight-path angle lower bound [rad]
  double gamma_max;  // flight-path angle upper bound [rad]
  double u1_max;     // thrust upper bound [N]
  double phi_max;    // roll angle bound [rad]
  double u2_max;     // roll rate bound [rad/s]
  double u3_max;     // lift coefficient bound
  double a_max;      // UGV acceleration bound [m/s^2]
  double ebar_x;     // docking tolerance, longitudinal [m]
  double ebar_y;     // docking tolerance, lateral [m]
  double ebar_z;     // docking tolerance, vertical [m]
  double ebar_chi;   // docking course tolerance [rad]

  static Limits standard() {
    constexpr double deg = M_PI / 180.0;
    Limits l;
    l.v_min = 12.0;
    l.v_max = 20.0;
    l.nlf_min = 0.95;
    l.nlf_max = 1.05;
    l.gamma_min = -6.0 * deg;
    l.gamma_max = 10.0 * deg;
    l.u1_max = 2.0;
    l.phi_max = 24.0 * deg;
    l.u2_max = 5.0 * deg;
    l.u3_max = 0.7;
    l.a_max = 3.0;
    l.ebar_x = 30.0;
    l.ebar_y = 30.0;
    l.ebar_z = 30.0;
    l.ebar_chi = 2.0 * deg;
    return l;
  }
};

struct Wind {
  double w_x{0.0};  // inertial wind components [m/s]
  double w_y{0.0};
  double w_z{0.0};

  double speed_sq() const { return w_x * w_x + w_y * w_y + w_z * w_z; }
};

// z_A <= 0 means above ground.
struct UavState {
  double x_A;      // inertial position [m]
  double y_A;
  double z_A;
  double v_A;      // ground speed [m/s]
  double gamma_A;  // flight-path angle [rad]
  double chi_A;    // course angle [rad]
  double phi_A;    // roll angle [rad]
};

struct UavInput {
  double u1;  // thrust [N]
  double u2;  // roll rate [rad/s]
  double u3;  // lift coefficient
};

struct UgvState {
  double x_G;    // inertial position [m], z_G == 0
  double y_G;
  double v_G;    // speed [m/s]
  double chi_G;  // course angle [rad]
};

struct AirData {
  double v_a;      // airspeed [m/s]
  double gamma_a;  // air-mass-referenced flight path angle [rad]
  double psi_A;    // heading angle [rad]
};

struct TrimInputs {
  double u1;  // thrust [N]
  double u3;  // lift coefficient
};

// Difference of two unwrapped angles mapped to (-pi, pi].
inline double angle_diff(double a, double b) {
  double d = std::fmod(a - b, 2.0 * M_PI);
  if (d <= -M_PI) d += 2.0 * M_PI;
  if (d > M_PI) d -= 2.0 * M_PI;
  return d;
}

// Airspeed, air-referenced flight path angle, and heading from the ground
// velocity and the wind. Arcsin arguments are guarded with a hard error so
// that infeasible wind setups fail loudly.
AirData wind_triangle(double v_A, double chi_A, double gamma_A, const Wind& wind);

// Lift and drag at airspeed v_a and lift coefficient C_L.
struct AeroForces {
  double L;
  double D;
};
AeroForces aero_forces(double v_a, double C_L, const VehicleParams& params);

double load_factor(double L, const VehicleParams& params);

// Right-hand side of the 7-state UAV point-mass model in wind, ordered
// (x_A, y_A, z_A, v_A, gamma_A, chi_A, phi_A).
Eigen::Matrix<double, 7, 1> uav_dynamics(const UavState& x, const UavInput& u,
                                         const Wind& wind, const VehicleParams& params);

// Right-hand side of the 4-state UGV model, ordered (x_G, y_G, v_G, chi_G).
// sigma is the path curvature at the vehicle's current arc length.
Eigen::Matrix<double, 4, 1> ugv_dynamics(const UgvState& x, double u4, double sigma);

// Level-flight trim: lift balances weight, thrust balances drag.
TrimInputs trim_level(double v_a, const VehicleParams& params, const Limits& limits);

// Constant-descent trim at flight path angle gamma_A <= 0 (roll zero).
// Fails with InfeasibleTrim when the required thrust is negative.
TrimInputs trim_descent(double v_a, double gamma_A, const VehicleParams& params);

// Gentlest feasible descent angle: rendezvous completes exactly at the
// maximum space s_f starting from altitude coordinate z0 (< 0).
// Defined in guidance.hpp as gamma_zero; declared here for symmetry of the
// trim analysis pair.

// Steepest descent angle sustainable without negative thrust at v_max.
// Seeded with the closed-form small-angle expression and polished with a few
// Newton steps so that trim_descent(v_max, gamma_one(...)).u1 == 0 exactly.
double gamma_one(const VehicleParams& params, double v_max);

}  // namespace rendezvous
