#include "rendezvous/models.hpp"

#include <sstream>

#include "rendezvous/air_core.hpp"

namespace rendezvous {

AirData wind_triangle(double v_A, double chi_A, double gamma_A, const Wind& wind) {
  const detail::AirT<double> air = detail::wind_triangle_core(v_A, chi_A, gamma_A, wind);
  return {air.v_a, air.gamma_a, chi_A - air.crab};
}

AeroForces aero_forces(double v_a, double C_L, const VehicleParams& params) {
  const double q = 0.5 * params.rho * v_a * v_a * params.S;
  const double C_D = params.C_D0 + params.k_DL * C_L * C_L;
  return {q * C_L, q * C_D};
}

double load_factor(double L, const VehicleParams& params) {
  return L / (params.m * params.g);
}

Eigen::Matrix<double, 7, 1> uav_dynamics(const UavState& x, const UavInput& u,
                                         const Wind& wind, const VehicleParams& params) {
  const AirData air = wind_triangle(x.v_A, x.chi_A, x.gamma_A, wind);
  const AeroForces f = aero_forces(air.v_a, u.u3, params);

  const double cg = std::cos(x.gamma_A);
  if (x.v_A * cg == 0.0) {
    throw DomainError("uav_dynamics: course rate singular (v_A cos gamma_A = 0)");
  }

  Eigen::Matrix<double, 7, 1> dx;
  dx[0] = x.v_A * std::cos(x.chi_A) * cg;
  dx[1] = x.v_A * std::sin(x.chi_A) * cg;
  dx[2] = -x.v_A * std::sin(x.gamma_A);
  dx[3] = (u.u1 - f.D) / params.m - params.g * std::sin(x.gamma_A);
  dx[4] = (f.L * std::cos(x.phi_A) / params.m - params.g * cg) / x.v_A;
  dx[5] = f.L * std::sin(x.phi_A) * std::cos(x.chi_A - air.psi_A) / (params.m * x.v_A * cg);
  dx[6] = u.u2;
  return dx;
}

Eigen::Matrix<double, 4, 1> ugv_dynamics(const UgvState& x, double u4, double sigma) {
  Eigen::Matrix<double, 4, 1> dx;
  dx[0] = x.v_G * std::cos(x.chi_G);
  dx[1] = x.v_G * std::sin(x.chi_G);
  dx[2] = u4;
  dx[3] = x.v_G * sigma;
  return dx;
}

TrimInputs trim_level(double v_a, const VehicleParams& params, const Limits& limits) {
  const double u3 = 2.0 * params.m * params.g / (params.rho * params.S * v_a * v_a);
  const double u1 =
      0.5 * params.rho * v_a * v_a * params.S * (params.C_D0 + params.k_DL * u3 * u3);
  if (u3 > limits.u3_max) {
    std::ostringstream msg;
    msg << "trim_level: required lift coefficient " << u3 << " exceeds bound " << limits.u3_max;
    throw InfeasibleTrim(msg.str());
  }
  if (u1 > limits.u1_max) {
    std::ostringstream msg;
    msg << "trim_level: required thrust " << u1 << " exceeds bound " << limits.u1_max;
    throw InfeasibleTrim(msg.str());
  }
  return {u1, u3};
}

TrimInputs trim_descent(double v_a, double gamma_A, const VehicleParams& params) {
  const double mg = params.m * params.g;
  const double qS = 0.5 * params.rho * params.S * v_a * v_a;
  const double u3 = 2.0 * mg * std::cos(gamma_A) / (params.rho * params.S * v_a * v_a);
  const double u1 = mg * std::sin(gamma_A) + qS * (params.C_D0 + params.k_DL * u3 * u3);
  if (u1 < 0.0) {
    std::ostringstream msg;
    msg << "trim_descent: flight path angle " << gamma_A << " rad needs negative thrust " << u1;
    throw InfeasibleTrim(msg.str());
  }
  return {u1, u3};
}

double gamma_one(const VehicleParams& params, double v_max) {
  const double mg = params.m * params.g;
  const double rsv = params.rho * params.S * v_max * v_max;
  const double cl_level = 2.0 * mg / rsv;
  double gamma = -(rsv / (2.0 * mg)) * (params.C_D0 + params.k_DL * cl_level * cl_level);

  // Polish to the exact zero-thrust root of the constant-descent trim.
  for (int it = 0; it < 8; ++it) {
    const double cg = std::cos(gamma);
    const double sg = std::sin(gamma);
    const double u3 = cl_level * cg;
    const double u1 = mg * sg + 0.5 * rsv * (params.C_D0 + params.k_DL * u3 * u3);
    const double du3 = -cl_level * sg;
    const double du1 = mg * cg + rsv * params.k_DL * u3 * du3;
    const double step = u1 / du1;
    gamma -= step;
    if (std::abs(step) < 1e-15) break;
  }
  return gamma;
}

}  // namespace rendezvous
