#pragma once

#include <cmath>

#include "rendezvous/dual.hpp"
#include "rendezvous/errors.hpp"
#include "rendezvous/models.hpp"

// Scalar-generic wind triangle and aerodynamics, shared by the plain-double
// model operations, the coupled dynamics, and the derivative evaluations.

namespace rendezvous::detail {

inline double val(double x) { return x; }
template <int N>
double val(const Dual<N>& x) { return x.v; }
template <int N>
double val(const Dual2<N>& x) { return x.v; }

template <class S>
struct AirT {
  S v_a;      // airspeed
  S gamma_a;  // air-mass-referenced flight path angle
  S crab;     // chi_A - psi_A
};

template <class S>
AirT<S> wind_triangle_core(const S& v_A, const S& chi_A, const S& gamma_A, const Wind& w) {
  using std::abs;
  using std::asin;
  using std::cos;
  using std::sin;
  using std::sqrt;

  if (!(val(v_A) > 0.0)) {
    throw DomainError("wind_triangle: ground speed must be positive");
  }
  const S cg = cos(gamma_A);
  const S sg = sin(gamma_A);
  const S cx = cos(chi_A);
  const S sx = sin(chi_A);

  const S along = w.w_x * cx * cg + w.w_y * sx * cg - w.w_z * sg;
  const S va_sq = v_A * v_A - 2.0 * v_A * along + w.speed_sq();
  if (!(val(va_sq) > 0.0)) {
    throw DomainError("wind_triangle: zero airspeed (wind cancels ground velocity)");
  }
  const S v_a = sqrt(va_sq);

  const S arg_gamma = (v_A * sg + w.w_z) / v_a;
  if (abs(val(arg_gamma)) > 1.0) {
    throw DomainError("wind_triangle: vertical wind exceeds resolvable flight path angle");
  }
  const S gamma_a = asin(arg_gamma);

  const S arg_crab = (-w.w_x * sx + w.w_y * cx) / (v_a * cos(gamma_a));
  if (abs(val(arg_crab)) > 1.0) {
    throw DomainError("wind_triangle: crosswind exceeds resolvable crab angle");
  }
  const S crab = asin(arg_crab);

  return {v_a, gamma_a, crab};
}

}  // namespace rendezvous::detail
