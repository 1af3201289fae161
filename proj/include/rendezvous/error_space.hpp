#pragma once

#include <Eigen/Dense>
#include <array>
#include <iosfwd>
#include <vector>

#include "rendezvous/air_core.hpp"
#include "rendezvous/models.hpp"
#include "rendezvous/path.hpp"

// UGV-velocity-frame error coordinates, the coupled 9-state UAV-UGV dynamics,
// linearization, and fixed-step integration.

namespace rendezvous {

using Vec4 = Eigen::Matrix<double, 4, 1>;
using Vec9 = Eigen::Matrix<double, 9, 1>;
using Mat9 = Eigen::Matrix<double, 9, 9>;
using Mat94 = Eigen::Matrix<double, 9, 4>;
using Mat49 = Eigen::Matrix<double, 4, 9>;

// State order used throughout: (e_x, e_y, e_z, e_v, e_gamma, e_chi, e_phi, v_G, s_G).
struct CoupledState {
  double e_x;      // position errors in the UGV velocity frame [m]
  double e_y;
  double e_z;      // equals z_A since the UGV altitude is zero
  double e_v;      // speed error [m/s]
  double e_gamma;  // flight-path error [rad]
  double e_chi;    // course error [rad]
  double e_phi;    // roll error [rad]
  double v_G;      // UGV speed [m/s]
  double s_G;      // UGV arc length [m]

  Vec9 to_vec() const {
    Vec9 v;
    v << e_x, e_y, e_z, e_v, e_gamma, e_chi, e_phi, v_G, s_G;
    return v;
  }
  static CoupledState from_vec(const Vec9& v) {
    return {v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8]};
  }
};

struct CoupledInput {
  double u1;  // thrust [N]
  double u2;  // roll rate [rad/s]
  double u3;  // lift coefficient
  double u4;  // UGV longitudinal acceleration [m/s^2]

  Vec4 to_vec() const {
    Vec4 v;
    v << u1, u2, u3, u4;
    return v;
  }
  static CoupledInput from_vec(const Vec4& v) { return {v[0], v[1], v[2], v[3]}; }
};

struct TimeGrid {
  double t_start{0.0};
  double h{0.05};  // step [s]
  int nodes{0};

  double time(int k) const { return t_start + h * k; }
  double t_end() const { return time(nodes - 1); }
  int steps() const { return nodes - 1; }
};

// Arbitrary (possibly dynamically infeasible) state-input pair on a grid.
struct Curve {
  TimeGrid grid;
  std::vector<Vec9> x;
  std::vector<Vec4> u;
  UgvState anchor{};  // UGV state at grid.t_start, for inertial reconstruction
};

// A Curve that satisfies the dynamics under its stored inputs to integration
// accuracy; produced only by integrate/project/solve.
struct Trajectory : Curve {};

// Dynamics interface used by the integrator and the optimizer. The production
// implementation is the coupled error-space model; tests also use a frozen
// linear model.
class DynamicsModel {
 public:
  virtual ~DynamicsModel() = default;
  virtual Vec9 rhs(const Vec9& x, const Vec4& u) const = 0;
  virtual void jacobians(const Vec9& x, const Vec4& u, Mat9& A, Mat94& B) const = 0;
};

namespace detail {

// Scalar-generic right-hand side of the coupled system. The path curvature
// model at the evaluation point is injected as the local expansion
//   sigma(s)  = sigma_ref + dsigma * (s_G - s_ref)
//   chi_G(s)  = chi_ref + sigma_ref * (s_G - s_ref) + dsigma/2 * (s_G - s_ref)^2,
// exact within one curvature-blend region.
template <class S>
std::array<S, 9> coupled_rhs_core(const std::array<S, 9>& x, const std::array<S, 4>& u,
                                  const Wind& wind, const VehicleParams& p,
                                  double sigma_ref, double dsigma, double chi_ref,
                                  double s_ref) {
  using std::cos;
  using std::sin;

  const S& e_x = x[0];
  const S& e_y = x[1];
  const S& e_v = x[3];
  const S& e_gamma = x[4];
  const S& e_chi = x[5];
  const S& e_phi = x[6];
  const S& v_G = x[7];
  const S& s_G = x[8];

  const S v_A = e_v + v_G;
  if (!(val(v_A) > 0.0)) {
    throw DomainError("coupled_dynamics: e_v + v_G must be positive");
  }
  const S cg = cos(e_gamma);
  if (val(cg) == 0.0) {
    throw DomainError("coupled_dynamics: cos e_gamma = 0 is singular");
  }

  const S ds = s_G - s_ref;
  const S sigma = sigma_ref + dsigma * ds;
  const S chi_G = chi_ref + sigma_ref * ds + 0.5 * dsigma * ds * ds;
  const S chi_A = e_chi + chi_G;
  const AirT<S> air = wind_triangle_core(v_A, chi_A, e_gamma, wind);

  const S qS = 0.5 * p.rho * p.S * air.v_a * air.v_a;
  const S L = qS * u[2];
  const S D = qS * (p.C_D0 + p.k_DL * u[2] * u[2]);

  const S se = sin(e_chi);
  const S ce = cos(e_chi);
  const S sg = sin(e_gamma);

  std::array<S, 9> dx;
  dx[0] = v_A * ce * cg - (1.0 - sigma * e_y) * v_G;
  dx[1] = v_A * se * cg - e_x * sigma * v_G;
  dx[2] = -v_A * sg;
  dx[3] = (u[0] - D) / p.m - p.g * sg - u[3];
  dx[4] = (L * cos(e_phi) / p.m - p.g * cg) / v_A;
  dx[5] = L * sin(e_phi) * cos(air.crab) / (p.m * v_A * cg) - sigma * v_G;
  dx[6] = u[1];
  dx[7] = u[3];
  dx[8] = v_G;
  return dx;
}

}  // namespace detail

class CoupledModel final : public DynamicsModel {
 public:
  CoupledModel(const Path& path, const Wind& wind, const VehicleParams& params)
      : path_(&path), wind_(wind), params_(params) {}

  Vec9 rhs(const Vec9& x, const Vec4& u) const override;
  void jacobians(const Vec9& x, const Vec4& u, Mat9& A, Mat94& B) const override;

  const Path& path() const { return *path_; }
  const Wind& wind() const { return wind_; }
  const VehicleParams& params() const { return params_; }

 private:
  const Path* path_;
  Wind wind_;
  VehicleParams params_;
};

// Frozen affine system for optimizer sanity tests.
class LinearModel final : public DynamicsModel {
 public:
  LinearModel(const Mat9& A, const Mat94& B, const Vec9& c = Vec9::Zero())
      : A_(A), B_(B), c_(c) {}

  Vec9 rhs(const Vec9& x, const Vec4& u) const override { return A_ * x + B_ * u + c_; }
  void jacobians(const Vec9&, const Vec4&, Mat9& A, Mat94& B) const override {
    A = A_;
    B = B_;
  }

 private:
  Mat9 A_;
  Mat94 B_;
  Vec9 c_;
};

// Spec-facing wrappers over CoupledModel.
Vec9 coupled_dynamics(const CoupledState& x, const CoupledInput& u, const Wind& wind,
                      const Path& path, const VehicleParams& params);
void linearize(const CoupledState& x, const CoupledInput& u, const Wind& wind,
               const Path& path, const VehicleParams& params, Mat9& A, Mat94& B);

// Inertial position of the UAV from body-frame error coordinates.
Eigen::Vector3d error_to_inertial(const Eigen::Vector3d& e, const UgvState& ugv);
Eigen::Vector3d inertial_to_error(const Eigen::Vector3d& p_A, const UgvState& ugv);

// One classical RK4 step with node inputs interpolated linearly at the stage
// midpoints.
Vec9 rk4_step(const DynamicsModel& model, const Vec9& x, const Vec4& u0, const Vec4& u1,
              double h);

// Exact Jacobians of the rk4_step map with respect to (x_k, u_k, u_{k+1}),
// assembled by the stage chain rule from the continuous-time linearization.
void rk4_step_jacobians(const DynamicsModel& model, const Vec9& x, const Vec4& u0,
                        const Vec4& u1, double h, Mat9& Ad, Mat94& B0, Mat94& B1);

// Rolls the dynamics out over the grid. Dynamics failures are rethrown with
// the first failing time in the message.
Trajectory integrate(const DynamicsModel& model, const Vec9& x0,
                     const std::vector<Vec4>& inputs, const TimeGrid& grid);
Trajectory integrate(const CoupledState& x0, const std::vector<CoupledInput>& inputs,
                     const TimeGrid& grid, const Wind& wind, const Path& path,
                     const VehicleParams& params);

// Max per-step defect when the stored states are re-propagated through
// rk4_step under the stored inputs.
double max_reintegration_defect(const DynamicsModel& model, const Curve& traj);

// Integrates (a) the coupled system and (b) the decoupled UAV + UGV systems
// under the same inputs, transforms (b) into error coordinates, and returns
// the maximum component deviation over the horizon.
double equivalence_check(const CoupledState& x0, const std::vector<CoupledInput>& inputs,
                         const TimeGrid& grid, const Wind& wind, const Path& path,
                         const VehicleParams& params);

// Variant with an explicit model on the coupled side (the decoupled side is
// always the true UAV/UGV pair); used to demonstrate mutation detection.
double equivalence_check(const DynamicsModel& coupled_model, const CoupledState& x0,
                         const std::vector<CoupledInput>& inputs, const TimeGrid& grid,
                         const Wind& wind, const Path& path, const VehicleParams& params);

// CSV serialization: one row per node, reconstructed inertial/air diagnostics
// appended. Header row mandatory.
void write_trajectory_csv(std::ostream& os, const Curve& curve, const Path& path,
                          const Wind& wind, const VehicleParams& params);
Curve read_trajectory_csv(std::istream& is);

}  // namespace rendezvous
