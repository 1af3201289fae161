#pragma once

#include <array>
#include <string>
#include <vector>

#include "rendezvous/error_space.hpp"

// The full inequality set (UAV, UGV, docking) in c(x, u) <= 0 form, the
// relaxed log-barrier functional used by the solver, and activity reporting.

namespace rendezvous {

using Vec13 = Eigen::Matrix<double, 13, 1>;
using Mat13 = Eigen::Matrix<double, 13, 13>;

struct BarrierParams {
  double delta{0.05};        // relaxation threshold on normalized residuals, stage 1
  double mu{0.1};            // barrier weight, stage 1
  double shrink{0.4};        // multiplicative schedule for mu per continuation stage
  int stages{6};
  double delta_shrink{0.3};  // multiplicative schedule for delta per stage

  double mu_at(int stage) const;     // stage is 0-based
  double delta_at(int stage) const;
};

// Relaxed log barrier: -log z beyond the threshold, quadratic extension
// below it. C2 everywhere, convex, finite for violated residuals.
double relaxed_log_barrier(double z, double delta);
double relaxed_log_barrier_d1(double z, double delta);
double relaxed_log_barrier_d2(double z, double delta);

// Sum of mu * beta(-r) over a vector of normalized residuals.
double barrier_cost(const Eigen::VectorXd& normalized_residuals, double mu, double delta);

// Docking pair (11b): r_pm = +-e_chi - q(e), both <= 0 iff the printed
// inequality with |e_chi| holds. Evaluated in radians throughout.
std::pair<double, double> docking_residual(double e_x, double e_y, double e_z,
                                           double e_chi, const Limits& limits);

struct BarrierTerms {
  double value{0.0};
  Vec13 grad{Vec13::Zero()};   // with respect to (x; u)
  Mat13 hess{Mat13::Zero()};
};

// Ordered scalar constraint functions with names, plus their barrier
// contributions. Residuals are scaled by each constraint's span before the
// barrier so the relaxation threshold is dimensionless.
class ConstraintSet {
 public:
  static constexpr int kCount = 18;

  ConstraintSet(const Limits& limits, const Path& path, const Wind& wind,
                const VehicleParams& params);

  static const std::array<const char*, kCount>& names();

  Eigen::Matrix<double, kCount, 1> eval(const Vec9& x, const Vec4& u) const;
  Eigen::Matrix<double, kCount, 1> eval_normalized(const Vec9& x, const Vec4& u) const;
  const Eigen::Matrix<double, kCount, 1>& spans() const { return spans_; }

  double barrier_value(const Vec9& x, const Vec4& u, double mu, double delta) const;
  BarrierTerms barrier_terms(const Vec9& x, const Vec4& u, double mu, double delta) const;

  const Limits& limits() const { return limits_; }

 private:
  Limits limits_;
  const Path* path_;
  Wind wind_;
  VehicleParams params_;
  Eigen::Matrix<double, kCount, 1> spans_;
};

// Spec-facing wrapper: named residual vector at one point.
struct NamedResiduals {
  Eigen::Matrix<double, ConstraintSet::kCount, 1> values;
  static const std::array<const char*, ConstraintSet::kCount>& names() {
    return ConstraintSet::names();
  }
};
NamedResiduals eval_constraints(const CoupledState& x, const CoupledInput& u,
                                const Wind& wind, const Path& path,
                                const VehicleParams& params, const Limits& limits);

struct ConstraintActivity {
  std::string constraint;
  std::vector<std::pair<double, double>> intervals;  // [t0, t1] per activity window
  double worst_residual;                             // normalized
};

// Activity report: for each constraint, the time intervals where the
// normalized residual exceeds -eps_active, and the worst residual seen.
// Constraints that never activate are omitted.
std::vector<ConstraintActivity> constraint_report(const Curve& traj,
                                                  const ConstraintSet& constraints,
                                                  double eps_active = 1e-3);

}  // namespace rendezvous
