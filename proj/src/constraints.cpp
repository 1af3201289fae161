#include "rendezvous/constraints.hpp"

#include <cmath>

namespace rendezvous {

double BarrierParams::mu_at(int stage) const { return mu * std::pow(shrink, stage); }
double BarrierParams::delta_at(int stage) const {
  return delta * std::pow(delta_shrink, stage);
}

double relaxed_log_barrier(double z, double delta) {
  if (z >= delta) return -std::log(z);
  const double q = (z - 2.0 * delta) / delta;
  return 0.5 * (q * q - 1.0) - std::log(delta);
}

double relaxed_log_barrier_d1(double z, double delta) {
  if (z >= delta) return -1.0 / z;
  return (z - 2.0 * delta) / (delta * delta);
}

double relaxed_log_barrier_d2(double z, double delta) {
  if (z >= delta) return 1.0 / (z * z);
  return 1.0 / (delta * delta);
}

double barrier_cost(const Eigen::VectorXd& normalized_residuals, double mu, double delta) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < normalized_residuals.size(); ++i) {
    total += mu * relaxed_log_barrier(-normalized_residuals[i], delta);
  }
  return total;
}

std::pair<double, double> docking_residual(double e_x, double e_y, double e_z,
                                           double e_chi, const Limits& limits) {
  const double qx = e_x / limits.ebar_x;
  const double qy = e_y / limits.ebar_y;
  const double qz = e_z / limits.ebar_z;
  const double qc = e_chi / limits.ebar_chi;
  const double q = qx * qx + qy * qy + qz * qz + qc * qc;
  return {e_chi - q, -e_chi - q};
}

const std::array<const char*, ConstraintSet::kCount>& ConstraintSet::names() {
  static const std::array<const char*, kCount> kNames = {
      "v_a_max",   "v_a_min",   "n_lf_max", "n_lf_min",        "gamma_max",
      "gamma_min", "u1_min",    "u1_max",   "phi_max",         "phi_min",
      "u2_max",    "u2_min",    "u3_max",   "u3_min",          "friction_circle",
      "e_z_ground", "docking_plus", "docking_minus"};
  return kNames;
}

ConstraintSet::ConstraintSet(const Limits& limits, const Path& path, const Wind& wind,
                             const VehicleParams& params)
    : limits_(limits), path_(&path), wind_(wind), params_(params) {
  const double v_span = limits.v_max - limits.v_min;
  const double n_span = limits.nlf_max - limits.nlf_min;
  const double g_span = limits.gamma_max - limits.gamma_min;
  spans_ << v_span, v_span, n_span, n_span, g_span, g_span, limits.u1_max, limits.u1_max,
      2.0 * limits.phi_max, 2.0 * limits.phi_max, 2.0 * limits.u2_max, 2.0 * limits.u2_max,
      2.0 * limits.u3_max, 2.0 * limits.u3_max, limits.a_max * limits.a_max, limits.ebar_z,
      1.0, 1.0;
}

Eigen::Matrix<double, ConstraintSet::kCount, 1> ConstraintSet::eval(const Vec9& x,
                                                                    const Vec4& u) const {
  const PathCurvature curv = path_->smooth_curvature(x[8]);
  const double v_A = x[3] + x[7];
  const detail::AirT<double> air =
      detail::wind_triangle_core(v_A, x[5] + curv.chi, x[4], wind_);
  const double n_lf =
      0.5 * params_.rho * params_.S * air.v_a * air.v_a * u[2] / (params_.m * params_.g);
  const double a_lat = x[7] * x[7] * curv.sigma;
  const auto [dock_p, dock_m] = docking_residual(x[0], x[1], x[2], x[5], limits_);

  Eigen::Matrix<double, kCount, 1> c;
  c[0] = air.v_a - limits_.v_max;
  c[1] = limits_.v_min - air.v_a;
  c[2] = n_lf - limits_.nlf_max;
  c[3] = limits_.nlf_min - n_lf;
  c[4] = x[4] - limits_.gamma_max;
  c[5] = limits_.gamma_min - x[4];
  c[6] = -u[0];
  c[7] = u[0] - limits_.u1_max;
  c[8] = x[6] - limits_.phi_max;
  c[9] = -x[6] - limits_.phi_max;
  c[10] = u[1] - limits_.u2_max;
  c[11] = -u[1] - limits_.u2_max;
  c[12] = u[2] - limits_.u3_max;
  c[13] = -u[2] - limits_.u3_max;
  c[14] = u[3] * u[3] + a_lat * a_lat - limits_.a_max * limits_.a_max;
  c[15] = x[2];
  c[16] = dock_p;
  c[17] = dock_m;
  return c;
}

Eigen::Matrix<double, ConstraintSet::kCount, 1> ConstraintSet::eval_normalized(
    const Vec9& x, const Vec4& u) const {
  return eval(x, u).cwiseQuotient(spans_);
}

double ConstraintSet::barrier_value(const Vec9& x, const Vec4& u, double mu,
                                    double delta) const {
  const auto r = eval_normalized(x, u);
  double total = 0.0;
  for (int i = 0; i < kCount; ++i) total += mu * relaxed_log_barrier(-r[i], delta);
  return total;
}

namespace {

using D2 = Dual2<13>;

// mu * beta(-r) accumulated into value/gradient/Hessian.
void accumulate(const D2& r, double mu, double delta, BarrierTerms& out) {
  const double z = -r.v;
  const double b1 = relaxed_log_barrier_d1(z, delta);
  const double b2 = relaxed_log_barrier_d2(z, delta);
  out.value += mu * relaxed_log_barrier(z, delta);
  out.grad -= mu * b1 * r.g;
  out.hess += mu * (b2 * (r.g * r.g.transpose()) - b1 * r.h);
}

}  // namespace

BarrierTerms ConstraintSet::barrier_terms(const Vec9& x, const Vec4& u, double mu,
                                          double delta) const {
  const PathCurvature curv = path_->smooth_curvature(x[8]);

  // Seeds: states 0..8, inputs 9..12.
  const D2 e_x = D2::seed(x[0], 0);
  const D2 e_y = D2::seed(x[1], 1);
  const D2 e_z = D2::seed(x[2], 2);
  const D2 e_v = D2::seed(x[3], 3);
  const D2 e_gamma = D2::seed(x[4], 4);
  const D2 e_chi = D2::seed(x[5], 5);
  const D2 e_phi = D2::seed(x[6], 6);
  const D2 v_G = D2::seed(x[7], 7);
  const D2 s_G = D2::seed(x[8], 8);
  const D2 u1 = D2::seed(u[0], 9);
  const D2 u2 = D2::seed(u[1], 10);
  const D2 u3 = D2::seed(u[2], 11);
  const D2 u4 = D2::seed(u[3], 12);

  const D2 ds = s_G - x[8];
  const D2 sigma = curv.sigma + curv.dsigma_ds * ds;
  const D2 v_A = e_v + v_G;
  const D2 chi_A = e_chi + (curv.chi + curv.sigma * ds + 0.5 * curv.dsigma_ds * ds * ds);
  const detail::AirT<D2> air = detail::wind_triangle_core(v_A, chi_A, e_gamma, wind_);
  const D2 n_lf =
      (0.5 * params_.rho * params_.S / (params_.m * params_.g)) * air.v_a * air.v_a * u3;
  const D2 a_lat = sigma * (v_G * v_G);
  const D2 qx = e_x / limits_.ebar_x;
  const D2 qy = e_y / limits_.ebar_y;
  const D2 qz = e_z / limits_.ebar_z;
  const D2 qc = e_chi / limits_.ebar_chi;
  const D2 dock_q = qx * qx + qy * qy + qz * qz + qc * qc;

  BarrierTerms out;
  accumulate((air.v_a - limits_.v_max) / spans_[0], mu, delta, out);
  accumulate((limits_.v_min - air.v_a) / spans_[1], mu, delta, out);
  accumulate((n_lf - limits_.nlf_max) / spans_[2], mu, delta, out);
  accumulate((limits_.nlf_min - n_lf) / spans_[3], mu, delta, out);
  accumulate((e_gamma - limits_.gamma_max) / spans_[4], mu, delta, out);
  accumulate((limits_.gamma_min - e_gamma) / spans_[5], mu, delta, out);
  accumulate((-u1) / spans_[6], mu, delta, out);
  accumulate((u1 - limits_.u1_max) / spans_[7], mu, delta, out);
  accumulate((e_phi - limits_.phi_max) / spans_[8], mu, delta, out);
  accumulate((-e_phi - limits_.phi_max) / spans_[9], mu, delta, out);
  accumulate((u2 - limits_.u2_max) / spans_[10], mu, delta, out);
  accumulate((-u2 - limits_.u2_max) / spans_[11], mu, delta, out);
  accumulate((u3 - limits_.u3_max) / spans_[12], mu, delta, out);
  accumulate((-u3 - limits_.u3_max) / spans_[13], mu, delta, out);
  accumulate((u4 * u4 + a_lat * a_lat - limits_.a_max * limits_.a_max) / spans_[14], mu,
             delta, out);
  accumulate(e_z / spans_[15], mu, delta, out);
  accumulate((e_chi - dock_q) / spans_[16], mu, delta, out);
  accumulate((-e_chi - dock_q) / spans_[17], mu, delta, out);
  return out;
}

NamedResiduals eval_constraints(const CoupledState& x, const CoupledInput& u,
                                const Wind& wind, const Path& path,
                                const VehicleParams& params, const Limits& limits) {
  const ConstraintSet set(limits, path, wind, params);
  return {set.eval(x.to_vec(), u.to_vec())};
}

std::vector<ConstraintActivity> constraint_report(const Curve& traj,
                                                  const ConstraintSet& constraints,
                                                  double eps_active) {
  const int n = traj.grid.nodes;
  Eigen::MatrixXd r(ConstraintSet::kCount, n);
  for (int k = 0; k < n; ++k) {
    r.col(k) = constraints.eval_normalized(traj.x[k], traj.u[k]);
  }

  std::vector<ConstraintActivity> report;
  for (int i = 0; i < ConstraintSet::kCount; ++i) {
    ConstraintActivity activity;
    activity.constraint = ConstraintSet::names()[i];
    activity.worst_residual = r.row(i).maxCoeff();
    bool open = false;
    double t_open = 0.0;
    for (int k = 0; k < n; ++k) {
      const bool active = r(i, k) > -eps_active;
      if (active && !open) {
        open = true;
        t_open = traj.grid.time(k);
      } else if (!active && open) {
        open = false;
        activity.intervals.emplace_back(t_open, traj.grid.time(k - 1));
      }
    }
    if (open) {
      activity.intervals.emplace_back(t_open, traj.grid.t_end());
    }
    if (!activity.intervals.empty()) {
      report.push_back(std::move(activity));
    }
  }
  return report;
}

}  // namespace rendezvous
