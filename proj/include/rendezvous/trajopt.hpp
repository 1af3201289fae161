#pragma once

#include <string>
#include <vector>

#include "rendezvous/batch.hpp"
#include "rendezvous/constraints.hpp"
#include "rendezvous/error_space.hpp"

// Constrained trajectory-tracking optimizer: projection operator,
// time-varying LQR, Newton descent with Armijo line search, and barrier
// continuation.

namespace rendezvous {

struct SolverOptions {
  int max_newton{120};      // Newton iterations per barrier stage
  double grad_tol{1e-7};    // stationarity: predicted decrease below tol * (1 + |cost|)
  double step_tol{1e-10};   // smallest admissible line-search step
  double armijo_c1{1e-4};   // sufficient-decrease parameter
  double backtrack{0.5};    // step reduction factor
  int max_backtracks{40};
  BarrierParams barrier{};
  Vec9 lqr_q;               // projection regulator weights
  Vec4 lqr_r;

  static SolverOptions defaults();
};

struct IterationRecord {
  double cost;
  double barrier_mu;
  double grad_norm;  // Newton decrement sqrt(-theta)
  double step;
};

struct StageRecord {
  double mu;
  double delta;
  std::vector<IterationRecord> iterations;
};

struct SolverReport {
  std::vector<StageRecord> stages;
  std::string status;  // "converged" or "max_iterations"
  double final_cost{0.0};
  double worst_residual{0.0};  // max normalized constraint residual, final trajectory
  double reintegration_defect{0.0};
  int total_iterations{0};
  double rendezvous_time{std::numeric_limits<double>::quiet_NaN()};  // filled by runner
  double predicted_time{std::numeric_limits<double>::quiet_NaN()};
  std::vector<ConstraintActivity> activity;
};

// Time-varying LQR about a trajectory: backward Riccati differential equation
// with (A(t), B(t)) from the linearization, K(t) = R^-1 B(t)^T P(t).
struct LqrSchedule {
  std::vector<Mat49> K;
  std::vector<Mat9> P;
};
LqrSchedule lqr_gain(const DynamicsModel& model, const Curve& traj, const Vec9& q_diag,
                     const Vec4& r_diag, const Vec9& p1_diag);

// Projection: integrates the closed loop x' = f(x, mu(t) + K(t)(alpha(t) - x))
// where (alpha, mu) is the given curve. The feedback is closed exactly at the
// nodes so the stored samples re-integrate with zero defect; projecting a
// trajectory returns it unchanged.
Trajectory project(const DynamicsModel& model, const Curve& xi,
                   const std::vector<Mat49>& K, const Vec9& x0);

// Trapezoidal tracking cost plus barrier plus terminal weight.
double total_cost(const Curve& traj, const Curve& desired, const Weights& w,
                  const ConstraintSet* constraints, double mu, double delta);

// Curve perturbation minimizing the local quadratic model subject to the
// linearized discrete dynamics, with the Levenberg shift applied when the
// model is not positive definite along the sweep.
struct SearchDirection {
  std::vector<Vec9> z;
  std::vector<Vec4> v;
  double directional_derivative;  // d/d_alpha of cost along (z, v), negative on descent
  double decrement;               // sqrt(-directional_derivative)
  double levenberg;               // shift that produced the accepted direction
};
SearchDirection search_direction(const DynamicsModel& model, const Trajectory& traj,
                                 const Curve& desired, const Weights& w,
                                 const ConstraintSet* constraints, double mu,
                                 double delta);

// Exact directional derivative of the projected cost: propagates the curve
// perturbation (zc, vc) through the linearized closed loop and accumulates
// the cost gradient along the result. Matches central finite differences of
// total_cost(project(xi + eps * zeta)) to truncation error.
double projected_directional_derivative(const DynamicsModel& model,
                                        const Trajectory& traj, const Curve& desired,
                                        const Weights& w,
                                        const ConstraintSet* constraints, double mu,
                                        double delta, const std::vector<Mat49>& K,
                                        const std::vector<Vec9>& zc,
                                        const std::vector<Vec4>& vc);

// Barrier-continuation Newton solve of the tracking problem on the grid of
// `initial`. Returns the best iterate and the full iteration history.
struct SolveOutput {
  Trajectory trajectory;
  SolverReport report;
};
SolveOutput solve_tracking(const DynamicsModel& model, const ConstraintSet* constraints,
                           const Curve& desired, const Trajectory& initial,
                           const Weights& w, const SolverOptions& opts);

}  // namespace rendezvous
