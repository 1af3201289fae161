#include "rendezvous/batch.hpp"

#include <exception>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rendezvous {

Weights Weights::defaults() {
  // Emphasize position and angle errors, penalize fast roll and lift
  // actuation, and hold the UGV to its speed schedule (otherwise the pair
  // simply skips the deceleration and docks hot). Calibrated once on the
  // straight k_aggr = 0 case and frozen for every scenario.
  Weights w;
  w.Q << 1.0, 1.0, 4.0, 0.5, 10.0, 10.0, 1.0, 4.0, 0.0;
  w.R << 0.5, 50.0, 50.0, 0.5;
  w.P1 = 10.0 * w.Q;
  return w;
}

namespace {

// Runs fn(k) for k in [0, n), serially or under OpenMP. Exceptions thrown by
// worker iterations are captured and rethrown on the calling thread.
template <class Fn>
void for_each_index(int n, Exec exec, const Fn& fn) {
  if (exec == Exec::Serial) {
    for (int k = 0; k < n; ++k) fn(k);
    return;
  }
  std::exception_ptr error;
#pragma omp parallel for schedule(static)
  for (int k = 0; k < n; ++k) {
    try {
      fn(k);
    } catch (...) {
#pragma omp critical
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

// Trapezoidal time weight for node k on an n-node grid.
double node_weight(const TimeGrid& grid, int k) {
  if (k == 0 || k == grid.nodes - 1) return 0.5 * grid.h;
  return grid.h;
}

}  // namespace

std::vector<StepJacobians> discrete_jacobians(const DynamicsModel& model,
                                              const Curve& traj, Exec exec) {
  const int steps = traj.grid.steps();
  std::vector<StepJacobians> jacs(steps);
  for_each_index(steps, exec, [&](int k) {
    rk4_step_jacobians(model, traj.x[k], traj.u[k], traj.u[k + 1], traj.grid.h,
                       jacs[k].Ad, jacs[k].B0, jacs[k].B1);
  });
  return jacs;
}

std::vector<NodeJacobians> linearize_along(const DynamicsModel& model, const Curve& traj,
                                           Exec exec) {
  std::vector<NodeJacobians> jacs(traj.grid.nodes);
  for_each_index(traj.grid.nodes, exec, [&](int k) {
    model.jacobians(traj.x[k], traj.u[k], jacs[k].A, jacs[k].B);
  });
  return jacs;
}

std::vector<NodeQuad> cost_quadratics(const Curve& traj, const Curve& desired,
                                      const Weights& w, const ConstraintSet* constraints,
                                      double mu, double delta, Exec exec) {
  const int n = traj.grid.nodes;
  std::vector<NodeQuad> quads(n);
  for_each_index(n, exec, [&](int k) {
    const double wk = node_weight(traj.grid, k);
    const Vec9 dx = traj.x[k] - desired.x[k];
    const Vec4 du = traj.u[k] - desired.u[k];

    NodeQuad& q = quads[k];
    q.a = wk * w.Q.cwiseProduct(dx);
    q.b = wk * w.R.cwiseProduct(du);
    q.Q = (wk * w.Q).asDiagonal();
    q.R = (wk * w.R).asDiagonal();
    q.S.setZero();
    q.cost = 0.5 * wk * (dx.dot(w.Q.cwiseProduct(dx)) + du.dot(w.R.cwiseProduct(du)));

    if (constraints != nullptr) {
      const BarrierTerms bt = constraints->barrier_terms(traj.x[k], traj.u[k], mu, delta);
      q.cost += wk * bt.value;
      q.a += wk * bt.grad.head<9>();
      q.b += wk * bt.grad.tail<4>();

      // Assemble the node model Hessian and clamp it to positive
      // semidefinite: the docking pair contributes genuine negative
      // curvature near touchdown, and a per-node eigenvalue floor keeps the
      // quadratic model useful without a global Levenberg shift.
      Mat13 H = Mat13::Zero();
      H.topLeftCorner<9, 9>() = q.Q / wk;
      H.bottomRightCorner<4, 4>() = q.R / wk;
      H += bt.hess;
      Eigen::SelfAdjointEigenSolver<Mat13> eig(H);
      const Vec13 clamped = eig.eigenvalues().cwiseMax(0.0);
      H = eig.eigenvectors() * clamped.asDiagonal() * eig.eigenvectors().transpose();
      q.Q = wk * H.topLeftCorner<9, 9>();
      q.S = wk * H.bottomLeftCorner<4, 9>();
      q.R = wk * H.bottomRightCorner<4, 4>();
    }

    if (k == n - 1) {
      q.a += w.P1.cwiseProduct(dx);
      q.Q += Mat9(w.P1.asDiagonal());
      q.cost += 0.5 * dx.dot(w.P1.cwiseProduct(dx));
    }
  });
  return quads;
}

std::vector<double> cost_terms(const Curve& traj, const Curve& desired, const Weights& w,
                               const ConstraintSet* constraints, double mu, double delta,
                               Exec exec) {
  const int n = traj.grid.nodes;
  std::vector<double> terms(n);
  for_each_index(n, exec, [&](int k) {
    const double wk = node_weight(traj.grid, k);
    const Vec9 dx = traj.x[k] - desired.x[k];
    const Vec4 du = traj.u[k] - desired.u[k];
    double c = 0.5 * wk * (dx.dot(w.Q.cwiseProduct(dx)) + du.dot(w.R.cwiseProduct(du)));
    if (constraints != nullptr) {
      c += wk * constraints->barrier_value(traj.x[k], traj.u[k], mu, delta);
    }
    if (k == n - 1) {
      c += 0.5 * dx.dot(w.P1.cwiseProduct(dx));
    }
    terms[k] = c;
  });
  return terms;
}

Eigen::MatrixXd residual_table(const Curve& traj, const ConstraintSet& constraints,
                               Exec exec) {
  const int n = traj.grid.nodes;
  Eigen::MatrixXd table(ConstraintSet::kCount, n);
  for_each_index(n, exec, [&](int k) {
    table.col(k) = constraints.eval_normalized(traj.x[k], traj.u[k]);
  });
  return table;
}

}  // namespace rendezvous
