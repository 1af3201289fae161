#pragma once

#include <vector>

#include "rendezvous/constraints.hpp"
#include "rendezvous/error_space.hpp"

// Per-node kernels on trajectory data. Each kernel has a serial reference
// implementation and an OpenMP variant producing bit-identical output (node
// work is independent; reductions are summed in fixed order by the callers).

namespace rendezvous {

enum class Exec { Serial, Parallel };

struct Weights {
  Vec9 Q;   // state tracking weights (diagonal)
  Vec4 R;   // input tracking weights (diagonal)
  Vec9 P1;  // terminal state weights (diagonal)

  static Weights defaults();
};

// Exact Jacobians of the discrete RK4 step along a trajectory, one triple
// (Ad, B0, B1) per step.
struct StepJacobians {
  Mat9 Ad;
  Mat94 B0;
  Mat94 B1;
};
std::vector<StepJacobians> discrete_jacobians(const DynamicsModel& model,
                                              const Curve& traj,
                                              Exec exec = Exec::Parallel);

// Continuous-time (A, B) at every node.
struct NodeJacobians {
  Mat9 A;
  Mat94 B;
};
std::vector<NodeJacobians> linearize_along(const DynamicsModel& model, const Curve& traj,
                                           Exec exec = Exec::Parallel);

// Time-weighted second-order model of the tracking-plus-barrier cost at every
// node: gradient (a, b), Gauss-Newton tracking Hessian plus exact barrier
// Hessian (Q, S, R), and the node's scalar cost contribution.
struct NodeQuad {
  Vec9 a;
  Vec4 b;
  Mat9 Q;
  Mat49 S;  // d2 cost / du dx
  Eigen::Matrix4d R;
  double cost;
};
std::vector<NodeQuad> cost_quadratics(const Curve& traj, const Curve& desired,
                                      const Weights& w, const ConstraintSet* constraints,
                                      double mu, double delta,
                                      Exec exec = Exec::Parallel);

// Per-node time-weighted cost values only (tracking plus barrier, terminal
// weight folded into the last node).
std::vector<double> cost_terms(const Curve& traj, const Curve& desired, const Weights& w,
                               const ConstraintSet* constraints, double mu, double delta,
                               Exec exec = Exec::Parallel);

// Normalized residuals at every node, kCount x nodes.
Eigen::MatrixXd residual_table(const Curve& traj, const ConstraintSet& constraints,
                               Exec exec = Exec::Parallel);

}  // namespace rendezvous
