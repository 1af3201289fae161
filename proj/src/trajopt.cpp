#include "rendezvous/trajopt.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <sstream>

namespace rendezvous {

using Mat13 = Eigen::Matrix<double, 13, 13>;
using Vec13 = Eigen::Matrix<double, 13, 1>;
using Mat4x13 = Eigen::Matrix<double, 4, 13>;

SolverOptions SolverOptions::defaults() {
  SolverOptions o;
  o.lqr_q << 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.0;
  o.lqr_r << 0.5, 50.0, 50.0, 0.5;
  return o;
}

LqrSchedule lqr_gain(const DynamicsModel& model, const Curve& traj, const Vec9& q_diag,
                     const Vec4& r_diag, const Vec9& p1_diag) {
  const int n = traj.grid.nodes;
  const double h = traj.grid.h;
  const auto jacs = linearize_along(model, traj);

  const Mat9 Q = q_diag.asDiagonal();
  const Vec4 r_inv = r_diag.cwiseInverse();

  const auto riccati_rhs = [&](const Mat9& P, const Mat9& A, const Mat94& B) -> Mat9 {
    const Mat94 PB = P * B;
    return -(A.transpose() * P + P * A - PB * r_inv.asDiagonal() * PB.transpose() + Q);
  };

  LqrSchedule out;
  out.K.resize(n);
  out.P.resize(n);

  Mat9 P = p1_diag.asDiagonal();
  out.P[n - 1] = P;
  out.K[n - 1] = r_inv.asDiagonal() * jacs[n - 1].B.transpose() * P;

  for (int k = n - 2; k >= 0; --k) {
    const Mat9& A1 = jacs[k + 1].A;
    const Mat94& B1 = jacs[k + 1].B;
    const Mat9 Am = 0.5 * (jacs[k].A + jacs[k + 1].A);
    const Mat94 Bm = 0.5 * (jacs[k].B + jacs[k + 1].B);

    // RK4 backward in time (step -h).
    const Mat9 k1 = riccati_rhs(P, A1, B1);
    const Mat9 k2 = riccati_rhs(P - 0.5 * h * k1, Am, Bm);
    const Mat9 k3 = riccati_rhs(P - 0.5 * h * k2, Am, Bm);
    const Mat9 k4 = riccati_rhs(P - h * k3, jacs[k].A, jacs[k].B);
    P -= (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    P = (0.5 * (P + P.transpose())).eval();

    if (!P.allFinite() || P.norm() > 1e14) {
      std::ostringstream msg;
      msg << "lqr_gain: Riccati blow-up at t = " << traj.grid.time(k);
      throw SolverError(msg.str());
    }
    out.P[k] = P;
    out.K[k] = r_inv.asDiagonal() * jacs[k].B.transpose() * P;
  }
  return out;
}

Trajectory project(const DynamicsModel& model, const Curve& xi,
                   const std::vector<Mat49>& K, const Vec9& x0) {
  const int n = xi.grid.nodes;
  const double h = xi.grid.h;

  Trajectory out;
  out.grid = xi.grid;
  out.anchor = xi.anchor;
  out.x.resize(n);
  out.u.resize(n);
  out.x[0] = x0;
  out.u[0] = xi.u[0] + K[0] * (xi.x[0] - x0);

  for (int k = 0; k + 1 < n; ++k) {
    // Close the feedback at the next node: u_{k+1} and x_{k+1} must satisfy
    // both the RK4 step and u_{k+1} = mu_{k+1} + K_{k+1}(alpha_{k+1} - x_{k+1}).
    // Seeding with the curve's own input makes a trajectory an exact fixed
    // point of the closure for any gain.
    Vec4 u_next = xi.u[k + 1];
    Vec9 x_next;
    bool closed = false;
    for (int it = 0; it < 8; ++it) {
      x_next = rk4_step(model, out.x[k], out.u[k], u_next, h);
      const Vec4 u_new = xi.u[k + 1] + K[k + 1] * (xi.x[k + 1] - x_next);
      const double change = (u_new - u_next).cwiseAbs().maxCoeff();
      u_next = u_new;
      if (change < 1e-13 * (1.0 + u_next.cwiseAbs().maxCoeff())) {
        closed = true;
        break;
      }
    }
    if (!closed) {
      // Non-contractive gains: switch to Newton on
      // r(x) = x - F(x_k, u_k, u(x)) with u(x) = mu + K(alpha - x), whose
      // Jacobian is I + B1 K. Restarting from the curve's own input keeps the
      // iteration in the basin of the branch continuous with the curve.
      u_next = xi.u[k + 1];
      x_next = rk4_step(model, out.x[k], out.u[k], u_next, h);
      double prev_res = std::numeric_limits<double>::infinity();
      for (int it = 0; it < 25; ++it) {
        u_next = xi.u[k + 1] + K[k + 1] * (xi.x[k + 1] - x_next);
        const Vec9 res = x_next - rk4_step(model, out.x[k], out.u[k], u_next, h);
        const double rnorm = res.cwiseAbs().maxCoeff();
        if (rnorm < 1e-12 * (1.0 + x_next.cwiseAbs().maxCoeff())) {
          closed = true;
          break;
        }
        if (rnorm > 10.0 * prev_res) break;
        prev_res = std::min(prev_res, rnorm);
        Mat9 Ad;
        Mat94 B0, B1;
        rk4_step_jacobians(model, out.x[k], out.u[k], u_next, h, Ad, B0, B1);
        const Mat9 Jr = Mat9::Identity() + B1 * K[k + 1];
        x_next -= Jr.partialPivLu().solve(res);
      }
      u_next = xi.u[k + 1] + K[k + 1] * (xi.x[k + 1] - x_next);
    }
    if (!closed) {
      std::ostringstream msg;
      msg << "project: feedback closure failed at t = " << xi.grid.time(k + 1);
      throw SolverError(msg.str());
    }
    out.x[k + 1] = rk4_step(model, out.x[k], out.u[k], u_next, h);
    out.u[k + 1] = u_next;
  }
  return out;
}

double total_cost(const Curve& traj, const Curve& desired, const Weights& w,
                  const ConstraintSet* constraints, double mu, double delta) {
  const auto terms = cost_terms(traj, desired, w, constraints, mu, delta);
  double total = 0.0;
  for (double t : terms) total += t;
  return total;
}

namespace {

Mat13 node_hessian(const NodeQuad& q) {
  Mat13 H;
  H.topLeftCorner<9, 9>() = q.Q;
  H.topRightCorner<9, 4>() = q.S.transpose();
  H.bottomLeftCorner<4, 9>() = q.S;
  H.bottomRightCorner<4, 4>() = q.R;
  return H;
}

}  // namespace

namespace {

SearchDirection solve_lq_subproblem(const std::vector<StepJacobians>& jacs,
                                    const std::vector<NodeQuad>& quads) {
  const int steps = static_cast<int>(jacs.size());
  const int n = steps + 1;

  double scale = 0.0;
  double cost_scale = 0.0;
  for (const NodeQuad& q : quads) {
    scale = std::max({scale, q.Q.diagonal().cwiseAbs().maxCoeff(),
                      q.R.diagonal().cwiseAbs().maxCoeff()});
    cost_scale += std::abs(q.cost);
  }
  const double theta_slack = 1e-12 * (1.0 + cost_scale);

  const double lambda_steps[] = {0.0, 1e-8, 1e-6, 1e-4, 1e-2, 1.0, 1e2};

  for (double rel : lambda_steps) {
    const double lambda = rel * scale;

    // Backward sweep over the augmented state (z_k, v_k) with control v_{k+1}.
    Mat13 P = node_hessian(quads[n - 1]) + lambda * Mat13::Identity();
    Vec13 p;
    p.head<9>() = quads[n - 1].a;
    p.tail<4>() = quads[n - 1].b;

    std::vector<Mat4x13> Kw(steps);
    std::vector<Vec4> kw(steps);
    bool sweep_ok = true;

    for (int k = steps - 1; k >= 0; --k) {
      Mat13 At = Mat13::Zero();
      At.topLeftCorner<9, 9>() = jacs[k].Ad;
      At.topRightCorner<9, 4>() = jacs[k].B0;
      Eigen::Matrix<double, 13, 4> Bt;
      Bt.topRows<9>() = jacs[k].B1;
      Bt.bottomRows<4>() = Eigen::Matrix4d::Identity();

      const Eigen::Matrix4d Rhat = Bt.transpose() * P * Bt;
      const Mat4x13 Shat = Bt.transpose() * P * At;
      const Vec4 rhat = Bt.transpose() * p;

      Eigen::LLT<Eigen::Matrix4d> llt(0.5 * (Rhat + Rhat.transpose()));
      if (llt.info() != Eigen::Success) {
        sweep_ok = false;
        break;
      }
      Kw[k] = -llt.solve(Shat);
      kw[k] = -llt.solve(rhat);

      Vec13 g;
      g.head<9>() = quads[k].a;
      g.tail<4>() = quads[k].b;

      P = node_hessian(quads[k]) + lambda * Mat13::Identity() +
          At.transpose() * P * At + Shat.transpose() * Kw[k];
      P = (0.5 * (P + P.transpose())).eval();
      p = g + At.transpose() * p + Shat.transpose() * kw[k];
      if (!P.allFinite() || !p.allFinite()) {
        sweep_ok = false;
        break;
      }
    }
    if (!sweep_ok) continue;

    // Free initial input: z_0 = 0, minimize over v_0.
    const Eigen::Matrix4d Pvv = P.bottomRightCorner<4, 4>();
    Eigen::LLT<Eigen::Matrix4d> llt0(0.5 * (Pvv + Pvv.transpose()));
    if (llt0.info() != Eigen::Success) continue;
    const Vec4 v0 = -llt0.solve(p.tail<4>());

    // Forward pass.
    SearchDirection dir;
    dir.z.resize(n);
    dir.v.resize(n);
    Vec13 zeta = Vec13::Zero();
    zeta.tail<4>() = v0;
    double theta = 0.0;
    for (int k = 0; k < n; ++k) {
      dir.z[k] = zeta.head<9>();
      dir.v[k] = zeta.tail<4>();
      theta += quads[k].a.dot(dir.z[k]) + quads[k].b.dot(dir.v[k]);
      if (k < steps) {
        const Vec4 wk = Kw[k] * zeta + kw[k];
        Vec13 next;
        next.head<9>() =
            jacs[k].Ad * zeta.head<9>() + jacs[k].B0 * zeta.tail<4>() + jacs[k].B1 * wk;
        next.tail<4>() = wk;
        zeta = next;
      }
    }
    if (!std::isfinite(theta) || theta > theta_slack) continue;

    dir.directional_derivative = theta;
    dir.decrement = std::sqrt(std::max(0.0, -theta));
    dir.levenberg = lambda;
    return dir;
  }
  throw SolverError(
      "search_direction: no descent direction after maximal regularization");
}

}  // namespace

SearchDirection search_direction(const DynamicsModel& model, const Trajectory& traj,
                                 const Curve& desired, const Weights& w,
                                 const ConstraintSet* constraints, double mu,
                                 double delta) {
  return solve_lq_subproblem(discrete_jacobians(model, traj),
                             cost_quadratics(traj, desired, w, constraints, mu, delta));
}

double projected_directional_derivative(const DynamicsModel& model,
                                        const Trajectory& traj, const Curve& desired,
                                        const Weights& w,
                                        const ConstraintSet* constraints, double mu,
                                        double delta, const std::vector<Mat49>& K,
                                        const std::vector<Vec9>& zc,
                                        const std::vector<Vec4>& vc) {
  const auto jacs = discrete_jacobians(model, traj);
  const auto quads = cost_quadratics(traj, desired, w, constraints, mu, delta);
  const int n = traj.grid.nodes;

  Vec9 dz = Vec9::Zero();
  Vec4 du = vc[0] + K[0] * (zc[0] - dz);
  double deriv = quads[0].a.dot(dz) + quads[0].b.dot(du);

  for (int k = 0; k + 1 < n; ++k) {
    const Vec9 rhs = jacs[k].Ad * dz + jacs[k].B0 * du +
                     jacs[k].B1 * (vc[k + 1] + K[k + 1] * zc[k + 1]);
    const Mat9 lhs = Mat9::Identity() + jacs[k].B1 * K[k + 1];
    const Vec9 dz_next = lhs.partialPivLu().solve(rhs);
    const Vec4 du_next = vc[k + 1] + K[k + 1] * (zc[k + 1] - dz_next);
    dz = dz_next;
    du = du_next;
    deriv += quads[k + 1].a.dot(dz) + quads[k + 1].b.dot(du);
  }
  return deriv;
}

SolveOutput solve_tracking(const DynamicsModel& model, const ConstraintSet* constraints,
                           const Curve& desired, const Trajectory& initial,
                           const Weights& w, const SolverOptions& opts) {
  Trajectory cur = initial;
  SolverReport report;
  bool final_stage_converged = false;

  const double mu_final = opts.barrier.mu_at(opts.barrier.stages - 1);
  for (int stage = 0; stage < opts.barrier.stages; ++stage) {
    const double mu = opts.barrier.mu_at(stage);
    const double delta = opts.barrier.delta_at(stage);
    // Early continuation stages only need to be solved loosely; the
    // tolerance tightens with the barrier weight down to grad_tol.
    const double stage_tol = opts.grad_tol * std::max(1.0, mu / mu_final);
    StageRecord rec;
    rec.mu = mu;
    rec.delta = delta;

    double J = total_cost(cur, desired, w, constraints, mu, delta);
    bool stage_converged = false;

    for (int iter = 0; iter < opts.max_newton; ++iter) {
      const auto jacs = discrete_jacobians(model, cur);
      const SearchDirection dir = solve_lq_subproblem(
          jacs, cost_quadratics(cur, desired, w, constraints, mu, delta));
      const double theta = dir.directional_derivative;
      if (-theta <= stage_tol * (1.0 + std::abs(J))) {
        stage_converged = true;
        break;
      }

      // Tracking regulator about the current iterate; by construction it
      // stabilizes the linearized loop the projection integrates.
      LqrSchedule lqr;
      try {
        lqr = lqr_gain(model, cur, opts.lqr_q, opts.lqr_r, opts.lqr_q);
      } catch (const SolverError&) {
        lqr.K.assign(cur.grid.nodes, Mat49::Zero());
      }

      double alpha = 1.0;
      bool accepted = false;
      for (int bt = 0; bt < opts.max_backtracks && alpha >= opts.step_tol; ++bt) {
        Curve trial;
        trial.grid = cur.grid;
        trial.anchor = cur.anchor;
        trial.x.resize(cur.grid.nodes);
        trial.u.resize(cur.grid.nodes);
        for (int k = 0; k < cur.grid.nodes; ++k) {
          trial.x[k] = cur.x[k] + alpha * dir.z[k];
          trial.u[k] = cur.u[k] + alpha * dir.v[k];
        }
        static const bool trace = std::getenv("RDV_TRACE") != nullptr;
        try {
          Trajectory candidate = project(model, trial, lqr.K, cur.x[0]);
          const double Jt = total_cost(candidate, desired, w, constraints, mu, delta);
          if (std::isfinite(Jt) && Jt <= J + opts.armijo_c1 * alpha * theta) {
            if (Jt > J) {
              throw SolverError("solve: accepted step increased the stage cost");
            }
            cur = std::move(candidate);
            J = Jt;
            accepted = true;
            break;
          }
          if (trace) {
            std::fprintf(stderr, "[ls] stage mu=%.1e it=%d alpha=%.2e Jt=%.9g J=%.9g\n",
                         mu, iter, alpha, Jt, J);
          }
        } catch (const DomainError& e) {
          if (trace) {
            std::fprintf(stderr, "[ls] stage mu=%.1e it=%d alpha=%.2e domain: %s\n", mu,
                         iter, alpha, e.what());
          }
        } catch (const RangeError& e) {
          if (trace) {
            std::fprintf(stderr, "[ls] stage mu=%.1e it=%d alpha=%.2e range: %s\n", mu,
                         iter, alpha, e.what());
          }
        } catch (const SolverError& e) {
          if (trace) {
            std::fprintf(stderr, "[ls] stage mu=%.1e it=%d alpha=%.2e solver: %s\n", mu,
                         iter, alpha, e.what());
          }
        }
        alpha *= opts.backtrack;
      }
      if (!accepted) {
        // No admissible decrease left at this stage; treat as numerically
        // stationary for the current barrier weight.
        stage_converged = -theta <= 1e3 * stage_tol * (1.0 + std::abs(J));
        break;
      }
      rec.iterations.push_back({J, mu, dir.decrement, alpha});
      ++report.total_iterations;
    }

    report.stages.push_back(std::move(rec));
    if (stage == opts.barrier.stages - 1) {
      final_stage_converged = stage_converged;
    }
  }

  report.status = final_stage_converged ? "converged" : "max_iterations";
  report.final_cost = total_cost(cur, desired, w, constraints,
                                 opts.barrier.mu_at(opts.barrier.stages - 1),
                                 opts.barrier.delta_at(opts.barrier.stages - 1));
  report.reintegration_defect = max_reintegration_defect(model, cur);
  if (constraints != nullptr) {
    const Eigen::MatrixXd table = residual_table(cur, *constraints);
    report.worst_residual = table.maxCoeff();
    report.activity = constraint_report(cur, *constraints);
  }
  return {std::move(cur), std::move(report)};
}

}  // namespace rendezvous
