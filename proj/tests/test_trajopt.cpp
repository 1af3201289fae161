#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "rendezvous/runner.hpp"
#include "rendezvous/trajopt.hpp"

using namespace rendezvous;

namespace {

const VehicleParams zagi = VehicleParams::zagi();
const Limits lim = Limits::standard();

// Frozen affine test system: a double integrator in states (0, 1) driven by
// u1, mildly stable first-order dynamics everywhere else, with each input
// touching at least one state.
LinearModel frozen_model() {
  Mat9 A = -0.1 * Mat9::Identity();
  A(0, 0) = 0.0;
  A(0, 1) = 1.0;
  A(1, 1) = 0.0;
  Mat94 B = Mat94::Zero();
  B(1, 0) = 1.0;
  B(3, 1) = 0.5;
  B(4, 2) = 0.3;
  B(7, 3) = 1.0;
  return LinearModel(A, B);
}

// Exact discrete step matrices of the RK4 map for a frozen (A, B) system,
// derived stage by stage (independent of rk4_step_jacobians).
void frozen_step_matrices(const Mat9& A, const Mat94& B, double h, Mat9& Ad, Mat94& B0,
                          Mat94& B1) {
  const Mat9 I = Mat9::Identity();
  const Mat9 M1 = A;
  const Mat9 M2 = A * (I + 0.5 * h * M1);
  const Mat9 M3 = A * (I + 0.5 * h * M2);
  const Mat9 M4 = A * (I + h * M3);
  Ad = I + (h / 6.0) * (M1 + 2.0 * M2 + 2.0 * M3 + M4);

  const Mat94 N1 = B;
  const Mat94 N2 = A * (0.5 * h * N1) + 0.5 * B;
  const Mat94 N3 = A * (0.5 * h * N2) + 0.5 * B;
  const Mat94 N4 = A * (h * N3);
  B0 = (h / 6.0) * (N1 + 2.0 * N2 + 2.0 * N3 + N4);

  const Mat94 P2 = 0.5 * B;
  const Mat94 P3 = A * (0.5 * h * P2) + 0.5 * B;
  const Mat94 P4 = A * (h * P3) + B;
  B1 = (h / 6.0) * (2.0 * P2 + 2.0 * P3 + P4);
}

struct ShortScenario {
  Path path{std::vector<PathSegment>{{6000.0, 0.0}}, 0.0, 0.0, M_PI / 4.0};
  Wind wind{-4.33, 2.5, 0.0};
  RendezvousSpec spec{0.5, -10.0, 400.0, 18.0, 13.8, 2.0, 36.0};
  TimeGrid grid{2.0, 0.05, 681};
};

}  // namespace

TEST_CASE("lqr_gain: zero weights give a zero gain schedule") {
  const LinearModel model = frozen_model();
  Curve traj;
  traj.grid = TimeGrid{0.0, 0.05, 101};
  traj.x.assign(traj.grid.nodes, Vec9::Zero());
  traj.u.assign(traj.grid.nodes, Vec4::Zero());

  const LqrSchedule lqr =
      lqr_gain(model, traj, Vec9::Zero(), Vec4::Ones(), Vec9::Zero());
  for (const Mat49& K : lqr.K) {
    CHECK(K.cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("lqr_gain: embedded double integrator matches the algebraic Riccati gain") {
  Mat9 A = -1.0 * Mat9::Identity();
  A(0, 0) = 0.0;
  A(0, 1) = 1.0;
  A(1, 1) = 0.0;
  Mat94 B = Mat94::Zero();
  B(1, 0) = 1.0;
  const LinearModel model(A, B);

  Curve traj;
  traj.grid = TimeGrid{0.0, 0.05, 401};  // 20 s, long enough to reach steady state
  traj.x.assign(traj.grid.nodes, Vec9::Zero());
  traj.u.assign(traj.grid.nodes, Vec4::Zero());

  const LqrSchedule lqr =
      lqr_gain(model, traj, Vec9::Ones(), Vec4::Ones(), Vec9::Ones());

  // Closed-form ARE solution of the 2x2 block with Q = I, R = 1: K = [1, sqrt(3)].
  CHECK(std::abs(lqr.K[0](0, 0) - 1.0) < 1e-4);
  CHECK(std::abs(lqr.K[0](0, 1) - std::sqrt(3.0)) < 1e-4);

  // P stays symmetric along the whole sweep.
  for (const Mat9& P : lqr.P) {
    CHECK((P - P.transpose()).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("project") {
  const ShortScenario sc;
  const CoupledModel model(sc.path, sc.wind, zagi);
  const SolverOptions opts = SolverOptions::defaults();

  const Trajectory initial =
      initial_trajectory(sc.spec, sc.path, sc.wind, zagi, lim, sc.grid);
  const LqrSchedule lqr = lqr_gain(model, initial, opts.lqr_q, opts.lqr_r, opts.lqr_q);

  SUBCASE("a trajectory is a fixed point") {
    const Trajectory again = project(model, initial, lqr.K, initial.x[0]);
    double worst = 0.0;
    for (int k = 0; k < sc.grid.nodes; ++k) {
      worst = std::max(worst, (again.x[k] - initial.x[k]).cwiseAbs().maxCoeff());
      worst = std::max(worst, (again.u[k] - initial.u[k]).cwiseAbs().maxCoeff());
    }
    CHECK(worst < 1e-8);
  }

  SUBCASE("zero gain reduces to open-loop integration") {
    Curve curve = initial;
    for (auto& u : curve.u) u[1] += 0.002;  // perturb the roll-rate channel
    const std::vector<Mat49> K0(sc.grid.nodes, Mat49::Zero());
    const Trajectory open = project(model, curve, K0, initial.x[0]);
    const Trajectory direct = integrate(model, initial.x[0], curve.u, sc.grid);
    for (int k = 0; k < sc.grid.nodes; ++k) {
      CHECK((open.x[k] - direct.x[k]).cwiseAbs().maxCoeff() < 1e-12);
    }
  }

  SUBCASE("the desired curve is not a trajectory; its projection is") {
    const Curve desired = desired_curve(sc.spec, sc.path, sc.wind, zagi, lim, sc.grid);
    CHECK(max_reintegration_defect(model, desired) > 1e-4);
    const Trajectory projected = project(model, desired, lqr.K, initial.x[0]);
    CHECK(max_reintegration_defect(model, projected) < 1e-8);
    // The projected vertical error cannot follow the infeasible profile exactly.
    double dz = 0.0;
    for (int k = 0; k < sc.grid.nodes; ++k) {
      dz = std::max(dz, std::abs(projected.x[k][2] - desired.x[k][2]));
    }
    CHECK(dz > 0.01);
  }
}

TEST_CASE("total_cost") {
  const ShortScenario sc;
  const CoupledModel model(sc.path, sc.wind, zagi);
  const Trajectory traj =
      initial_trajectory(sc.spec, sc.path, sc.wind, zagi, lim, sc.grid);
  Weights w = Weights::defaults();

  SUBCASE("tracking vanishes when the desired curve is the trajectory itself") {
    CHECK(total_cost(traj, traj, w, nullptr, 0.1, 0.05) == 0.0);
  }

  SUBCASE("doubling Q doubles the state-tracking part") {
    Curve desired = traj;
    for (auto& x : desired.x) x[2] += 1.0;  // vertical offset only
    for (auto& x : desired.x) x[4] += 0.01;
    const double base = total_cost(traj, desired, w, nullptr, 0.1, 0.05);
    Weights doubled = w;
    doubled.Q *= 2.0;
    doubled.P1 *= 2.0;
    CHECK(total_cost(traj, desired, doubled, nullptr, 0.1, 0.05) ==
          doctest::Approx(2.0 * base).epsilon(1e-12));
  }
}

TEST_CASE("projected cost gradient matches finite differences through the projection") {
  ShortScenario sc;
  sc.grid = TimeGrid{2.0, 0.05, 201};  // 10 s window keeps the check fast
  const CoupledModel model(sc.path, sc.wind, zagi);
  const ConstraintSet constraints(lim, sc.path, sc.wind, zagi);
  const Weights w = Weights::defaults();
  const SolverOptions opts = SolverOptions::defaults();
  const double mu = 0.05, delta = 0.02;

  const Curve desired = desired_curve(sc.spec, sc.path, sc.wind, zagi, lim, sc.grid);
  const Trajectory start =
      initial_trajectory(sc.spec, sc.path, sc.wind, zagi, lim, sc.grid);
  const LqrSchedule lqr = lqr_gain(model, start, opts.lqr_q, opts.lqr_r, opts.lqr_q);
  const Trajectory traj = project(model, desired, lqr.K, start.x[0]);
  const LqrSchedule lqr_t = lqr_gain(model, traj, opts.lqr_q, opts.lqr_r, opts.lqr_q);

  std::mt19937 rng(99);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int trial = 0; trial < 3; ++trial) {
    std::vector<Vec9> zc(sc.grid.nodes);
    std::vector<Vec4> vc(sc.grid.nodes);
    for (int k = 0; k < sc.grid.nodes; ++k) {
      const double envelope = std::sin(M_PI * k / (sc.grid.nodes - 1.0));
      for (int i = 0; i < 9; ++i) zc[k][i] = 0.5 * envelope * uni(rng);
      vc[k][0] = 0.05 * envelope * uni(rng);
      vc[k][1] = 0.005 * envelope * uni(rng);
      vc[k][2] = 0.01 * envelope * uni(rng);
      vc[k][3] = 0.05 * envelope * uni(rng);
    }

    const double analytic = projected_directional_derivative(
        model, traj, desired, w, &constraints, mu, delta, lqr_t.K, zc, vc);

    const auto cost_at = [&](double eps) {
      Curve curve = traj;
      for (int k = 0; k < sc.grid.nodes; ++k) {
        curve.x[k] += eps * zc[k];
        curve.u[k] += eps * vc[k];
      }
      const Trajectory projected = project(model, curve, lqr_t.K, traj.x[0]);
      return total_cost(projected, desired, w, &constraints, mu, delta);
    };
    const auto central = [&](double eps) {
      return (cost_at(eps) - cost_at(-eps)) / (2.0 * eps);
    };
    // Richardson-extrapolated central difference.
    const double d1 = central(2e-4);
    const double d2 = central(1e-4);
    const double fd = (4.0 * d2 - d1) / 3.0;

    CAPTURE(trial);
    CHECK(std::abs(fd - analytic) <= 1e-5 * std::max(1.0, std::abs(analytic)));
  }
}

TEST_CASE("search_direction produces descent on randomized trajectories") {
  ShortScenario sc;
  sc.grid = TimeGrid{2.0, 0.05, 121};
  const CoupledModel model(sc.path, sc.wind, zagi);
  const ConstraintSet constraints(lim, sc.path, sc.wind, zagi);
  const Weights w = Weights::defaults();
  const double mu = 0.1, delta = 0.05;

  const Curve desired = desired_curve(sc.spec, sc.path, sc.wind, zagi, lim, sc.grid);
  const Trajectory base =
      initial_trajectory(sc.spec, sc.path, sc.wind, zagi, lim, sc.grid);

  std::mt19937 rng(7);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Vec4> inputs = base.u;
    for (int k = 0; k < sc.grid.nodes; ++k) {
      inputs[k][0] += 0.1 * uni(rng);
      inputs[k][1] += 0.004 * uni(rng);
      inputs[k][2] += 0.01 * uni(rng);
      inputs[k][3] += 0.1 * uni(rng);
    }
    const Trajectory traj = integrate(model, base.x[0], inputs, sc.grid);
    const SearchDirection dir =
        search_direction(model, traj, desired, w, &constraints, mu, delta);
    CAPTURE(trial);
    CHECK(dir.directional_derivative < 0.0);
  }
}

TEST_CASE("already-optimal tracking converges without Newton steps") {
  const ShortScenario sc;
  const CoupledModel model(sc.path, sc.wind, zagi);
  const Trajectory trim =
      initial_trajectory(sc.spec, sc.path, sc.wind, zagi, lim, sc.grid);

  SolverOptions opts = SolverOptions::defaults();
  opts.barrier.stages = 2;
  const SolveOutput out =
      solve_tracking(model, nullptr, trim, trim, Weights::defaults(), opts);
  CHECK(out.report.status == "converged");
  CHECK(out.report.total_iterations <= 1);
  CHECK(total_cost(out.trajectory, trim, Weights::defaults(), nullptr, 0.1, 0.05) <
        1e-8);
}

TEST_CASE("one Newton step solves a frozen linear-quadratic instance") {
  const LinearModel model = frozen_model();
  const int nodes = 41;
  const double h = 0.05;
  const TimeGrid grid{0.0, h, nodes};

  // Smooth desired curve, zero desired inputs.
  Curve desired;
  desired.grid = grid;
  desired.x.resize(nodes);
  desired.u.assign(nodes, Vec4::Zero());
  for (int k = 0; k < nodes; ++k) {
    const double t = grid.time(k);
    for (int i = 0; i < 9; ++i) {
      desired.x[k][i] = 0.3 * std::sin(0.8 * t + 0.3 * i);
    }
  }

  Weights w;
  w.Q << 2.0, 1.0, 1.5, 0.5, 1.0, 0.8, 0.6, 0.4, 0.3;
  w.R << 0.5, 1.0, 0.7, 0.9;
  w.P1 = 3.0 * w.Q;

  Vec9 x0;
  x0 << 0.4, -0.2, 0.1, 0.0, 0.3, -0.1, 0.2, 0.0, 0.1;
  const Trajectory initial =
      integrate(model, x0, std::vector<Vec4>(nodes, Vec4::Zero()), grid);

  // One Newton step with a full-length projection.
  const SearchDirection dir =
      search_direction(model, initial, desired, w, nullptr, 0.1, 0.05);
  CHECK(dir.levenberg == 0.0);
  Curve stepped;
  stepped.grid = grid;
  stepped.x.resize(nodes);
  stepped.u.resize(nodes);
  for (int k = 0; k < nodes; ++k) {
    stepped.x[k] = initial.x[k] + dir.z[k];
    stepped.u[k] = initial.u[k] + dir.v[k];
  }
  const LqrSchedule lqr =
      lqr_gain(model, initial, Vec9::Ones(), Vec4::Ones(), Vec9::Ones());
  const Trajectory newton = project(model, stepped, lqr.K, x0);

  // Independent oracle: dense KKT solve of the discretized LQ problem.
  Mat9 A, dummyA;
  Mat94 B, dummyB;
  model.jacobians(Vec9::Zero(), Vec4::Zero(), A, B);
  Mat9 Ad;
  Mat94 B0, B1;
  frozen_step_matrices(A, B, h, Ad, B0, B1);

  const int steps = nodes - 1;
  const int nz = 9 * steps;        // z_1 .. z_N
  const int nv = 4 * nodes;        // v_0 .. v_N
  const int nc = 9 * steps;        // dynamics constraints
  const int dim = nz + nv + nc;
  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim);

  const auto zoff = [&](int k) { return 9 * (k - 1); };        // k in 1..N
  const auto voff = [&](int k) { return nz + 4 * k; };         // k in 0..N

  for (int k = 0; k < nodes; ++k) {
    const double wk = (k == 0 || k == nodes - 1) ? 0.5 * h : h;
    Vec9 qd = wk * w.Q;
    Vec9 gx = wk * w.Q.cwiseProduct(initial.x[k] - desired.x[k]);
    if (k == nodes - 1) {
      qd += w.P1;
      gx += w.P1.cwiseProduct(initial.x[k] - desired.x[k]);
    }
    if (k >= 1) {
      kkt.block<9, 9>(zoff(k), zoff(k)) += qd.asDiagonal();
      rhs.segment<9>(zoff(k)) -= gx;
    }
    const Vec4 rd = wk * w.R;
    const Vec4 gu = wk * w.R.cwiseProduct(initial.u[k] - desired.u[k]);
    kkt.block<4, 4>(voff(k), voff(k)) += rd.asDiagonal();
    rhs.segment<4>(voff(k)) -= gu;
  }
  for (int k = 0; k < steps; ++k) {
    const int row = nz + nv + 9 * k;
    kkt.block<9, 9>(row, zoff(k + 1)) = Mat9::Identity();
    if (k >= 1) kkt.block<9, 9>(row, zoff(k)) = -Ad;
    kkt.block<9, 4>(row, voff(k)) = -B0;
    kkt.block<9, 4>(row, voff(k + 1)) = -B1;
  }
  kkt.block(0, nz + nv, nz + nv, nc) =
      kkt.block(nz + nv, 0, nc, nz + nv).transpose();

  const Eigen::VectorXd sol = kkt.partialPivLu().solve(rhs);

  double worst = 0.0;
  for (int k = 0; k < nodes; ++k) {
    const Vec9 z_qp = k == 0 ? Vec9::Zero() : Vec9(sol.segment<9>(zoff(k)));
    const Vec4 v_qp = sol.segment<4>(voff(k));
    worst = std::max(worst,
                     (newton.x[k] - (initial.x[k] + z_qp)).cwiseAbs().maxCoeff());
    worst = std::max(worst,
                     (newton.u[k] - (initial.u[k] + v_qp)).cwiseAbs().maxCoeff());
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("small constrained rendezvous solve") {
  ShortScenario sc;
  const CoupledModel model(sc.path, sc.wind, zagi);
  const ConstraintSet constraints(lim, sc.path, sc.wind, zagi);
  const Weights w = Weights::defaults();
  SolverOptions opts = SolverOptions::defaults();

  const Curve desired = desired_curve(sc.spec, sc.path, sc.wind, zagi, lim, sc.grid);
  const Trajectory initial =
      initial_trajectory(sc.spec, sc.path, sc.wind, zagi, lim, sc.grid);

  const SolveOutput out =
      solve_tracking(model, &constraints, desired, initial, w, opts);

  CHECK(out.report.status == "converged");
  CHECK(out.report.reintegration_defect < 1e-8);
  CHECK(out.report.worst_residual <= 1e-3);

  // Costs are nonincreasing within every barrier stage.
  for (const StageRecord& stage : out.report.stages) {
    for (size_t i = 1; i < stage.iterations.size(); ++i) {
      CHECK(stage.iterations[i].cost <= stage.iterations[i - 1].cost + 1e-12);
    }
  }

  // The achieved rendezvous time lands at or somewhat after the closed-form
  // prediction; on this short maneuver the drag-limited deceleration to vf is
  // a large fraction of the horizon, so the lateness is proportionally big.
  const double achieved = extract_rendezvous_time(out.trajectory, sc.spec.t0);
  const DesiredProfiles profiles(sc.spec, zagi, lim);
  CHECK(std::isfinite(achieved));
  CHECK(achieved > 0.95 * profiles.rendezvous_time());
  CHECK(achieved < 1.5 * profiles.rendezvous_time());
}
