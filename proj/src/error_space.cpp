#include "rendezvous/error_space.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace rendezvous {

namespace {

std::array<double, 9> to_array(const Vec9& v) {
  std::array<double, 9> a;
  for (int i = 0; i < 9; ++i) a[i] = v[i];
  return a;
}

std::array<double, 4> to_array4(const Vec4& v) { return {v[0], v[1], v[2], v[3]}; }

}  // namespace

Vec9 CoupledModel::rhs(const Vec9& x, const Vec4& u) const {
  const PathCurvature curv = path_->smooth_curvature(x[8]);
  const auto dx =
      detail::coupled_rhs_core<double>(to_array(x), to_array4(u), wind_, params_,
                                       curv.sigma, curv.dsigma_ds, curv.chi, x[8]);
  Vec9 out;
  for (int i = 0; i < 9; ++i) out[i] = dx[i];
  return out;
}

void CoupledModel::jacobians(const Vec9& x, const Vec4& u, Mat9& A, Mat94& B) const {
  using D = Dual<13>;
  const PathCurvature curv = path_->smooth_curvature(x[8]);

  std::array<D, 9> xs;
  std::array<D, 4> us;
  for (int i = 0; i < 9; ++i) xs[i] = D::seed(x[i], i);
  for (int i = 0; i < 4; ++i) us[i] = D::seed(u[i], 9 + i);

  const auto dx = detail::coupled_rhs_core<D>(xs, us, wind_, params_, curv.sigma,
                                              curv.dsigma_ds, curv.chi, x[8]);
  for (int i = 0; i < 9; ++i) {
    for (int j = 0; j < 9; ++j) A(i, j) = dx[i].g[j];
    for (int j = 0; j < 4; ++j) B(i, j) = dx[i].g[9 + j];
  }
}

Vec9 coupled_dynamics(const CoupledState& x, const CoupledInput& u, const Wind& wind,
                      const Path& path, const VehicleParams& params) {
  return CoupledModel(path, wind, params).rhs(x.to_vec(), u.to_vec());
}

void linearize(const CoupledState& x, const CoupledInput& u, const Wind& wind,
               const Path& path, const VehicleParams& params, Mat9& A, Mat94& B) {
  CoupledModel(path, wind, params).jacobians(x.to_vec(), u.to_vec(), A, B);
}

Eigen::Vector3d error_to_inertial(const Eigen::Vector3d& e, const UgvState& ugv) {
  const double c = std::cos(ugv.chi_G);
  const double s = std::sin(ugv.chi_G);
  return {ugv.x_G + c * e[0] - s * e[1], ugv.y_G + s * e[0] + c * e[1], e[2]};
}

Eigen::Vector3d inertial_to_error(const Eigen::Vector3d& p_A, const UgvState& ugv) {
  const double c = std::cos(ugv.chi_G);
  const double s = std::sin(ugv.chi_G);
  const double dx = p_A[0] - ugv.x_G;
  const double dy = p_A[1] - ugv.y_G;
  return {c * dx + s * dy, -s * dx + c * dy, p_A[2]};
}

Vec9 rk4_step(const DynamicsModel& model, const Vec9& x, const Vec4& u0, const Vec4& u1,
              double h) {
  const Vec4 um = 0.5 * (u0 + u1);
  const Vec9 f1 = model.rhs(x, u0);
  const Vec9 f2 = model.rhs(x + 0.5 * h * f1, um);
  const Vec9 f3 = model.rhs(x + 0.5 * h * f2, um);
  const Vec9 f4 = model.rhs(x + h * f3, u1);
  return x + (h / 6.0) * (f1 + 2.0 * f2 + 2.0 * f3 + f4);
}

void rk4_step_jacobians(const DynamicsModel& model, const Vec9& x, const Vec4& u0,
                        const Vec4& u1, double h, Mat9& Ad, Mat94& B0, Mat94& B1) {
  const Vec4 um = 0.5 * (u0 + u1);

  Mat9 A1, A2, A3, A4;
  Mat94 Bm1, Bm2, Bm3, Bm4;

  const Vec9 f1 = model.rhs(x, u0);
  model.jacobians(x, u0, A1, Bm1);
  const Vec9 s2 = x + 0.5 * h * f1;
  const Vec9 f2 = model.rhs(s2, um);
  model.jacobians(s2, um, A2, Bm2);
  const Vec9 s3 = x + 0.5 * h * f2;
  const Vec9 f3 = model.rhs(s3, um);
  model.jacobians(s3, um, A3, Bm3);
  const Vec9 s4 = x + h * f3;
  model.jacobians(s4, u1, A4, Bm4);

  // Stage sensitivities of f_i with respect to (x_k, u_k, u_{k+1}).
  const Mat9& F1x = A1;
  const Mat94& F1u0 = Bm1;

  const Mat9 F2x = A2 * (Mat9::Identity() + 0.5 * h * F1x);
  const Mat94 F2u0 = A2 * (0.5 * h * F1u0) + 0.5 * Bm2;
  const Mat94 F2u1 = 0.5 * Bm2;

  const Mat9 F3x = A3 * (Mat9::Identity() + 0.5 * h * F2x);
  const Mat94 F3u0 = A3 * (0.5 * h * F2u0) + 0.5 * Bm3;
  const Mat94 F3u1 = A3 * (0.5 * h * F2u1) + 0.5 * Bm3;

  const Mat9 F4x = A4 * (Mat9::Identity() + h * F3x);
  const Mat94 F4u0 = A4 * (h * F3u0);
  const Mat94 F4u1 = A4 * (h * F3u1) + Bm4;

  Ad = Mat9::Identity() + (h / 6.0) * (F1x + 2.0 * F2x + 2.0 * F3x + F4x);
  B0 = (h / 6.0) * (F1u0 + 2.0 * F2u0 + 2.0 * F3u0 + F4u0);
  B1 = (h / 6.0) * (2.0 * F2u1 + 2.0 * F3u1 + F4u1);
}

Trajectory integrate(const DynamicsModel& model, const Vec9& x0,
                     const std::vector<Vec4>& inputs, const TimeGrid& grid) {
  if (static_cast<int>(inputs.size()) != grid.nodes) {
    throw std::invalid_argument("integrate: inputs must cover every grid node");
  }
  Trajectory traj;
  traj.grid = grid;
  traj.x.resize(grid.nodes);
  traj.u = inputs;
  traj.x[0] = x0;
  for (int k = 0; k + 1 < grid.nodes; ++k) {
    try {
      traj.x[k + 1] = rk4_step(model, traj.x[k], inputs[k], inputs[k + 1], grid.h);
    } catch (const DomainError& e) {
      std::ostringstream msg;
      msg << e.what() << " (first failure integrating step at t = " << grid.time(k) << ")";
      throw DomainError(msg.str());
    }
  }
  if (const auto* coupled = dynamic_cast<const CoupledModel*>(&model)) {
    const PathPose pose = coupled->path().lookup(x0[8]);
    traj.anchor = UgvState{pose.x, pose.y, x0[7], pose.chi};
  }
  return traj;
}

Trajectory integrate(const CoupledState& x0, const std::vector<CoupledInput>& inputs,
                     const TimeGrid& grid, const Wind& wind, const Path& path,
                     const VehicleParams& params) {
  std::vector<Vec4> u(inputs.size());
  for (size_t i = 0; i < inputs.size(); ++i) u[i] = inputs[i].to_vec();
  return integrate(CoupledModel(path, wind, params), x0.to_vec(), u, grid);
}

double max_reintegration_defect(const DynamicsModel& model, const Curve& traj) {
  double worst = 0.0;
  for (int k = 0; k + 1 < traj.grid.nodes; ++k) {
    const Vec9 pred = rk4_step(model, traj.x[k], traj.u[k], traj.u[k + 1], traj.grid.h);
    worst = std::max(worst, (pred - traj.x[k + 1]).cwiseAbs().maxCoeff());
  }
  return worst;
}

double equivalence_check(const CoupledState& x0, const std::vector<CoupledInput>& inputs,
                         const TimeGrid& grid, const Wind& wind, const Path& path,
                         const VehicleParams& params) {
  return equivalence_check(CoupledModel(path, wind, params), x0, inputs, grid, wind, path,
                           params);
}

double equivalence_check(const DynamicsModel& coupled_model, const CoupledState& x0,
                         const std::vector<CoupledInput>& inputs, const TimeGrid& grid,
                         const Wind& wind, const Path& path, const VehicleParams& params) {
  if (static_cast<int>(inputs.size()) != grid.nodes) {
    throw std::invalid_argument("equivalence_check: inputs must cover every grid node");
  }
  if (grid.nodes < 2) return 0.0;

  std::vector<Vec4> u(inputs.size());
  for (size_t i = 0; i < inputs.size(); ++i) u[i] = inputs[i].to_vec();

  // (a) coupled integration
  const Trajectory coupled = integrate(coupled_model, x0.to_vec(), u, grid);

  // (b) decoupled integration: UAV 7-state plus UGV 5-state (pose, speed, arc
  // length), stacked into one 12-vector so they share the RK4 machinery.
  const PathPose pose0 = path.lookup(x0.s_G);
  const Eigen::Vector3d p_A0 =
      error_to_inertial({x0.e_x, x0.e_y, x0.e_z}, {pose0.x, pose0.y, x0.v_G, pose0.chi});

  using Vec12 = Eigen::Matrix<double, 12, 1>;
  Vec12 y;
  // UAV: x, y, z, v, gamma, chi, phi
  y << p_A0[0], p_A0[1], p_A0[2], x0.e_v + x0.v_G, x0.e_gamma, x0.e_chi + pose0.chi,
      x0.e_phi,
      // UGV: x, y, v, chi, s
      pose0.x, pose0.y, x0.v_G, pose0.chi, x0.s_G;

  const auto decoupled_rhs = [&](const Vec12& z, const Vec4& uu) {
    UavState a{z[0], z[1], z[2], z[3], z[4], z[5], z[6]};
    UgvState g{z[7], z[8], z[9], z[10]};
    const double sigma = path.smooth_curvature(z[11]).sigma;
    const auto da = uav_dynamics(a, UavInput{uu[0], uu[1], uu[2]}, wind, params);
    const auto dg = ugv_dynamics(g, uu[3], sigma);
    Vec12 dz;
    dz << da, dg, z[9];
    return dz;
  };

  const auto rk4 = [&](const Vec12& z, const Vec4& ua, const Vec4& ub, double h) {
    const Vec4 um = 0.5 * (ua + ub);
    const Vec12 k1 = decoupled_rhs(z, ua);
    const Vec12 k2 = decoupled_rhs(z + 0.5 * h * k1, um);
    const Vec12 k3 = decoupled_rhs(z + 0.5 * h * k2, um);
    const Vec12 k4 = decoupled_rhs(z + h * k3, ub);
    return (z + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)).eval();
  };

  double worst = 0.0;
  for (int k = 0; k < grid.nodes; ++k) {
    // Transform the decoupled state into error coordinates.
    const UgvState g{y[7], y[8], y[9], y[10]};
    const Eigen::Vector3d e = inertial_to_error({y[0], y[1], y[2]}, g);
    Vec9 err;
    err << e[0], e[1], e[2], y[3] - y[9], y[4], y[5] - y[10], y[6], y[9], y[11];
    worst = std::max(worst, (err - coupled.x[k]).cwiseAbs().maxCoeff());
    if (k + 1 < grid.nodes) {
      y = rk4(y, u[k], u[k + 1], grid.h);
    }
  }
  return worst;
}

void write_trajectory_csv(std::ostream& os, const Curve& curve, const Path& path,
                          const Wind& wind, const VehicleParams& params) {
  os << "t,e_x,e_y,e_z,e_v,e_gamma,e_chi,e_phi,v_G,s_G,u1,u2,u3,u4,"
        "x_A,y_A,z_A,v_a,n_lf\n";
  char buf[64];
  const auto put = [&](double v, char sep) {
    std::snprintf(buf, sizeof(buf), "%.12g%c", v, sep);
    os << buf;
  };
  for (int k = 0; k < curve.grid.nodes; ++k) {
    const Vec9& x = curve.x[k];
    const Vec4& u = curve.u[k];
    const PathPose pose = path.lookup(x[8]);
    const UgvState g{pose.x, pose.y, x[7], pose.chi};
    const Eigen::Vector3d p_A = error_to_inertial({x[0], x[1], x[2]}, g);
    const AirData air = wind_triangle(x[3] + x[7], x[5] + pose.chi, x[4], wind);
    const double n_lf = load_factor(aero_forces(air.v_a, u[2], params).L, params);

    put(curve.grid.time(k), ',');
    for (int i = 0; i < 9; ++i) put(x[i], ',');
    for (int i = 0; i < 4; ++i) put(u[i], ',');
    put(p_A[0], ',');
    put(p_A[1], ',');
    put(p_A[2], ',');
    put(air.v_a, ',');
    put(n_lf, '\n');
  }
}

Curve read_trajectory_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) {
    throw ParseError("trajectory csv: missing header row");
  }
  Curve curve;
  std::vector<double> times;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::array<double, 19> f{};
    std::string cell;
    for (int i = 0; i < 19; ++i) {
      if (!std::getline(row, cell, ',')) {
        throw ParseError("trajectory csv: short row");
      }
      f[i] = std::stod(cell);
    }
    times.push_back(f[0]);
    Vec9 x;
    for (int i = 0; i < 9; ++i) x[i] = f[1 + i];
    Vec4 u;
    for (int i = 0; i < 4; ++i) u[i] = f[10 + i];
    curve.x.push_back(x);
    curve.u.push_back(u);
  }
  if (times.size() < 2) {
    throw ParseError("trajectory csv: need at least two rows");
  }
  curve.grid.t_start = times.front();
  curve.grid.h = times[1] - times[0];
  curve.grid.nodes = static_cast<int>(times.size());
  return curve;
}

}  // namespace rendezvous
