#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "rendezvous/error_space.hpp"

using namespace rendezvous;

namespace {

const VehicleParams zagi = VehicleParams::zagi();
const Limits lim = Limits::standard();

TrimInputs level_trim(double v_a) {
  return trim_level(v_a, zagi, lim);
}

}  // namespace

TEST_CASE("error/inertial transform") {
  SUBCASE("zero error lands on the UGV") {
    const UgvState g{10.0, 20.0, 15.0, 0.7};
    const Eigen::Vector3d p = error_to_inertial({0, 0, 0}, g);
    CHECK(p[0] == 10.0);
    CHECK(p[1] == 20.0);
    CHECK(p[2] == 0.0);
  }
  SUBCASE("aligned frame is a translation") {
    const Eigen::Vector3d p = error_to_inertial({1, 2, -3}, {10.0, 20.0, 15.0, 0.0});
    CHECK(p[0] == doctest::Approx(11.0).epsilon(1e-15));
    CHECK(p[1] == doctest::Approx(22.0).epsilon(1e-15));
    CHECK(p[2] == -3.0);
  }
  SUBCASE("quarter turn") {
    const Eigen::Vector3d p = error_to_inertial({1, 0, 0}, {0.0, 0.0, 15.0, M_PI / 2.0});
    CHECK(std::abs(p[0]) < 1e-15);
    CHECK(p[1] == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("inverse recovers the example") {
    const Eigen::Vector3d e = inertial_to_error({11, 22, -3}, {10.0, 20.0, 15.0, 0.0});
    CHECK(e[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(e[1] == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(e[2] == -3.0);
  }
  SUBCASE("round trip on random poses") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
      const UgvState g{800.0 * uni(rng), 800.0 * uni(rng), 15.0, 7.0 * uni(rng)};
      const Eigen::Vector3d p{500.0 * uni(rng), 500.0 * uni(rng), 60.0 * uni(rng)};
      const Eigen::Vector3d back = error_to_inertial(inertial_to_error(p, g), g);
      CHECK((back - p).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("coupled dynamics: perfect tracking is an equilibrium of the error system") {
  const Path path({{4000.0, 0.0}}, 0.0, 0.0, 0.0);
  const TrimInputs trim = level_trim(18.0);
  const CoupledState x{0, 0, -50.0, 0, 0, 0, 0, 18.0, 100.0};
  const CoupledInput u{trim.u1, 0.0, trim.u3, 0.0};
  const Vec9 dx = coupled_dynamics(x, u, Wind{}, path, zagi);
  for (int i = 0; i < 8; ++i) {
    CAPTURE(i);
    CHECK(std::abs(dx[i]) < 1e-12);
  }
  CHECK(dx[8] == 18.0);  // s_G rate is v_G identically
}

TEST_CASE("coupled dynamics: s_G rate equals v_G for arbitrary states") {
  const Path path({{4000.0, 0.0}}, 0.0, 0.0, 0.3);
  const CoupledState x{5.0, -3.0, -40.0, 1.0, 0.05, 0.2, 0.1, 14.5, 700.0};
  const CoupledInput u{0.5, 0.01, 0.4, 0.7};
  const Vec9 dx = coupled_dynamics(x, u, Wind{-4.33, 2.5, 0.0}, path, zagi);
  CHECK(dx[8] == 14.5);
}

TEST_CASE("coupled/decoupled equivalence") {
  const Wind wind{-4.33, 2.5, 0.0};

  SUBCASE("10 s trim inputs on a straight path") {
    const Path path({{1000.0, 0.0}}, 0.0, 0.0, M_PI / 4.0);
    const AirData air = wind_triangle(18.0, M_PI / 4.0, 0.0, wind);
    const TrimInputs trim = level_trim(air.v_a);
    const TimeGrid grid{0.0, 0.01, 1001};
    const std::vector<CoupledInput> u(grid.nodes, {trim.u1, 0.0, trim.u3, 0.0});
    const CoupledState x0{0, 0, -50.0, 0, 0, 0, 0, 18.0, 10.0};
    CHECK(equivalence_check(x0, u, grid, wind, path, zagi) < 1e-6);
  }

  SUBCASE("zero duration") {
    const Path path({{1000.0, 0.0}}, 0.0, 0.0, 0.0);
    const TimeGrid grid{0.0, 0.01, 1};
    const std::vector<CoupledInput> u(1, {1.0, 0.0, 0.3, 0.0});
    const CoupledState x0{0, 0, -50.0, 0, 0, 0, 0, 18.0, 10.0};
    CHECK(equivalence_check(x0, u, grid, wind, path, zagi) == 0.0);
  }

  SUBCASE("turning path, constant inputs, 5 s") {
    const Path path({{400.0, 1.0 / 35.0}}, 0.0, 0.0, 0.0);
    const TrimInputs trim = level_trim(14.0);
    const TimeGrid grid{0.0, 0.01, 501};
    const std::vector<CoupledInput> u(grid.nodes, {trim.u1, 0.0, trim.u3, 0.05});
    const CoupledState x0{2.0, 1.0, -30.0, 2.0, 0.01, -0.1, 0.04, 10.0, 40.0};
    CHECK(equivalence_check(x0, u, grid, wind, path, zagi) < 1e-6);
  }

  SUBCASE("randomized admissible starts, bounded inputs, 10 s") {
    const Path path({{2500.0, 0.0}}, 0.0, 0.0, 0.5);
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
      const CoupledState x0{10.0 * uni(rng), 10.0 * uni(rng), -45.0 + 5.0 * uni(rng),
                            uni(rng),        0.03 * uni(rng), 0.1 * uni(rng),
                            0.1 * uni(rng),  16.0 + uni(rng), 200.0};
      const TimeGrid grid{0.0, 0.01, 1001};
      std::vector<CoupledInput> u(grid.nodes);
      const double u2_amp = 0.02 * uni(rng);
      for (int k = 0; k < grid.nodes; ++k) {
        u[k] = {0.8, u2_amp * std::sin(0.3 * grid.time(k)), 0.32, 0.1 * uni(rng)};
      }
      CHECK(equivalence_check(x0, u, grid, wind, path, zagi) < 1e-6);
    }
  }
}

TEST_CASE("linearize") {
  const Path path({{3000.0, 0.0}}, 0.0, 0.0, M_PI / 4.0);
  const Wind wind{-4.33, 2.5, 0.0};

  SUBCASE("structural rows") {
    Mat9 A;
    Mat94 B;
    linearize({1.0, 2.0, -40.0, 0.5, 0.02, 0.1, 0.05, 16.0, 300.0},
              {1.0, 0.01, 0.3, 0.5}, wind, path, zagi, A, B);
    // s_G row: d s_dot / d v_G = 1, all else 0.
    for (int j = 0; j < 9; ++j) {
      CHECK(A(8, j) == (j == 7 ? 1.0 : 0.0));
    }
    for (int j = 0; j < 4; ++j) CHECK(B(8, j) == 0.0);
    // roll: d e_phi_dot / d u2 = 1.
    CHECK(B(6, 1) == 1.0);
    CHECK(B(7, 3) == 1.0);  // v_G rate from u4
  }

  SUBCASE("matches central finite differences") {
    const CoupledModel model(path, wind, zagi);
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
      Vec9 x;
      x << 15.0 * uni(rng), 15.0 * uni(rng), -40.0 + 8.0 * uni(rng), 1.2 * uni(rng),
          0.05 * uni(rng), 0.2 * uni(rng), 0.25 * uni(rng), 16.0 + 1.5 * uni(rng),
          400.0 + 300.0 * uni(rng);
      Vec4 u;
      u << 1.0 + 0.8 * uni(rng), 0.05 * uni(rng), 0.3 + 0.2 * uni(rng), uni(rng);
      Mat9 A;
      Mat94 B;
      model.jacobians(x, u, A, B);
      const double h = 1e-6;
      for (int j = 0; j < 13; ++j) {
        Vec9 xp = x, xm = x;
        Vec4 up = u, um = u;
        if (j < 9) {
          xp[j] += h;
          xm[j] -= h;
        } else {
          up[j - 9] += h;
          um[j - 9] -= h;
        }
        const Vec9 fd = (model.rhs(xp, up) - model.rhs(xm, um)) / (2.0 * h);
        for (int i = 0; i < 9; ++i) {
          const double an = j < 9 ? A(i, j) : B(i, j - 9);
          CAPTURE(trial);
          CAPTURE(i);
          CAPTURE(j);
          CHECK(std::abs(fd[i] - an) <= std::max(1e-7, 1e-5 * std::abs(an)));
        }
      }
    }
  }
}

TEST_CASE("integrate") {
  const Path path({{3000.0, 0.0}}, 0.0, 0.0, 0.0);
  const CoupledModel model(path, Wind{}, zagi);
  const TrimInputs trim = level_trim(18.0);

  SUBCASE("equilibrium start stays put") {
    Vec9 x0;
    x0 << 0, 0, -50.0, 0, 0, 0, 0, 18.0, 0.0;
    Vec4 u;
    u << trim.u1, 0.0, trim.u3, 0.0;
    const TimeGrid grid{0.0, 0.05, 201};
    const Trajectory traj = integrate(model, x0, std::vector<Vec4>(grid.nodes, u), grid);
    for (int k = 0; k < grid.nodes; ++k) {
      for (int i = 0; i < 7; ++i) {
        CHECK(std::abs(traj.x[k][i] - x0[i]) < 1e-9);
      }
    }
    // s_G advances exactly v_G * t.
    CHECK(std::abs(traj.x.back()[8] - 18.0 * 10.0) < 1e-9);
    CHECK(max_reintegration_defect(model, traj) < 1e-8);
  }

  SUBCASE("fourth-order convergence on a smooth descent arc") {
    const double g1 = gamma_one(zagi, 20.0);
    const TrimInputs descent = trim_descent(20.0, g1, zagi);
    Vec9 x0;
    x0 << 0.0, 0.0, -60.0, 2.0, g1, 0.05, 0.02, 18.0, 100.0;
    Vec4 u;
    u << descent.u1, 0.0, descent.u3, 0.0;
    const double T = 10.0;
    const auto endpoint = [&](double h) {
      const TimeGrid grid{0.0, h, static_cast<int>(std::round(T / h)) + 1};
      return integrate(model, x0, std::vector<Vec4>(grid.nodes, u), grid).x.back();
    };
    const Vec9 ref = endpoint(0.025);  // h/8 reference
    const double e1 = (endpoint(0.2) - ref).cwiseAbs().maxCoeff();
    const double e2 = (endpoint(0.1) - ref).cwiseAbs().maxCoeff();
    CHECK(std::log2(e1 / e2) >= 3.7);
  }

  SUBCASE("s_G strictly increases while v_G > 0") {
    Vec9 x0;
    x0 << 1.0, -2.0, -40.0, 0.5, 0.01, 0.1, 0.02, 15.0, 5.0;
    Vec4 u;
    u << 0.8, 0.01, 0.35, 0.4;
    const TimeGrid grid{0.0, 0.05, 101};
    const Trajectory traj = integrate(model, x0, std::vector<Vec4>(grid.nodes, u), grid);
    for (int k = 1; k < grid.nodes; ++k) {
      CHECK(traj.x[k][8] > traj.x[k - 1][8]);
    }
  }
}

TEST_CASE("trajectory csv round trip") {
  const Path path({{3000.0, 0.0}}, 0.0, 0.0, M_PI / 4.0);
  const Wind wind{-4.33, 2.5, 0.0};
  const CoupledModel model(path, wind, zagi);
  const AirData air = wind_triangle(18.0, M_PI / 4.0, 0.0, wind);
  const TrimInputs trim = level_trim(air.v_a);

  Vec9 x0;
  x0 << 0.5, -0.5, -50.0, 0, 0.01, 0.02, 0, 18.0, 10.0;
  Vec4 u;
  u << trim.u1, 0.005, trim.u3, 0.1;
  const TimeGrid grid{2.0, 0.05, 101};
  const Trajectory traj = integrate(model, x0, std::vector<Vec4>(grid.nodes, u), grid);

  std::stringstream buffer;
  write_trajectory_csv(buffer, traj, path, wind, zagi);

  std::string header;
  std::getline(buffer, header);
  CHECK(header ==
        "t,e_x,e_y,e_z,e_v,e_gamma,e_chi,e_phi,v_G,s_G,u1,u2,u3,u4,"
        "x_A,y_A,z_A,v_a,n_lf");

  // e_z column equals the reconstructed z_A column on every row.
  std::string line;
  int rows = 0;
  while (std::getline(buffer, line)) {
    std::istringstream cells(line);
    std::string cell;
    std::vector<double> v;
    while (std::getline(cells, cell, ',')) v.push_back(std::stod(cell));
    REQUIRE(v.size() == 19);
    CHECK(v[3] == v[16]);  // e_z == z_A, exactly as printed
    ++rows;
  }
  CHECK(rows == grid.nodes);

  std::stringstream again;
  write_trajectory_csv(again, traj, path, wind, zagi);
  const Curve back = read_trajectory_csv(again);
  REQUIRE(back.grid.nodes == grid.nodes);
  CHECK(back.grid.t_start == doctest::Approx(2.0).epsilon(1e-12));
  for (int k = 0; k < grid.nodes; ++k) {
    CHECK((back.x[k] - traj.x[k]).cwiseAbs().maxCoeff() <=
          1e-9 * (1.0 + traj.x[k].cwiseAbs().maxCoeff()));
    CHECK((back.u[k] - traj.u[k]).cwiseAbs().maxCoeff() <=
          1e-9 * (1.0 + traj.u[k].cwiseAbs().maxCoeff()));
  }
}
