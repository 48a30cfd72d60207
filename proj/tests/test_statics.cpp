#include <cmath>
#include <vector>

#include "doctest.h"
#include "plsrod/statics.hpp"

using namespace plsrod;

namespace {

Rod desk_rod(int segments_per_section = 5) {
  Rod rod;
  rod.profile = {1e-2, 5e-3, 0.2};
  rod.material = Material::from_poisson(1.1e5, 0.45, 2000.0, 0.0);
  rod.material.shear_modulus = 3.793e4;
  rod.partition.bounds = {0.0, 0.09, 0.16, 0.2};
  rod.partition.segments_per_section = segments_per_section;
  return rod;
}

CableSet four_cables(double r0 = 4e-3, double r1 = 1e-3) {
  CableSet cables;
  const double pi = 3.14159265358979323846;
  cables.azimuth = {pi, 1.5 * pi, 0.0, 0.5 * pi};
  cables.base_offset = r0;
  cables.tip_offset = r1;
  cables.length = 0.2;
  return cables;
}

LoadCase hanging(int n_cables = 0) {
  LoadCase loads;
  loads.gravity = gravity_twist(Eigen::Vector3d(0.0, 0.0, -9.81));
  if (n_cables > 0) loads.tensions = Eigen::VectorXd::Zero(n_cables);
  return loads;
}

Eigen::Vector3d tip_of(const Rod& rod, const Eigen::VectorXd& q) {
  return (rod.base_pose * pose_at(rod, q, rod.length())).translation;
}

}  // namespace

TEST_CASE("standing solve under gravity lands on the frozen tip deflections") {
  const Rod rod = desk_rod();
  const CableSet none;
  const LoadCase loads = hanging();
  const Eigen::VectorXd q_rest = straight_configuration(rod);
  StaticOptions options;
  options.tolerance = 1e-10;

  struct Pinned {
    const char* mode;
    Eigen::Vector3d tip;
  };
  // Frozen solver outputs for the hanging cantilever, one per strain basis.
  const std::vector<Pinned> pins = {
      {"full", {0.057864, 0.0, -0.178061}},
      {"euler_bernoulli", {0.054527, 0.0, -0.175992}},
      {"extensible_kirchhoff", {0.058857, 0.0, -0.176199}},
      {"timoshenko", {0.053634, 0.0, -0.177857}},
  };
  for (const Pinned& pin : pins) {
    CAPTURE(pin.mode);
    const StaticResult res = solve_static(rod, none, loads,
                                          make_selection(pin.mode), q_rest,
                                          nullptr, options);
    REQUIRE(res.converged);
    CHECK(res.residual_norm <= options.tolerance);
    const Eigen::Vector3d tip = tip_of(rod, res.q);
    CHECK((tip - pin.tip).cwiseAbs().maxCoeff() <= 5e-6);
    // The load is planar, so nothing may leak sideways.
    CHECK(std::abs(tip.y()) <= 1e-9);
  }
}

TEST_CASE("constant-strain baseline solve lands on its frozen deflection") {
  const Rod rod = desk_rod();
  const CableSet none;
  StaticOptions options;
  options.tolerance = 1e-10;
  const StaticResult res =
      solve_static_pcs(rod, none, hanging(), nullptr, options);
  REQUIRE(res.converged);
  REQUIRE(res.q.size() == 18);
  const Eigen::Vector3d tip =
      (rod.base_pose * pcs_pose_at(rod, res.q, rod.length())).translation;
  CHECK((tip - Eigen::Vector3d(0.054552, 0.0, -0.171221))
            .cwiseAbs()
            .maxCoeff() <= 5e-6);
  // The baseline stores one strain per section; the residual re-evaluates
  // to the converged norm.
  CHECK(pcs_static_residual(rod, none, hanging(), res.q, 4).norm() <=
        2.0 * options.tolerance);
}

TEST_CASE("residuals: exact rest solution, re-evaluation, boundary rows") {
  const Rod rod = desk_rod();
  const CableSet cables = four_cables();
  const Eigen::VectorXd q_rest = straight_configuration(rod);
  const ModeSelection full = make_selection("full");

  // No loads at all: the rest configuration solves the system identically.
  LoadCase idle;
  idle.tensions = Eigen::VectorXd::Zero(4);
  CHECK(static_residual(rod, cables, idle, full, q_rest, q_rest, 4).norm() ==
        0.0);

  // A converged solve re-evaluates within twice the tolerance.
  LoadCase loads = hanging(4);
  loads.tensions[3] = 0.98;
  StaticOptions options;
  options.tolerance = 1e-10;
  const StaticResult res =
      solve_static(rod, cables, loads, full, q_rest, nullptr, options);
  REQUIRE(res.converged);
  CHECK(static_residual(rod, cables, loads, full, res.q, q_rest, 4).norm() <=
        2.0 * options.tolerance);

  // The tip node satisfies the undifferentiated boundary condition: elastic
  // tip wrench balances the cable termination pull.
  const SectionMatrices tip =
      section_matrices(rod.profile, rod.material, rod.length());
  const Vector6d xi = res.q.tail<6>();
  const Vector6d defect =
      tip.stiffness.cwiseProduct(xi - rod.rest_strain) +
      routing_matrix(cables, xi, rod.length()) * loads.tensions;
  CHECK(defect.norm() <= 1e-6 * (1.0 + loads.tensions.norm()));
}

TEST_CASE("solutions are independent of the starting point") {
  const Rod rod = desk_rod();
  const CableSet cables = four_cables();
  const Eigen::VectorXd q_rest = straight_configuration(rod);
  const ModeSelection full = make_selection("full");
  StaticOptions options;
  options.tolerance = 1e-10;

  LoadCase pull = hanging(4);
  pull.tensions[3] = 1.96;
  const StaticResult cold =
      solve_static(rod, cables, pull, full, q_rest, nullptr, options);
  REQUIRE(cold.converged);

  // Warm start from a different converged equilibrium.
  LoadCase sideways = hanging(4);
  sideways.tensions[0] = 1.0;
  const StaticResult other =
      solve_static(rod, cables, sideways, full, q_rest, nullptr, options);
  REQUIRE(other.converged);
  const StaticResult warm = solve_static(rod, cables, pull, full, q_rest,
                                         &other.q_reduced, options);
  REQUIRE(warm.converged);
  CHECK((warm.q - cold.q).norm() <= 1e-6);

  // Restarting at the answer verifies it in a short Newton tail.
  const StaticResult tail = solve_static(rod, cables, pull, full, q_rest,
                                         &cold.q_reduced, options);
  REQUIRE(tail.converged);
  CHECK(tail.iterations <= 6);
}

TEST_CASE("equilibria transform equivariantly with the base placement") {
  const Rod plain = desk_rod();
  const CableSet cables = four_cables();
  const Eigen::VectorXd q_rest = straight_configuration(plain);
  const ModeSelection full = make_selection("full");
  StaticOptions options;
  options.tolerance = 1e-11;

  LoadCase loads = hanging(4);
  loads.tensions[2] = 0.98;
  const StaticResult ref =
      solve_static(plain, cables, loads, full, q_rest, nullptr, options);
  REQUIRE(ref.converged);

  // Rotate and shift the whole problem: base placement and the inertial
  // acceleration move together.
  Rod moved = plain;
  moved.base_pose.rotation =
      (Eigen::AngleAxisd(0.7, Eigen::Vector3d(0.0, 0.0, 1.0)) *
       Eigen::AngleAxisd(-0.3, Eigen::Vector3d(0.0, 1.0, 0.0)))
          .toRotationMatrix();
  moved.base_pose.translation = Eigen::Vector3d(0.1, -0.2, 0.05);
  LoadCase moved_loads = loads;
  moved_loads.gravity = gravity_twist(moved.base_pose.rotation *
                                      Eigen::Vector3d(0.0, 0.0, -9.81));
  const StaticResult res =
      solve_static(moved, cables, moved_loads, full, q_rest, nullptr,
                   options);
  REQUIRE(res.converged);

  // Body strains are placement-invariant; tips map through the new pose.
  CHECK((res.q - ref.q).norm() <= 1e-8);
  const Eigen::Vector3d mapped =
      moved.base_pose.rotation * tip_of(plain, ref.q) +
      moved.base_pose.translation;
  CHECK((tip_of(moved, res.q) - mapped).norm() <= 1e-8);
}

TEST_CASE("tip wrenches and point loads deflect the rod sensibly") {
  const Rod rod = desk_rod();
  const CableSet none;
  const Eigen::VectorXd q_rest = straight_configuration(rod);
  const ModeSelection full = make_selection("full");
  StaticOptions options;
  options.tolerance = 1e-11;

  Vector6d wrench;
  wrench << 0.0, 2e-3, 0.0, 0.0, 0.0, -0.05;

  const StaticResult base =
      solve_static(rod, none, hanging(), full, q_rest, nullptr, options);
  REQUIRE(base.converged);

  LoadCase as_tip = hanging();
  as_tip.tip_wrench = wrench;
  const StaticResult a =
      solve_static(rod, none, as_tip, full, q_rest, nullptr, options);
  REQUIRE(a.converged);
  const double move_end = (tip_of(rod, a.q) - tip_of(rod, base.q)).norm();
  CHECK(move_end > 1e-3);

  // The same wrench carried at mid-span bends a shorter lever: the rod
  // still solves, and the tip moves less.
  LoadCase midspan = hanging();
  midspan.point_loads.push_back({0.5 * rod.length(), wrench});
  const StaticResult c =
      solve_static(rod, none, midspan, full, q_rest, nullptr, options);
  REQUIRE(c.converged);
  const double move_mid = (tip_of(rod, c.q) - tip_of(rod, base.q)).norm();
  CHECK(move_mid < move_end);

  // Doubling the load moves the tip further.
  LoadCase heavier = hanging();
  heavier.point_loads.push_back({0.5 * rod.length(), 2.0 * wrench});
  const StaticResult d =
      solve_static(rod, none, heavier, full, q_rest, nullptr, options);
  REQUIRE(d.converged);
  CHECK((tip_of(rod, d.q) - tip_of(rod, base.q)).norm() > move_mid);
}

TEST_CASE("load sweeps chain warm starts and match one-shot solves") {
  const Rod rod = desk_rod();
  const CableSet cables = four_cables();
  const Eigen::VectorXd q_rest = straight_configuration(rod);
  const ModeSelection full = make_selection("full");
  StaticOptions options;
  options.tolerance = 1e-10;

  CHECK(solve_sweep(rod, cables, {}, full, q_rest, options).empty());

  // A single-entry sweep is exactly the direct solve.
  const std::vector<LoadCase> just_gravity = {hanging(4)};
  const auto one = solve_sweep(rod, cables, just_gravity, full, q_rest,
                               options);
  REQUIRE(one.size() == 1);
  REQUIRE(one[0].converged);
  const StaticResult direct = solve_static(rod, cables, hanging(4), full,
                                           q_rest, nullptr, options);
  CHECK((one[0].q - direct.q).norm() == 0.0);

  // Ramping the curl tension: every stage converges and the final stage
  // agrees with an independent cold solve.
  std::vector<LoadCase> ramp;
  for (double t : {0.0, 0.98, 1.96, 2.94}) {
    LoadCase lc = hanging(4);
    lc.tensions[3] = t;
    ramp.push_back(lc);
  }
  const auto swept = solve_sweep(rod, cables, ramp, full, q_rest, options);
  REQUIRE(swept.size() == ramp.size());
  double previous_drop = std::abs(tip_of(rod, swept[0].q).z());
  for (size_t i = 0; i < swept.size(); ++i) {
    CAPTURE(i);
    REQUIRE(swept[i].converged);
    if (i > 0) {
      // More curl lifts the tip monotonically along this ramp.
      const double drop = std::abs(tip_of(rod, swept[i].q).z());
      CHECK(drop < previous_drop);
      previous_drop = drop;
    }
  }
  const StaticResult last = solve_static(rod, cables, ramp.back(), full,
                                         q_rest, nullptr, options);
  REQUIRE(last.converged);
  CHECK((swept.back().q - last.q).norm() <= 1e-6);
}

TEST_CASE("reduced bases agree with the full model when nothing is cut") {
  const Rod rod = desk_rod();
  const CableSet cables = four_cables();
  const Eigen::VectorXd q_rest = straight_configuration(rod);
  StaticOptions options;
  options.tolerance = 1e-10;

  LoadCase loads = hanging(4);
  loads.tensions[0] = 0.49;
  loads.tensions[3] = 0.98;
  const StaticResult full_named = solve_static(
      rod, cables, loads, make_selection("full"), q_rest, nullptr, options);
  const StaticResult full_mask = solve_static(
      rod, cables, loads, make_selection("111111"), q_rest, nullptr, options);
  REQUIRE(full_named.converged);
  REQUIRE(full_mask.converged);
  CHECK((full_named.q - full_mask.q).norm() <= 1e-12);

  // Constrained components stay at rest in reduced solves.
  const StaticResult bending = solve_static(
      rod, cables, loads, make_selection("euler_bernoulli"), q_rest, nullptr,
      options);
  REQUIRE(bending.converged);
  for (int n = 0; n < rod.node_count(); ++n) {
    CHECK(bending.q[6 * n + 0] == 0.0);   // no twist
    CHECK(bending.q[6 * n + 3] == 1.0);   // inextensible
    CHECK(bending.q[6 * n + 4] == 0.0);   // no shear
    CHECK(bending.q[6 * n + 5] == 0.0);
  }
}
