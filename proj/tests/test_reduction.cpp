#include <doctest.h>

#include "oracles.hpp"
#include "plsrod/statics.hpp"

using namespace plsrod;
using plsrod::testing::TwistSampler;

namespace {

Rod desk_rod(int segments = 5) {
  Rod rod;
  rod.profile = {1e-2, 5e-3, 0.2};
  rod.material.young_modulus = 1.1e5;
  rod.material.shear_modulus = 3.793e4;
  rod.material.density = 2000.0;
  rod.partition.bounds = {0.0, 0.09, 0.16, 0.2};
  rod.partition.segments_per_section = segments;
  rod.validate();
  return rod;
}

void check_orthogonality(const ModeSelection& sel) {
  const int ni = sel.allowed_count();
  CHECK((sel.allowed.transpose() * sel.allowed -
         Eigen::MatrixXd::Identity(ni, ni))
            .cwiseAbs()
            .maxCoeff() == 0.0);
  if (ni < 6) {
    CHECK((sel.constrained.transpose() * sel.constrained -
           Eigen::MatrixXd::Identity(6 - ni, 6 - ni))
              .cwiseAbs()
              .maxCoeff() == 0.0);
    CHECK((sel.allowed.transpose() * sel.constrained).cwiseAbs().maxCoeff() ==
          0.0);
  }
  Eigen::MatrixXd joint(6, 6);
  joint.leftCols(ni) = sel.allowed;
  if (ni < 6) joint.rightCols(6 - ni) = sel.constrained;
  CHECK(Eigen::FullPivLU<Eigen::MatrixXd>(joint).rank() == 6);
}

}  // namespace

TEST_CASE("named selections pick the documented strain components") {
  const ModeSelection eb = make_selection("euler_bernoulli");
  CHECK(eb.allowed_count() == 2);
  CHECK(eb.allowed_rows == std::vector<int>{1, 2});

  const ModeSelection ek = make_selection("extensible_kirchhoff");
  CHECK(ek.allowed_count() == 4);
  CHECK(ek.allowed_rows == std::vector<int>{0, 1, 2, 3});

  const ModeSelection tim = make_selection("timoshenko");
  CHECK(tim.allowed_count() == 4);
  CHECK(tim.allowed_rows == std::vector<int>{1, 2, 4, 5});

  const ModeSelection full = make_selection("full");
  CHECK(full.is_full());
  CHECK((full.allowed - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() ==
        0.0);
  CHECK(full.constrained.cols() == 0);

  const ModeSelection mask = make_selection("010100");
  CHECK(mask.allowed_rows == std::vector<int>{1, 3});

  for (const auto* name :
       {"full", "euler_bernoulli", "extensible_kirchhoff", "timoshenko",
        "010100", "100001"}) {
    check_orthogonality(make_selection(name));
  }

  CHECK_THROWS_AS(make_selection("000000"), std::invalid_argument);
  CHECK_THROWS_AS(make_selection("telescope"), std::invalid_argument);
  CHECK_THROWS_AS(make_selection("01010"), std::invalid_argument);
}

TEST_CASE("lift and reduce round-trip through the rest configuration") {
  const Rod rod = desk_rod();
  const Eigen::VectorXd q0 = straight_configuration(rod);
  TwistSampler sampler(3);

  for (const auto* name :
       {"euler_bernoulli", "extensible_kirchhoff", "timoshenko", "full"}) {
    const ModeSelection sel = make_selection(name);
    const int ni = sel.allowed_count();

    // Rest round-trip is exact.
    CHECK((lift(sel, reduce(sel, q0), q0) - q0).cwiseAbs().maxCoeff() == 0.0);

    // Projection identity holds bitwise for arbitrary reduced states.
    Eigen::VectorXd qr = sampler.vector(ni * rod.node_count(), 2.0);
    CHECK((reduce(sel, lift(sel, qr, q0)) - qr).cwiseAbs().maxCoeff() == 0.0);

    // Constrained slots always carry rest strains.
    if (ni < 6) {
      const Eigen::VectorXd lifted = lift(sel, qr, q0);
      for (int n = 0; n < rod.node_count(); ++n) {
        const Vector6d node = lifted.segment<6>(6 * n);
        const Vector6d rest = q0.segment<6>(6 * n);
        const Eigen::VectorXd locked =
            sel.constrained.transpose() * (node - rest);
        CHECK(locked.cwiseAbs().maxCoeff() == 0.0);
      }
    }
  }

  // Planar bending keeps the unit axial stretch of the straight rod.
  const ModeSelection eb = make_selection("euler_bernoulli");
  const Eigen::VectorXd bent =
      lift(eb, Eigen::VectorXd::Zero(2 * rod.node_count()), q0);
  CHECK((bent - q0).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("interpolation rows stay orthogonal to the constrained components") {
  // The node interpolation acts componentwise, so the lifted allowed columns
  // and the constrained columns multiply into disjoint strain slots: the
  // product of the interpolation matrix with both selections vanishes
  // identically, with no rounding at all.
  const Rod rod = desk_rod();
  TwistSampler sampler(47);
  for (const auto* name :
       {"euler_bernoulli", "extensible_kirchhoff", "timoshenko"}) {
    const ModeSelection sel = make_selection(name);
    const int ni = sel.allowed_count();
    Eigen::MatrixXd lifted_allowed =
        Eigen::MatrixXd::Zero(rod.dof(), ni * rod.node_count());
    for (int n = 0; n < rod.node_count(); ++n) {
      lifted_allowed.block(6 * n, ni * n, 6, ni) = sel.allowed;
    }
    for (int trial = 0; trial < 50; ++trial) {
      const double x = sampler.uniform(0.0, 0.2);
      const InterpWeights w = interp_weights(rod.partition, x);
      Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(6, rod.dof());
      phi.block<6, 6>(0, 6 * w.section) = w.a * Eigen::MatrixXd::Identity(6, 6);
      phi.block<6, 6>(0, 6 * (w.section + 1)) =
          w.b * Eigen::MatrixXd::Identity(6, 6);
      const Eigen::MatrixXd product =
          lifted_allowed.transpose() * phi.transpose() * sel.constrained;
      CHECK(product.cwiseAbs().maxCoeff() == 0.0);
    }
  }
}

TEST_CASE("full selection solves match the unreduced solver exactly") {
  const Rod rod = desk_rod();
  const Eigen::VectorXd q0 = straight_configuration(rod);
  CableSet cables;
  LoadCase loads;
  loads.gravity = gravity_twist(Eigen::Vector3d(0, 0, -9.81));

  StaticOptions opts;
  const StaticResult a =
      solve_static(rod, cables, loads, make_selection("full"), q0, nullptr, opts);
  const StaticResult b = solve_static(rod, cables, loads,
                                      make_selection("111111"), q0, nullptr, opts);
  REQUIRE(a.converged);
  REQUIRE(b.converged);
  CHECK((a.q - b.q).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("reduced solves keep constrained strains at rest values") {
  const Rod rod = desk_rod();
  const Eigen::VectorXd q0 = straight_configuration(rod);
  CableSet cables;
  LoadCase loads;
  loads.gravity = gravity_twist(Eigen::Vector3d(0, 0, -9.81));
  StaticOptions opts;

  for (const auto* name :
       {"euler_bernoulli", "extensible_kirchhoff", "timoshenko"}) {
    const ModeSelection sel = make_selection(name);
    const StaticResult res =
        solve_static(rod, cables, loads, sel, q0, nullptr, opts);
    REQUIRE(res.converged);
    for (int n = 0; n < rod.node_count(); ++n) {
      const Eigen::VectorXd locked =
          sel.constrained.transpose() *
          Vector6d(res.q.segment<6>(6 * n) - q0.segment<6>(6 * n));
      CHECK(locked.cwiseAbs().maxCoeff() == 0.0);
    }
  }
}

TEST_CASE("tip constrained wrench picks the suppressed load components") {
  const Rod rod = desk_rod();
  const Eigen::VectorXd q0 = straight_configuration(rod);
  CableSet no_cables;
  const ModeSelection eb = make_selection("euler_bernoulli");

  // Nothing applied: zero reaction.
  LoadCase idle;
  CHECK(tip_constrained_wrench(rod, no_cables, idle, eb, q0).norm() == 0.0);

  // Axial tip force lands in the constrained force slot.
  LoadCase axial;
  axial.tip_wrench[3] = 0.05;
  const Eigen::VectorXd lambda =
      tip_constrained_wrench(rod, no_cables, axial, eb, q0);
  REQUIRE(lambda.size() == 4);
  CHECK(lambda[0] == 0.0);
  CHECK(lambda[1] == doctest::Approx(0.05).epsilon(1e-14));
  CHECK(lambda[2] == 0.0);
  CHECK(lambda[3] == 0.0);

  // The full selection constrains nothing.
  CHECK(tip_constrained_wrench(rod, no_cables, axial, make_selection("full"),
                               q0)
            .size() == 0);

  // With cables the reaction balances the suppressed part of the cable pull.
  CableSet cables;
  cables.azimuth = {0.0};
  cables.base_offset = cables.tip_offset = 5e-3;
  cables.length = 0.2;
  LoadCase pulled;
  pulled.tensions = Eigen::VectorXd::Constant(1, 2.0);
  const Eigen::VectorXd reaction =
      tip_constrained_wrench(rod, cables, pulled, eb, q0);
  const Vector6d pull =
      routing_matrix(cables, Vector6d(q0.tail<6>()), rod.length()) *
      pulled.tensions;
  CHECK((reaction + eb.constrained.transpose() * pull).cwiseAbs().maxCoeff() <=
        1e-14);
}
