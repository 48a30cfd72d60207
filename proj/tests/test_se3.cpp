#include <doctest.h>

#include "oracles.hpp"
#include "plsrod/se3.hpp"

using namespace plsrod;
using plsrod::testing::TwistSampler;

namespace {

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("hat embeds twists in 4x4 matrices and vee inverts it") {
  CHECK(max_abs(hat(Vector6d::Zero())) == 0.0);

  Vector6d axial;
  axial << 0, 0, 0, 1, 0, 0;
  Eigen::Matrix4d m = hat(axial);
  CHECK(m(0, 3) == 1.0);
  m(0, 3) = 0.0;
  CHECK(max_abs(m) == 0.0);

  TwistSampler sampler(2024);
  for (int i = 0; i < 200; ++i) {
    const Vector6d v = sampler.twist(50.0, 10.0);
    const Eigen::Matrix4d h = hat(v);
    CHECK(max_abs(h.topLeftCorner<3, 3>() + h.topLeftCorner<3, 3>().transpose()) ==
          0.0);
    CHECK(max_abs(h.bottomRows<1>()) == 0.0);
    CHECK((vee(h) - v).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("ad has the lower-triangular block form and is antisymmetric") {
  CHECK(max_abs(ad(Vector6d::Zero())) == 0.0);

  Vector6d kz;
  kz << 0, 0, 1, 0, 0, 0;
  const Matrix6d a = ad(kz);
  const Eigen::Matrix3d sz = skew(Eigen::Vector3d::UnitZ());
  CHECK(max_abs(a.topLeftCorner<3, 3>() - sz) == 0.0);
  CHECK(max_abs(a.bottomRightCorner<3, 3>() - sz) == 0.0);
  CHECK(max_abs(a.topRightCorner<3, 3>()) == 0.0);
  CHECK(max_abs(a.bottomLeftCorner<3, 3>()) == 0.0);

  TwistSampler sampler(7);
  for (int i = 0; i < 200; ++i) {
    const Vector6d u = sampler.twist(50.0, 10.0);
    const Vector6d v = sampler.twist(50.0, 10.0);
    const Vector6d sum = ad(u) * v + ad(v) * u;
    const double scale = 1.0 + u.norm() * v.norm();
    CHECK(sum.cwiseAbs().maxCoeff() <= 1e-12 * scale);
  }
}

TEST_CASE("adjoint of a pose, its inverse, and pure translations") {
  CHECK(max_abs(adjoint(Pose::identity()) - Matrix6d::Identity()) == 0.0);

  Pose shift;
  shift.translation = Eigen::Vector3d(1, 0, 0);
  const Matrix6d a = adjoint(shift);
  CHECK(max_abs(a.bottomLeftCorner<3, 3>() - skew(Eigen::Vector3d(1, 0, 0))) ==
        0.0);

  TwistSampler sampler(11);
  for (int i = 0; i < 200; ++i) {
    const Pose g = exp_pose(sampler.twist(50.0, 10.0), sampler.uniform(0.0, 0.2));
    CHECK(max_abs(adjoint(g) * adjoint_inverse(g) - Matrix6d::Identity()) <=
          1e-10);
    CHECK(max_abs(adjoint_inverse(g) - adjoint(g.inverse())) <= 1e-10);
  }
}

TEST_CASE("screw exponential: closed forms, group property, orthonormality") {
  Vector6d axial;
  axial << 0, 0, 0, 1, 0, 0;
  const Pose straight = exp_pose(axial, 0.2);
  CHECK(max_abs(straight.rotation - Eigen::Matrix3d::Identity()) <= 1e-15);
  CHECK((straight.translation - Eigen::Vector3d(0.2, 0, 0)).norm() <= 1e-15);

  // Quarter circle: curvature pi/0.4 about z over arc length 0.2.
  const double kappa = M_PI / 0.4;
  Vector6d arc;
  arc << 0, 0, kappa, 1, 0, 0;
  const Pose quarter = exp_pose(arc, 0.2);
  Eigen::Matrix3d rz;
  rz = Eigen::AngleAxisd(M_PI_2, Eigen::Vector3d::UnitZ());
  CHECK(max_abs(quarter.rotation - rz) <= 1e-12);
  CHECK((quarter.translation - Eigen::Vector3d(1.0 / kappa, 1.0 / kappa, 0.0))
            .norm() <= 1e-12);

  TwistSampler sampler(23);
  for (int i = 0; i < 200; ++i) {
    const Vector6d v = sampler.twist(50.0, 10.0);
    const double s = sampler.uniform(0.0, 0.2);
    const Pose g = exp_pose(v, s);
    CHECK(g.orthonormality_defect() <= 1e-10);
    CHECK(std::abs(g.rotation.determinant() - 1.0) <= 1e-10);

    const double s1 = 0.4 * s, s2 = 0.6 * s;
    const Pose split = exp_pose(v, s1) * exp_pose(v, s2);
    CHECK(max_abs(split.rotation - g.rotation) <= 1e-10);
    CHECK((split.translation - g.translation).norm() <= 1e-10);
  }

  CHECK(max_abs(exp_pose(sampler.twist(50.0, 10.0), 0.0).matrix() -
                Eigen::Matrix4d::Identity()) == 0.0);

  for (int i = 0; i < 50; ++i) {
    const Vector6d v = sampler.twist(40.0, 5.0);
    const Pose g = exp_pose(v, 0.2);
    const Pose ref = testing::rk4_pose([&](double) { return v; }, 0.2, 2000);
    CHECK(max_abs(g.rotation - ref.rotation) <= 1e-9);
    CHECK((g.translation - ref.translation).norm() <= 1e-9);
  }

  // Tiny rotation angles go through the series branch without 0/0.
  Vector6d nearly_straight;
  nearly_straight << 1e-9, -2e-9, 1e-9, 1.0, 1e-4, -1e-4;
  const Pose tiny = exp_pose(nearly_straight, 0.2);
  CHECK(tiny.orthonormality_defect() <= 1e-12);
  CHECK((tiny.translation - Eigen::Vector3d(0.2, 0.2e-4, -0.2e-4)).norm() <=
        1e-9);
}

TEST_CASE("exponential in the adjoint representation matches both oracles") {
  CHECK(max_abs(exp_ad(Vector6d::Zero(), 0.3) - Matrix6d::Identity()) == 0.0);

  TwistSampler sampler(31);
  for (int i = 0; i < 200; ++i) {
    const Vector6d v = sampler.twist(50.0, 10.0);
    const double s = sampler.uniform(0.0, 0.2);
    CHECK(max_abs(exp_ad(v, s) - adjoint(exp_pose(v, s))) <= 1e-9);
  }
  for (int i = 0; i < 50; ++i) {
    const Vector6d v = sampler.twist(40.0, 5.0);
    const double s = sampler.uniform(0.0, 0.2);
    CHECK(max_abs(exp_ad(v, s) - testing::expm(s * ad(v))) <= 1e-9);
  }
}

TEST_CASE("integrated exponential against dense quadrature") {
  const Vector6d zero = Vector6d::Zero();
  CHECK(max_abs(tangent_op(zero, 0.01) - 0.01 * Matrix6d::Identity()) <= 1e-15);

  TwistSampler sampler(43);
  CHECK(max_abs(tangent_op(sampler.twist(50.0, 10.0), 0.0)) == 0.0);

  for (int i = 0; i < 50; ++i) {
    const Vector6d v = sampler.twist(40.0, 5.0);
    const double s = sampler.uniform(1e-3, 0.2);
    CHECK(max_abs(tangent_op(v, s) - testing::dense_tangent(v, s)) <= 1e-9);
  }

  // d/ds tangent_op = I - ad(v) tangent_op, checked by central differences.
  for (int i = 0; i < 20; ++i) {
    const Vector6d v = sampler.twist(30.0, 3.0);
    const double s = sampler.uniform(0.01, 0.2);
    const double h = 1e-6;
    const Matrix6d fd =
        (tangent_op(v, s + h) - tangent_op(v, s - h)) / (2.0 * h);
    const Matrix6d analytic = Matrix6d::Identity() - ad(v) * tangent_op(v, s);
    CHECK(max_abs(fd - analytic) <= 1e-6);
  }
}
