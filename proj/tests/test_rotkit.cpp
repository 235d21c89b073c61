#include <catch2/catch_amalgamated.hpp>

#include "eot/rotkit.hpp"
#include "test_support.hpp"

using namespace eot;

TEST_CASE("skew matrix basics") {
  CHECK(skew(Vec3::Zero()).isZero(0.0));

  const Vec3 q(0.3, -1.2, 2.5);
  Mat3 expected;
  expected << 0, -q.z(), q.y(),
              q.z(), 0, -q.x(),
              -q.y(), q.x(), 0;
  CHECK(skew(q).isApprox(expected, 1e-15));

  oracle::Rand rng(11);
  for (int i = 0; i < 1000; ++i) {
    const Vec3 v = rng.vec3(2.0);
    const Vec3 t = rng.vec3(2.0);
    CHECK((skew(v) * t - v.cross(t)).norm() < 1e-12);
  }
}

TEST_CASE("skew antisymmetry and third power identity") {
  oracle::Rand rng(12);
  for (int i = 0; i < 100; ++i) {
    const Vec3 v = rng.vec3(2.0);
    const Mat3 s = skew(v);
    CHECK((s + s.transpose()).isZero(1e-15));
    CHECK((s * s * s + v.squaredNorm() * s).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("rotation from rotation vector") {
  CHECK(rot_from_rotvec(Vec3::Zero()).isIdentity(1e-15));

  const Mat3 quarter = rot_from_rotvec(Vec3(0, 0, M_PI / 2));
  CHECK((quarter * Vec3::UnitX() - Vec3::UnitY()).norm() < 1e-12);

  oracle::Rand rng(13);
  for (int i = 0; i < 300; ++i) {
    const Vec3 theta = rng.rotvec(3.0);
    const Mat3 r = rot_from_rotvec(theta);
    const Eigen::MatrixXd expected = oracle::expm(skew(theta));
    CHECK((r - expected).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(r.determinant() == Catch::Approx(1.0).margin(1e-10));
  }
}

TEST_CASE("quaternion product, conjugate, rotation") {
  const Quat id = Quat::identity();
  const Quat q = quat_exp(Vec3(0.4, -0.2, 0.9));
  const Quat iq = quat_mul(id, q);
  CHECK(iq.w == Catch::Approx(q.w).margin(1e-15));
  CHECK((iq.v - q.v).norm() < 1e-15);

  const Quat qq = quat_mul(q, quat_conj(q));
  CHECK(qq.w == Catch::Approx(1.0).margin(1e-12));
  CHECK(qq.v.norm() < 1e-12);

  oracle::Rand rng(14);
  for (int i = 0; i < 300; ++i) {
    const Quat p = quat_exp(rng.rotvec(3.0));
    const Quat r = quat_exp(rng.rotvec(3.0));
    const Mat3 lhs = rot_from_quat(quat_mul(p, r));
    const Mat3 rhs = rot_from_quat(p) * rot_from_quat(r);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("quaternion exp/log") {
  const Quat e0 = quat_exp(Vec3::Zero());
  CHECK(e0.w == Catch::Approx(1.0));
  CHECK(e0.v.norm() == 0.0);

  const Quat half_turn = quat_exp(Vec3(0, 0, M_PI));
  CHECK(std::abs(half_turn.w) < 1e-12);
  CHECK((half_turn.v - Vec3(0, 0, 1)).norm() < 1e-12);

  oracle::Rand rng(15);
  for (int i = 0; i < 1000; ++i) {
    const Vec3 theta = rng.rotvec(M_PI - 1e-3);
    CHECK((quat_log(quat_exp(theta)) - theta).norm() < 1e-9);
  }
}

TEST_CASE("exp/rotation commutation") {
  oracle::Rand rng(16);
  for (int i = 0; i < 300; ++i) {
    const Vec3 theta = rng.rotvec(3.0);
    CHECK((rot_from_quat(quat_exp(theta)) - rot_from_rotvec(theta))
              .cwiseAbs()
              .maxCoeff() < 1e-10);
  }
}

TEST_CASE("quaternion log canonicalizes sign") {
  const Vec3 theta(0.3, 0.1, -0.4);
  Quat q = quat_exp(theta);
  q.w = -q.w;
  q.v = -q.v;  // same rotation, opposite sign
  CHECK((quat_log(q) - theta).norm() < 1e-12);
}

TEST_CASE("left Jacobian identity at zero") {
  CHECK(left_jacobian(Vec3::Zero()).isIdentity(1e-15));
}

TEST_CASE("left Jacobian matches series") {
  const Vec3 theta(0, 0, M_PI / 2);
  Mat3 series = Mat3::Zero();
  Mat3 power = Mat3::Identity();
  double factorial = 1.0;
  for (int k = 0; k <= 30; ++k) {
    factorial *= (k + 1);
    series += power / factorial;
    power = power * skew(theta);
  }
  CHECK((left_jacobian(theta) - series).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("left Jacobian matches finite differences") {
  oracle::Rand rng(17);
  const double h = 1e-6;
  for (int i = 0; i < 200; ++i) {
    const Vec3 theta = rng.rotvec(2.8);
    const Vec3 t = rng.vec3(2.0);
    const Mat3 analytic = -skew(rot_from_rotvec(theta) * t) * left_jacobian(theta);
    for (int j = 0; j < 3; ++j) {
      Vec3 dp = Vec3::Zero(), dm = Vec3::Zero();
      dp[j] = h;
      dm[j] = -h;
      const Vec3 col =
          (rot_from_rotvec(theta + dp) * t - rot_from_rotvec(theta + dm) * t) /
          (2.0 * h);
      const double denom = std::max(analytic.col(j).norm(), 1e-6);
      CHECK((col - analytic.col(j)).norm() / denom < 1e-4);
    }
  }
}

TEST_CASE("lemma operators: shapes and flattening") {
  Mat3 m;
  m << 1, 2, 3, 4, 5, 6, 7, 8, 9;
  const Vec9 flat = rowmajor_flatten(m);
  for (int i = 0; i < 9; ++i) CHECK(flat[i] == Catch::Approx(i + 1.0));

  const Eigen::MatrixXd star = mat_star(m);
  REQUIRE(star.rows() == 3);
  REQUIRE(star.cols() == 9);
  CHECK(star.block<3, 3>(0, 0).isApprox(skew(m.col(0)), 1e-15));

  const Eigen::MatrixXd rep = diag_rep(Vec3(1, 2, 3), 2);
  REQUIRE(rep.rows() == 6);
  REQUIRE(rep.cols() == 2);
  CHECK(rep(4, 1) == Catch::Approx(2.0));
  CHECK(rep(1, 0) == Catch::Approx(2.0));
}

TEST_CASE("lemma 1 identity") {
  {
    const Eigen::MatrixXd lhs = skew(Vec3::UnitX()) * Mat3::Identity();
    const Eigen::MatrixXd rhs =
        -mat_star(Mat3::Identity()) * diag_rep(Vec3::UnitX(), 3);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-15);
  }
  oracle::Rand rng(18);
  for (int i = 0; i < 1000; ++i) {
    const Vec3 v = rng.vec3(2.0);
    const int n = 1 + static_cast<int>(rng.uniform(0.0, 4.0));
    Eigen::MatrixXd m(3, n);
    for (int c = 0; c < n; ++c) m.col(c) = rng.vec3(2.0);
    const Eigen::MatrixXd lhs = skew(v) * m;
    const Eigen::MatrixXd rhs = -mat_star(m) * diag_rep(v, n);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("lemma 2 identity") {
  oracle::Rand rng(19);
  for (int i = 0; i < 1000; ++i) {
    const Vec3 v = rng.vec3(2.0);
    const Vec3 t = rng.vec3(2.0);
    Mat3 m;
    for (int r = 0; r < 3; ++r) m.row(r) = rng.vec3(2.0).transpose();
    const Vec3 lhs = skew(v) * m * t;
    const Vec3 rhs = -mat_star(m) * rowmajor_flatten(v * t.transpose());
    CHECK((lhs - rhs).norm() < 1e-10);
  }
}

TEST_CASE("lemma 3 identity") {
  oracle::Rand rng(20);
  for (int i = 0; i < 1000; ++i) {
    const Vec3 v = rng.vec3(2.0);
    const Vec3 t = rng.vec3(2.0);
    const Mat3 m = rng.spd(3);
    const Mat3 lhs = skew(v) * m * skew(t).transpose();
    const Mat3 rhs = sandwich_cross(v, m, t);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-9);
    // transpose-symmetry form
    const Mat3 alt = skew(v).transpose() * m * skew(t);
    CHECK((lhs - alt).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("lemma 3 rejects non-SPD input") {
  Mat3 bad = -Mat3::Identity();
  CHECK_THROWS_AS(sandwich_cross(Vec3::UnitX(), bad, Vec3::UnitY()),
                  std::invalid_argument);
}

TEST_CASE("rotation matrix to quaternion round trip") {
  oracle::Rand rng(21);
  for (int i = 0; i < 300; ++i) {
    const Vec3 theta = rng.rotvec(3.1);
    const Mat3 r = rot_from_rotvec(theta);
    const Quat q = quat_from_rot(r);
    CHECK((rot_from_quat(q) - r).cwiseAbs().maxCoeff() < 1e-10);
  }
}
