#pragma once

// Quaternion / rotation-vector algebra and the splice operators used by the
// variational update's trace identities.

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace eot {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using Vec9 = Eigen::Matrix<double, 9, 1>;
using Mat9 = Eigen::Matrix<double, 9, 9>;
using Vec12 = Eigen::Matrix<double, 12, 1>;
using Mat12 = Eigen::Matrix<double, 12, 12>;
using Mat3x9 = Eigen::Matrix<double, 3, 9>;

constexpr double kSmallAngle = 1e-7;

/// Unit quaternion (w scalar part, v imaginary part).
struct Quat {
  double w = 1.0;
  Vec3 v = Vec3::Zero();

  static Quat identity() { return {}; }
  double norm() const { return std::sqrt(w * w + v.squaredNorm()); }
  Quat normalized() const {
    const double n = norm();
    return {w / n, v / n};
  }
};

inline Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return m;
}

inline Quat quat_mul(const Quat& p, const Quat& q) {
  return {p.w * q.w - p.v.dot(q.v),
          p.w * q.v + q.w * p.v + p.v.cross(q.v)};
}

inline Quat quat_conj(const Quat& q) { return {q.w, -q.v}; }

inline Mat3 rot_from_quat(const Quat& q) {
  return (q.w * q.w - q.v.squaredNorm()) * Mat3::Identity() +
         2.0 * q.v * q.v.transpose() + 2.0 * q.w * skew(q.v);
}

/// Rodrigues form of exp([theta]x); series branch below the small-angle
/// threshold.
inline Mat3 rot_from_rotvec(const Vec3& theta) {
  const double a = theta.norm();
  if (a < kSmallAngle) {
    return Mat3::Identity() + skew(theta);
  }
  const Vec3 n = theta / a;
  const Mat3 nx = skew(n);
  const double s = std::sin(a);
  // 1 - cos(a) without cancellation
  const double half_sin = std::sin(0.5 * a);
  const double one_minus_cos = 2.0 * half_sin * half_sin;
  return Mat3::Identity() + s * nx + one_minus_cos * nx * nx;
}

inline Quat quat_exp(const Vec3& theta) {
  const double a = theta.norm();
  if (a < kSmallAngle) {
    return Quat{1.0 - a * a / 8.0, 0.5 * theta}.normalized();
  }
  return {std::cos(0.5 * a), std::sin(0.5 * a) / a * theta};
}

/// Rotation vector of a unit quaternion; canonicalizes to w >= 0 so the
/// returned angle lies in [0, pi].
inline Vec3 quat_log(const Quat& q_in) {
  Quat q = q_in;
  if (q.w < 0.0) {
    q.w = -q.w;
    q.v = -q.v;
  }
  const double s = q.v.norm();
  if (s < 1e-12) {
    return 2.0 / q.w * q.v;
  }
  const double angle = 2.0 * std::atan2(s, q.w);
  return angle / s * q.v;
}

/// Shepperd's method, robust for all quadrants.
inline Quat quat_from_rot(const Mat3& r) {
  Quat q;
  const double tr = r.trace();
  if (tr > 0.0) {
    const double s = std::sqrt(tr + 1.0) * 2.0;
    q.w = 0.25 * s;
    q.v = Vec3(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1)) / s;
  } else if (r(0, 0) > r(1, 1) && r(0, 0) > r(2, 2)) {
    const double s = std::sqrt(1.0 + r(0, 0) - r(1, 1) - r(2, 2)) * 2.0;
    q.w = (r(2, 1) - r(1, 2)) / s;
    q.v = Vec3(0.25 * s, (r(0, 1) + r(1, 0)) / s, (r(0, 2) + r(2, 0)) / s);
  } else if (r(1, 1) > r(2, 2)) {
    const double s = std::sqrt(1.0 + r(1, 1) - r(0, 0) - r(2, 2)) * 2.0;
    q.w = (r(0, 2) - r(2, 0)) / s;
    q.v = Vec3((r(0, 1) + r(1, 0)) / s, 0.25 * s, (r(1, 2) + r(2, 1)) / s);
  } else {
    const double s = std::sqrt(1.0 + r(2, 2) - r(0, 0) - r(1, 1)) * 2.0;
    q.w = (r(1, 0) - r(0, 1)) / s;
    q.v = Vec3((r(0, 2) + r(2, 0)) / s, (r(1, 2) + r(2, 1)) / s, 0.25 * s);
  }
  return q.normalized();
}

/// Left Jacobian of the rotation vector: R{theta + d} ~= exp([Jl d]x) R{theta}.
inline Mat3 left_jacobian(const Vec3& theta) {
  const double a = theta.norm();
  if (a < kSmallAngle) {
    return Mat3::Identity() + 0.5 * skew(theta);
  }
  const Mat3 tx = skew(theta);
  const double half_sin = std::sin(0.5 * a);
  const double b = 2.0 * half_sin * half_sin / (a * a);
  const double c = (a - std::sin(a)) / (a * a * a);
  return Mat3::Identity() + b * tx + c * tx * tx;
}

/// Column-wise splice of cross-product matrices: [[M1]x ... [Mn]x], 3 x 3n.
inline Eigen::MatrixXd mat_star(const Eigen::MatrixXd& m) {
  const Eigen::Index n = m.cols();
  Eigen::MatrixXd out(3, 3 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.block<3, 3>(0, 3 * i) = skew(m.col(i));
  }
  return out;
}

inline Mat3x9 mat_star3(const Mat3& m) {
  Mat3x9 out;
  out.block<3, 3>(0, 0) = skew(m.col(0));
  out.block<3, 3>(0, 3) = skew(m.col(1));
  out.block<3, 3>(0, 6) = skew(m.col(2));
  return out;
}

/// Row-major flattening of a 3x3 matrix into a 9-vector.
inline Vec9 rowmajor_flatten(const Mat3& m) {
  Vec9 out;
  out << m(0, 0), m(0, 1), m(0, 2),
         m(1, 0), m(1, 1), m(1, 2),
         m(2, 0), m(2, 1), m(2, 2);
  return out;
}

/// Block-diagonal replication of a vector or matrix n times.
inline Eigen::MatrixXd diag_rep(const Eigen::MatrixXd& x, int n) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(x.rows() * n, x.cols() * n);
  for (int i = 0; i < n; ++i) {
    out.block(i * x.rows(), i * x.cols(), x.rows(), x.cols()) = x;
  }
  return out;
}

/// Cholesky factor L with M = L L^T; rejects non-SPD input.
inline Mat3 chol_lower(const Mat3& m) {
  Eigen::LLT<Mat3> llt(m);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("chol_lower: matrix is not SPD");
  }
  return llt.matrixL();
}

/// [v]x M [t]x^T for SPD M, via the spliced-Cholesky identity.
inline Mat3 sandwich_cross(const Vec3& v, const Mat3& m, const Vec3& t) {
  const Mat3x9 ls = mat_star3(chol_lower(m));
  Eigen::MatrixXd d = diag_rep(v * t.transpose(), 3);
  return ls * d * ls.transpose();
}

}  // namespace eot
