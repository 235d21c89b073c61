#pragma once

// Constant-turn-rate-and-velocity time update in 3D: closed-form reference
// propagation, the 12x12 error-state transition, and the spring-damper
// skeleton transition.

#include <Eigen/Dense>
#include <stdexcept>

#include "eot/rotkit.hpp"

namespace eot {

// Error-state ordering shared by every module: [dp(3), dv(1), dth(3), dw(3), dxi(2)].
constexpr int kIdxP = 0;
constexpr int kIdxV = 3;
constexpr int kIdxTh = 4;
constexpr int kIdxW = 7;
constexpr int kIdxXi = 10;
constexpr int kStateDim = 12;

/// Vehicle kinematic state: position, speed, pose (rotation vector),
/// angular velocity, and bottom length/width. All in the sensor frame.
struct KinematicState {
  Vec3 p = Vec3::Zero();
  double v = 0.0;
  Vec3 theta = Vec3::Zero();
  Vec3 omega = Vec3::Zero();
  Vec2 xi = Vec2(4.0, 2.0);

  Quat quat() const { return quat_exp(theta); }
  Mat3 rot() const { return rot_from_rotvec(theta); }
};

inline const Vec3 kForward(1.0, 0.0, 0.0);

namespace detail {

// Integral of exp([w]x s) over [0, dt] and its once-more-integrated sibling.
// Series branch guards the 1/|w|^2 cancellation.
inline Mat3 rot_integral1(const Vec3& omega, double dt) {
  const double a = omega.norm();
  const Mat3 wx = skew(omega);
  if (a * dt < 1e-4) {
    return dt * (Mat3::Identity() + wx * dt / 2.0 + wx * wx * dt * dt / 6.0 +
                 wx * wx * wx * dt * dt * dt / 24.0);
  }
  const Vec3 n = omega / a;
  const Mat3 nx = skew(n);
  const double half_sin = std::sin(0.5 * a * dt);
  const double one_minus_cos = 2.0 * half_sin * half_sin;
  return Mat3::Identity() * dt + nx * (one_minus_cos / a) +
         nx * nx * (dt - std::sin(a * dt) / a);
}

inline Mat3 rot_integral2(const Vec3& omega, double dt) {
  const double a = omega.norm();
  const Mat3 wx = skew(omega);
  if (a * dt < 1e-4) {
    return dt * dt * (Mat3::Identity() / 2.0 + wx * dt / 6.0 +
                      wx * wx * dt * dt / 24.0 + wx * wx * wx * dt * dt * dt / 120.0);
  }
  const Mat3 s0 = rot_from_rotvec(omega * dt);
  return 0.5 * Mat3::Identity() * dt * dt -
         (s0 - Mat3::Identity() - wx * dt - 0.5 * wx * wx * dt * dt) / (a * a);
}

}  // namespace detail

inline KinematicState predict_reference(const KinematicState& x, double dt) {
  if (dt == 0.0) return x;
  if (dt < 0.0) throw std::invalid_argument("predict_reference: dt must be >= 0");
  KinematicState out = x;
  const Mat3 r = x.rot();
  out.p = x.p + x.v * detail::rot_integral1(x.omega, dt) * (r * kForward);
  Quat q = quat_mul(quat_exp(x.omega * dt), x.quat());
  q = q.normalized();
  out.theta = quat_log(q);
  return out;
}

/// Closed-form transition of the error state over dt, with the individual
/// blocks exposed.
struct ErrorTransition {
  Mat12 phi = Mat12::Identity();
  Vec3 m0 = Vec3::Zero();   // dp <- dv
  Mat3 m1 = Mat3::Zero();   // dp <- dth (through velocity direction)
  Mat3 m2 = Mat3::Zero();   // [omega]x
  Mat3 sigma0 = Mat3::Identity();
  Mat3 sigma1 = Mat3::Zero();
  Mat3 sigma2 = Mat3::Zero();
};

inline ErrorTransition error_transition(const KinematicState& x, double dt) {
  if (dt <= 0.0) throw std::invalid_argument("error_transition: dt must be > 0");
  ErrorTransition t;
  const Mat3 r = x.rot();
  t.m0 = r * kForward;
  t.m1 = -x.v * skew(t.m0);
  t.m2 = skew(x.omega);
  t.sigma0 = rot_from_rotvec(x.omega * dt);
  t.sigma1 = detail::rot_integral1(x.omega, dt);
  t.sigma2 = detail::rot_integral2(x.omega, dt);

  t.phi.setIdentity();
  t.phi.block<3, 1>(kIdxP, kIdxV) = t.m0 * dt;
  t.phi.block<3, 3>(kIdxP, kIdxTh) = t.m1 * t.sigma1;
  t.phi.block<3, 3>(kIdxP, kIdxW) = t.m1 * t.sigma2;
  t.phi.block<3, 3>(kIdxTh, kIdxTh) = t.sigma0;
  t.phi.block<3, 3>(kIdxTh, kIdxW) = t.sigma1;
  return t;
}

namespace detail {

inline bool is_spd(const Eigen::MatrixXd& m, double tol = 0.0) {
  if (!m.isApprox(m.transpose(), 1e-9)) return false;
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  (void)tol;
  return llt.info() == Eigen::Success;
}

inline bool is_psd(const Eigen::MatrixXd& m, double tol = 1e-10) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  return es.eigenvalues().minCoeff() >= -tol;
}

}  // namespace detail

inline Mat12 predict_covariance(const Mat12& p, const ErrorTransition& phi,
                                const Mat12& w, double dt) {
  if (!detail::is_spd(p)) {
    throw std::invalid_argument("predict_covariance: P is not SPD");
  }
  if (!detail::is_psd(w)) {
    throw std::invalid_argument("predict_covariance: W is not PSD");
  }
  Mat12 out = phi.phi * p * phi.phi.transpose() + w * dt;
  return 0.5 * (out + out.transpose());
}

/// Spring-damper transition of a skeleton component [u, knot, knot rate].
/// Each axis decouples into an identical scalar 3x3 system whose exponential
/// is evaluated analytically; the generalized cosh/sinhc functions stay
/// continuous through the critical-damping boundary rho^2 = 4 eps.
struct SkeletonTransition {
  Mat9 phi = Mat9::Identity();
  double epsilon = 0.0;
  double rho = 0.0;
};

namespace detail {

// cosh(sqrt(d) t) extended to d < 0 (reads cos), series near d = 0.
inline double cosh_gen(double disc, double t) {
  const double x = disc * t * t;
  if (std::abs(x) < 1e-8) {
    return 1.0 + x / 2.0 + x * x / 24.0 + x * x * x / 720.0;
  }
  if (disc > 0.0) return std::cosh(std::sqrt(disc) * t);
  return std::cos(std::sqrt(-disc) * t);
}

// sinh(sqrt(d) t)/sqrt(d) extended to d < 0, series near d = 0.
inline double sinhc_gen(double disc, double t) {
  const double x = disc * t * t;
  if (std::abs(x) < 1e-8) {
    return t * (1.0 + x / 6.0 + x * x / 120.0 + x * x * x / 5040.0);
  }
  if (disc > 0.0) {
    const double mu = std::sqrt(disc);
    return std::sinh(mu * t) / mu;
  }
  const double nu = std::sqrt(-disc);
  return std::sin(nu * t) / nu;
}

}  // namespace detail

inline SkeletonTransition skeleton_transition(double epsilon, double rho, double dt) {
  if (epsilon < 0.0 || rho < 0.0 || dt <= 0.0) {
    throw std::invalid_argument("skeleton_transition: bad parameters");
  }
  SkeletonTransition t;
  t.epsilon = epsilon;
  t.rho = rho;

  const double disc = 0.25 * rho * rho - epsilon;
  const double decay = std::exp(-0.5 * rho * dt);
  const double c = detail::cosh_gen(disc, dt);
  const double s = detail::sinhc_gen(disc, dt);
  const double m3 = decay * (c + 0.5 * rho * s) - 1.0;
  const double m4 = decay * s;

  t.phi.setZero();
  const Mat3 id = Mat3::Identity();
  t.phi.block<3, 3>(0, 0) = id;
  t.phi.block<3, 3>(3, 0) = -m3 * id;
  t.phi.block<3, 3>(3, 3) = (1.0 + m3) * id;
  t.phi.block<3, 3>(3, 6) = m4 * id;
  t.phi.block<3, 3>(6, 0) = epsilon * m4 * id;
  t.phi.block<3, 3>(6, 3) = -epsilon * m4 * id;
  t.phi.block<3, 3>(6, 6) = (1.0 + m3 - rho * m4) * id;
  return t;
}

inline void predict_skeleton(Vec9& mu, Mat9& sigma, const SkeletonTransition& t,
                             const Mat9& w, double dt) {
  if (!detail::is_spd(sigma)) {
    throw std::invalid_argument("predict_skeleton: sigma is not SPD");
  }
  mu = t.phi * mu;
  Mat9 s = t.phi * sigma * t.phi.transpose() + w * dt;
  sigma = 0.5 * (s + s.transpose());
}

}  // namespace eot
