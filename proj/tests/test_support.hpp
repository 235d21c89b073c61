#pragma once

// Shared oracles for the test suites: scaling-and-squaring matrix
// exponential, RK4 integration of the continuous reference kinematics, and
// seeded random generators. These stay independent of the closed forms they
// check.

#include <Eigen/Dense>
#include <random>

#include "eot/motion.hpp"
#include "eot/rotkit.hpp"

namespace oracle {

/// Taylor series after scaling to small norm, then repeated squaring.
inline Eigen::MatrixXd expm(const Eigen::MatrixXd& a) {
  const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  Eigen::MatrixXd b = a;
  if (norm > 0.25) {
    squarings = static_cast<int>(std::ceil(std::log2(norm / 0.25)));
    b /= std::pow(2.0, squarings);
  }
  Eigen::MatrixXd result = Eigen::MatrixXd::Identity(a.rows(), a.cols());
  Eigen::MatrixXd term = result;
  for (int k = 1; k <= 30; ++k) {
    term = term * b / static_cast<double>(k);
    result += term;
  }
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result;
}

/// Continuous-time kinematics assembled per the model definition; the state
/// is integrated with classic RK4 over many substeps.
struct RefState {
  Eigen::Vector3d p;
  Eigen::Vector4d q;  // w, x, y, z
};

inline Eigen::Vector4d quat_derivative(const Eigen::Vector4d& q,
                                       const Eigen::Vector3d& omega) {
  // 0.5 * omega_quat * q with omega_quat = [0, omega]
  const double w = q[0];
  const Eigen::Vector3d v(q[1], q[2], q[3]);
  const double dw = -0.5 * omega.dot(v);
  const Eigen::Vector3d dv = 0.5 * (w * omega + omega.cross(v));
  return {dw, dv[0], dv[1], dv[2]};
}

inline eot::Mat3 rot_of(const Eigen::Vector4d& q) {
  return eot::rot_from_quat({q[0], Eigen::Vector3d(q[1], q[2], q[3])});
}

inline RefState rk4_reference(const eot::KinematicState& x0, double dt, int substeps) {
  RefState s;
  s.p = x0.p;
  const eot::Quat q0 = x0.quat();
  s.q = {q0.w, q0.v.x(), q0.v.y(), q0.v.z()};
  const double h = dt / substeps;
  const Eigen::Vector3d fwd(1, 0, 0);

  for (int i = 0; i < substeps; ++i) {
    auto f = [&](const RefState& st) {
      RefState d;
      d.p = x0.v * (rot_of(st.q) * fwd);
      d.q = quat_derivative(st.q, x0.omega);
      return d;
    };
    const RefState k1 = f(s);
    RefState s2{s.p + 0.5 * h * k1.p, s.q + 0.5 * h * k1.q};
    const RefState k2 = f(s2);
    RefState s3{s.p + 0.5 * h * k2.p, s.q + 0.5 * h * k2.q};
    const RefState k3 = f(s3);
    RefState s4{s.p + h * k3.p, s.q + h * k3.q};
    const RefState k4 = f(s4);
    s.p += h / 6.0 * (k1.p + 2.0 * k2.p + 2.0 * k3.p + k4.p);
    s.q += h / 6.0 * (k1.q + 2.0 * k2.q + 2.0 * k3.q + k4.q);
    s.q.normalize();
  }
  return s;
}

class Rand {
 public:
  explicit Rand(uint64_t seed) : gen_(seed) {}

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * dist_(gen_);
  }
  double gaussian() { return norm_(gen_); }

  Eigen::Vector3d vec3(double scale = 1.0) {
    return scale * Eigen::Vector3d(gaussian(), gaussian(), gaussian());
  }

  Eigen::Vector3d rotvec(double max_angle = 3.0) {
    Eigen::Vector3d axis = vec3();
    while (axis.norm() < 1e-6) axis = vec3();
    axis.normalize();
    return uniform(1e-4, max_angle) * axis;
  }

  Eigen::MatrixXd spd(int n, double scale = 1.0) {
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = gaussian();
    return scale * (a * a.transpose()) +
           0.1 * scale * Eigen::MatrixXd::Identity(n, n);
  }

  eot::KinematicState state(double max_omega = 3.0) {
    eot::KinematicState x;
    x.p = vec3(10.0) + Eigen::Vector3d(0, 0, 30.0);
    x.v = uniform(-10.0, 10.0);
    x.theta = rotvec(2.8);
    x.omega = vec3();
    if (x.omega.norm() > 1e-9) {
      x.omega = x.omega / x.omega.norm() * uniform(0.01, max_omega);
    }
    x.xi = Eigen::Vector2d(uniform(3.0, 6.0), uniform(1.5, 2.5));
    return x;
  }

 private:
  std::mt19937_64 gen_;
  std::uniform_real_distribution<double> dist_{0.0, 1.0};
  std::normal_distribution<double> norm_{0.0, 1.0};
};

/// 12x12 continuous-time error-state system matrix for the exponential oracle.
inline eot::Mat12 error_system_matrix(const eot::KinematicState& x) {
  eot::Mat12 f = eot::Mat12::Zero();
  const eot::Mat3 r = x.rot();
  const eot::Vec3 m0 = r * eot::kForward;
  f.block<3, 1>(eot::kIdxP, eot::kIdxV) = m0;
  f.block<3, 3>(eot::kIdxP, eot::kIdxTh) = -x.v * eot::skew(m0);
  f.block<3, 3>(eot::kIdxTh, eot::kIdxTh) = eot::skew(x.omega);
  f.block<3, 3>(eot::kIdxTh, eot::kIdxW) = eot::Mat3::Identity();
  return f;
}

/// 9x9 spring-damper system matrix.
inline eot::Mat9 skeleton_system_matrix(double epsilon, double rho) {
  eot::Mat9 f = eot::Mat9::Zero();
  f.block<3, 3>(3, 6) = eot::Mat3::Identity();
  f.block<3, 3>(6, 0) = epsilon * eot::Mat3::Identity();
  f.block<3, 3>(6, 3) = -epsilon * eot::Mat3::Identity();
  f.block<3, 3>(6, 6) = -rho * eot::Mat3::Identity();
  return f;
}

}  // namespace oracle
