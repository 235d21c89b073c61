#pragma once

// Measurement models: mixture weights for the radar reflectors, pinhole
// keypoint models with analytic Jacobians, and the three equality
// constraints processed as pseudo-measurements. Every model returns a
// (residual, Jacobian, noise) triple in the shared error-state ordering.

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "eot/motion.hpp"
#include "eot/rotkit.hpp"
#include "eot/skeleton.hpp"

namespace eot {

struct CameraIntrinsics {
  double fx = 1200.0;
  double fy = 1200.0;
  double u0 = 960.0;
  double v0 = 540.0;
};

struct GroundPlane {
  Vec3 n = Vec3(0, 0, 1);  // unit normal
  double d = 0.0;          // n.b + d = 0 for points b on the plane

  double height(const Vec3& p) const { return n.dot(p) + d; }
};

/// Linearized measurement carrier: residual, Jacobian w.r.t. the error
/// state, optional Jacobian w.r.t. an auxiliary sub-state, and noise.
struct LinearizedMeasurement {
  Eigen::VectorXd residual;
  Eigen::MatrixXd H_x;    // m x 12
  Eigen::MatrixXd H_aux;  // m x k (empty when unused)
  Eigen::MatrixXd noise;  // m x m SPD
};

class BehindCameraError : public std::runtime_error {
 public:
  explicit BehindCameraError(double z)
      : std::runtime_error("point at or behind camera, z = " + std::to_string(z)) {}
};

constexpr double kZMin = 0.1;

inline Vec2 project_point(const CameraIntrinsics& k, const Vec3& p_scs,
                          double z_min = kZMin) {
  if (p_scs.z() <= z_min) throw BehindCameraError(p_scs.z());
  return {k.fx * p_scs.x() / p_scs.z() + k.u0,
          k.fy * p_scs.y() / p_scs.z() + k.v0};
}

inline Eigen::Matrix<double, 2, 3> pixel_jacobian(const CameraIntrinsics& k,
                                                  const Vec3& p_scs) {
  const double z = p_scs.z();
  Eigen::Matrix<double, 2, 3> j;
  j << k.fx / z, 0.0, -k.fx * p_scs.x() / (z * z),
       0.0, k.fy / z, -k.fy * p_scs.y() / (z * z);
  return j;
}

/// Mixture weights over reflectors from a spherical Gaussian of the angle
/// between the sensor direction and each rotated reflector direction.
/// Reflectors at the vehicle origin take the mean unnormalized weight of the
/// rest so the weights stay continuous.
inline Eigen::VectorXd sgw_weights(const KinematicState& x,
                                   const std::vector<Vec3>& reflectors,
                                   double lambda) {
  if (x.p.norm() <= 0.0) {
    throw std::invalid_argument("sgw_weights: vehicle position must be nonzero");
  }
  if (lambda <= 0.0) throw std::invalid_argument("sgw_weights: lambda must be > 0");
  const int t_count = static_cast<int>(reflectors.size());
  const Mat3 r = x.rot();
  const Vec3 pn = x.p / x.p.norm();

  Eigen::VectorXd w = Eigen::VectorXd::Zero(t_count);
  double sum_defined = 0.0;
  int n_defined = 0;
  for (int t = 0; t < t_count; ++t) {
    const double un = reflectors[t].norm();
    if (un < 1e-6) continue;
    const double cosang = pn.dot(r * reflectors[t]) / un;
    w[t] = std::exp(lambda * (-cosang - 1.0));
    sum_defined += w[t];
    ++n_defined;
  }
  const double fill = n_defined > 0 ? sum_defined / n_defined : 1.0;
  for (int t = 0; t < t_count; ++t) {
    if (reflectors[t].norm() < 1e-6) w[t] = fill;
  }
  return w / w.sum();
}

namespace detail {

// d(pixel)/d(error state) for a vehicle-frame point with its own Jacobian g
// (3 x k) w.r.t. an extent sub-state; fills dp and dth blocks.
inline Eigen::Matrix<double, 2, 12> pixel_state_jacobian(
    const Eigen::Matrix<double, 2, 3>& pix, const Mat3& r, const Mat3& jl,
    const Vec3& point_scs_rotated) {
  Eigen::Matrix<double, 2, 12> h = Eigen::Matrix<double, 2, 12>::Zero();
  h.block<2, 3>(0, kIdxP) = pix;
  h.block<2, 3>(0, kIdxTh) = pix * (-skew(point_scs_rotated) * jl);
  (void)r;
  return h;
}

}  // namespace detail

/// Pixel measurement of skeleton knot with mean position phi (vehicle frame).
inline LinearizedMeasurement knot_measurement(const KinematicState& x,
                                              const Vec3& phi, const Vec2& z_px,
                                              const CameraIntrinsics& k,
                                              const Mat2& noise) {
  const Mat3 r = x.rot();
  const Mat3 jl = left_jacobian(x.theta);
  const Vec3 rotated = r * phi;
  const Vec3 scs = rotated + x.p;
  const Vec2 predicted = project_point(k, scs);
  const Eigen::Matrix<double, 2, 3> pix = pixel_jacobian(k, scs);

  LinearizedMeasurement m;
  m.residual = z_px - predicted;
  m.H_x = detail::pixel_state_jacobian(pix, r, jl, rotated);
  m.H_aux = pix * r;
  m.noise = noise;
  return m;
}

/// Pixel measurement of a bottom corner; the corner position is a function
/// of the kinematic state alone.
inline LinearizedMeasurement corner_measurement(const KinematicState& x,
                                                int corner_id, const Vec2& z_px,
                                                const CameraIntrinsics& k,
                                                const Mat2& noise) {
  const auto g = corner_matrix(corner_id);
  const Mat3 r = x.rot();
  const Mat3 jl = left_jacobian(x.theta);
  const Vec3 corner_vcs = g * x.xi;
  const Vec3 rotated = r * corner_vcs;
  const Vec3 scs = rotated + x.p;
  const Vec2 predicted = project_point(k, scs);
  const Eigen::Matrix<double, 2, 3> pix = pixel_jacobian(k, scs);

  LinearizedMeasurement m;
  m.residual = z_px - predicted;
  m.H_x = detail::pixel_state_jacobian(pix, r, jl, rotated);
  m.H_x.block<2, 2>(0, kIdxXi) = pix * r * g;
  m.noise = noise;
  return m;
}

/// Zero roll-rate constraint: the forward axis stays perpendicular to the
/// angular velocity.
inline LinearizedMeasurement angular_velocity_constraint(const KinematicState& x,
                                                         double q_rot) {
  const Mat3 r = x.rot();
  const Mat3 jl = left_jacobian(x.theta);
  const Vec3 fwd = r * kForward;

  LinearizedMeasurement m;
  m.residual = Eigen::VectorXd::Constant(1, -fwd.dot(x.omega));
  m.H_x = Eigen::MatrixXd::Zero(1, kStateDim);
  m.H_x.block<1, 3>(0, kIdxW) = fwd.transpose();
  m.H_x.block<1, 3>(0, kIdxTh) = -x.omega.transpose() * skew(fwd) * jl;
  m.noise = Eigen::MatrixXd::Constant(1, 1, q_rot);
  return m;
}

/// Corner-on-ground constraint for corner_id in 1..4.
inline LinearizedMeasurement ground_constraint(const KinematicState& x,
                                               const GroundPlane& plane,
                                               int corner_id, double q_grnd) {
  const auto g = corner_matrix(corner_id);
  const Mat3 r = x.rot();
  const Mat3 jl = left_jacobian(x.theta);
  const Vec3 rotated = r * (g * x.xi);

  LinearizedMeasurement m;
  m.residual = Eigen::VectorXd::Constant(1, -(plane.n.dot(x.p + rotated) + plane.d));
  m.H_x = Eigen::MatrixXd::Zero(1, kStateDim);
  m.H_x.block<1, 3>(0, kIdxP) = plane.n.transpose();
  m.H_x.block<1, 3>(0, kIdxTh) = -plane.n.transpose() * skew(rotated) * jl;
  m.H_x.block<1, 2>(0, kIdxXi) = plane.n.transpose() * r * g;
  m.noise = Eigen::MatrixXd::Constant(1, 1, q_grnd);
  return m;
}

/// Mirror pairing for the knot symmetry constraint; the caller assembles the
/// residual knot_sym - D * knot with its own noise.
inline std::pair<int, Mat3> symmetry_constraint(const SkeletonTemplate& tmpl, int t) {
  return {tmpl.sym_partner(t), mirror_matrix()};
}

}  // namespace eot
