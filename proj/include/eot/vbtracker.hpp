#pragma once

// Recursive Bayesian tracker: Gaussian belief over the kinematic error state
// and the skeleton components, closed-form time update, and the mean-field
// variational measurement update in information form.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "eot/hyperparams.hpp"
#include "eot/measurements.hpp"
#include "eot/motion.hpp"
#include "eot/sensors.hpp"
#include "eot/skeleton.hpp"

namespace eot {

struct KinematicBelief {
  KinematicState ref;
  Vec12 dx = Vec12::Zero();  // error mean, zero after rebase
  Mat12 P = Mat12::Identity();

  Vec3 position() const { return ref.p + dx.segment<3>(kIdxP); }
  double speed() const { return ref.v + dx(kIdxV); }
};

struct SkeletonComponent {
  Vec9 mu = Vec9::Zero();
  Mat9 sigma = Mat9::Identity();

  Vec3 reflector() const { return mu.head<3>(); }
  Vec3 knot() const { return mu.segment<3>(3); }
  Mat3 reflector_cov() const { return sigma.block<3, 3>(0, 0); }
};

struct SkeletonBelief {
  std::vector<SkeletonComponent> comps;

  int size() const { return static_cast<int>(comps.size()); }
  std::vector<Vec3> reflectors() const {
    std::vector<Vec3> out;
    out.reserve(comps.size());
    for (const auto& c : comps) out.push_back(c.reflector());
    return out;
  }
  std::vector<Vec3> knots() const {
    std::vector<Vec3> out;
    out.reserve(comps.size());
    for (const auto& c : comps) out.push_back(c.knot());
    return out;
  }
};

struct Beliefs {
  KinematicBelief kin;
  SkeletonBelief skel;
};

/// Association probabilities between radar points and mixture components,
/// plus the per-component sufficient statistics.
struct Responsibilities {
  Eigen::MatrixXd upsilon;  // n_r x T, row-stochastic
  Eigen::VectorXd n;        // per-component weight
  std::vector<Vec3> zbar;
  std::vector<Mat3> Zbar;
  std::vector<char> active;
};

struct FrameDiagnostics {
  bool covariances_spd = true;
  int regularization_escalations = 0;
  int skipped_projections = 0;
  double responsibility_row_err = 0.0;  // max |row sum - 1|
  double weight_norm_err = 0.0;         // |sum(pi) - 1|
  double n_sum_err = 0.0;               // |sum(n_t) - n_r|
  double max_ground_residual = 0.0;     // post-update, absolute meters
  double cond_P = 0.0;
};

namespace detail {

inline Eigen::MatrixXd solve_information(const Eigen::MatrixXd& lambda,
                                         const Eigen::MatrixXd& rhs,
                                         double reg, int* escalations) {
  Eigen::MatrixXd a = lambda + reg * Eigen::MatrixXd::Identity(lambda.rows(), lambda.cols());
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) {
    a += 1e-6 * Eigen::MatrixXd::Identity(lambda.rows(), lambda.cols());
    llt.compute(a);
    if (escalations) ++(*escalations);
    if (llt.info() != Eigen::Success) {
      throw std::runtime_error("information matrix not invertible after regularization");
    }
  }
  return llt.solve(rhs);
}

inline Mat3 symmetrize(const Mat3& m) { return 0.5 * (m + m.transpose()); }

// Rotation-uncertainty information on the pose: J^T [L]* diag3(S) [L]*^T J
// with L the Cholesky factor of the (scaled) measurement information.
inline Mat3 splice_information(const Mat3& l_info, const Mat3& s, const Mat3& j) {
  const Mat3x9 ls = mat_star3(l_info);
  Mat3 k = Mat3::Zero();
  for (int i = 0; i < 3; ++i) {
    k += ls.block<3, 3>(0, 3 * i) * s * ls.block<3, 3>(0, 3 * i).transpose();
  }
  return j.transpose() * k * j;
}

// [A]* [B]_star for 3x3 A, B: sum of cross products of columns of A with
// rows of B.
inline Vec3 splice_vector(const Mat3& a, const Mat3& b) {
  Vec3 out = Vec3::Zero();
  for (int i = 0; i < 3; ++i) {
    out += a.col(i).cross(Vec3(b.row(i)));
  }
  return out;
}

}  // namespace detail

inline Responsibilities compute_responsibilities(const KinematicBelief& kb,
                                                 const SkeletonBelief& sb,
                                                 const std::vector<Vec3>& radar,
                                                 const Eigen::VectorXd& pi,
                                                 const Hyperparams& hp) {
  const int n_r = static_cast<int>(radar.size());
  const int t_count = sb.size();
  if (pi.size() != t_count) {
    throw std::invalid_argument("compute_responsibilities: pi size mismatch");
  }

  const Mat3 r = kb.ref.rot();
  const Mat3 j = left_jacobian(kb.ref.theta);
  const Mat3 q_inv = hp.radar_noise().inverse();
  const Mat3 l_qinv = chol_lower(q_inv);
  const Mat3 p_pp = kb.P.block<3, 3>(kIdxP, kIdxP);
  const Mat3 p_thth = kb.P.block<3, 3>(kIdxTh, kIdxTh);
  const Mat3 p_thp = kb.P.block<3, 3>(kIdxTh, kIdxP);
  const Vec3 dp_hat = kb.dx.segment<3>(kIdxP);
  const Vec3 dth_hat = kb.dx.segment<3>(kIdxTh);
  const Mat3 pose_spread = detail::splice_information(l_qinv, j * p_thth * j.transpose(), Mat3::Identity());

  // Per-component constant part of the expected Mahalanobis distance.
  Eigen::VectorXd log_base(t_count);
  std::vector<Vec3> zeta_mean(t_count);
  const double tr_pp = (q_inv * p_pp).trace();
  for (int t = 0; t < t_count; ++t) {
    const Vec3 u_hat = sb.comps[t].reflector();
    const Mat3 u_cov = sb.comps[t].reflector_cov();
    const Vec3 ru = r * u_hat;
    zeta_mean[t] = kb.ref.p + dp_hat + ru + skew(j * dth_hat) * ru;
    double quad = tr_pp;
    quad += (r.transpose() * q_inv * r * u_cov).trace();
    quad += (pose_spread * (u_hat * u_hat.transpose() + u_cov)).trace();
    quad -= 2.0 * (q_inv * skew(ru) * j * p_thp).trace();
    log_base[t] = std::log(std::max(pi[t], 1e-300)) - 0.5 * quad;
  }

  Responsibilities out;
  out.upsilon = Eigen::MatrixXd::Zero(n_r, t_count);
  for (int i = 0; i < n_r; ++i) {
    Eigen::VectorXd logw(t_count);
    for (int t = 0; t < t_count; ++t) {
      const Vec3 e = radar[i] - zeta_mean[t];
      logw[t] = log_base[t] - 0.5 * e.dot(q_inv * e);
    }
    const double m = logw.maxCoeff();
    Eigen::VectorXd w = (logw.array() - m).exp();
    out.upsilon.row(i) = w / w.sum();
  }
  return out;
}

inline void radar_sufficient_stats(Responsibilities& resp,
                                   const std::vector<Vec3>& radar,
                                   double n_min) {
  const int n_r = static_cast<int>(radar.size());
  const int t_count = static_cast<int>(resp.upsilon.cols());
  resp.n = Eigen::VectorXd::Zero(t_count);
  resp.zbar.assign(t_count, Vec3::Zero());
  resp.Zbar.assign(t_count, Mat3::Zero());
  resp.active.assign(t_count, 0);

  for (int t = 0; t < t_count; ++t) {
    double n_t = 0.0;
    Vec3 acc = Vec3::Zero();
    for (int i = 0; i < n_r; ++i) {
      n_t += resp.upsilon(i, t);
      acc += resp.upsilon(i, t) * radar[i];
    }
    resp.n[t] = n_t;
    if (n_t < n_min) continue;
    resp.active[t] = 1;
    resp.zbar[t] = acc / n_t;
    Mat3 scatter = Mat3::Zero();
    for (int i = 0; i < n_r; ++i) {
      const Vec3 d = radar[i] - resp.zbar[t];
      scatter += resp.upsilon(i, t) * d * d.transpose();
    }
    resp.Zbar[t] = scatter;
  }
}

namespace detail {

// Projection Jacobian of the error state for each measurement model, built
// from the sensors module so the same triples feed tracker and oracles.
inline void accumulate_keypoints(const KinematicState& ref,
                                 const SkeletonBelief& sb_lin,
                                 const FrameMeasurements& frame,
                                 const Hyperparams& hp, Mat12& lambda,
                                 Vec12& eta, int* skipped) {
  for (const auto& kp : frame.keypoints) {
    try {
      LinearizedMeasurement lm;
      if (kp.kind == Keypoint::Kind::Knot) {
        if (kp.id < 0 || kp.id >= sb_lin.size()) {
          throw std::invalid_argument("knot keypoint id out of range");
        }
        lm = knot_measurement(ref, sb_lin.comps[kp.id].knot(), kp.pixel(),
                              hp.camera, hp.knot_px_noise());
      } else {
        lm = corner_measurement(ref, kp.id, kp.pixel(), hp.camera,
                                hp.corner_px_noise());
      }
      const Eigen::MatrixXd wht = lm.H_x.transpose() * lm.noise.inverse();
      lambda += wht * lm.H_x;
      eta += wht * lm.residual;
    } catch (const BehindCameraError&) {
      if (skipped) ++(*skipped);
    }
  }
}

}  // namespace detail

/// Information-form update of the kinematic belief. `prior` supplies the
/// Gaussian prior on the error state; `sb` supplies the current skeleton
/// iterate that the radar terms linearize against.
inline KinematicBelief update_kinematic(const KinematicBelief& prior,
                                        const SkeletonBelief& sb,
                                        const Responsibilities& stats,
                                        const FrameMeasurements& frame,
                                        const Hyperparams& hp,
                                        FrameDiagnostics* diag = nullptr) {
  const KinematicState& ref = prior.ref;
  const Mat3 r = ref.rot();
  const Mat3 j = left_jacobian(ref.theta);
  const Mat3 q_inv = hp.radar_noise().inverse();
  const Mat3 l_qinv = chol_lower(q_inv);

  const Mat12 prior_info = detail::solve_information(prior.P, Mat12::Identity(),
                                                     0.0, nullptr);
  Mat12 lambda = prior_info;
  Vec12 eta = prior_info * prior.dx;

  // Radar: per active component, a position-plus-pose measurement of the
  // weighted mean, and the pose information carried by reflector spread.
  const bool have_stats = !stats.active.empty();
  for (int t = 0; t < sb.size() && have_stats; ++t) {
    if (!stats.active[t]) continue;
    const double n_t = stats.n[t];
    const Vec3 u_hat = sb.comps[t].reflector();
    const Mat3 u_cov = sb.comps[t].reflector_cov();
    const Vec3 ru = r * u_hat;

    Eigen::Matrix<double, 3, 12> h1 = Eigen::Matrix<double, 3, 12>::Zero();
    h1.block<3, 3>(0, kIdxP) = Mat3::Identity();
    h1.block<3, 3>(0, kIdxTh) = -skew(ru) * j;
    const Vec3 res = stats.zbar[t] - ru - ref.p;

    lambda += n_t * h1.transpose() * q_inv * h1;
    eta += n_t * h1.transpose() * q_inv * res;

    const Mat3 s = detail::symmetrize(r * u_cov * r.transpose());
    lambda.block<3, 3>(kIdxTh, kIdxTh) +=
        n_t * detail::splice_information(l_qinv, s, j);
    eta.segment<3>(kIdxTh) -=
        n_t * j.transpose() * detail::splice_vector(q_inv, s);
  }

  detail::accumulate_keypoints(ref, sb, frame, hp, lambda, eta,
                               diag ? &diag->skipped_projections : nullptr);

  {
    const auto lm = angular_velocity_constraint(ref, hp.q_rot);
    const Eigen::MatrixXd wht = lm.H_x.transpose() / hp.q_rot;
    lambda += wht * lm.H_x;
    eta += wht * lm.residual;
  }
  for (int corner = 1; corner <= 4; ++corner) {
    const auto lm = ground_constraint(ref, hp.plane, corner, hp.q_grnd);
    const Eigen::MatrixXd wht = lm.H_x.transpose() / hp.q_grnd;
    lambda += wht * lm.H_x;
    eta += wht * lm.residual;
  }

  KinematicBelief out = prior;
  int escal = 0;
  const Mat12 p_new = detail::solve_information(
      0.5 * (lambda + lambda.transpose()), Mat12::Identity(),
      hp.regularization, &escal);
  out.P = 0.5 * (p_new + p_new.transpose());
  out.dx = out.P * eta;
  if (diag) diag->regularization_escalations += escal;
  return out;
}

/// Information-form update of the skeleton components. `kb` is the current
/// kinematic iterate, `prior` the Gaussian priors, `lin` the iterate used for
/// linearization points and symmetry partners.
inline SkeletonBelief update_skeleton(const KinematicBelief& kb,
                                      const SkeletonBelief& prior,
                                      const SkeletonBelief& lin,
                                      const Responsibilities& stats,
                                      const FrameMeasurements& frame,
                                      const SkeletonTemplate& tmpl,
                                      const Hyperparams& hp,
                                      FrameDiagnostics* diag = nullptr) {
  const KinematicState& ref = kb.ref;
  const Mat3 r = ref.rot();
  const Mat3 j = left_jacobian(ref.theta);
  const Mat3 q_inv = hp.radar_noise().inverse();
  const Mat3 l_qinv = chol_lower(q_inv);
  const Mat3 sym_info = hp.sym_noise().inverse();
  const Mat3 d = mirror_matrix();
  const Mat3 p_thth = kb.P.block<3, 3>(kIdxTh, kIdxTh);
  const Mat3 p_thp = kb.P.block<3, 3>(kIdxTh, kIdxP);
  const Vec3 p_mean = ref.p + kb.dx.segment<3>(kIdxP);

  const Mat3 pose_info_u =
      r.transpose() *
      detail::splice_information(l_qinv, j * p_thth * j.transpose(), Mat3::Identity()) * r;
  const Vec3 pose_cross_u =
      r.transpose() * detail::splice_vector(q_inv, (j * p_thp).transpose());

  SkeletonBelief out = prior;
  for (int t = 0; t < prior.size(); ++t) {
    const Mat9 prior_info = detail::solve_information(prior.comps[t].sigma,
                                                      Mat9::Identity(), 0.0, nullptr);
    Mat9 lambda = prior_info;
    Vec9 eta = prior_info * prior.comps[t].mu;

    if (!stats.active.empty() && stats.active[t]) {
      const double n_t = stats.n[t];
      lambda.block<3, 3>(0, 0) += n_t * r.transpose() * q_inv * r;
      eta.head<3>() += n_t * r.transpose() * q_inv * (stats.zbar[t] - p_mean);
      lambda.block<3, 3>(0, 0) += n_t * pose_info_u;
      eta.head<3>() += n_t * pose_cross_u;
    }

    // left-right symmetry against the partner's current iterate
    {
      const int partner = tmpl.sym_partner(t);
      const Vec3 mirror_target = lin.comps[partner].knot();
      lambda.block<3, 3>(3, 3) += d * sym_info * d;
      eta.segment<3>(3) += d * sym_info * mirror_target;
    }

    for (const auto& kp : frame.keypoints) {
      if (kp.kind != Keypoint::Kind::Knot || kp.id != t) continue;
      try {
        const Vec3 phi = lin.comps[t].knot();
        const auto lm = knot_measurement(ref, phi, kp.pixel(), hp.camera,
                                         hp.knot_px_noise());
        const Eigen::MatrixXd wht = lm.H_aux.transpose() * lm.noise.inverse();
        lambda.block<3, 3>(3, 3) += wht * lm.H_aux;
        eta.segment<3>(3) += wht * (lm.residual + lm.H_aux * phi);
      } catch (const BehindCameraError&) {
        if (diag) ++diag->skipped_projections;
      }
    }

    int escal = 0;
    const Mat9 sig = detail::solve_information(
        0.5 * (lambda + lambda.transpose()), Mat9::Identity(),
        hp.regularization, &escal);
    out.comps[t].sigma = 0.5 * (sig + sig.transpose());
    out.comps[t].mu = out.comps[t].sigma * eta;
    if (diag) diag->regularization_escalations += escal;
  }
  return out;
}

/// Folds the error-state mean into the reference and zeroes it. The pose
/// correction composes on the left; the covariance is carried unchanged.
inline KinematicBelief rebase(const KinematicBelief& kb) {
  KinematicBelief out = kb;
  out.ref.p += kb.dx.segment<3>(kIdxP);
  out.ref.v += kb.dx(kIdxV);
  const Quat q = quat_mul(quat_exp(kb.dx.segment<3>(kIdxTh)), kb.ref.quat());
  out.ref.theta = quat_log(q.normalized());
  out.ref.omega += kb.dx.segment<3>(kIdxW);
  out.ref.xi += kb.dx.segment<2>(kIdxXi);
  out.ref.xi = out.ref.xi.cwiseMax(0.1);
  out.dx.setZero();
  return out;
}

/// Time update of the joint belief. CV mode zeroes the turn rate inside the
/// prediction only; disabling elastic fusion zeroes the spring constant.
inline Beliefs predict(const Beliefs& b, double dt, const Hyperparams& hp,
                       bool es_fusion = true, bool cv_mode = false) {
  if (dt == 0.0) return b;
  Beliefs out = b;
  KinematicState base = b.kin.ref;
  if (cv_mode) base.omega.setZero();
  const ErrorTransition phi = error_transition(base, dt);
  out.kin.ref = predict_reference(base, dt);
  if (cv_mode) out.kin.ref.omega = b.kin.ref.omega;
  out.kin.dx = phi.phi * b.kin.dx;
  out.kin.P = predict_covariance(b.kin.P, phi, hp.process_noise(), dt);

  const SkeletonTransition st =
      skeleton_transition(es_fusion ? hp.epsilon : 0.0, hp.rho, dt);
  const Mat9 w = hp.skeleton_noise();
  for (auto& c : out.skel.comps) {
    predict_skeleton(c.mu, c.sigma, st, w, dt);
  }
  return out;
}

/// Full measurement update: N_vb rounds of coordinate ascent over the
/// association, kinematic, and skeleton factors, then an error-state rebase.
/// Priors stay pinned to the predicted density; iterates supply expectation
/// terms and linearization points.
inline Beliefs vb_update(const Beliefs& predicted, const FrameMeasurements& frame,
                         const SkeletonTemplate& tmpl, const Hyperparams& hp,
                         FrameDiagnostics* diag = nullptr) {
  Beliefs iter = predicted;
  for (int round = 0; round < hp.n_vb; ++round) {
    const Eigen::VectorXd pi =
        sgw_weights(iter.kin.ref, iter.skel.reflectors(), hp.lambda);
    if (diag) {
      diag->weight_norm_err =
          std::max(diag->weight_norm_err, std::abs(pi.sum() - 1.0));
    }
    Responsibilities resp =
        compute_responsibilities(iter.kin, iter.skel, frame.radar, pi, hp);
    radar_sufficient_stats(resp, frame.radar, hp.n_min);
    if (diag && resp.upsilon.rows() > 0) {
      const Eigen::VectorXd rows = resp.upsilon.rowwise().sum();
      diag->responsibility_row_err = std::max(
          diag->responsibility_row_err, (rows.array() - 1.0).abs().maxCoeff());
      diag->n_sum_err = std::max(
          diag->n_sum_err,
          std::abs(resp.n.sum() - static_cast<double>(frame.radar.size())));
    }

    const KinematicBelief kin_next =
        update_kinematic(predicted.kin, iter.skel, resp, frame, hp, diag);
    const SkeletonBelief skel_next = update_skeleton(
        kin_next, predicted.skel, iter.skel, resp, frame, tmpl, hp, diag);
    iter.kin = kin_next;
    iter.skel = skel_next;
  }
  iter.kin = rebase(iter.kin);

  if (diag) {
    Eigen::LLT<Mat12> llt(iter.kin.P);
    if (llt.info() != Eigen::Success) diag->covariances_spd = false;
    for (const auto& c : iter.skel.comps) {
      Eigen::LLT<Mat9> l9(c.sigma);
      if (l9.info() != Eigen::Success) diag->covariances_spd = false;
    }
    for (int corner = 1; corner <= 4; ++corner) {
      const Vec3 pt = iter.kin.ref.p +
                      iter.kin.ref.rot() * (corner_matrix(corner) * iter.kin.ref.xi);
      diag->max_ground_residual = std::max(
          diag->max_ground_residual, std::abs(hp.plane.height(pt)));
    }
    Eigen::SelfAdjointEigenSolver<Mat12> es(iter.kin.P);
    diag->cond_P = es.eigenvalues().maxCoeff() /
                   std::max(es.eigenvalues().minCoeff(), 1e-300);
  }
  return iter;
}

/// Track initialization from a single frame: radar centroid snapped to the
/// ground plane, heading by template-matched keypoint grid search, extent and
/// skeleton from the template.
inline Beliefs init_track(const FrameMeasurements& frame,
                          const SkeletonTemplate& tmpl, const Hyperparams& hp) {
  if (frame.radar.empty() || frame.keypoints.size() < 4) {
    throw std::invalid_argument(
        "init_track: need at least 1 radar point and 4 keypoints");
  }

  Vec3 centroid = Vec3::Zero();
  for (const auto& z : frame.radar) centroid += z;
  centroid /= static_cast<double>(frame.radar.size());
  const Vec3 p0 = centroid - hp.plane.height(centroid) * hp.plane.n;

  // plane-aligned base frame: z up the normal, x along the optical axis
  const Vec3 up = hp.plane.n;
  Vec3 fwd = Vec3(0, 0, 1) - Vec3(0, 0, 1).dot(up) * up;
  if (fwd.norm() < 1e-9) fwd = Vec3(1, 0, 0) - Vec3(1, 0, 0).dot(up) * up;
  fwd.normalize();
  const Vec3 left = up.cross(fwd);
  Mat3 base;
  base.col(0) = fwd;
  base.col(1) = left;
  base.col(2) = up;

  auto cost_at = [&](double psi) {
    const Mat3 rot = base * rot_from_rotvec(Vec3(0, 0, psi));
    double cost = 0.0;
    for (const auto& kp : frame.keypoints) {
      Vec3 point;
      if (kp.kind == Keypoint::Kind::Knot) {
        if (kp.id < 0 || kp.id >= tmpl.size()) continue;
        point = tmpl.knots[kp.id];
      } else {
        point = corner_matrix(kp.id) * tmpl.xi;
      }
      const Vec3 scs = rot * point + p0;
      if (scs.z() <= hp.z_min) {
        cost += 1e8;
        continue;
      }
      const Vec2 px = project_point(hp.camera, scs, hp.z_min);
      cost += (px - kp.pixel()).squaredNorm();
    }
    return cost;
  };

  double best_psi = 0.0;
  double best_cost = std::numeric_limits<double>::infinity();
  const int coarse = 128;
  for (int i = 0; i < coarse; ++i) {
    const double psi = 2.0 * M_PI * i / coarse;
    const double c = cost_at(psi);
    if (c < best_cost) {
      best_cost = c;
      best_psi = psi;
    }
  }
  double step = 2.0 * M_PI / coarse;
  for (int refine = 0; refine < 3; ++refine) {
    const double center = best_psi;
    for (int i = -8; i <= 8; ++i) {
      const double psi = center + i * step / 8.0;
      const double c = cost_at(psi);
      if (c < best_cost) {
        best_cost = c;
        best_psi = psi;
      }
    }
    step /= 8.0;
  }

  Beliefs b;
  b.kin.ref.p = p0;
  b.kin.ref.v = hp.init_speed;
  b.kin.ref.theta =
      quat_log(quat_from_rot(base * rot_from_rotvec(Vec3(0, 0, best_psi))));
  b.kin.ref.omega.setZero();
  b.kin.ref.xi = tmpl.xi;
  b.kin.dx.setZero();
  b.kin.P = hp.initial_covariance();

  b.skel.comps.resize(tmpl.size());
  for (int t = 0; t < tmpl.size(); ++t) {
    b.skel.comps[t].mu.head<3>() = tmpl.knots[t];
    b.skel.comps[t].mu.segment<3>(3) = tmpl.knots[t];
    b.skel.comps[t].mu.tail<3>().setZero();
    b.skel.comps[t].sigma = hp.initial_component_covariance();
  }
  return b;
}

/// One tracker instance owns its beliefs; instances are independent.
class Tracker {
 public:
  Tracker(const SkeletonTemplate& tmpl, const Hyperparams& hp,
          bool cv_mode = false, bool es_fusion = true)
      : tmpl_(tmpl), hp_(hp), cv_mode_(cv_mode), es_fusion_(es_fusion) {}

  void init(const FrameMeasurements& frame) {
    beliefs_ = init_track(frame, tmpl_, hp_);
    last_time_ = frame.t;
    initialized_ = true;
  }

  FrameDiagnostics step(const FrameMeasurements& frame) {
    if (!initialized_) {
      init(frame);
      return FrameDiagnostics{};
    }
    const double dt = frame.t - last_time_;
    FrameDiagnostics diag;
    if (dt > 0.0) {
      beliefs_ = predict(beliefs_, dt, hp_, es_fusion_, cv_mode_);
    }
    beliefs_ = vb_update(beliefs_, frame, tmpl_, hp_, &diag);
    last_time_ = frame.t;
    return diag;
  }

  const Beliefs& beliefs() const { return beliefs_; }
  const SkeletonTemplate& tmpl() const { return tmpl_; }
  bool initialized() const { return initialized_; }

 private:
  SkeletonTemplate tmpl_;
  Hyperparams hp_;
  bool cv_mode_ = false;
  bool es_fusion_ = true;
  Beliefs beliefs_;
  double last_time_ = 0.0;
  bool initialized_ = false;
};

}  // namespace eot
