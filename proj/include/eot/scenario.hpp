#pragma once

// Synthetic scenario generation: parametric ground-truth trajectories on a
// ground plane, normal-based knot visibility, Poisson radar sampling driven
// by the mixture weights, noisy labeled keypoints, and JSONL file I/O.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "eot/measurements.hpp"
#include "eot/motion.hpp"
#include "eot/sensors.hpp"
#include "eot/skeleton.hpp"

namespace eot {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& path, int line, const std::string& what)
      : std::runtime_error(path + ":" + std::to_string(line) + ": " + what) {}
};

/// Deterministic RNG: mt19937_64 stream with hand-rolled transforms so the
/// output does not depend on the standard library's distribution internals.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 1e-300) u1 = uniform();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    spare_ = mag * std::sin(2.0 * M_PI * u2);
    have_spare_ = true;
    return mag * std::cos(2.0 * M_PI * u2);
  }

  int poisson(double rate) {
    // Knuth's product method; fine for the rates used here.
    const double limit = std::exp(-rate);
    int k = 0;
    double prod = uniform();
    while (prod > limit) {
      ++k;
      prod *= uniform();
    }
    return k;
  }

  int categorical(const Eigen::VectorXd& weights) {
    const double u = uniform() * weights.sum();
    double acc = 0.0;
    for (int i = 0; i < weights.size(); ++i) {
      acc += weights[i];
      if (u <= acc) return i;
    }
    return static_cast<int>(weights.size()) - 1;
  }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

inline uint64_t mix_seed(uint64_t seed, uint64_t stream, uint64_t index) {
  // splitmix64 over the packed inputs
  uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream * 0x100000001ULL + index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct GroundTruthFrame {
  double t = 0.0;
  KinematicState x;                // sensor frame
  std::vector<Vec3> knots_vcs;
  std::vector<int> visible_knots;
};

enum class TrajectoryKind { LaneChange, UTurn };

/// Roadside sensor geometry shared between generation and tracking: the
/// camera sits `height` above the ground, pitched down by `pitch`.
struct SensorRig {
  double height = 6.0;
  double pitch = 8.0 * M_PI / 180.0;

  Mat3 world_to_scs() const {
    const double c = std::cos(pitch), s = std::sin(pitch);
    Mat3 r_ws;  // columns: camera axes expressed in world
    r_ws.col(0) = Vec3(1, 0, 0);
    r_ws.col(1) = Vec3(0, -s, -c);
    r_ws.col(2) = Vec3(0, c, -s);
    return r_ws.transpose();
  }

  Vec3 position_world() const { return {0.0, 0.0, height}; }

  GroundPlane plane_scs() const {
    const Mat3 r = world_to_scs();
    GroundPlane g;
    g.n = r * Vec3(0, 0, 1);
    g.d = -g.n.dot(r * (Vec3::Zero() - position_world()));
    return g;
  }
};

struct TrajectoryParams {
  double speed = 5.0;
  double start_x = 0.0;  // world frame, ground plane
  double start_y = 12.0;
  double start_heading = 0.0;  // 0 = straight away from the sensor
  SensorRig rig;
};

namespace detail {

struct Segment {
  double duration;
  double omega_z;  // world frame turn rate
};

inline std::vector<Segment> segments_for(TrajectoryKind kind, double& speed,
                                         TrajectoryParams& p) {
  if (kind == TrajectoryKind::LaneChange) {
    return {{6.0, 0.0}, {3.0, 0.08}, {3.0, -0.08}, {12.0, 0.0}};
  }
  // u-turn: approach the sensor, turn through pi, leave
  p.start_x = -5.5;
  p.start_y = 55.0;
  p.start_heading = M_PI;
  speed = 5.0;
  return {{6.0, 0.0}, {5.0, -M_PI / 5.0}, {13.0, 0.0}};
}

}  // namespace detail

/// Piecewise-constant turn-rate truth at a fixed frame rate. States are
/// produced directly in the sensor frame by stepping the reference
/// kinematics, so they satisfy the ground constraint exactly.
inline std::vector<GroundTruthFrame> gen_trajectory(
    TrajectoryKind kind, TrajectoryParams params, double dt, double duration,
    const SkeletonTemplate& tmpl) {
  if (dt <= 0.0 || duration <= 0.0) {
    throw std::invalid_argument("gen_trajectory: dt and duration must be > 0");
  }
  double speed = params.speed;
  auto segments = detail::segments_for(kind, speed, params);

  const Mat3 r_sw = params.rig.world_to_scs();
  const Quat q_sw = quat_from_rot(r_sw);
  const Vec3 cam_w = params.rig.position_world();

  // initial state in the world frame
  const double chi = params.start_heading;
  Mat3 r_wv;  // vehicle frame: x forward, y left, z up
  r_wv.col(0) = Vec3(std::sin(chi), std::cos(chi), 0);
  r_wv.col(2) = Vec3(0, 0, 1);
  r_wv.col(1) = r_wv.col(2).cross(r_wv.col(0));

  KinematicState x;
  x.p = r_sw * (Vec3(params.start_x, params.start_y, 0.0) - cam_w);
  x.v = speed;
  x.theta = quat_log(quat_mul(q_sw, quat_from_rot(r_wv)).normalized());
  x.omega.setZero();
  x.xi = tmpl.xi;

  std::vector<GroundTruthFrame> frames;
  const int n_steps = static_cast<int>(std::round(duration / dt));
  int seg_idx = 0;
  double seg_left = segments.empty() ? duration : segments[0].duration;
  for (int k = 0; k <= n_steps; ++k) {
    while (seg_idx < static_cast<int>(segments.size()) && seg_left <= 1e-12) {
      ++seg_idx;
      seg_left = seg_idx < static_cast<int>(segments.size())
                     ? segments[seg_idx].duration
                     : std::numeric_limits<double>::infinity();
    }
    const double wz =
        seg_idx < static_cast<int>(segments.size()) ? segments[seg_idx].omega_z : 0.0;
    x.omega = r_sw * Vec3(0, 0, wz);

    GroundTruthFrame f;
    f.t = k * dt;
    f.x = x;
    f.knots_vcs = tmpl.knots;
    frames.push_back(f);

    x = predict_reference(x, dt);
    seg_left -= dt;
  }
  return frames;
}

/// Knot visible iff its outward template normal faces the sensor at the
/// origin of the sensor frame.
inline std::vector<int> visibility(const GroundTruthFrame& gt,
                                   const Vec3& sensor_origin = Vec3::Zero()) {
  const Mat3 r = gt.x.rot();
  Vec3 centroid_vcs = Vec3::Zero();
  for (const auto& k : gt.knots_vcs) centroid_vcs += k;
  centroid_vcs /= static_cast<double>(gt.knots_vcs.size());
  const Vec3 centroid_scs = r * centroid_vcs + gt.x.p;

  std::vector<int> out;
  for (int t = 0; t < static_cast<int>(gt.knots_vcs.size()); ++t) {
    const Vec3 knot_scs = r * gt.knots_vcs[t] + gt.x.p;
    const Vec3 outward = knot_scs - centroid_scs;
    const Vec3 ray = knot_scs - sensor_origin;
    if (outward.dot(ray) < 0.0) out.push_back(t);
  }
  return out;
}

/// Radar points: max(1, Poisson(alpha)) draws, each the sensor-frame
/// position of a visible knot chosen by the mixture weights plus noise.
inline std::vector<Vec3> sample_radar(const GroundTruthFrame& gt, double alpha,
                                      const Mat3& q_sim, uint64_t rng_seed,
                                      double lambda = 1.0) {
  if (alpha <= 0.0) throw std::invalid_argument("sample_radar: alpha must be > 0");
  Rng rng(rng_seed);
  const auto vis = visibility(gt);
  if (vis.empty()) throw std::runtime_error("sample_radar: no visible knots");

  std::vector<Vec3> reflectors;
  for (int t : vis) reflectors.push_back(gt.knots_vcs[t]);
  const Eigen::VectorXd weights = sgw_weights(gt.x, reflectors, lambda);

  const int count = std::max(1, rng.poisson(alpha));
  const Mat3 r = gt.x.rot();
  Eigen::LLT<Mat3> llt(q_sim + 1e-300 * Mat3::Identity());
  const Mat3 l = q_sim.isZero(0.0) ? Mat3::Zero() : Mat3(llt.matrixL());

  std::vector<Vec3> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    const int pick = rng.categorical(weights);
    const Vec3 noise(rng.gaussian(), rng.gaussian(), rng.gaussian());
    out.push_back(r * reflectors[pick] + gt.x.p + l * noise);
  }
  return out;
}

/// Labeled keypoints: projections of visible knots and the four bottom
/// corners, pixel noise sigma_px, each kept with probability detection_prob.
inline std::vector<Keypoint> sample_keypoints(const GroundTruthFrame& gt,
                                              const CameraIntrinsics& cam,
                                              double sigma_px,
                                              double detection_prob,
                                              uint64_t rng_seed,
                                              double z_min = kZMin) {
  if (sigma_px < 0.0) throw std::invalid_argument("sample_keypoints: sigma_px < 0");
  Rng rng(rng_seed);
  const Mat3 r = gt.x.rot();
  std::vector<Keypoint> out;

  auto add = [&](Keypoint::Kind kind, int id, const Vec3& scs) {
    if (scs.z() <= z_min) return;
    const double roll = rng.uniform();
    const double nu = rng.gaussian() * sigma_px;
    const double nv = rng.gaussian() * sigma_px;
    if (roll > detection_prob) return;
    const Vec2 px = project_point(cam, scs, z_min);
    out.push_back({kind, id, px.x() + nu, px.y() + nv});
  };

  for (int t : visibility(gt)) {
    add(Keypoint::Kind::Knot, t, r * gt.knots_vcs[t] + gt.x.p);
  }
  for (int corner = 1; corner <= 4; ++corner) {
    add(Keypoint::Kind::Corner, corner,
        r * (corner_matrix(corner) * gt.x.xi) + gt.x.p);
  }
  return out;
}

struct ScenarioFrame {
  GroundTruthFrame truth;
  FrameMeasurements meas;
};

struct ScenarioMeta {
  std::string schema = "eot-scenario-1";
  std::string kind = "lane-change";
  double alpha = 10.0;
  double sigma_px = 2.0;
  double detection_prob = 0.95;
  uint64_t seed = 1;
  double dt = 0.1;
};

struct Scenario {
  ScenarioMeta meta;
  std::vector<ScenarioFrame> frames;
};

/// Whole-scenario assembly at 10 Hz by default.
inline Scenario make_scenario(TrajectoryKind kind, double alpha, uint64_t seed,
                              const SkeletonTemplate& tmpl,
                              const CameraIntrinsics& cam,
                              double sigma_px = 2.0, double detection_prob = 0.95,
                              double dt = 0.1, double duration = 24.0,
                              double lambda = 1.0, double radar_var = 0.5) {
  Scenario s;
  s.meta.kind = kind == TrajectoryKind::LaneChange ? "lane-change" : "u-turn";
  s.meta.alpha = alpha;
  s.meta.sigma_px = sigma_px;
  s.meta.detection_prob = detection_prob;
  s.meta.seed = seed;
  s.meta.dt = dt;

  TrajectoryParams params;
  const auto truth = gen_trajectory(kind, params, dt, duration, tmpl);
  const Mat3 q_sim = radar_var * Mat3::Identity();
  for (size_t k = 0; k < truth.size(); ++k) {
    ScenarioFrame f;
    f.truth = truth[k];
    f.truth.visible_knots = visibility(truth[k]);
    f.meas.t = truth[k].t;
    f.meas.radar = sample_radar(truth[k], alpha, q_sim, mix_seed(seed, 1, k), lambda);
    f.meas.keypoints = sample_keypoints(truth[k], cam, sigma_px, detection_prob,
                                        mix_seed(seed, 2, k));
    s.frames.push_back(std::move(f));
  }
  return s;
}

namespace detail {

// 9 significant decimal digits; values quantized this way survive a
// write/read cycle bit-exactly.
inline double quantize(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", x);
  return std::strtod(buf, nullptr);
}

inline nlohmann::json num(double x) { return quantize(x); }

inline nlohmann::json vec3_json(const Vec3& v) {
  return nlohmann::json::array({num(v.x()), num(v.y()), num(v.z())});
}

inline Vec3 vec3_from(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 3) throw std::runtime_error("expected 3-vector");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace detail

inline void write_scenario(const std::string& path, const Scenario& s) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);

  nlohmann::json header = {
      {"schema", s.meta.schema}, {"kind", s.meta.kind},
      {"alpha", detail::num(s.meta.alpha)}, {"sigma_px", detail::num(s.meta.sigma_px)},
      {"detection_prob", detail::num(s.meta.detection_prob)},
      {"seed", s.meta.seed}, {"dt", detail::num(s.meta.dt)},
  };
  out << header.dump() << "\n";

  for (const auto& f : s.frames) {
    const Quat q = f.truth.x.quat();
    nlohmann::json truth = {
        {"p", detail::vec3_json(f.truth.x.p)},
        {"q", nlohmann::json::array({detail::num(q.w), detail::num(q.v.x()),
                                     detail::num(q.v.y()), detail::num(q.v.z())})},
        {"v", detail::num(f.truth.x.v)},
        {"omega", detail::vec3_json(f.truth.x.omega)},
        {"xi", nlohmann::json::array({detail::num(f.truth.x.xi.x()),
                                      detail::num(f.truth.x.xi.y())})},
        {"knots", nlohmann::json::array()},
    };
    for (const auto& k : f.truth.knots_vcs) truth["knots"].push_back(detail::vec3_json(k));

    nlohmann::json radar = nlohmann::json::array();
    for (const auto& z : f.meas.radar) radar.push_back(detail::vec3_json(z));

    nlohmann::json keypoints = nlohmann::json::array();
    for (const auto& kp : f.meas.keypoints) {
      keypoints.push_back({{"kind", kp.kind == Keypoint::Kind::Knot ? "knot" : "corner"},
                           {"id", kp.id + (kp.kind == Keypoint::Kind::Knot ? 1 : 0)},
                           {"u", detail::num(kp.u)},
                           {"v", detail::num(kp.v)}});
    }

    nlohmann::json line = {{"t", detail::num(f.truth.t)},
                           {"truth", truth},
                           {"radar", radar},
                           {"keypoints", keypoints}};
    out << line.dump() << "\n";
  }
}

inline Scenario read_scenario(const std::string& path,
                              std::ostream* warnings = nullptr) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file: " + path);

  Scenario s;
  std::string line;
  int line_no = 0;
  static const std::vector<std::string> known_frame = {"t", "truth", "radar", "keypoints"};
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(path, line_no, e.what());
    }
    if (!j.is_object()) throw ParseError(path, line_no, "expected a JSON object");

    if (!j.contains("t")) {
      // metadata line
      s.meta.kind = j.value("kind", s.meta.kind);
      s.meta.alpha = j.value("alpha", s.meta.alpha);
      s.meta.sigma_px = j.value("sigma_px", s.meta.sigma_px);
      s.meta.detection_prob = j.value("detection_prob", s.meta.detection_prob);
      s.meta.seed = j.value("seed", s.meta.seed);
      s.meta.dt = j.value("dt", s.meta.dt);
      continue;
    }

    try {
      ScenarioFrame f;
      f.truth.t = j.at("t").get<double>();
      f.meas.t = f.truth.t;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::find(known_frame.begin(), known_frame.end(), it.key()) ==
            known_frame.end()) {
          if (warnings) {
            *warnings << path << ":" << line_no << ": ignoring unknown field '"
                      << it.key() << "'\n";
          }
        }
      }
      if (j.contains("truth")) {
        const auto& tj = j.at("truth");
        f.truth.x.p = detail::vec3_from(tj.at("p"));
        const auto qj = tj.at("q");
        Quat q{qj[0].get<double>(),
               Vec3(qj[1].get<double>(), qj[2].get<double>(), qj[3].get<double>())};
        f.truth.x.theta = quat_log(q.normalized());
        f.truth.x.v = tj.at("v").get<double>();
        f.truth.x.omega = detail::vec3_from(tj.at("omega"));
        f.truth.x.xi = Vec2(tj.at("xi")[0].get<double>(), tj.at("xi")[1].get<double>());
        for (const auto& kj : tj.at("knots")) {
          f.truth.knots_vcs.push_back(detail::vec3_from(kj));
        }
        f.truth.visible_knots = visibility(f.truth);
      }
      for (const auto& rj : j.value("radar", nlohmann::json::array())) {
        f.meas.radar.push_back(detail::vec3_from(rj));
      }
      for (const auto& kj : j.value("keypoints", nlohmann::json::array())) {
        Keypoint kp;
        const std::string kind = kj.at("kind").get<std::string>();
        kp.kind = kind == "knot" ? Keypoint::Kind::Knot : Keypoint::Kind::Corner;
        kp.id = kj.at("id").get<int>() - (kp.kind == Keypoint::Kind::Knot ? 1 : 0);
        kp.u = kj.at("u").get<double>();
        kp.v = kj.at("v").get<double>();
        f.meas.keypoints.push_back(kp);
      }
      s.frames.push_back(std::move(f));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path, line_no, e.what());
    }
  }
  return s;
}

}  // namespace eot
