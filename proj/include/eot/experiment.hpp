#pragma once

// Batch experiment runner and report generation: tracks scenarios through
// the filter, accumulates per-frame metrics and property checks, and emits
// machine-readable traces, metrics, and summary tables.

#include <array>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "eot/metrics.hpp"
#include "eot/scenario.hpp"
#include "eot/vbtracker.hpp"

namespace eot {

enum class MotionModel { Ctrv, Cv };

inline std::string method_name(MotionModel m, bool es) {
  std::string s = m == MotionModel::Ctrv ? "ctrv" : "cv";
  return es ? s + "+es" : s;
}

struct RunConfig {
  MotionModel motion = MotionModel::Ctrv;
  bool es_fusion = true;
  Hyperparams hp;
  std::string scenario_path;       // truth source
  std::vector<uint64_t> seeds;     // per-seed measurement resampling; empty
                                   // means use the file's own measurements
  double alpha = 10.0;
  double sigma_px = 2.0;
  double detection_prob = 0.95;
};

struct FrameTrace {
  double t = 0.0;
  KinematicState est;
  std::vector<Vec3> knots;
  FrameIou iou;
  double cond_P = 0.0;
};

struct PropertyViolations {
  int non_spd = 0;
  int responsibility_rows = 0;   // row sums off by more than 1e-12
  int weight_normalization = 0;  // mixture weights off by more than 1e-12
  int n_sum = 0;                 // component weights vs point count, 1e-9
  int ground_residual = 0;       // post-update residual above 0.05 m

  int total() const {
    return non_spd + responsibility_rows + weight_normalization + n_sum +
           ground_residual;
  }
};

struct RunMetrics {
  double mean_iou_xy = 0.0;
  double mean_iou_yz = 0.0;
  double mean_iou_zx = 0.0;
  double rmse_v = 0.0;
  int n_frames = 0;
  std::vector<FrameTrace> trace;
  PropertyViolations violations;
};

/// Tracks one scenario realization with one tracker instance.
inline RunMetrics track_scenario(const Scenario& scenario,
                                 const SkeletonTemplate& tmpl,
                                 const Hyperparams& hp, MotionModel motion,
                                 bool es_fusion) {
  Tracker tracker(tmpl, hp, motion == MotionModel::Cv, es_fusion);

  RunMetrics rm;
  std::vector<double> v_true, v_est;
  double iou_xy = 0.0, iou_yz = 0.0, iou_zx = 0.0;
  for (const auto& f : scenario.frames) {
    const FrameDiagnostics diag = tracker.step(f.meas);

    if (!diag.covariances_spd) ++rm.violations.non_spd;
    if (diag.responsibility_row_err > 1e-12) ++rm.violations.responsibility_rows;
    if (diag.weight_norm_err > 1e-12) ++rm.violations.weight_normalization;
    if (diag.n_sum_err > 1e-9) ++rm.violations.n_sum;
    if (diag.max_ground_residual > 0.05) ++rm.violations.ground_residual;

    FrameTrace tr;
    tr.t = f.meas.t;
    tr.est = tracker.beliefs().kin.ref;
    tr.knots = tracker.beliefs().skel.knots();
    tr.iou = frame_iou(f.truth.x, f.truth.knots_vcs, tr.est, tr.knots);
    tr.cond_P = diag.cond_P;
    rm.trace.push_back(tr);

    iou_xy += tr.iou.xy;
    iou_yz += tr.iou.yz;
    iou_zx += tr.iou.zx;
    v_true.push_back(f.truth.x.v);
    v_est.push_back(tr.est.v);
  }
  rm.n_frames = static_cast<int>(scenario.frames.size());
  if (rm.n_frames > 0) {
    rm.mean_iou_xy = iou_xy / rm.n_frames;
    rm.mean_iou_yz = iou_yz / rm.n_frames;
    rm.mean_iou_zx = iou_zx / rm.n_frames;
  }
  rm.rmse_v = rmse_velocity(v_true, v_est);
  return rm;
}

/// Replaces the measurements of a scenario with a fresh draw from its truth.
inline Scenario resample_measurements(const Scenario& base, uint64_t seed,
                                      double alpha, double sigma_px,
                                      double detection_prob,
                                      const CameraIntrinsics& cam,
                                      double lambda, double radar_var) {
  Scenario s = base;
  s.meta.seed = seed;
  s.meta.alpha = alpha;
  const Mat3 q_sim = radar_var * Mat3::Identity();
  for (size_t k = 0; k < s.frames.size(); ++k) {
    auto& f = s.frames[k];
    f.meas.radar = sample_radar(f.truth, alpha, q_sim, mix_seed(seed, 1, k), lambda);
    f.meas.keypoints = sample_keypoints(f.truth, cam, sigma_px, detection_prob,
                                        mix_seed(seed, 2, k));
  }
  return s;
}

struct ExperimentResult {
  RunMetrics aggregate;
  std::vector<RunMetrics> per_seed;
};

/// Runs the configured tracker over each seed's measurement realization of
/// the scenario file and averages the per-run metrics.
inline ExperimentResult run_experiment(const RunConfig& cfg,
                                       const SkeletonTemplate& tmpl) {
  const Scenario base = read_scenario(cfg.scenario_path);
  ExperimentResult out;

  std::vector<Scenario> runs;
  if (cfg.seeds.empty()) {
    runs.push_back(base);
  } else {
    for (uint64_t seed : cfg.seeds) {
      runs.push_back(resample_measurements(base, seed, cfg.alpha, cfg.sigma_px,
                                           cfg.detection_prob, cfg.hp.camera,
                                           cfg.hp.lambda, cfg.hp.q_radar));
    }
  }

  for (const auto& s : runs) {
    out.per_seed.push_back(
        track_scenario(s, tmpl, cfg.hp, cfg.motion, cfg.es_fusion));
  }

  RunMetrics& agg = out.aggregate;
  for (const auto& rm : out.per_seed) {
    agg.mean_iou_xy += rm.mean_iou_xy;
    agg.mean_iou_yz += rm.mean_iou_yz;
    agg.mean_iou_zx += rm.mean_iou_zx;
    agg.rmse_v += rm.rmse_v;
    agg.n_frames += rm.n_frames;
    agg.violations.non_spd += rm.violations.non_spd;
    agg.violations.responsibility_rows += rm.violations.responsibility_rows;
    agg.violations.weight_normalization += rm.violations.weight_normalization;
    agg.violations.n_sum += rm.violations.n_sum;
    agg.violations.ground_residual += rm.violations.ground_residual;
  }
  const double n = static_cast<double>(out.per_seed.size());
  if (n > 0) {
    agg.mean_iou_xy /= n;
    agg.mean_iou_yz /= n;
    agg.mean_iou_zx /= n;
    agg.rmse_v /= n;
  }
  return out;
}

// ---------------------------------------------------------------------------
// file formats

inline void write_trace(const std::string& path, const std::string& method,
                        const std::vector<FrameTrace>& trace) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  nlohmann::json header = {{"schema", "eot-trace-1"}, {"method", method}};
  out << header.dump() << "\n";
  for (const auto& tr : trace) {
    const Quat q = tr.est.quat();
    nlohmann::json j = {
        {"t", detail::num(tr.t)},
        {"p", detail::vec3_json(tr.est.p)},
        {"q", nlohmann::json::array({detail::num(q.w), detail::num(q.v.x()),
                                     detail::num(q.v.y()), detail::num(q.v.z())})},
        {"v", detail::num(tr.est.v)},
        {"omega", detail::vec3_json(tr.est.omega)},
        {"xi", nlohmann::json::array({detail::num(tr.est.xi.x()),
                                      detail::num(tr.est.xi.y())})},
        {"knots", nlohmann::json::array()},
        {"cond_P", detail::num(tr.cond_P)},
    };
    for (const auto& k : tr.knots) j["knots"].push_back(detail::vec3_json(k));
    out << j.dump() << "\n";
  }
}

struct TraceFile {
  std::string method;
  std::vector<FrameTrace> frames;
};

inline TraceFile read_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace file: " + path);
  TraceFile tf;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(path, line_no, e.what());
    }
    if (!j.contains("t")) {
      tf.method = j.value("method", tf.method);
      continue;
    }
    try {
      FrameTrace tr;
      tr.t = j.at("t").get<double>();
      tr.est.p = detail::vec3_from(j.at("p"));
      const auto qj = j.at("q");
      Quat q{qj[0].get<double>(),
             Vec3(qj[1].get<double>(), qj[2].get<double>(), qj[3].get<double>())};
      tr.est.theta = quat_log(q.normalized());
      tr.est.v = j.at("v").get<double>();
      tr.est.omega = detail::vec3_from(j.at("omega"));
      tr.est.xi = Vec2(j.at("xi")[0].get<double>(), j.at("xi")[1].get<double>());
      for (const auto& kj : j.at("knots")) tr.knots.push_back(detail::vec3_from(kj));
      tr.cond_P = j.value("cond_P", 0.0);
      tf.frames.push_back(std::move(tr));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path, line_no, e.what());
    }
  }
  return tf;
}

struct EvaluationResult {
  std::string method;
  double alpha = 0.0;
  std::string scenario_kind;
  RunMetrics metrics;
};

/// Per-frame IOU and velocity RMSE of a trace against scenario truth.
inline EvaluationResult evaluate_trace(const Scenario& scenario,
                                       const TraceFile& trace) {
  if (scenario.frames.size() != trace.frames.size()) {
    throw std::runtime_error("evaluate: frame count mismatch between truth and estimate");
  }
  EvaluationResult ev;
  ev.method = trace.method;
  ev.alpha = scenario.meta.alpha;
  ev.scenario_kind = scenario.meta.kind;

  std::vector<double> v_true, v_est;
  double xy = 0.0, yz = 0.0, zx = 0.0;
  for (size_t i = 0; i < trace.frames.size(); ++i) {
    FrameTrace tr = trace.frames[i];
    tr.iou = frame_iou(scenario.frames[i].truth.x, scenario.frames[i].truth.knots_vcs,
                       tr.est, tr.knots);
    xy += tr.iou.xy;
    yz += tr.iou.yz;
    zx += tr.iou.zx;
    v_true.push_back(scenario.frames[i].truth.x.v);
    v_est.push_back(tr.est.v);
    ev.metrics.trace.push_back(tr);
  }
  ev.metrics.n_frames = static_cast<int>(trace.frames.size());
  if (ev.metrics.n_frames > 0) {
    ev.metrics.mean_iou_xy = xy / ev.metrics.n_frames;
    ev.metrics.mean_iou_yz = yz / ev.metrics.n_frames;
    ev.metrics.mean_iou_zx = zx / ev.metrics.n_frames;
  }
  ev.metrics.rmse_v = rmse_velocity(v_true, v_est);
  return ev;
}

inline void write_metrics(const std::string& path, const EvaluationResult& ev) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  nlohmann::json j = {
      {"schema", "eot-metrics-1"},
      {"method", ev.method},
      {"scenario", ev.scenario_kind},
      {"alpha", detail::num(ev.alpha)},
      {"n_frames", ev.metrics.n_frames},
      {"mean_iou_xy", detail::num(ev.metrics.mean_iou_xy)},
      {"mean_iou_yz", detail::num(ev.metrics.mean_iou_yz)},
      {"mean_iou_zx", detail::num(ev.metrics.mean_iou_zx)},
      {"rmse_v", detail::num(ev.metrics.rmse_v)},
      {"frames", nlohmann::json::array()},
  };
  for (const auto& tr : ev.metrics.trace) {
    j["frames"].push_back({{"t", detail::num(tr.t)},
                           {"iou_xy", detail::num(tr.iou.xy)},
                           {"iou_yz", detail::num(tr.iou.yz)},
                           {"iou_zx", detail::num(tr.iou.zx)}});
  }
  out << j.dump(2) << "\n";
}

/// Aggregates metrics JSON files into a summary CSV (one row per scenario,
/// method, alpha, metric) and a per-frame plot-data CSV.
inline void report(const std::vector<std::string>& metric_files,
                   const std::string& csv_path, const std::string& plot_path) {
  struct Key {
    std::string scenario, method;
    double alpha;
    bool operator<(const Key& o) const {
      if (scenario != o.scenario) return scenario < o.scenario;
      if (method != o.method) return method < o.method;
      return alpha < o.alpha;
    }
  };
  struct Acc {
    double iou_xy = 0, iou_yz = 0, iou_zx = 0, rmse = 0;
    int n = 0;
    std::map<int, std::array<double, 4>> frames;  // frame -> sums(xy,yz,zx,count)
  };
  std::map<Key, Acc> groups;

  for (const auto& path : metric_files) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open metrics file: " + path);
    nlohmann::json j;
    in >> j;
    Key key{j.value("scenario", std::string("unknown")),
            j.value("method", std::string("unknown")), j.value("alpha", 0.0)};
    Acc& acc = groups[key];
    acc.iou_xy += j.value("mean_iou_xy", 0.0);
    acc.iou_yz += j.value("mean_iou_yz", 0.0);
    acc.iou_zx += j.value("mean_iou_zx", 0.0);
    acc.rmse += j.value("rmse_v", 0.0);
    acc.n += 1;
    int idx = 0;
    for (const auto& fj : j.value("frames", nlohmann::json::array())) {
      auto& f = acc.frames[idx++];
      f[0] += fj.value("iou_xy", 0.0);
      f[1] += fj.value("iou_yz", 0.0);
      f[2] += fj.value("iou_zx", 0.0);
      f[3] += 1.0;
    }
  }

  std::ofstream csv(csv_path);
  if (!csv) throw std::runtime_error("cannot open for writing: " + csv_path);
  csv << "scenario,method,alpha,metric,value,n_runs\n";
  csv << std::setprecision(9);
  for (const auto& [key, acc] : groups) {
    const double n = std::max(acc.n, 1);
    csv << key.scenario << "," << key.method << "," << key.alpha
        << ",mean_iou_xy," << acc.iou_xy / n << "," << acc.n << "\n";
    csv << key.scenario << "," << key.method << "," << key.alpha
        << ",mean_iou_yz," << acc.iou_yz / n << "," << acc.n << "\n";
    csv << key.scenario << "," << key.method << "," << key.alpha
        << ",mean_iou_zx," << acc.iou_zx / n << "," << acc.n << "\n";
    csv << key.scenario << "," << key.method << "," << key.alpha
        << ",rmse_v," << acc.rmse / n << "," << acc.n << "\n";
  }

  std::ofstream plot(plot_path);
  if (!plot) throw std::runtime_error("cannot open for writing: " + plot_path);
  plot << "scenario,method,alpha,frame,iou_xy,iou_yz,iou_zx\n";
  plot << std::setprecision(9);
  for (const auto& [key, acc] : groups) {
    for (const auto& [frame, sums] : acc.frames) {
      const double n = std::max(sums[3], 1.0);
      plot << key.scenario << "," << key.method << "," << key.alpha << ","
           << frame << "," << sums[0] / n << "," << sums[1] / n << ","
           << sums[2] / n << "\n";
    }
  }
}

}  // namespace eot
