// Command-line front end: scenario generation, tracking, evaluation, and
// report aggregation. Exit codes: 0 success, 1 usage error, 2 data error.

#include <glob.h>

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "eot/experiment.hpp"
#include "eot/hyperparams.hpp"
#include "eot/scenario.hpp"
#include "eot/skeleton.hpp"
#include "eot/vbtracker.hpp"

namespace {

std::vector<std::string> expand_glob(const std::string& pattern) {
  glob_t res;
  std::vector<std::string> out;
  const int rc = glob(pattern.c_str(), GLOB_TILDE, nullptr, &res);
  if (rc == 0) {
    for (size_t i = 0; i < res.gl_pathc; ++i) out.emplace_back(res.gl_pathv[i]);
  }
  globfree(&res);
  return out;
}

int cmd_generate(const std::string& scenario, double alpha, uint64_t seed,
                 const std::string& out_path, const std::string& config_path) {
  eot::Hyperparams hp;
  if (!config_path.empty()) hp = eot::load_hyperparams(config_path);
  const auto kind = scenario == "u-turn" ? eot::TrajectoryKind::UTurn
                                         : eot::TrajectoryKind::LaneChange;
  const auto tmpl = eot::default_car_template();
  // The default sensor rig defines the ground plane the tracker assumes.
  eot::SensorRig rig;
  hp.plane = rig.plane_scs();
  const auto s = eot::make_scenario(kind, alpha, seed, tmpl, hp.camera, 2.0,
                                    0.95, 0.1, 24.0, hp.lambda, hp.q_radar);
  eot::write_scenario(out_path, s);
  std::cout << "wrote " << s.frames.size() << " frames to " << out_path << "\n";
  return 0;
}

int cmd_track(const std::string& config_path, const std::string& motion,
              const std::string& es, const std::string& in_path,
              const std::string& out_path) {
  eot::Hyperparams hp;
  if (!config_path.empty()) hp = eot::load_hyperparams(config_path);
  else {
    eot::SensorRig rig;
    hp.plane = rig.plane_scs();
  }
  const bool cv_mode = motion == "cv";
  const bool es_on = es != "off";
  const auto tmpl = eot::default_car_template();

  const eot::Scenario scenario = eot::read_scenario(in_path, &std::cerr);
  eot::Tracker tracker(tmpl, hp, cv_mode, es_on);
  std::vector<eot::FrameTrace> trace;
  for (const auto& f : scenario.frames) {
    const auto diag = tracker.step(f.meas);
    eot::FrameTrace tr;
    tr.t = f.meas.t;
    tr.est = tracker.beliefs().kin.ref;
    tr.knots = tracker.beliefs().skel.knots();
    tr.cond_P = diag.cond_P;
    trace.push_back(std::move(tr));
  }
  eot::write_trace(out_path,
                   eot::method_name(cv_mode ? eot::MotionModel::Cv
                                            : eot::MotionModel::Ctrv,
                                    es_on),
                   trace);
  std::cout << "tracked " << trace.size() << " frames -> " << out_path << "\n";
  return 0;
}

int cmd_evaluate(const std::string& truth_path, const std::string& est_path,
                 const std::string& out_path) {
  const eot::Scenario scenario = eot::read_scenario(truth_path);
  const eot::TraceFile trace = eot::read_trace(est_path);
  const auto ev = eot::evaluate_trace(scenario, trace);
  eot::write_metrics(out_path, ev);
  std::cout << "mean_iou_xy=" << ev.metrics.mean_iou_xy
            << " rmse_v=" << ev.metrics.rmse_v << " -> " << out_path << "\n";
  return 0;
}

int cmd_report(const std::vector<std::string>& inputs, const std::string& csv,
               const std::string& plot) {
  std::vector<std::string> files;
  for (const auto& pattern : inputs) {
    auto expanded = expand_glob(pattern);
    if (expanded.empty()) expanded.push_back(pattern);
    files.insert(files.end(), expanded.begin(), expanded.end());
  }
  eot::report(files, csv, plot);
  std::cout << "report over " << files.size() << " metric files -> " << csv << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"radar-camera extended object tracking toolkit"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("generate", "generate a synthetic scenario");
  std::string gen_scenario = "lane-change";
  double gen_alpha = 10.0;
  uint64_t gen_seed = 1;
  std::string gen_out, gen_config;
  gen->add_option("--scenario", gen_scenario, "lane-change or u-turn")
      ->check(CLI::IsMember({"lane-change", "u-turn"}));
  gen->add_option("--alpha", gen_alpha, "expected radar points per frame");
  gen->add_option("--seed", gen_seed, "measurement noise seed");
  gen->add_option("--out", gen_out, "output scenario JSONL")->required();
  gen->add_option("--config", gen_config, "hyperparameter config JSON");

  auto* track = app.add_subcommand("track", "run the tracker over a scenario");
  std::string trk_config, trk_motion = "ctrv", trk_es = "on", trk_in, trk_out;
  track->add_option("--config", trk_config, "hyperparameter config JSON");
  track->add_option("--motion", trk_motion, "ctrv or cv")
      ->check(CLI::IsMember({"ctrv", "cv"}));
  track->add_option("--es", trk_es, "elastic fusion on or off")
      ->check(CLI::IsMember({"on", "off"}));
  track->add_option("--in", trk_in, "scenario JSONL")->required();
  track->add_option("--out", trk_out, "trace JSONL")->required();

  auto* eval = app.add_subcommand("evaluate", "score a trace against truth");
  std::string ev_truth, ev_est, ev_out;
  eval->add_option("--truth", ev_truth, "scenario JSONL with truth")->required();
  eval->add_option("--est", ev_est, "trace JSONL")->required();
  eval->add_option("--out", ev_out, "metrics JSON")->required();

  auto* rep = app.add_subcommand("report", "aggregate metrics files");
  std::vector<std::string> rep_in;
  std::string rep_csv, rep_plot;
  rep->add_option("--in", rep_in, "metrics JSON files or globs")->required();
  rep->add_option("--csv", rep_csv, "summary CSV path")->required();
  rep->add_option("--plot-data", rep_plot, "per-frame plot data CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 1;
  }

  try {
    if (gen->parsed()) {
      return cmd_generate(gen_scenario, gen_alpha, gen_seed, gen_out, gen_config);
    }
    if (track->parsed()) {
      return cmd_track(trk_config, trk_motion, trk_es, trk_in, trk_out);
    }
    if (eval->parsed()) {
      return cmd_evaluate(ev_truth, ev_est, ev_out);
    }
    if (rep->parsed()) {
      return cmd_report(rep_in, rep_csv, rep_plot);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
