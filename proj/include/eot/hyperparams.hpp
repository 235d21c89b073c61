#pragma once

// Tracker hyperparameters with JSON round-trip. Missing keys fall back to
// the defaults below.

#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "eot/motion.hpp"
#include "eot/sensors.hpp"

namespace eot {

struct Hyperparams {
  // mixture / fusion
  double lambda = 1.0;
  double epsilon = 100.0;
  double rho = 20.0;
  int n_vb = 3;

  // measurement noise (isotropic scales)
  double q_radar = 0.5;         // covariance of each radar point, times I3
  double q_keypoint_knot = 5.0; // pixel covariance for knot keypoints, times I2
  double q_keypoint_corner = 5.0;
  double q_rot = 0.1;
  double q_grnd = 1e-4;
  double q_sym = 0.05;

  // process noise
  double w_speed = 0.01;
  double w_omega = 1.0;
  double w_extent = 0.1;
  double w_skeleton = 1.0;

  CameraIntrinsics camera;
  GroundPlane plane;

  // initialization
  double init_speed = 5.0;
  double init_pos_var = 1.0;
  double init_speed_var = 25.0;
  double init_theta_var = 0.04;
  double init_omega_var = 0.25;
  double init_xi_var = 0.25;
  double init_reflector_var = 0.25;
  double init_knot_var = 0.0625;
  double init_knot_vel_var = 1.0;

  // numerics
  double n_min = 1e-6;          // inactivity threshold for radar components
  double regularization = 1e-9; // added before information-matrix inversion
  double z_min = 0.1;

  Mat12 process_noise() const {
    Mat12 w = Mat12::Zero();
    w(kIdxV, kIdxV) = w_speed;
    w.block<3, 3>(kIdxW, kIdxW) = w_omega * Mat3::Identity();
    w.block<2, 2>(kIdxXi, kIdxXi) = w_extent * Mat2::Identity();
    return w;
  }

  Mat9 skeleton_noise() const { return w_skeleton * Mat9::Identity(); }

  Mat3 radar_noise() const { return q_radar * Mat3::Identity(); }
  Mat2 knot_px_noise() const { return q_keypoint_knot * Mat2::Identity(); }
  Mat2 corner_px_noise() const { return q_keypoint_corner * Mat2::Identity(); }
  Mat3 sym_noise() const { return q_sym * Mat3::Identity(); }

  Mat12 initial_covariance() const {
    Mat12 p = Mat12::Zero();
    p.block<3, 3>(kIdxP, kIdxP) = init_pos_var * Mat3::Identity();
    p(kIdxV, kIdxV) = init_speed_var;
    p.block<3, 3>(kIdxTh, kIdxTh) = init_theta_var * Mat3::Identity();
    p.block<3, 3>(kIdxW, kIdxW) = init_omega_var * Mat3::Identity();
    p.block<2, 2>(kIdxXi, kIdxXi) = init_xi_var * Mat2::Identity();
    return p;
  }

  Mat9 initial_component_covariance() const {
    Mat9 s = Mat9::Zero();
    s.block<3, 3>(0, 0) = init_reflector_var * Mat3::Identity();
    s.block<3, 3>(3, 3) = init_knot_var * Mat3::Identity();
    s.block<3, 3>(6, 6) = init_knot_vel_var * Mat3::Identity();
    return s;
  }
};

inline void to_json(nlohmann::json& j, const Hyperparams& h) {
  j = nlohmann::json{
      {"lambda", h.lambda},
      {"epsilon", h.epsilon},
      {"rho", h.rho},
      {"n_vb", h.n_vb},
      {"q_radar", h.q_radar},
      {"q_keypoint_knot", h.q_keypoint_knot},
      {"q_keypoint_corner", h.q_keypoint_corner},
      {"q_rot", h.q_rot},
      {"q_grnd", h.q_grnd},
      {"q_sym", h.q_sym},
      {"w_speed", h.w_speed},
      {"w_omega", h.w_omega},
      {"w_extent", h.w_extent},
      {"w_skeleton", h.w_skeleton},
      {"camera", {{"fx", h.camera.fx}, {"fy", h.camera.fy}, {"u0", h.camera.u0}, {"v0", h.camera.v0}}},
      {"ground_plane", {{"n", {h.plane.n.x(), h.plane.n.y(), h.plane.n.z()}}, {"d", h.plane.d}}},
      {"init",
       {{"speed", h.init_speed},
        {"pos_var", h.init_pos_var},
        {"speed_var", h.init_speed_var},
        {"theta_var", h.init_theta_var},
        {"omega_var", h.init_omega_var},
        {"xi_var", h.init_xi_var},
        {"reflector_var", h.init_reflector_var},
        {"knot_var", h.init_knot_var},
        {"knot_vel_var", h.init_knot_vel_var}}},
      {"n_min", h.n_min},
      {"regularization", h.regularization},
      {"z_min", h.z_min},
  };
}

inline void from_json(const nlohmann::json& j, Hyperparams& h) {
  h = Hyperparams{};
  auto get = [&j](const char* key, double& out) {
    if (j.contains(key)) out = j.at(key).get<double>();
  };
  get("lambda", h.lambda);
  get("epsilon", h.epsilon);
  get("rho", h.rho);
  if (j.contains("n_vb")) h.n_vb = j.at("n_vb").get<int>();
  get("q_radar", h.q_radar);
  get("q_keypoint_knot", h.q_keypoint_knot);
  get("q_keypoint_corner", h.q_keypoint_corner);
  get("q_rot", h.q_rot);
  get("q_grnd", h.q_grnd);
  get("q_sym", h.q_sym);
  get("w_speed", h.w_speed);
  get("w_omega", h.w_omega);
  get("w_extent", h.w_extent);
  get("w_skeleton", h.w_skeleton);
  if (j.contains("camera")) {
    const auto& c = j.at("camera");
    h.camera.fx = c.value("fx", h.camera.fx);
    h.camera.fy = c.value("fy", h.camera.fy);
    h.camera.u0 = c.value("u0", h.camera.u0);
    h.camera.v0 = c.value("v0", h.camera.v0);
  }
  if (j.contains("ground_plane")) {
    const auto& g = j.at("ground_plane");
    if (g.contains("n")) {
      auto n = g.at("n").get<std::vector<double>>();
      if (n.size() != 3) throw std::invalid_argument("ground_plane.n must have 3 entries");
      h.plane.n = Vec3(n[0], n[1], n[2]).normalized();
    }
    h.plane.d = g.value("d", h.plane.d);
  }
  if (j.contains("init")) {
    const auto& i = j.at("init");
    h.init_speed = i.value("speed", h.init_speed);
    h.init_pos_var = i.value("pos_var", h.init_pos_var);
    h.init_speed_var = i.value("speed_var", h.init_speed_var);
    h.init_theta_var = i.value("theta_var", h.init_theta_var);
    h.init_omega_var = i.value("omega_var", h.init_omega_var);
    h.init_xi_var = i.value("xi_var", h.init_xi_var);
    h.init_reflector_var = i.value("reflector_var", h.init_reflector_var);
    h.init_knot_var = i.value("knot_var", h.init_knot_var);
    h.init_knot_vel_var = i.value("knot_vel_var", h.init_knot_vel_var);
  }
  get("n_min", h.n_min);
  get("regularization", h.regularization);
  get("z_min", h.z_min);
}

inline Hyperparams load_hyperparams(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  nlohmann::json j;
  in >> j;
  return j.get<Hyperparams>();
}

}  // namespace eot
