#pragma once

// Per-frame sensor data: radar 3D points in the sensor frame plus labeled
// pixel keypoints.

#include <vector>

#include "eot/rotkit.hpp"

namespace eot {

struct Keypoint {
  enum class Kind { Knot, Corner };
  Kind kind = Kind::Knot;
  int id = 0;  // knot index (0-based) or corner id (1..4)
  double u = 0.0;
  double v = 0.0;

  Vec2 pixel() const { return {u, v}; }
};

struct FrameMeasurements {
  double t = 0.0;
  std::vector<Vec3> radar;
  std::vector<Keypoint> keypoints;
};

}  // namespace eot
