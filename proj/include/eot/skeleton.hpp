#pragma once

// Skeleton template: knot layout in the vehicle frame, left-right symmetry
// pairing, and corner placement matrices.

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "eot/rotkit.hpp"

namespace eot {

/// Relative position of bottom corner i (1..4) as a 3x2 matrix acting on
/// [length, width]. Sign assignment: 1 -> (+,+), 2 -> (+,-), 3 -> (-,-),
/// 4 -> (-,+).
inline Eigen::Matrix<double, 3, 2> corner_matrix(int corner_id) {
  if (corner_id < 1 || corner_id > 4) {
    throw std::invalid_argument("corner_matrix: corner id must be in 1..4");
  }
  static const double sx[] = {+0.5, +0.5, -0.5, -0.5};
  static const double sy[] = {+0.5, -0.5, -0.5, +0.5};
  Eigen::Matrix<double, 3, 2> g = Eigen::Matrix<double, 3, 2>::Zero();
  g(0, 0) = sx[corner_id - 1];
  g(1, 1) = sy[corner_id - 1];
  return g;
}

struct SkeletonTemplate {
  std::vector<Vec3> knots;   // vehicle frame, origin at bottom midpoint
  std::vector<int> sym;      // sym[t] is the mirror partner of knot t
  Vec2 xi = Vec2(4.6, 1.86); // nominal bottom length/width

  int size() const { return static_cast<int>(knots.size()); }

  int sym_partner(int t) const {
    if (t < 0 || t >= size()) {
      throw std::invalid_argument("sym_partner: knot index out of range");
    }
    return sym[t];
  }

  Vec3 centroid() const {
    Vec3 c = Vec3::Zero();
    for (const auto& k : knots) c += k;
    return c / static_cast<double>(knots.size());
  }
};

inline Mat3 mirror_matrix() {
  Mat3 d = Mat3::Identity();
  d(1, 1) = -1.0;
  return d;
}

/// 24-knot box-with-cabin car outline, 12 mirror pairs. Pairs are laid out
/// consecutively: knot 2i is the left point, 2i+1 its mirror.
inline SkeletonTemplate default_car_template() {
  SkeletonTemplate t;
  const double hw = 0.93;  // half width at the sill
  const struct {
    double x, y, z;
  } left[] = {
      {+2.30, hw, 0.20},   // front bottom
      {-2.30, hw, 0.20},   // rear bottom
      {+1.40, hw, 0.35},   // front wheel arch
      {-1.40, hw, 0.35},   // rear wheel arch
      {+2.25, 0.85, 0.75}, // hood front edge
      {-2.25, 0.85, 0.85}, // trunk edge
      {+0.90, 0.80, 1.10}, // windshield base
      {+0.35, 0.75, 1.45}, // roof front
      {-0.75, 0.75, 1.45}, // roof rear
      {-1.70, 0.80, 1.10}, // rear window base
      {+1.90, 0.90, 0.60}, // front fender
      {-1.90, 0.90, 0.60}, // rear fender
  };
  for (const auto& k : left) {
    t.knots.emplace_back(k.x, k.y, k.z);
    t.knots.emplace_back(k.x, -k.y, k.z);
    const int n = static_cast<int>(t.knots.size());
    t.sym.push_back(n - 1);
    t.sym.push_back(n - 2);
  }
  t.xi = Vec2(4.6, 1.86);
  return t;
}

}  // namespace eot
