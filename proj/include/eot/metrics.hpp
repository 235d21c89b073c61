#pragma once

// Evaluation metrics: intersection-over-union of shape projections onto the
// coordinate planes of the ground-truth vehicle frame, and velocity RMSE.

#include <Eigen/Dense>
#include <algorithm>
#include <stdexcept>
#include <vector>

#include "eot/motion.hpp"
#include "eot/skeleton.hpp"

namespace eot {

enum class ProjPlane { XY, YZ, ZX };

namespace geom {

inline double cross2(const Vec2& o, const Vec2& a, const Vec2& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

/// Andrew monotone chain; returns CCW hull without the duplicated endpoint.
inline std::vector<Vec2> convex_hull(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Vec2& a, const Vec2& b) { return a == b; }),
            pts.end());
  const int n = static_cast<int>(pts.size());
  if (n < 3) return pts;
  std::vector<Vec2> hull(2 * n);
  int k = 0;
  for (int i = 0; i < n; ++i) {
    while (k >= 2 && cross2(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  const int lower = k + 1;
  for (int i = n - 2; i >= 0; --i) {
    while (k >= lower && cross2(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

inline double polygon_area(const std::vector<Vec2>& poly) {
  const int n = static_cast<int>(poly.size());
  if (n < 3) return 0.0;
  double a = 0.0;
  for (int i = 0; i < n; ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % n];
    a += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * std::abs(a);
}

/// Sutherland-Hodgman clip of a convex subject against a convex CCW clip
/// polygon.
inline std::vector<Vec2> clip_convex(const std::vector<Vec2>& subject,
                                     const std::vector<Vec2>& clip) {
  std::vector<Vec2> out = subject;
  const int m = static_cast<int>(clip.size());
  for (int e = 0; e < m && !out.empty(); ++e) {
    const Vec2& a = clip[e];
    const Vec2& b = clip[(e + 1) % m];
    std::vector<Vec2> input;
    input.swap(out);
    const int n = static_cast<int>(input.size());
    for (int i = 0; i < n; ++i) {
      const Vec2& cur = input[i];
      const Vec2& prev = input[(i + n - 1) % n];
      const double side_cur = cross2(a, b, cur);
      const double side_prev = cross2(a, b, prev);
      const bool in_cur = side_cur >= 0.0;
      const bool in_prev = side_prev >= 0.0;
      if (in_cur) {
        if (!in_prev) {
          const double t = side_prev / (side_prev - side_cur);
          out.push_back(prev + t * (cur - prev));
        }
        out.push_back(cur);
      } else if (in_prev) {
        const double t = side_prev / (side_prev - side_cur);
        out.push_back(prev + t * (cur - prev));
      }
    }
  }
  return out;
}

inline Vec2 project_to(ProjPlane plane, const Vec3& p) {
  switch (plane) {
    case ProjPlane::XY: return {p.x(), p.y()};
    case ProjPlane::YZ: return {p.y(), p.z()};
    default: return {p.z(), p.x()};
  }
}

}  // namespace geom

/// IOU of the convex projections of two 3D point sets onto a coordinate
/// plane. Degenerate hulls give 0 with the optional diagnostic set.
inline double iou_plane(const std::vector<Vec3>& shape_true,
                        const std::vector<Vec3>& shape_est, ProjPlane plane,
                        bool* degenerate = nullptr) {
  std::vector<Vec2> a2, b2;
  for (const auto& p : shape_true) a2.push_back(geom::project_to(plane, p));
  for (const auto& p : shape_est) b2.push_back(geom::project_to(plane, p));
  const auto ha = geom::convex_hull(a2);
  const auto hb = geom::convex_hull(b2);
  const double area_a = geom::polygon_area(ha);
  const double area_b = geom::polygon_area(hb);
  if (ha.size() < 3 || hb.size() < 3 || area_a <= 0.0 || area_b <= 0.0) {
    if (degenerate) *degenerate = true;
    return 0.0;
  }
  if (degenerate) *degenerate = false;
  const double inter = geom::polygon_area(geom::clip_convex(ha, hb));
  const double uni = area_a + area_b - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

/// Shape = knots plus the xi-sized bottom rectangle, in one vehicle frame.
inline std::vector<Vec3> shape_points(const std::vector<Vec3>& knots, const Vec2& xi) {
  std::vector<Vec3> pts = knots;
  for (int corner = 1; corner <= 4; ++corner) {
    pts.push_back(corner_matrix(corner) * xi);
  }
  return pts;
}

/// Expresses an estimated shape (vehicle frame of the estimate) in the
/// ground-truth vehicle frame, so position, orientation, and extent errors
/// all count against the overlap.
inline std::vector<Vec3> to_true_frame(const std::vector<Vec3>& pts_est_vcs,
                                       const KinematicState& est,
                                       const KinematicState& truth) {
  const Mat3 r_est = est.rot();
  const Mat3 r_true_t = truth.rot().transpose();
  std::vector<Vec3> out;
  out.reserve(pts_est_vcs.size());
  for (const auto& p : pts_est_vcs) {
    out.push_back(r_true_t * (r_est * p + est.p - truth.p));
  }
  return out;
}

struct FrameIou {
  double xy = 0.0;
  double yz = 0.0;
  double zx = 0.0;
};

inline FrameIou frame_iou(const KinematicState& truth,
                          const std::vector<Vec3>& true_knots_vcs,
                          const KinematicState& est,
                          const std::vector<Vec3>& est_knots_vcs) {
  const auto shape_t = shape_points(true_knots_vcs, truth.xi);
  const auto shape_e =
      to_true_frame(shape_points(est_knots_vcs, est.xi), est, truth);
  FrameIou out;
  out.xy = iou_plane(shape_t, shape_e, ProjPlane::XY);
  out.yz = iou_plane(shape_t, shape_e, ProjPlane::YZ);
  out.zx = iou_plane(shape_t, shape_e, ProjPlane::ZX);
  return out;
}

inline double rmse_velocity(const std::vector<double>& truth,
                            const std::vector<double>& est) {
  if (truth.size() != est.size()) {
    throw std::invalid_argument("rmse_velocity: series length mismatch");
  }
  if (truth.empty()) return 0.0;
  double acc = 0.0;
  for (size_t i = 0; i < truth.size(); ++i) {
    const double d = truth[i] - est[i];
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(truth.size()));
}

}  // namespace eot
