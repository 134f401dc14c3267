#pragma once

// Small planar polyline helpers shared by the boundary construction,
// region tests, and plot export.

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

namespace pann::geom {

using Pt = std::array<double, 2>;  // (m, s)

inline double dist(const Pt& a, const Pt& b) {
  return std::hypot(a[0] - b[0], a[1] - b[1]);
}

inline double signed_area(const std::vector<Pt>& poly) {
  double acc = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Pt& a = poly[i];
    const Pt& b = poly[(i + 1) % poly.size()];
    acc += a[0] * b[1] - b[0] * a[1];
  }
  return 0.5 * acc;
}

// Even-odd rule on a closed polyline.
inline bool point_in_polygon(const std::vector<Pt>& poly, const Pt& q) {
  bool in = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Pt& a = poly[i];
    const Pt& b = poly[j];
    if ((a[1] > q[1]) != (b[1] > q[1])) {
      const double x = (b[0] - a[0]) * (q[1] - a[1]) / (b[1] - a[1]) + a[0];
      if (q[0] < x) in = !in;
    }
  }
  return in;
}

inline double point_segment_dist(const Pt& p, const Pt& a, const Pt& b) {
  const double vx = b[0] - a[0], vy = b[1] - a[1];
  const double wx = p[0] - a[0], wy = p[1] - a[1];
  const double vv = vx * vx + vy * vy;
  double t = vv > 0.0 ? (wx * vx + wy * vy) / vv : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p[0] - (a[0] + t * vx), p[1] - (a[1] + t * vy));
}

// Douglas-Peucker decimation; keeps endpoints.
inline std::vector<Pt> decimate(const std::vector<Pt>& pts, double eps) {
  if (pts.size() < 3) return pts;
  std::vector<bool> keep(pts.size(), false);
  keep.front() = keep.back() = true;
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, pts.size() - 1}};
  while (!stack.empty()) {
    auto [i, j] = stack.back();
    stack.pop_back();
    if (j <= i + 1) continue;
    double worst = -1.0;
    std::size_t split = i;
    for (std::size_t k = i + 1; k < j; ++k) {
      const double d = point_segment_dist(pts[k], pts[i], pts[j]);
      if (d > worst) {
        worst = d;
        split = k;
      }
    }
    if (worst > eps) {
      keep[split] = true;
      stack.push_back({i, split});
      stack.push_back({split, j});
    }
  }
  std::vector<Pt> out;
  for (std::size_t k = 0; k < pts.size(); ++k)
    if (keep[k]) out.push_back(pts[k]);
  return out;
}

// m-coordinates where a closed polyline crosses the horizontal line
// s = value, sorted ascending.
inline std::vector<double> line_crossings(const std::vector<Pt>& poly,
                                          double s_value) {
  std::vector<double> out;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Pt& a = poly[i];
    const Pt& b = poly[(i + 1) % n];
    const double ga = a[1] - s_value, gb = b[1] - s_value;
    if ((ga < 0.0 && gb >= 0.0) || (ga >= 0.0 && gb < 0.0)) {
      const double t = ga / (ga - gb);
      out.push_back(a[0] + t * (b[0] - a[0]));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace detail {
inline bool seg_intersect(const Pt& p1, const Pt& p2, const Pt& q1,
                          const Pt& q2) {
  auto orient = [](const Pt& a, const Pt& b, const Pt& c) {
    const double v =
        (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
    return (v > 0.0) - (v < 0.0);
  };
  const int o1 = orient(p1, p2, q1), o2 = orient(p1, p2, q2);
  const int o3 = orient(q1, q2, p1), o4 = orient(q1, q2, p2);
  return o1 != o2 && o3 != o4;
}
}  // namespace detail

// Self-intersection test for a closed polyline via a uniform grid hash.
// Adjacent segments share endpoints and are not counted. A nonzero
// seam_window exempts pairs that both lie within that many segments of the
// closure point; spiral orbits that close to within resampling error
// otherwise read as crossings there.
inline bool self_intersects(const std::vector<Pt>& poly,
                            std::size_t seam_window = 0) {
  const std::size_t n = poly.size();
  if (n < 4) return false;
  auto near_seam = [&](std::size_t i) {
    return i < seam_window || i + seam_window >= n;
  };
  double xmin = poly[0][0], xmax = xmin, ymin = poly[0][1], ymax = ymin;
  for (const auto& p : poly) {
    xmin = std::min(xmin, p[0]);
    xmax = std::max(xmax, p[0]);
    ymin = std::min(ymin, p[1]);
    ymax = std::max(ymax, p[1]);
  }
  const int cells = 256;
  const double dx = std::max(1e-300, (xmax - xmin) / cells);
  const double dy = std::max(1e-300, (ymax - ymin) / cells);
  std::vector<std::vector<std::size_t>> grid(
      static_cast<std::size_t>(cells) * cells);
  auto cell_range = [&](std::size_t i, int& cx0, int& cx1, int& cy0, int& cy1) {
    const Pt& a = poly[i];
    const Pt& b = poly[(i + 1) % n];
    cx0 = std::clamp(static_cast<int>((std::min(a[0], b[0]) - xmin) / dx), 0,
                     cells - 1);
    cx1 = std::clamp(static_cast<int>((std::max(a[0], b[0]) - xmin) / dx), 0,
                     cells - 1);
    cy0 = std::clamp(static_cast<int>((std::min(a[1], b[1]) - ymin) / dy), 0,
                     cells - 1);
    cy1 = std::clamp(static_cast<int>((std::max(a[1], b[1]) - ymin) / dy), 0,
                     cells - 1);
  };
  for (std::size_t i = 0; i < n; ++i) {
    int cx0, cx1, cy0, cy1;
    cell_range(i, cx0, cx1, cy0, cy1);
    for (int cx = cx0; cx <= cx1; ++cx)
      for (int cy = cy0; cy <= cy1; ++cy)
        for (std::size_t j : grid[static_cast<std::size_t>(cy) * cells + cx]) {
          const std::size_t jn = (j + 1) % n;
          const std::size_t in_ = (i + 1) % n;
          if (j == i || jn == i || in_ == j) continue;
          if (near_seam(i) && near_seam(j)) continue;
          if (detail::seg_intersect(poly[i], poly[in_], poly[j], poly[jn]))
            return true;
        }
    for (int cx = cx0; cx <= cx1; ++cx)
      for (int cy = cy0; cy <= cy1; ++cy)
        grid[static_cast<std::size_t>(cy) * cells + cx].push_back(i);
  }
  return false;
}

}  // namespace pann::geom
