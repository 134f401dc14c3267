#pragma once

// Minimal SVG writer for phase-plane overlays and bifurcation scatters.
// No plotting dependency: files are assembled directly.

#include <array>
#include <string>
#include <vector>

#include "pann/geometry.hpp"

namespace pann::svg {

struct DataRect {
  double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
};

class Canvas {
 public:
  Canvas(int width, int height, DataRect rect, std::string comment = "");

  // data-space drawing; x maps rightward, y upward
  void polyline(const std::vector<geom::Pt>& pts_ms, const std::string& color,
                double width, bool swap_axes = true);
  void circle(double x, double y, double r_px, const std::string& color);
  void scatter(const std::vector<std::array<double, 2>>& pts,
               const std::string& color, double r_px = 1.2);
  void text(double x, double y, const std::string& label,
            const std::string& color = "#333333");
  void axes(const std::string& x_label, const std::string& y_label);

  std::string finish();

 private:
  double px(double x) const;
  double py(double y) const;

  int w_, h_;
  DataRect rect_;
  std::string body_;
};

}  // namespace pann::svg
