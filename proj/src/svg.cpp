#include "pann/svg.hpp"

#include <cstdio>
#include <sstream>

namespace pann::svg {

namespace {
constexpr int kMarginLeft = 58;
constexpr int kMarginRight = 14;
constexpr int kMarginTop = 14;
constexpr int kMarginBottom = 44;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}
}  // namespace

Canvas::Canvas(int width, int height, DataRect rect, std::string comment)
    : w_(width), h_(height), rect_(rect) {
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w_
     << "\" height=\"" << h_ << "\" viewBox=\"0 0 " << w_ << " " << h_
     << "\">\n";
  if (!comment.empty()) os << "<!-- " << comment << " -->\n";
  os << "<rect width=\"" << w_ << "\" height=\"" << h_
     << "\" fill=\"white\"/>\n";
  body_ = os.str();
}

double Canvas::px(double x) const {
  const double f = (x - rect_.x0) / (rect_.x1 - rect_.x0);
  return kMarginLeft + f * (w_ - kMarginLeft - kMarginRight);
}

double Canvas::py(double y) const {
  const double f = (y - rect_.y0) / (rect_.y1 - rect_.y0);
  return h_ - kMarginBottom - f * (h_ - kMarginTop - kMarginBottom);
}

void Canvas::polyline(const std::vector<geom::Pt>& pts_ms,
                      const std::string& color, double width, bool swap_axes) {
  if (pts_ms.size() < 2) return;
  std::ostringstream os;
  os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\""
     << width << "\" points=\"";
  // points arrive as (m, s); phase plots draw s horizontally, m vertically
  for (const auto& p : pts_ms) {
    const double x = swap_axes ? p[1] : p[0];
    const double y = swap_axes ? p[0] : p[1];
    os << fmt(px(x)) << ',' << fmt(py(y)) << ' ';
  }
  os << "\"/>\n";
  body_ += os.str();
}

void Canvas::circle(double x, double y, double r_px, const std::string& color) {
  std::ostringstream os;
  os << "<circle cx=\"" << fmt(px(x)) << "\" cy=\"" << fmt(py(y)) << "\" r=\""
     << r_px << "\" fill=\"" << color << "\"/>\n";
  body_ += os.str();
}

void Canvas::scatter(const std::vector<std::array<double, 2>>& pts,
                     const std::string& color, double r_px) {
  std::ostringstream os;
  for (const auto& p : pts) {
    os << "<circle cx=\"" << fmt(px(p[0])) << "\" cy=\"" << fmt(py(p[1]))
       << "\" r=\"" << r_px << "\" fill=\"" << color << "\"/>\n";
  }
  body_ += os.str();
}

void Canvas::text(double x, double y, const std::string& label,
                  const std::string& color) {
  std::ostringstream os;
  os << "<text x=\"" << fmt(px(x)) << "\" y=\"" << fmt(py(y))
     << "\" font-size=\"11\" font-family=\"sans-serif\" fill=\"" << color
     << "\">" << label << "</text>\n";
  body_ += os.str();
}

void Canvas::axes(const std::string& x_label, const std::string& y_label) {
  std::ostringstream os;
  const double xL = kMarginLeft, xR = w_ - kMarginRight;
  const double yB = h_ - kMarginBottom, yT = kMarginTop;
  os << "<line x1=\"" << xL << "\" y1=\"" << yB << "\" x2=\"" << xR
     << "\" y2=\"" << yB << "\" stroke=\"#222\" stroke-width=\"1\"/>\n";
  os << "<line x1=\"" << xL << "\" y1=\"" << yB << "\" x2=\"" << xL
     << "\" y2=\"" << yT << "\" stroke=\"#222\" stroke-width=\"1\"/>\n";
  for (int k = 0; k <= 5; ++k) {
    const double fx = rect_.x0 + (rect_.x1 - rect_.x0) * k / 5.0;
    const double fy = rect_.y0 + (rect_.y1 - rect_.y0) * k / 5.0;
    os << "<line x1=\"" << fmt(px(fx)) << "\" y1=\"" << yB << "\" x2=\""
       << fmt(px(fx)) << "\" y2=\"" << yB + 4 << "\" stroke=\"#222\"/>\n";
    os << "<text x=\"" << fmt(px(fx)) << "\" y=\"" << yB + 16
       << "\" font-size=\"10\" text-anchor=\"middle\" font-family=\"sans-serif\">"
       << fmt(fx) << "</text>\n";
    os << "<line x1=\"" << xL - 4 << "\" y1=\"" << fmt(py(fy)) << "\" x2=\""
       << xL << "\" y2=\"" << fmt(py(fy)) << "\" stroke=\"#222\"/>\n";
    os << "<text x=\"" << xL - 7 << "\" y=\"" << fmt(py(fy) + 3)
       << "\" font-size=\"10\" text-anchor=\"end\" font-family=\"sans-serif\">"
       << fmt(fy) << "</text>\n";
  }
  os << "<text x=\"" << 0.5 * (xL + xR) << "\" y=\"" << h_ - 10
     << "\" font-size=\"12\" text-anchor=\"middle\" font-family=\"sans-serif\">"
     << x_label << "</text>\n";
  os << "<text x=\"14\" y=\"" << 0.5 * (yB + yT)
     << "\" font-size=\"12\" text-anchor=\"middle\" font-family=\"sans-serif\""
     << " transform=\"rotate(-90 14 " << 0.5 * (yB + yT) << ")\">" << y_label
     << "</text>\n";
  body_ += os.str();
}

std::string Canvas::finish() { return body_ + "</svg>\n"; }

}  // namespace pann::svg
