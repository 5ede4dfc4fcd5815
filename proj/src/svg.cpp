#include "ssm/svg.hpp"

#include <cmath>
#include <cstdio>

namespace ssm::svg {

std::string num(double x) {
  if (x == 0.0) x = 0.0;  // no "-0"
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::string escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::vector<double> nice_ticks(double lo, double hi, int target) {
  std::vector<double> ticks;
  if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) return ticks;
  const double raw = (hi - lo) / target;
  const double magnitude = std::pow(10.0, std::floor(std::log10(raw)));
  double step = magnitude;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (m * magnitude >= raw) {
      step = m * magnitude;
      break;
    }
  }
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * step; t += step) {
    ticks.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
  }
  return ticks;
}

Document::Document(double width, double height) : width_(width), height_(height) {}

void Document::rect(double x, double y, double w, double h, std::string_view attrs) {
  body_ += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) + "\" height=\"" +
           num(h) + "\" " + std::string(attrs) + "/>\n";
}

void Document::line(double x1, double y1, double x2, double y2, std::string_view attrs) {
  body_ += "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) + "\" y2=\"" +
           num(y2) + "\" " + std::string(attrs) + "/>\n";
}

void Document::polyline(std::span<const std::pair<double, double>> points, std::string_view attrs) {
  body_ += "<polyline points=\"";
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (i) body_ += ' ';
    body_ += num(points[i].first) + ',' + num(points[i].second);
  }
  body_ += "\" " + std::string(attrs) + "/>\n";
}

void Document::text(double x, double y, std::string_view content, std::string_view attrs) {
  body_ += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" " + std::string(attrs) + ">" +
           escape(content) + "</text>\n";
}

void Document::open_group(std::string_view attrs) { body_ += "<g " + std::string(attrs) + ">\n"; }

void Document::close_group() { body_ += "</g>\n"; }

void Document::axes(const Box& box, const Scale& x, const Scale& y, std::string_view x_label,
                    std::string_view y_label, std::string_view title) {
  const char* axis_style = "class=\"axis\" stroke=\"#000000\" stroke-width=\"1\"";
  const char* label_style = "font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\"";
  line(box.left, box.bottom, box.right, box.bottom, axis_style);
  line(box.left, box.top, box.left, box.bottom, axis_style);
  for (double t : nice_ticks(x.d0, x.d1)) {
    const double px = x(t);
    line(px, box.bottom, px, box.bottom + 5, axis_style);
    text(px, box.bottom + 17, num(t), label_style);
  }
  for (double t : nice_ticks(y.d0, y.d1)) {
    const double py = y(t);
    line(box.left - 5, py, box.left, py, axis_style);
    text(box.left - 8, py + 4, num(t),
         "font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\"");
  }
  text(0.5 * (box.left + box.right), box.bottom + 33, x_label, label_style);
  text(14, 0.5 * (box.top + box.bottom), y_label, label_style);
  text(0.5 * (box.left + box.right), box.top - 10, title,
       "font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\"");
}

std::string Document::finish() const {
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + num(width_) +
         "\" height=\"" + num(height_) + "\" viewBox=\"0 0 " + num(width_) + " " + num(height_) +
         "\">\n";
  out += "<rect x=\"0\" y=\"0\" width=\"" + num(width_) + "\" height=\"" + num(height_) +
         "\" fill=\"#ffffff\"/>\n";
  out += body_;
  out += "</svg>\n";
  return out;
}

}  // namespace ssm::svg
