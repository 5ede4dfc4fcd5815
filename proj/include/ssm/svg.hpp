// Minimal SVG 1.1 writer. Every number is printed with 6 significant
// digits so output is byte-stable.
#pragma once

#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ssm::svg {

std::string num(double x);

/// Linear map from data range [d0, d1] onto pixel range [p0, p1].
struct Scale {
  double d0, d1, p0, p1;
  double operator()(double x) const {
    return d1 == d0 ? 0.5 * (p0 + p1) : p0 + (x - d0) * (p1 - p0) / (d1 - d0);
  }
};

struct Box {
  double left, top, right, bottom;
};

/// Ticks at 1, 2 or 5 times a power of ten covering [lo, hi].
std::vector<double> nice_ticks(double lo, double hi, int target = 5);

class Document {
 public:
  Document(double width, double height);

  void rect(double x, double y, double w, double h, std::string_view attrs);
  void line(double x1, double y1, double x2, double y2, std::string_view attrs);
  void polyline(std::span<const std::pair<double, double>> points, std::string_view attrs);
  void text(double x, double y, std::string_view content, std::string_view attrs);
  void open_group(std::string_view attrs);
  void close_group();

  /// Frame, tick marks and labels for a plot box.
  void axes(const Box& box, const Scale& x, const Scale& y, std::string_view x_label,
            std::string_view y_label, std::string_view title);

  std::string finish() const;
  double width() const { return width_; }
  double height() const { return height_; }

 private:
  double width_, height_;
  std::string body_;
};

std::string escape(std::string_view text);

}  // namespace ssm::svg
