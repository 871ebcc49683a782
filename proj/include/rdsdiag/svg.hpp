#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace rdsdiag {

// Append-only SVG document. All coordinates go through fmt_num, so output
// is byte-stable for identical input.
class SvgDocument {
 public:
  SvgDocument(double width, double height);

  void rect(double x, double y, double w, double h, std::string_view fill, std::string_view stroke = "none",
            std::string_view cls = "");
  void line(double x1, double y1, double x2, double y2, std::string_view stroke, double width = 1.0,
            std::string_view dash = "", std::string_view cls = "");
  void polyline(const std::vector<double>& xs, const std::vector<double>& ys, std::string_view stroke,
                double width = 1.0, std::string_view cls = "");
  void circle(double cx, double cy, double r, std::string_view fill, std::string_view stroke = "none",
              std::string_view cls = "");
  void text(double x, double y, std::string_view content, double size = 10.0, std::string_view anchor = "start",
            std::string_view cls = "");
  // Reads bottom to top, centred on (x, y).
  void vertical_text(double x, double y, std::string_view content, double size = 10.0, std::string_view cls = "");
  void open_group(std::string_view cls);
  void close_group();

  std::string finish() const;
  double width() const noexcept { return width_; }
  double height() const noexcept { return height_; }

 private:
  double width_;
  double height_;
  std::string body_;
  int depth_ = 0;
};

std::string xml_escape(std::string_view text);

}  // namespace rdsdiag
