#include "rdsdiag/svg.hpp"

#include "rdsdiag/error.hpp"
#include "rdsdiag/format.hpp"

namespace rdsdiag {

namespace {

std::string attr(std::string_view name, double v) { return " " + std::string(name) + "=\"" + fmt_num(v) + "\""; }

std::string attr(std::string_view name, std::string_view v) {
  return " " + std::string(name) + "=\"" + xml_escape(v) + "\"";
}

std::string class_attr(std::string_view cls) { return cls.empty() ? "" : attr("class", cls); }

}  // namespace

std::string xml_escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

SvgDocument::SvgDocument(double width, double height) : width_(width), height_(height) {}

void SvgDocument::rect(double x, double y, double w, double h, std::string_view fill, std::string_view stroke,
                       std::string_view cls) {
  body_ += "<rect" + attr("x", x) + attr("y", y) + attr("width", w) + attr("height", h) + attr("fill", fill) +
           attr("stroke", stroke) + class_attr(cls) + "/>\n";
}

void SvgDocument::line(double x1, double y1, double x2, double y2, std::string_view stroke, double width,
                       std::string_view dash, std::string_view cls) {
  body_ += "<line" + attr("x1", x1) + attr("y1", y1) + attr("x2", x2) + attr("y2", y2) + attr("stroke", stroke) +
           attr("stroke-width", width) + (dash.empty() ? "" : attr("stroke-dasharray", dash)) + class_attr(cls) +
           "/>\n";
}

void SvgDocument::polyline(const std::vector<double>& xs, const std::vector<double>& ys, std::string_view stroke,
                           double width, std::string_view cls) {
  if (xs.size() != ys.size()) fail(ErrorCode::Internal, "polyline coordinate mismatch");
  std::string pts;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) pts.push_back(' ');
    pts += fmt_num(xs[i]) + "," + fmt_num(ys[i]);
  }
  body_ += "<polyline" + attr("points", pts) + attr("fill", "none") + attr("stroke", stroke) +
           attr("stroke-width", width) + class_attr(cls) + "/>\n";
}

void SvgDocument::circle(double cx, double cy, double r, std::string_view fill, std::string_view stroke,
                         std::string_view cls) {
  body_ += "<circle" + attr("cx", cx) + attr("cy", cy) + attr("r", r) + attr("fill", fill) + attr("stroke", stroke) +
           class_attr(cls) + "/>\n";
}

void SvgDocument::text(double x, double y, std::string_view content, double size, std::string_view anchor,
                       std::string_view cls) {
  body_ += "<text" + attr("x", x) + attr("y", y) + attr("font-size", size) + attr("text-anchor", anchor) +
           class_attr(cls) + ">" + xml_escape(content) + "</text>\n";
}

void SvgDocument::vertical_text(double x, double y, std::string_view content, double size, std::string_view cls) {
  body_ += "<text" + attr("x", x) + attr("y", y) + attr("font-size", size) + attr("text-anchor", "middle") +
           attr("transform", "rotate(-90 " + fmt_num(x) + " " + fmt_num(y) + ")") + class_attr(cls) + ">" +
           xml_escape(content) + "</text>\n";
}

void SvgDocument::open_group(std::string_view cls) {
  body_ += "<g" + class_attr(cls) + ">\n";
  ++depth_;
}

void SvgDocument::close_group() {
  if (depth_ == 0) fail(ErrorCode::Internal, "unbalanced svg group");
  body_ += "</g>\n";
  --depth_;
}

std::string SvgDocument::finish() const {
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\"" +
                    attr("width", width_) + attr("height", height_) + " viewBox=\"0 0 " + fmt_num(width_) + " " +
                    fmt_num(height_) + "\" font-family=\"sans-serif\">\n";
  out += "<rect x=\"0\" y=\"0\" width=\"" + fmt_num(width_) + "\" height=\"" + fmt_num(height_) +
         "\" fill=\"white\"/>\n";
  out += body_;
  for (int i = 0; i < depth_; ++i) out += "</g>\n";
  out += "</svg>\n";
  return out;
}

}  // namespace rdsdiag
