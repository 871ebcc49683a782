#include "rdsdiag/plots.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rdsdiag/error.hpp"
#include "rdsdiag/format.hpp"
#include "rdsdiag/stats.hpp"
#include "rdsdiag/svg.hpp"

namespace rdsdiag {

namespace {

constexpr double kMarginLeft = 64.0;
constexpr double kMarginRight = 24.0;
constexpr double kMarginTop = 40.0;
constexpr double kMarginBottom = 48.0;

// Linear map from data space to a pixel interval.
struct Scale {
  double d0, d1, p0, p1;
  double operator()(double v) const {
    if (d1 == d0) return (p0 + p1) / 2;
    return p0 + (v - d0) / (d1 - d0) * (p1 - p0);
  }
};

std::vector<double> nice_ticks(double lo, double hi, int target = 5) {
  if (!(hi > lo)) return {lo};
  const double raw = (hi - lo) / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double norm = raw / mag;
  const double step = (norm < 1.5 ? 1.0 : norm < 3.0 ? 2.0 : norm < 7.0 ? 5.0 : 10.0) * mag;
  std::vector<double> ticks;
  for (double t = std::ceil(lo / step - 1e-9) * step; t <= hi + step * 1e-9; t += step) {
    ticks.push_back(std::abs(t) < step * 1e-9 ? 0.0 : t);
  }
  return ticks;
}

struct Frame {
  double left, top, right, bottom;
};

Frame plot_frame(const PlotStyle& style, double extra_left = 0.0, double extra_right = 0.0) {
  return {kMarginLeft + extra_left, kMarginTop, style.width - kMarginRight - extra_right,
          style.height - kMarginBottom};
}

void draw_title(SvgDocument& doc, const PlotStyle& style, const std::string& fallback) {
  const std::string& t = style.title.empty() ? fallback : style.title;
  if (!t.empty()) doc.text(style.width / 2, 22, t, style.font_size + 3, "middle", "title");
}

void draw_x_axis(SvgDocument& doc, const Frame& f, const Scale& sx, const std::vector<double>& ticks,
                 const std::string& label, const PlotStyle& style) {
  doc.open_group("x-axis");
  doc.line(f.left, f.bottom, f.right, f.bottom, style.line_color);
  for (double t : ticks) {
    const double x = sx(t);
    doc.line(x, f.bottom, x, f.bottom + 4, style.line_color);
    doc.text(x, f.bottom + 16, fmt_num(t), style.font_size - 1, "middle");
  }
  doc.text((f.left + f.right) / 2, f.bottom + 36, label, style.font_size, "middle");
  doc.close_group();
}

void draw_y_axis(SvgDocument& doc, const Frame& f, const Scale& sy, const std::vector<double>& ticks,
                 const std::string& label, const PlotStyle& style) {
  doc.open_group("y-axis");
  doc.line(f.left, f.top, f.left, f.bottom, style.line_color);
  for (double t : ticks) {
    const double y = sy(t);
    doc.line(f.left - 4, y, f.left, y, style.line_color);
    doc.text(f.left - 7, y + 4, fmt_num(t), style.font_size - 1, "end");
  }
  doc.vertical_text(18, (f.top + f.bottom) / 2, label, style.font_size, "y-label");
  doc.close_group();
}

std::string trait_color(const std::optional<bool>& v, const PlotStyle& s) {
  if (!v) return s.missing_color;
  return *v ? s.positive_color : s.negative_color;
}

void legend(SvgDocument& doc, double x, double y, const std::vector<std::pair<std::string, std::string>>& items,
            const PlotStyle& style) {
  doc.open_group("legend");
  for (const auto& [label, color] : items) {
    doc.rect(x, y - 8, 10, 10, color);
    doc.text(x + 14, y + 1, label, style.font_size - 1);
    x += 20 + 7.0 * static_cast<double>(label.size());
  }
  doc.close_group();
}

template <class T>
const T& expect(const PlotInput& data, std::string_view kind) {
  if (const T* p = std::get_if<T>(&data)) return *p;
  fail(ErrorCode::UnknownKind, "data does not match plot kind " + std::string(kind));
}

std::string render_chains(const ChainsData& d, const PlotStyle& style) {
  if (d.ids.empty()) fail(ErrorCode::EmptyData, "chains plot: no respondents");
  const auto pos = chains_layout(d);
  double max_x = 0, max_y = 0;
  for (const auto& p : pos) {
    max_x = std::max(max_x, p.x);
    max_y = std::max(max_y, p.y);
  }
  SvgDocument doc(style.width, style.height);
  draw_title(doc, style, "Recruitment chains");
  const Frame f{24, kMarginTop, style.width - 24, style.height - 24};
  const Scale sx{0, std::max(max_x, 1.0), f.left, f.right};
  const Scale sy{0, std::max(max_y, 1.0), f.top, f.bottom};
  const double r = std::clamp(0.35 * (f.right - f.left) / (max_x + 1), 1.5, 6.0);
  doc.open_group("edges");
  for (std::size_t i = 0; i < d.ids.size(); ++i) {
    if (!d.parent[i]) continue;
    const auto& a = pos[*d.parent[i]];
    const auto& b = pos[i];
    doc.line(sx(a.x), sy(a.y), sx(b.x), sy(b.y), style.line_color, 0.8, "", "edge");
  }
  doc.close_group();
  doc.open_group("nodes");
  for (std::size_t i = 0; i < d.ids.size(); ++i) {
    const std::optional<bool> v = d.positive.empty() ? std::optional<bool>{} : d.positive[i];
    const bool seed = !d.parent[i];
    doc.circle(sx(pos[i].x), sy(pos[i].y), seed ? r * 1.4 : r, trait_color(v, style), style.line_color,
               seed ? "node seed" : "node");
  }
  doc.close_group();
  if (!d.positive.empty()) {
    legend(doc, 24, style.height - 8,
           {{"positive", style.positive_color}, {"negative", style.negative_color}, {"missing", style.missing_color}},
           style);
  }
  return doc.finish();
}

std::string render_convergence(const EstimateSeries& s, const PlotStyle& style) {
  if (s.values.empty()) fail(ErrorCode::EmptyData, "convergence plot: empty series for " + s.label);
  SvgDocument doc(style.width, style.height);
  draw_title(doc, style, s.label);
  const Frame f = plot_frame(style);
  const double m = static_cast<double>(s.values.size());
  const Scale sx{1.0, std::max(m, 2.0), f.left, f.right};
  const Scale sy{0.0, 1.0, f.bottom, f.top};
  // header rug for trait-positive respondents, footer rug for the rest
  const double rug = 8.0;
  doc.open_group("rugs");
  for (std::size_t i = 0; i < s.values.size(); ++i) {
    const double x = sx(static_cast<double>(i + 1));
    const bool pos = i < s.has_trait.size() && s.has_trait[i];
    if (pos) {
      doc.line(x, f.top - rug - 2, x, f.top - 2, style.positive_color, 1.0, "", "rug-positive");
    } else {
      doc.line(x, f.bottom + 2, x, f.bottom + rug + 2, style.negative_color, 1.0, "", "rug-negative");
    }
  }
  doc.close_group();
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < s.values.size(); ++i) {
    xs.push_back(sx(static_cast<double>(i + 1)));
    ys.push_back(sy(s.values[i]));
  }
  const double final_y = sy(s.values.back());
  doc.line(f.left, final_y, f.right, final_y, style.missing_color, 2.0, "4,3", "final-estimate");
  doc.polyline(xs, ys, style.line_color, 1.5, "estimate");
  draw_x_axis(doc, {f.left, f.top, f.right, f.bottom + rug + 2}, sx, nice_ticks(1, std::max(m, 2.0)),
              "sample order (included respondents)", style);
  draw_y_axis(doc, f, sy, nice_ticks(0, 1), "cumulative estimate", style);
  doc.text(f.right, final_y - 4, "final " + fmt_num(s.values.back()), style.font_size - 1, "end", "final-label");
  return doc.finish();
}

std::string render_bottleneck(const BottleneckPlotData& d, const PlotStyle& style) {
  if (d.trees.empty() || d.length == 0) fail(ErrorCode::EmptyData, "bottleneck plot: no trees for " + d.label);
  SvgDocument doc(style.width, style.height);
  draw_title(doc, style, d.label);
  const double seed_panel = 56.0, right_axis = 52.0;
  const Frame f = plot_frame(style, seed_panel, right_axis);
  const Scale sx{1.0, std::max(static_cast<double>(d.length), 2.0), f.left, f.right};
  const Scale sy{0.0, 1.0, f.bottom, f.top};

  // seed composition: one square per tree, in root order
  doc.open_group("seed-panel");
  const double cell = std::min(14.0, (f.bottom - f.top) / static_cast<double>(d.trees.size()));
  doc.text(kMarginLeft - 30 + seed_panel / 2, f.top - 6, "seeds", style.font_size - 1, "middle");
  for (std::size_t t = 0; t < d.trees.size(); ++t) {
    doc.rect(kMarginLeft - 30 + seed_panel / 2 - cell / 2, f.top + cell * static_cast<double>(t), cell * 0.9,
             cell * 0.9, trait_color(d.trees[t].seed_has_trait, style), style.line_color, "seed");
  }
  doc.close_group();

  doc.line(f.left, sy(d.overall), f.right, sy(d.overall), style.line_color, 1.0, "5,3", "overall");
  doc.open_group("tracks");
  for (std::size_t t = 0; t < d.trees.size(); ++t) {
    const auto& tr = d.trees[t];
    if (tr.values.empty()) continue;
    std::vector<double> xs, ys;
    for (std::size_t k = 0; k < tr.values.size(); ++k) {
      xs.push_back(sx(static_cast<double>(tr.index[k])));
      ys.push_back(sy(tr.values[k]));
    }
    doc.polyline(xs, ys, trait_color(tr.seed_has_trait, style), 1.2, "track");
  }
  doc.close_group();

  // right axis: each tree's final estimate
  doc.open_group("right-axis");
  doc.line(f.right, f.top, f.right, f.bottom, style.line_color);
  for (std::size_t t = 0; t < d.trees.size(); ++t) {
    const auto& tr = d.trees[t];
    if (tr.values.empty()) continue;
    const double y = sy(tr.values.back());
    doc.line(f.right, y, f.right + 6, y, trait_color(tr.seed_has_trait, style), 1.5, "", "final-tick");
    doc.text(f.right + 9, y + 3, std::to_string(t + 1), style.font_size - 2);
  }
  doc.close_group();
  draw_x_axis(doc, f, sx, nice_ticks(1, std::max(static_cast<double>(d.length), 2.0)),
              "sample order (included respondents)", style);
  draw_y_axis(doc, f, sy, nice_ticks(0, 1), "per-tree cumulative estimate", style);
  return doc.finish();
}

std::string render_all_points(const AllPointsData& d, const PlotStyle& style) {
  if (d.rows.empty()) fail(ErrorCode::EmptyData, "all points plot: no included respondents for " + d.label);
  std::size_t max_index = 0, max_tree = 0;
  for (const auto& r : d.rows) {
    max_index = std::max(max_index, r.index);
    max_tree = std::max(max_tree, r.tree);
  }
  const std::size_t trees = std::max(d.trees, max_tree + 1);
  SvgDocument doc(style.width, style.height);
  draw_title(doc, style, d.label);
  const Frame f = plot_frame(style);
  const Scale sx{1.0, std::max(static_cast<double>(max_index), 2.0), f.left, f.right};
  const Scale sy{-0.5, static_cast<double>(trees) - 0.5, f.top, f.bottom};
  doc.open_group("points");
  for (const auto& r : d.rows) {
    doc.circle(sx(static_cast<double>(r.index)), sy(static_cast<double>(r.tree)), 2.5,
               r.has_trait ? style.positive_color : style.negative_color, "none", "point");
  }
  doc.close_group();
  draw_x_axis(doc, f, sx, nice_ticks(1, std::max(static_cast<double>(max_index), 2.0)), "sample order", style);
  doc.open_group("y-axis");
  doc.line(f.left, f.top, f.left, f.bottom, style.line_color);
  const std::size_t every = trees > 30 ? trees / 15 : 1;
  for (std::size_t t = 0; t < trees; t += every) {
    doc.text(f.left - 6, sy(static_cast<double>(t)) + 3, std::to_string(t + 1), style.font_size - 2, "end");
  }
  doc.vertical_text(18, (f.top + f.bottom) / 2, "seed", style.font_size, "y-label");
  doc.close_group();
  legend(doc, f.left, style.height - 6, {{"positive", style.positive_color}, {"negative", style.negative_color}},
         style);
  return doc.finish();
}

std::string render_flag_grid(const FlagGrid& g, const PlotStyle& style) {
  if (g.row_labels.empty() || g.column_labels.empty()) fail(ErrorCode::EmptyData, "flag grid: no cells");
  if (g.cells.size() != g.row_labels.size()) fail(ErrorCode::Internal, "flag grid: row count mismatch");
  std::size_t label_len = 4;
  for (const auto& l : g.row_labels) label_len = std::max(label_len, l.size());
  const double row_h = 18.0;
  const double col_w = std::max(60.0, (style.width - 40 - 7.0 * static_cast<double>(label_len)) /
                                          static_cast<double>(g.column_labels.size()));
  const double left = 20 + 7.0 * static_cast<double>(label_len);
  const double top = kMarginTop + 24;
  const double width = left + col_w * static_cast<double>(g.column_labels.size()) + 20;
  const double height = top + row_h * static_cast<double>(g.row_labels.size()) + 40;
  SvgDocument doc(width, height);
  PlotStyle s = style;
  s.width = width;
  draw_title(doc, s, "");
  for (std::size_t c = 0; c < g.column_labels.size(); ++c) {
    doc.text(left + col_w * (static_cast<double>(c) + 0.5), top - 6, g.column_labels[c], style.font_size - 1,
             "middle", "column-label");
  }
  doc.open_group("cells");
  for (std::size_t r = 0; r < g.row_labels.size(); ++r) {
    const double y = top + row_h * static_cast<double>(r);
    doc.text(left - 6, y + row_h * 0.7, g.row_labels[r], style.font_size - 1, "end", "row-label");
    if (g.cells[r].size() != g.column_labels.size()) fail(ErrorCode::Internal, "flag grid: column count mismatch");
    for (std::size_t c = 0; c < g.column_labels.size(); ++c) {
      const auto& v = g.cells[r][c];
      const double x = left + col_w * static_cast<double>(c);
      if (!v) {
        doc.rect(x, y, col_w, row_h, style.missing_color, "#ffffff", "cell not-evaluable");
      } else if (*v) {
        doc.rect(x, y, col_w, row_h, style.flag_color, "#ffffff", "cell flagged");
      } else {
        doc.rect(x, y, col_w, row_h, "#ffffff", "#d9d9d9", "cell clear");
      }
    }
  }
  doc.close_group();
  legend(doc, left, height - 12, {{"flagged", style.flag_color}, {"not evaluable", style.missing_color}}, style);
  return doc.finish();
}

// Grouped vertical bars; NaN values leave a gap labelled NA.
std::string grouped_bars(const std::vector<std::string>& groups, const std::vector<std::vector<double>>& values,
                         const std::vector<std::pair<std::string, std::string>>& series, const std::string& title,
                         const std::string& ylabel, std::optional<double> ymax_fixed, const PlotStyle& style) {
  double ymax = 0;
  for (const auto& row : values)
    for (double v : row)
      if (std::isfinite(v)) ymax = std::max(ymax, v);
  ymax = ymax_fixed ? *ymax_fixed : (ymax > 0 ? ymax * 1.15 : 1.0);
  SvgDocument doc(style.width, style.height);
  draw_title(doc, style, title);
  const Frame f = plot_frame(style);
  const Scale sy{0, ymax, f.bottom, f.top};
  const double group_w = (f.right - f.left) / static_cast<double>(groups.size());
  const double bar_w = group_w * 0.8 / static_cast<double>(series.size());
  doc.open_group("bars");
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const double gx = f.left + group_w * static_cast<double>(g) + group_w * 0.1;
    for (std::size_t k = 0; k < series.size(); ++k) {
      const double v = values[g][k];
      const double x = gx + bar_w * static_cast<double>(k);
      if (!std::isfinite(v)) {
        doc.text(x + bar_w / 2, f.bottom - 4, "NA", style.font_size - 2, "middle");
        continue;
      }
      doc.rect(x, sy(v), bar_w * 0.95, f.bottom - sy(v), series[k].second, "none", "bar");
      doc.text(x + bar_w / 2, sy(v) - 3, fmt_num(v), style.font_size - 2, "middle");
    }
    doc.text(gx + group_w * 0.4, f.bottom + 16, groups[g], style.font_size - 1, "middle");
  }
  doc.close_group();
  doc.line(f.left, f.bottom, f.right, f.bottom, style.line_color);
  draw_y_axis(doc, f, sy, nice_ticks(0, ymax), ylabel, style);
  legend(doc, f.left, style.height - 8, series, style);
  return doc.finish();
}

std::string render_effectiveness(const EffectivenessData& d, const PlotStyle& style) {
  if (d.rows.empty()) fail(ErrorCode::EmptyData, "effectiveness plot: no traits");
  std::vector<std::string> groups;
  std::vector<std::vector<double>> values;
  for (const auto& r : d.rows) {
    groups.push_back(r.label);
    values.push_back({r.mean_positive, r.mean_negative});
  }
  return grouped_bars(groups, values, {{"trait positive", style.positive_color}, {"trait negative", style.negative_color}},
                      "Average recruits by trait", "mean recruits", std::nullopt, style);
}

std::string render_bias(const BiasPlotData& d, const PlotStyle& style) {
  if (d.sites.empty()) fail(ErrorCode::EmptyData, "bias plot: no sites");
  std::vector<std::string> groups;
  std::vector<std::vector<double>> values;
  for (const auto& [site, lv] : d.sites) {
    groups.push_back(site);
    values.push_back({100 * lv.contacts_level, 100 * lv.recipients_level, 100 * lv.recruits_level});
  }
  return grouped_bars(groups, values,
                      {{"contacts", "#66c2a5"}, {"coupon recipients", "#fc8d62"}, {"recruits", "#8da0cb"}},
                      "Percent employed by location and question", "percent employed", 100.0, style);
}

std::string render_motivation_outcome(const MotivationOutcomeData& d, const PlotStyle& style) {
  if (d.rows.empty()) fail(ErrorCode::EmptyData, "motivation-outcome plot: no rows");
  double lo = 1.0, hi = 1.0;
  for (const auto& r : d.rows) {
    for (double v : {r.odds_ratio.lower, r.odds_ratio.upper, r.odds_ratio.estimate}) {
      if (std::isfinite(v) && v > 0) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
  }
  const double l0 = std::floor(std::log10(lo)) - (lo == 1.0 ? 1 : 0);
  const double l1 = std::ceil(std::log10(hi)) + (hi == 1.0 ? 1 : 0);
  PlotStyle s = style;
  SvgDocument doc(s.width, s.height);
  draw_title(doc, s, "Odds ratios with exact intervals");
  std::size_t label_len = 4;
  for (const auto& r : d.rows) label_len = std::max(label_len, r.outcome.size());
  const Frame f = plot_frame(s, 6.0 * static_cast<double>(label_len));
  const Scale sx{l0, l1, f.left, f.right};
  const double row_h = (f.bottom - f.top) / static_cast<double>(d.rows.size());
  auto lx = [&](double v) {
    if (v <= 0) return f.left;
    if (!std::isfinite(v)) return f.right;
    return sx(std::log10(v));
  };
  doc.line(sx(0), f.top, sx(0), f.bottom, s.missing_color, 1.0, "4,3", "null-line");
  doc.open_group("intervals");
  for (std::size_t i = 0; i < d.rows.size(); ++i) {
    const auto& r = d.rows[i];
    const double y = f.top + row_h * (static_cast<double>(i) + 0.5);
    doc.text(f.left - 6, y + 4, r.outcome, s.font_size - 1, "end", "row-label");
    doc.line(lx(r.odds_ratio.lower), y, lx(r.odds_ratio.upper), y, s.line_color, 1.5, "", "interval");
    doc.circle(lx(r.odds_ratio.estimate), y, 3.5, s.positive_color, s.line_color, "estimate");
    if (!std::isfinite(r.odds_ratio.upper)) doc.text(f.right + 2, y + 4, ">", s.font_size, "start", "open-upper");
    if (r.odds_ratio.lower <= 0) doc.text(f.left + 2, y - 4, "0", s.font_size - 2, "start", "open-lower");
  }
  doc.close_group();
  doc.open_group("x-axis");
  doc.line(f.left, f.bottom, f.right, f.bottom, s.line_color);
  for (double e = l0; e <= l1 + 1e-9; e += 1.0) {
    doc.line(sx(e), f.bottom, sx(e), f.bottom + 4, s.line_color);
    doc.text(sx(e), f.bottom + 16, fmt_num(std::pow(10.0, e)), s.font_size - 1, "middle");
  }
  const std::string mot = d.rows.front().motivation;
  doc.text((f.left + f.right) / 2, f.bottom + 36, "odds ratio (motivation: " + mot + ")", s.font_size, "middle");
  doc.close_group();
  return doc.finish();
}

std::string render_sensitivity_pairs(const SensitivityPairsData& d, const PlotStyle& style) {
  if (d.rows.empty()) fail(ErrorCode::EmptyData, "sensitivity plot: no traits");
  SvgDocument doc(style.width, style.height);
  draw_title(doc, style, "Estimates under initial and retest degrees");
  const Frame f = plot_frame(style);
  const Scale sy{0, 1, f.bottom, f.top};
  const double group_w = (f.right - f.left) / static_cast<double>(d.rows.size());
  doc.open_group("pairs");
  for (std::size_t i = 0; i < d.rows.size(); ++i) {
    const auto& r = d.rows[i];
    const double x0 = f.left + group_w * (static_cast<double>(i) + 0.3);
    const double x1 = f.left + group_w * (static_cast<double>(i) + 0.7);
    doc.line(x0, sy(r.initial), x1, sy(r.retest), style.line_color, 1.0, "", "pair");
    doc.circle(x0, sy(r.initial), 3.5, style.negative_color, "none", "initial");
    doc.circle(x1, sy(r.retest), 3.5, style.positive_color, "none", "retest");
    doc.text((x0 + x1) / 2, f.bottom + 16, r.trait, style.font_size - 1, "middle");
  }
  doc.close_group();
  doc.line(f.left, f.bottom, f.right, f.bottom, style.line_color);
  draw_y_axis(doc, f, sy, nice_ticks(0, 1), "estimate", style);
  legend(doc, f.left, style.height - 8, {{"initial", style.negative_color}, {"retest", style.positive_color}}, style);
  return doc.finish();
}

void scatter_with_fit(SvgDocument& doc, const Frame& f, const std::vector<double>& x, const std::vector<double>& y,
                      double ymin, double ymax, const std::string& xlabel, const std::string& ylabel,
                      const PlotStyle& style) {
  const auto [xmin_it, xmax_it] = std::minmax_element(x.begin(), x.end());
  const double xmin = *xmin_it, xmax = std::max(*xmax_it, *xmin_it + 1);
  const Scale sx{xmin, xmax, f.left, f.right};
  const Scale sy{ymin, ymax, f.bottom, f.top};
  doc.open_group("points");
  for (std::size_t i = 0; i < x.size(); ++i) {
    doc.circle(sx(x[i]), sy(y[i]), 2.0, style.negative_color, "none", "point");
  }
  doc.close_group();
  try {
    const LinearFit fit = least_squares(x, y);
    auto clampy = [&](double v) { return std::clamp(v, ymin, ymax); };
    doc.line(sx(xmin), sy(clampy(fit.intercept + fit.slope * xmin)), sx(xmax),
             sy(clampy(fit.intercept + fit.slope * xmax)), style.positive_color, 2.0, "", "fit");
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InsufficientData) throw;
  }
  draw_x_axis(doc, f, sx, nice_ticks(xmin, xmax), xlabel, style);
  draw_y_axis(doc, f, sy, nice_ticks(ymin, ymax), ylabel, style);
}

std::string render_participants_known(const ParticipantsKnownTrend& t, const PlotStyle& style) {
  if (t.points.empty()) fail(ErrorCode::EmptyData, "participants-known plot: no points");
  SvgDocument doc(style.width, style.height);
  draw_title(doc, style, "Proportion of contacts already participating");
  std::vector<double> x, y;
  for (const auto& p : t.points) {
    x.push_back(p.interview_order);
    y.push_back(p.proportion);
  }
  scatter_with_fit(doc, plot_frame(style), x, y, 0, 1, "interview order", "proportion", style);
  doc.text(style.width - kMarginRight, kMarginTop - 4, "slope " + fmt_num(t.slope), style.font_size - 1, "end",
           "slope");
  return doc.finish();
}

std::string render_degree_trend(const DegreeTrend& t, const PlotStyle& style) {
  if (t.order.empty()) fail(ErrorCode::EmptyData, "degree trend plot: no points");
  SvgDocument doc(style.width, style.height);
  draw_title(doc, style, "Degree over sample order");
  const double ymax = std::max(1.0, *std::max_element(t.degree.begin(), t.degree.end()));
  scatter_with_fit(doc, plot_frame(style), t.order, t.degree, 0, ymax, "interview order", "degree", style);
  double y = kMarginTop + 4;
  for (const auto& v : t.verdicts) {
    doc.text(style.width - kMarginRight - 4, y,
             std::string(to_string(v.method)) + ": " + fmt_num(v.statistic), style.font_size - 2, "end", "verdict");
    y += 12;
  }
  return doc.finish();
}

}  // namespace

ChainsData chains_data(const StudyDataset& ds, const RecruitmentForest& forest,
                       const std::optional<TraitSelector>& trait) {
  ChainsData d;
  d.roots = forest.roots();
  for (std::size_t i = 0; i < forest.size(); ++i) {
    d.ids.push_back(forest.id(i));
    d.parent.push_back(forest.parent(i));
    d.wave.push_back(forest.wave(i));
    d.children.push_back(forest.children(i));
    if (trait) d.positive.push_back(ds.indicator(i, *trait));
  }
  return d;
}

std::vector<NodePosition> chains_layout(const ChainsData& d) {
  std::vector<NodePosition> pos(d.ids.size());
  double next_leaf = 0.0;
  // iterative post-order so deep chains do not exhaust the stack
  for (std::size_t root : d.roots) {
    std::vector<std::pair<std::size_t, std::size_t>> stack{{root, 0}};
    while (!stack.empty()) {
      auto& [node, child] = stack.back();
      const auto& kids = d.children[node];
      if (child < kids.size()) {
        const std::size_t next = kids[child++];
        stack.emplace_back(next, 0);
        continue;
      }
      if (kids.empty()) {
        pos[node].x = next_leaf;
        next_leaf += 1.0;
      } else {
        pos[node].x = (pos[kids.front()].x + pos[kids.back()].x) / 2;
      }
      pos[node].y = d.wave.empty() ? 0.0 : d.wave[node];
      stack.pop_back();
    }
    next_leaf += 0.5;  // gap between trees
  }
  return pos;
}

const std::vector<std::string>& plot_kinds() {
  static const std::vector<std::string> kinds{
      "chains",     "convergence", "bottleneck",        "all-points",         "flag-grid",   "effectiveness",
      "bias",       "motivation-outcome", "sensitivity-pairs", "participants-known", "degree-trend"};
  return kinds;
}

std::string render_plot(std::string_view kind, const PlotInput& data, const PlotStyle& style) {
  if (kind == "chains") return render_chains(expect<ChainsData>(data, kind), style);
  if (kind == "convergence") return render_convergence(expect<EstimateSeries>(data, kind), style);
  if (kind == "bottleneck") return render_bottleneck(expect<BottleneckPlotData>(data, kind), style);
  if (kind == "all-points") return render_all_points(expect<AllPointsData>(data, kind), style);
  if (kind == "flag-grid") return render_flag_grid(expect<FlagGrid>(data, kind), style);
  if (kind == "effectiveness") return render_effectiveness(expect<EffectivenessData>(data, kind), style);
  if (kind == "bias") return render_bias(expect<BiasPlotData>(data, kind), style);
  if (kind == "motivation-outcome") return render_motivation_outcome(expect<MotivationOutcomeData>(data, kind), style);
  if (kind == "sensitivity-pairs") return render_sensitivity_pairs(expect<SensitivityPairsData>(data, kind), style);
  if (kind == "participants-known") return render_participants_known(expect<ParticipantsKnownTrend>(data, kind), style);
  if (kind == "degree-trend") return render_degree_trend(expect<DegreeTrend>(data, kind), style);
  fail(ErrorCode::UnknownKind, "unknown plot kind: " + std::string(kind));
}

}  // namespace rdsdiag
