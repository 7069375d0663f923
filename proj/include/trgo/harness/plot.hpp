#pragma once

// Static SVG scatter of objective fronts and line charts of histories.
// Every plotted point carries its exact coordinates in data-f1 / data-f2
// attributes, so the file doubles as a data record.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "trgo/error.hpp"
#include "trgo/harness/export.hpp"
#include "trgo/moea/optimizer.hpp"
#include "trgo/moea/pareto.hpp"

namespace trgo::harness {

struct LabeledFront {
  std::string label;
  std::vector<moea::Objectives> points;
};

inline std::string condition_color(const std::string& label) {
  if (label == "Random") return "red";
  if (label == "PlatData") return "black";
  if (label == "TrGO") return "green";
  static const char* palette[] = {"blue", "orange", "purple", "teal", "brown"};
  std::size_t h = 0;
  for (char c : label) h = h * 31 + static_cast<unsigned char>(c);
  return palette[h % 5];
}

namespace detail {

struct Frame {
  double x0, x1, y0, y1;
  static constexpr double width = 640, height = 480, left = 70, right = 130, top = 30, bottom = 60;

  double px(double x) const { return left + (x - x0) / (x1 - x0) * (width - left - right); }
  double py(double y) const { return height - bottom - (y - y0) / (y1 - y0) * (height - top - bottom); }
};

inline std::string fmt(double v, const char* spec = "%.2f") {
  char buf[48];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

inline Frame make_frame(double lo_x, double hi_x, double lo_y, double hi_y) {
  auto pad = [](double& lo, double& hi) {
    if (!(hi > lo)) {
      lo -= 0.5;
      hi += 0.5;
    }
    const double p = 0.05 * (hi - lo);
    lo -= p;
    hi += p;
  };
  pad(lo_x, hi_x);
  pad(lo_y, hi_y);
  return {lo_x, hi_x, lo_y, hi_y};
}

inline void axes(std::ostringstream& s, const Frame& f, const std::string& xlabel, const std::string& ylabel) {
  const double l = Frame::left, b = Frame::height - Frame::bottom;
  const double r = Frame::width - Frame::right, t = Frame::top;
  s << "<rect x=\"" << l << "\" y=\"" << t << "\" width=\"" << r - l << "\" height=\"" << b - t
    << "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = f.x0 + (f.x1 - f.x0) * i / 4.0;
    const double yv = f.y0 + (f.y1 - f.y0) * i / 4.0;
    s << "<text x=\"" << fmt(f.px(xv)) << "\" y=\"" << b + 18 << "\" text-anchor=\"middle\" font-size=\"11\">"
      << fmt(xv, "%.4g") << "</text>\n";
    s << "<text x=\"" << l - 6 << "\" y=\"" << fmt(f.py(yv) + 4) << "\" text-anchor=\"end\" font-size=\"11\">"
      << fmt(yv, "%.4g") << "</text>\n";
  }
  s << "<text x=\"" << (l + r) / 2 << "\" y=\"" << Frame::height - 15
    << "\" text-anchor=\"middle\" font-size=\"14\">" << xlabel << "</text>\n";
  s << "<text x=\"18\" y=\"" << (t + b) / 2 << "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 18 "
    << (t + b) / 2 << ")\">" << ylabel << "</text>\n";
}

inline void legend(std::ostringstream& s, const std::vector<std::string>& labels) {
  double y = Frame::top + 10;
  const double x = Frame::width - Frame::right + 15;
  for (const auto& label : labels) {
    s << "<circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"4\" fill=\"" << condition_color(label) << "\"/>\n";
    s << "<text x=\"" << x + 10 << "\" y=\"" << y + 4 << "\" font-size=\"12\">" << label << "</text>\n";
    y += 18;
  }
}

inline std::string header() {
  std::ostringstream s;
  s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << Frame::width << "\" height=\"" << Frame::height
    << "\" viewBox=\"0 0 " << Frame::width << " " << Frame::height << "\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  return s.str();
}

}  // namespace detail

/// Scatter of 2-D fronts with axes 1/Wv and St. Penalty points are drawn
/// like any other point.
inline std::string render_fronts_svg(const std::vector<LabeledFront>& fronts, const std::string& title = "") {
  if (fronts.empty()) throw ParameterError("nothing to plot");
  double lx = std::numeric_limits<double>::infinity(), hx = -lx, ly = lx, hy = -lx;
  for (const auto& f : fronts) {
    for (const auto& p : f.points) {
      if (p.size() != 2) throw ParameterError("fronts must be 2-D");
      lx = std::min(lx, p[0]);
      hx = std::max(hx, p[0]);
      ly = std::min(ly, p[1]);
      hy = std::max(hy, p[1]);
    }
  }
  if (!std::isfinite(lx)) lx = hx = ly = hy = 0.0;
  const auto frame = detail::make_frame(lx, hx, ly, hy);

  std::ostringstream s;
  s << detail::header();
  if (!title.empty()) {
    s << "<text x=\"" << detail::Frame::width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << title
      << "</text>\n";
  }
  detail::axes(s, frame, "1/Wv", "St");
  std::vector<std::string> labels;
  for (const auto& f : fronts) {
    labels.push_back(f.label);
    s << "<g class=\"front\" data-label=\"" << f.label << "\" fill=\"" << condition_color(f.label) << "\">\n";
    for (const auto& p : f.points) {
      s << "<circle cx=\"" << detail::fmt(frame.px(p[0])) << "\" cy=\"" << detail::fmt(frame.py(p[1]))
        << "\" r=\"3.5\" data-f1=\"" << format_double(p[0]) << "\" data-f2=\"" << format_double(p[1]) << "\"/>\n";
    }
    s << "</g>\n";
  }
  detail::legend(s, labels);
  s << "</svg>\n";
  return s.str();
}

inline void plot_front(const std::vector<LabeledFront>& fronts, const std::filesystem::path& path,
                       const std::string& title = "") {
  write_text(path, render_fronts_svg(fronts, title));
}

struct LabeledHistory {
  std::string label;
  moea::History history;
};

/// Mean of objective `objective` per generation, one polyline per label.
inline std::string render_history_svg(const std::vector<LabeledHistory>& histories, std::size_t objective,
                                      const std::string& ylabel) {
  if (histories.empty()) throw ParameterError("nothing to plot");
  double lx = std::numeric_limits<double>::infinity(), hx = -lx, ly = lx, hy = -lx;
  for (const auto& h : histories) {
    for (const auto& g : h.history) {
      if (objective >= g.mean.size()) throw ParameterError("objective index out of range");
      lx = std::min(lx, double(g.generation));
      hx = std::max(hx, double(g.generation));
      ly = std::min(ly, g.mean[objective]);
      hy = std::max(hy, g.mean[objective]);
    }
  }
  if (!std::isfinite(lx)) lx = hx = ly = hy = 0.0;
  const auto frame = detail::make_frame(lx, hx, ly, hy);
  std::ostringstream s;
  s << detail::header();
  detail::axes(s, frame, "generation", ylabel);
  std::vector<std::string> labels;
  for (const auto& h : histories) {
    labels.push_back(h.label);
    s << "<polyline fill=\"none\" stroke=\"" << condition_color(h.label) << "\" data-label=\"" << h.label
      << "\" points=\"";
    for (std::size_t i = 0; i < h.history.size(); ++i) {
      const auto& g = h.history[i];
      s << (i ? " " : "") << detail::fmt(frame.px(g.generation)) << "," << detail::fmt(frame.py(g.mean[objective]));
    }
    s << "\"/>\n";
  }
  detail::legend(s, labels);
  s << "</svg>\n";
  return s.str();
}

}  // namespace trgo::harness
