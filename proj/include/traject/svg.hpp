// Copyright (c) 2026, The traject Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "traject/band.hpp"
#include "traject/pca.hpp"

namespace traject::svg {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s(buf);
  if (s == "-0.00") s = "0.00";
  return s;
}

inline std::string escape(std::string_view text) {
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

/// Fixed-size SVG document with a rectangular plot area and linear axes.
class Figure {
 public:
  static constexpr double kWidth = 720;
  static constexpr double kHeight = 420;
  static constexpr double kLeft = 60;
  static constexpr double kRight = 20;
  static constexpr double kTop = 40;
  static constexpr double kBottom = 50;

  Figure(std::string_view title, double x0, double x1, double y0, double y1) : x0_(x0), x1_(x1), y0_(y0), y1_(y1) {
    if (!(x1_ > x0_)) x1_ = x0_ + 1;
    if (!(y1_ > y0_)) { y0_ -= 0.5; y1_ += 0.5; }
    body_ += "<rect x=\"0\" y=\"0\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) +
             "\" fill=\"white\"/>\n";
    body_ += "<text x=\"" + num(kWidth / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" +
             escape(title) + "</text>\n";
  }

  double px(double x) const { return kLeft + (x - x0_) / (x1_ - x0_) * (kWidth - kLeft - kRight); }
  double py(double y) const { return kHeight - kBottom - (y - y0_) / (y1_ - y0_) * (kHeight - kTop - kBottom); }

  void raw(std::string_view element) { body_ += element; body_ += '\n'; }

  void axes(std::string_view xlabel, std::string_view ylabel, double xtick_step) {
    const double bx = kLeft, by = kHeight - kBottom, tx = kWidth - kRight, ty = kTop;
    raw("<path d=\"M" + num(bx) + " " + num(ty) + " L" + num(bx) + " " + num(by) + " L" + num(tx) + " " +
        num(by) + "\" fill=\"none\" stroke=\"black\"/>");
    if (xtick_step > 0) {
      for (double x = std::ceil(x0_ / xtick_step) * xtick_step; x <= x1_ + 1e-9; x += xtick_step) {
        raw("<text x=\"" + num(px(x)) + "\" y=\"" + num(by + 16) + "\" text-anchor=\"middle\" font-size=\"11\">" +
            std::to_string(std::lround(x)) + "</text>");
      }
    }
    for (int i = 0; i <= 4; ++i) {
      const double y = y0_ + (y1_ - y0_) * i / 4.0;
      raw("<text x=\"" + num(bx - 6) + "\" y=\"" + num(py(y) + 4) + "\" text-anchor=\"end\" font-size=\"11\">" +
          num(y) + "</text>");
    }
    raw("<text x=\"" + num((bx + tx) / 2) + "\" y=\"" + num(kHeight - 12) +
        "\" text-anchor=\"middle\" font-size=\"12\">" + escape(xlabel) + "</text>");
    raw("<text x=\"16\" y=\"" + num((by + ty) / 2) + "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 " +
        num((by + ty) / 2) + ")\">" + escape(ylabel) + "</text>");
  }

  void polyline(std::span<const double> xs, std::span<const double> ys, std::string_view style) {
    std::string pts;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (i) pts += ' ';
      pts += num(px(xs[i])) + "," + num(py(ys[i]));
    }
    raw("<polyline points=\"" + pts + "\" fill=\"none\" " + std::string(style) + "/>");
  }

  std::string str() const {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) +
           "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) + "\">\n" + body_ + "</svg>\n";
  }

 private:
  double x0_, x1_, y0_, y1_;
  std::string body_;
};

inline std::vector<double> layer_axis(std::size_t n) {
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = static_cast<double>(i);
  return xs;
}

/// Hybrid signal with its threshold (dashed) and the band (shaded).
inline std::string band_plot(const BandReport& r) {
  const std::size_t L = r.raw_signal.size();
  double lo = r.tau, hi = r.tau;
  for (double v : r.raw_signal) { lo = std::min(lo, v); hi = std::max(hi, v); }
  for (double v : r.smoothed) { lo = std::min(lo, v); hi = std::max(hi, v); }
  const double pad = 0.05 * std::max(hi - lo, 1e-9);

  Figure fig("Hybrid structural signal", -0.5, static_cast<double>(L) - 0.5, lo - pad, hi + pad);
  const double bx0 = fig.px(static_cast<double>(r.band.lo) - 0.5);
  const double bx1 = fig.px(static_cast<double>(r.band.hi) + 0.5);
  fig.raw("<rect class=\"band\" x=\"" + num(bx0) + "\" y=\"" + num(Figure::kTop) + "\" width=\"" + num(bx1 - bx0) +
          "\" height=\"" + num(Figure::kHeight - Figure::kTop - Figure::kBottom) +
          "\" fill=\"#a0522d\" fill-opacity=\"0.2\"/>");
  fig.axes("layer (0-based)", "S(l)", L > 20 ? 5 : 1);
  const auto xs = layer_axis(L);
  fig.polyline(xs, r.raw_signal, "class=\"raw\" stroke=\"#b0b0b0\" stroke-width=\"1\"");
  fig.polyline(xs, r.smoothed, "class=\"smoothed\" stroke=\"#7b2d8e\" stroke-width=\"2\"");
  fig.raw("<line class=\"tau\" x1=\"" + num(Figure::kLeft) + "\" y1=\"" + num(fig.py(r.tau)) + "\" x2=\"" +
          num(Figure::kWidth - Figure::kRight) + "\" y2=\"" + num(fig.py(r.tau)) +
          "\" stroke=\"black\" stroke-dasharray=\"6,4\"/>");
  return fig.str();
}

/// One bar per layer.
inline std::string bar_chart(std::span<const double> values, std::string_view title, std::string_view ylabel) {
  const std::size_t L = values.size();
  double hi = 0.0;
  for (double v : values) hi = std::max(hi, v);
  Figure fig(title, -0.5, static_cast<double>(L) - 0.5, 0.0, hi > 0 ? hi * 1.05 : 1.0);
  fig.axes("layer (0-based)", ylabel, L > 20 ? 5 : 1);
  const double w = 0.8 * (fig.px(1) - fig.px(0));
  for (std::size_t l = 0; l < L; ++l) {
    const double x = fig.px(static_cast<double>(l)) - w / 2;
    const double y = fig.py(values[l]);
    fig.raw("<rect class=\"bar\" x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) + "\" height=\"" +
            num(fig.py(0.0) - y) + "\" fill=\"#4682b4\"/>");
  }
  return fig.str();
}

struct TrajectoryPlotOptions {
  std::string title = "Trajectory (PCA projection)";
  const LayerInterval* band = nullptr;         // highlighted segment
  std::span<const std::size_t> pivots = {};    // emphasized vertices
};

/// Polyline through the projected layers with one marker per layer. Three
/// components are drawn with an isometric view of the first three axes.
inline std::string trajectory_plot(const PcaProjection& p, const TrajectoryPlotOptions& opt = {}) {
  const std::size_t L = p.coords.size() / std::max<std::size_t>(p.components, 1);
  std::vector<double> xs(L), ys(L);
  const double c30 = std::sqrt(3.0) / 2, s30 = 0.5;
  for (std::size_t l = 0; l < L; ++l) {
    const double a = p.components > 0 ? p.at(l, 0) : 0.0;
    const double b = p.components > 1 ? p.at(l, 1) : 0.0;
    if (p.components >= 3) {
      const double c = p.at(l, 2);
      xs[l] = (a - b) * c30;
      ys[l] = c + (a + b) * s30;
    } else {
      xs[l] = a;
      ys[l] = b;
    }
  }
  auto [xlo, xhi] = std::minmax_element(xs.begin(), xs.end());
  auto [ylo, yhi] = std::minmax_element(ys.begin(), ys.end());
  const double span = std::max({*xhi - *xlo, *yhi - *ylo, 1e-9});
  const double cx = (*xlo + *xhi) / 2, cy = (*ylo + *yhi) / 2;
  Figure fig(opt.title, cx - 0.6 * span, cx + 0.6 * span, cy - 0.6 * span, cy + 0.6 * span);
  fig.axes(p.components >= 3 ? "isometric PC1/PC2/PC3" : "PC1", p.components >= 3 ? "" : "PC2", 0);

  if (p.degenerate) {
    fig.raw("<circle class=\"vertex\" cx=\"" + num(fig.px(cx)) + "\" cy=\"" + num(fig.py(cy)) +
            "\" r=\"4\" fill=\"#333\"/>");
    fig.raw("<text x=\"" + num(Figure::kWidth / 2) + "\" y=\"" + num(Figure::kTop + 16) +
            "\" text-anchor=\"middle\" font-size=\"12\">degenerate: no variance</text>");
    return fig.str();
  }

  fig.polyline(xs, ys, "class=\"path\" stroke=\"#888\" stroke-width=\"1.5\"");
  if (opt.band != nullptr && opt.band->hi < L) {
    const auto n = static_cast<std::ptrdiff_t>(opt.band->size());
    const auto lo = static_cast<std::ptrdiff_t>(opt.band->lo);
    fig.polyline(std::span(xs).subspan(lo, n), std::span(ys).subspan(lo, n),
                 "class=\"band\" stroke=\"#a0522d\" stroke-width=\"3\"");
  }
  for (std::size_t l = 0; l < L; ++l) {
    fig.raw("<circle class=\"vertex\" cx=\"" + num(fig.px(xs[l])) + "\" cy=\"" + num(fig.py(ys[l])) +
            "\" r=\"2.5\" fill=\"#333\"><title>layer " + std::to_string(l) + "</title></circle>");
  }
  for (auto l : opt.pivots) {
    if (l >= L) continue;
    fig.raw("<circle class=\"pivot\" cx=\"" + num(fig.px(xs[l])) + "\" cy=\"" + num(fig.py(ys[l])) +
            "\" r=\"6\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"2\"/>");
  }
  return fig.str();
}

}  // namespace traject::svg
