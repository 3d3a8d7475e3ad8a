#include "ellab/cli/svg.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include <fmt/format.h>

#include "ellab/error.hpp"

namespace ellab::cli {

namespace {

constexpr double kWidth = 720, kHeight = 440;
constexpr double kLeft = 70, kRight = 170, kTop = 40, kBottom = 60;
constexpr double kFloor = 1e-16;  // d = 0 is drawn at this level

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

struct Series {
  double z;
  std::vector<std::pair<double, double>> pts;  // (h, log10 d)
};

[[noreturn]] void schema(const std::string& what) { throw InputError("trajectory report: " + what); }

std::vector<Series> read_series(const nlohmann::json& report) {
  if (!report.is_object()) schema("expected a JSON object");
  const auto it = report.find("distances");
  if (it == report.end() || !it->is_array()) schema("missing 'distances' array");
  if (it->empty()) schema("'distances' is empty; nothing to plot");
  std::vector<Series> out;
  std::map<double, std::size_t> index;
  for (const auto& e : *it) {
    if (!e.is_object()) schema("distance entries must be objects");
    for (const char* k : {"h", "z", "d"})
      if (!e.contains(k) || !e[k].is_number()) schema(fmt::format("distance entry needs numeric '{}'", k));
    const double h = e["h"].get<double>(), z = e["z"].get<double>(), d = e["d"].get<double>();
    if (!(h > 0.0) || !(d >= 0.0) || !std::isfinite(z)) schema("distance entries need h > 0, d >= 0, finite z");
    auto [pos, fresh] = index.emplace(z, out.size());
    if (fresh) out.push_back({z, {}});
    out[pos->second].pts.emplace_back(h, std::log10(std::max(d, kFloor)));
  }
  for (auto& s : out) std::sort(s.pts.begin(), s.pts.end());
  return out;
}

std::string num(double v) { return fmt::format("{:.2f}", v); }

}  // namespace

std::string render_trajectory_svg(const nlohmann::json& report) {
  const std::vector<Series> series = read_series(report);
  double hx0 = INFINITY, hx1 = -INFINITY, ly0 = INFINITY, ly1 = -INFINITY;
  for (const auto& s : series)
    for (const auto& [h, l] : s.pts) {
      hx0 = std::min(hx0, h);
      hx1 = std::max(hx1, h);
      ly0 = std::min(ly0, l);
      ly1 = std::max(ly1, l);
    }
  if (hx1 <= hx0) hx1 = hx0 + 1.0;
  ly0 = std::floor(ly0);
  ly1 = std::max(std::ceil(ly1), ly0 + 1.0);

  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  const auto X = [&](double h) { return kLeft + (h - hx0) / (hx1 - hx0) * pw; };
  const auto Y = [&](double l) { return kTop + (ly1 - l) / (ly1 - ly0) * ph; };

  std::string s;
  s += fmt::format("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n",
                   kWidth, kHeight, kWidth, kHeight);
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += fmt::format("<text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\" text-anchor=\"middle\">"
                   "Distance of the shifted solution to each candidate limit</text>\n",
                   num(kLeft + pw / 2));
  s += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n", num(kLeft),
                   num(kTop), num(pw), num(ph));

  // Decade gridlines on the y axis, five ticks on the x axis.
  const int decades = static_cast<int>(ly1 - ly0);
  const int ystep = std::max(1, decades / 8);
  for (int k = 0; k <= decades; k += ystep) {
    const double l = ly0 + k;
    s += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#dddddd\"/>\n", num(kLeft), num(Y(l)),
                     num(kLeft + pw), num(Y(l)));
    s += fmt::format("<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">1e{}</text>\n",
                     num(kLeft - 6), num(Y(l) + 4), static_cast<int>(l));
  }
  for (int k = 0; k <= 4; ++k) {
    const double h = hx0 + (hx1 - hx0) * k / 4.0;
    s += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n", num(X(h)), num(kTop + ph),
                     num(X(h)), num(kTop + ph + 5));
    s += fmt::format("<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{:.4g}</text>\n",
                     num(X(h)), num(kTop + ph + 18), h);
  }
  s += fmt::format("<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">shift h</text>\n",
                   num(kLeft + pw / 2), num(kHeight - 18));
  s += fmt::format("<text x=\"18\" y=\"{}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" "
                   "transform=\"rotate(-90 18 {})\">distance d (log scale)</text>\n",
                   num(kTop + ph / 2), num(kTop + ph / 2));

  for (std::size_t c = 0; c < series.size(); ++c) {
    const char* colour = kPalette[c % std::size(kPalette)];
    std::string pts;
    for (const auto& [h, l] : series[c].pts) pts += fmt::format("{}{},{}", pts.empty() ? "" : " ", num(X(h)), num(Y(l)));
    s += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"2\" points=\"{}\"/>\n", colour, pts);
    const double ly = kTop + 12 + 20.0 * c;
    s += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"2\"/>\n",
                     num(kWidth - kRight + 15), num(ly), num(kWidth - kRight + 40), num(ly), colour);
    s += fmt::format("<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\">z = {:.6g}</text>\n",
                     num(kWidth - kRight + 46), num(ly + 4), series[c].z);
  }
  s += "</svg>\n";
  return s;
}

}  // namespace ellab::cli
