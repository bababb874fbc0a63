#include "landsig/signature.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace landsig {

namespace {

std::string xml_escape(std::string_view in) {
  std::string out;
  for (char c : in) {
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

}  // namespace

TemporalSignature normalize(const HourlyCounts& counts) {
  const std::uint64_t total = counts.total();
  if (total == 0) throw Error(ErrorCode::EmptySignature, "cannot normalize all-zero hourly counts");
  const double hourly_mean = static_cast<double>(total) / static_cast<double>(kHoursPerDay);
  TemporalSignature sig;
  for (std::size_t h = 0; h < kHoursPerDay; ++h) {
    sig.values[h] = static_cast<double>(counts[h]) / hourly_mean;
  }
  return sig;
}

TemporalSignature normalize_sum_one(const HourlyCounts& counts) {
  const std::uint64_t total = counts.total();
  if (total == 0) throw Error(ErrorCode::EmptySignature, "cannot normalize all-zero hourly counts");
  TemporalSignature sig;
  for (std::size_t h = 0; h < kHoursPerDay; ++h) {
    sig.values[h] = static_cast<double>(counts[h]) / static_cast<double>(total);
  }
  return sig;
}

bool is_complete(const HourlyCounts& counts) noexcept {
  return std::all_of(counts.counts.begin(), counts.counts.end(), [](auto c) { return c > 0; });
}

std::vector<int> missing_hours(const HourlyCounts& counts) {
  std::vector<int> out;
  for (std::size_t h = 0; h < kHoursPerDay; ++h) {
    if (counts[h] == 0) out.push_back(static_cast<int>(h));
  }
  return out;
}

std::string signature_csv(const TemporalSignature& sig) {
  std::string out = "hour,value\n";
  for (std::size_t h = 0; h < kHoursPerDay; ++h) out += fmt::format("{},{}\n", h, sig[h]);
  return out;
}

std::string signature_svg(const std::vector<SignatureSeries>& series, std::string_view title) {
  static constexpr std::array<std::string_view, 8> kPalette = {
      "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"};
  constexpr double kWidth = 720, kHeight = 400;
  constexpr double kLeft = 56, kRight = 150, kTop = 40, kBottom = 48;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;

  double y_max = 1.5;
  for (const auto& s : series) {
    for (double v : s.signature.values) y_max = std::max(y_max, v);
  }
  y_max = std::ceil(y_max * 2.0) / 2.0;

  const auto x_of = [&](std::size_t h) { return kLeft + plot_w * static_cast<double>(h) / 23.0; };
  const auto y_of = [&](double v) { return kTop + plot_h * (1.0 - v / y_max); };

  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" "
      "viewBox=\"0 0 {} {}\" font-family=\"sans-serif\" font-size=\"11\">\n",
      kWidth, kHeight, kWidth, kHeight);
  svg += fmt::format("<rect width=\"{}\" height=\"{}\" fill=\"white\"/>\n", kWidth, kHeight);
  svg += fmt::format("<text x=\"{}\" y=\"22\" font-size=\"14\" text-anchor=\"middle\">{}</text>\n",
                     kLeft + plot_w / 2, xml_escape(title));

  // axes and ticks
  svg += fmt::format(
      "<polyline fill=\"none\" stroke=\"black\" points=\"{},{} {},{} {},{}\"/>\n", kLeft, kTop,
      kLeft, kTop + plot_h, kLeft + plot_w, kTop + plot_h);
  for (std::size_t h = 0; h < kHoursPerDay; ++h) {
    svg += fmt::format("<text x=\"{:.1f}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", x_of(h),
                       kTop + plot_h + 16, h);
  }
  for (double v = 0.0; v <= y_max + 1e-9; v += 0.5) {
    svg += fmt::format("<text x=\"{}\" y=\"{:.1f}\" text-anchor=\"end\">{:.1f}</text>\n",
                       kLeft - 6, y_of(v) + 4, v);
  }
  svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">local hour</text>\n",
                     kLeft + plot_w / 2, kHeight - 10);
  svg += fmt::format(
      "<line x1=\"{}\" y1=\"{:.1f}\" x2=\"{}\" y2=\"{:.1f}\" stroke=\"#888\" "
      "stroke-dasharray=\"4 3\"/>\n",
      kLeft, y_of(1.0), kLeft + plot_w, y_of(1.0));

  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto color = kPalette[i % kPalette.size()];
    std::string points;
    for (std::size_t h = 0; h < kHoursPerDay; ++h) {
      points += fmt::format("{}{:.2f},{:.2f}", h ? " " : "", x_of(h), y_of(series[i].signature[h]));
    }
    svg += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"2\" points=\"{}\"/>\n",
                       color, points);
    const double ly = kTop + 14.0 * static_cast<double>(i);
    svg += fmt::format(
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"2\"/>"
        "<text x=\"{}\" y=\"{}\">{}</text>\n",
        kLeft + plot_w + 12, ly, kLeft + plot_w + 30, ly, color, kLeft + plot_w + 36, ly + 4,
        xml_escape(series[i].name));
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace landsig
