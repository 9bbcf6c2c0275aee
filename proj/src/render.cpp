#include "dramaturg/render.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>

#include "dramaturg/canonical.hpp"
#include "dramaturg/error.hpp"

namespace dramaturg::render {

namespace fs = std::filesystem;
using canonical::fixed;

namespace {

constexpr std::array<std::string_view, kEmotionCount> kEmotionColors = {
    "#1f77b4", "#e6a800", "#e377c2", "#d62728", "#9467bd", "#2ca02c"};

constexpr std::array<std::string_view, 8> kCloudPalette = {
    "#1b3a5c", "#8c2d19", "#3d6b35", "#6a3d9a", "#b15928", "#1f78b4", "#33302e", "#a6761d"};

std::string escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
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

std::string svg_open(double width, double height) {
  return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
         "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fixed(width) + "\" height=\"" + fixed(height) +
         "\" viewBox=\"0 0 " + fixed(width) + " " + fixed(height) + "\">\n";
}

std::string text(double x, double y, std::string_view content, std::string_view attrs = {}) {
  std::string out = "  <text x=\"" + fixed(x) + "\" y=\"" + fixed(y) + "\"";
  if (!attrs.empty()) {
    out += ' ';
    out += attrs;
  }
  return out + ">" + escape(content) + "</text>\n";
}

std::string line(double x1, double y1, double x2, double y2, std::string_view stroke) {
  return "  <line x1=\"" + fixed(x1) + "\" y1=\"" + fixed(y1) + "\" x2=\"" + fixed(x2) + "\" y2=\"" + fixed(y2) +
         "\" stroke=\"" + std::string(stroke) + "\"/>\n";
}

void write_file(const fs::path& path, std::string_view data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw IoError("cannot write " + path.string());
}

}  // namespace

std::set<Format> parse_formats(std::string_view list) {
  std::set<Format> out;
  std::size_t start = 0;
  while (start <= list.size()) {
    auto comma = list.find(',', start);
    if (comma == std::string_view::npos) comma = list.size();
    const auto item = list.substr(start, comma - start);
    if (item == "json") {
      out.insert(Format::json);
    } else if (item == "csv") {
      out.insert(Format::csv);
    } else if (item == "svg") {
      out.insert(Format::svg);
    } else {
      throw ConfigError("unknown output format '" + std::string(item) + "'");
    }
    start = comma + 1;
  }
  return out;
}

std::string report_json(const report::PlayReport& r) { return canonical::dump(report::to_json(r)); }

std::string comparison_json(const report::ComparativeReport& c) { return canonical::dump(report::to_json(c)); }

std::string arc_svg(const affect::AffectArc& arc) {
  constexpr double kWidth = 800, kHeight = 400;
  constexpr double kLeft = 60, kRight = 140, kTop = 40, kBottom = 50;
  constexpr double kPlotW = kWidth - kLeft - kRight;
  constexpr double kPlotH = kHeight - kTop - kBottom;
  const std::size_t n = arc.points.size();

  auto x_of = [&](std::size_t i) {
    return n <= 1 ? kLeft + kPlotW / 2 : kLeft + kPlotW * static_cast<double>(i) / static_cast<double>(n - 1);
  };
  auto y_of = [&](double v) { return kTop + kPlotH * (1.0 - v); };

  std::string out = svg_open(kWidth, kHeight);
  out += "  <rect x=\"0\" y=\"0\" width=\"" + fixed(kWidth) + "\" height=\"" + fixed(kHeight) + "\" fill=\"#ffffff\"/>\n";
  out += text(kLeft, 24, arc.play + " (" + std::to_string(arc.window) + "-word segments)",
              "font-family=\"sans-serif\" font-size=\"14\"");
  out += line(kLeft, kTop, kLeft, kTop + kPlotH, "#444444");
  out += line(kLeft, kTop + kPlotH, kLeft + kPlotW, kTop + kPlotH, "#444444");
  for (double tick : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    out += line(kLeft - 4, y_of(tick), kLeft, y_of(tick), "#444444");
    out += text(kLeft - 8, y_of(tick) + 4, fixed(tick, 2), "font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\"");
  }
  const std::size_t step = n > 20 ? (n + 19) / 20 : 1;
  for (std::size_t i = 0; i < n; i += step) {
    out += text(x_of(i), kTop + kPlotH + 16, std::to_string(arc.points[i].segment_index),
                "font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\"");
  }
  out += text(kLeft + kPlotW / 2, kHeight - 10, "stage minute (segment)",
              "font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\"");

  auto polyline = [&](auto value_at, std::string_view cls, std::string_view color, double width) {
    std::string pts;
    for (std::size_t i = 0; i < n; ++i) {
      if (!pts.empty()) pts += ' ';
      pts += fixed(x_of(i)) + "," + fixed(y_of(value_at(arc.points[i])));
    }
    out += "  <polyline class=\"" + std::string(cls) + "\" fill=\"none\" stroke=\"" + std::string(color) +
           "\" stroke-width=\"" + fixed(width) + "\" points=\"" + pts + "\"/>\n";
  };

  double legend_y = kTop + 10;
  auto legend = [&](std::string_view label, std::string_view color) {
    out += line(kLeft + kPlotW + 15, legend_y, kLeft + kPlotW + 35, legend_y, color);
    out += text(kLeft + kPlotW + 40, legend_y + 4, label, "font-family=\"sans-serif\" font-size=\"11\"");
    legend_y += 18;
  };

  const bool has_valence = n > 0 && std::all_of(arc.points.begin(), arc.points.end(),
                                                 [](const auto& p) { return p.valence.has_value(); });
  const bool has_emotions = n > 0 && std::all_of(arc.points.begin(), arc.points.end(),
                                                 [](const auto& p) { return p.emotions.has_value(); });
  if (has_emotions) {
    for (std::size_t e = 0; e < kEmotionCount; ++e) {
      polyline([e](const affect::ArcPoint& p) { return p.emotions->scores[e]; }, kEmotionNames[e],
               kEmotionColors[e], 1.0);
      legend(kEmotionNames[e], kEmotionColors[e]);
    }
  }
  if (has_valence) {
    polyline([](const affect::ArcPoint& p) { return p.valence->value(); }, "valence", "#000000", 2.5);
    legend("valence", "#000000");
  }
  if (n == 0) {
    out += text(kLeft + kPlotW / 2, kTop + kPlotH / 2, "no segments",
                "font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\"");
  }
  out += "</svg>\n";
  return out;
}

std::string emotions_svg(const std::optional<EmotionScores>& percentages, std::string_view title) {
  constexpr double kWidth = 720, kHeight = 160;
  constexpr double kBarX = 20, kBarY = 40, kBarW = 680, kBarH = 40;
  std::string out = svg_open(kWidth, kHeight);
  out += "  <rect x=\"0\" y=\"0\" width=\"" + fixed(kWidth) + "\" height=\"" + fixed(kHeight) + "\" fill=\"#ffffff\"/>\n";
  out += text(kBarX, 24, std::string(title) + ": emotion distribution", "font-family=\"sans-serif\" font-size=\"14\"");
  if (!percentages) {
    out += text(kWidth / 2, kBarY + kBarH / 2, "no emotional signal",
                "font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\"");
    return out + "</svg>\n";
  }
  double x = kBarX;
  for (std::size_t e = 0; e < kEmotionCount; ++e) {
    const double w = kBarW * (*percentages)[e] / 100.0;
    out += "  <rect class=\"" + std::string(kEmotionNames[e]) + "\" x=\"" + fixed(x) + "\" y=\"" + fixed(kBarY) +
           "\" width=\"" + fixed(w) + "\" height=\"" + fixed(kBarH) + "\" fill=\"" + std::string(kEmotionColors[e]) +
           "\"/>\n";
    x += w;
  }
  for (std::size_t e = 0; e < kEmotionCount; ++e) {
    const double lx = kBarX + 115.0 * static_cast<double>(e);
    out += "  <rect x=\"" + fixed(lx) + "\" y=\"" + fixed(kBarY + kBarH + 20) + "\" width=\"10\" height=\"10\" fill=\"" +
           std::string(kEmotionColors[e]) + "\"/>\n";
    out += text(lx + 14, kBarY + kBarH + 29, std::string(kEmotionNames[e]) + " " + fixed((*percentages)[e], 1) + "%",
                "font-family=\"sans-serif\" font-size=\"11\"");
  }
  return out + "</svg>\n";
}

std::string wordcloud_svg(const lexstats::WordCloudSpec& spec) {
  std::string out = svg_open(spec.canvas.width, spec.canvas.height);
  out += "  <rect x=\"0\" y=\"0\" width=\"" + fixed(spec.canvas.width) + "\" height=\"" + fixed(spec.canvas.height) +
         "\" fill=\"#ffffff\"/>\n";
  for (std::size_t i = 0; i < spec.items.size(); ++i) {
    const auto& it = spec.items[i];
    out += text(it.x, it.y, it.term,
                "font-family=\"sans-serif\" font-size=\"" + fixed(it.font_size) +
                    "\" text-anchor=\"middle\" dominant-baseline=\"central\" fill=\"" +
                    std::string(kCloudPalette[i % kCloudPalette.size()]) + "\"");
  }
  return out + "</svg>\n";
}

std::vector<fs::path> render_play(const report::PlayReport& r, const std::set<Format>& formats, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  std::vector<fs::path> written;
  auto emit = [&](const char* name, const std::string& data) {
    write_file(dir / name, data);
    written.push_back(dir / name);
  };
  if (formats.count(Format::json)) emit("report.json", report_json(r));
  if (formats.count(Format::csv)) {
    emit("arc.csv", affect::arc_to_csv(r.arc));
    emit("frequencies.csv", lexstats::to_csv(r.frequencies));
  }
  if (formats.count(Format::svg)) {
    emit("arc.svg", arc_svg(r.arc));
    emit("emotions.svg", emotions_svg(r.percentages, r.title));
    lexstats::WordCloudSpec cloud;
    cloud.canvas = r.canvas;
    cloud.seed = r.seed;
    if (!r.frequencies.entries.empty()) cloud = lexstats::wordcloud_layout(r.frequencies, r.canvas, r.seed);
    emit("wordcloud.svg", wordcloud_svg(cloud));
  }
  return written;
}

std::string title_slug(std::string_view title) {
  std::string out;
  for (unsigned char c : title) {
    if (std::isalnum(c) || c >= 0x80 || c == '-' || c == '_' || c == '.') {
      out += static_cast<char>(c);
    } else {
      out += '_';
    }
  }
  if (out.empty() || out.find_first_not_of('.') == std::string::npos) out = "play" + out;
  return out;
}

}  // namespace dramaturg::render
