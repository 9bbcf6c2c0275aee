#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "dramaturg/affect.hpp"
#include "dramaturg/lexstats.hpp"
#include "dramaturg/report.hpp"

namespace dramaturg::render {

enum class Format { json, csv, svg };

// Parses a comma-separated list such as "json,csv,svg".
std::set<Format> parse_formats(std::string_view list);

std::string report_json(const report::PlayReport& r);
std::string comparison_json(const report::ComparativeReport& c);

// Segment index on x, score in [0, 1] on y: valence plus one line per emotion.
std::string arc_svg(const affect::AffectArc& arc);
// One stacked horizontal bar of the emotion percentage distribution.
std::string emotions_svg(const std::optional<EmotionScores>& percentages, std::string_view title);
std::string wordcloud_svg(const lexstats::WordCloudSpec& spec);

// Writes report.json / arc.csv + frequencies.csv / arc.svg + emotions.svg +
// wordcloud.svg into `dir` (created if needed) and returns the paths written.
std::vector<std::filesystem::path> render_play(const report::PlayReport& r, const std::set<Format>& formats,
                                               const std::filesystem::path& dir);

// Filesystem-safe directory name for a title.
std::string title_slug(std::string_view title);

}  // namespace dramaturg::render
