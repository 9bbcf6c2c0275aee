#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dramaturg/corpus.hpp"

// Vocabulary richness, frequency tables and word-cloud layout.
namespace dramaturg::lexstats {

enum class CountingPolicy { alpha_all, alpha_nonstop };

const char* to_string(CountingPolicy policy);
CountingPolicy parse_counting_policy(std::string_view name);

struct LexicalSummary {
  std::size_t token_count = 0;
  std::size_t type_count = 0;
  double ttr = 0.0;
  CountingPolicy policy = CountingPolicy::alpha_all;
  std::string title;
  std::optional<std::size_t> segment;
};

// Throws EmptyScopeError when no token is admitted by the policy.
LexicalSummary type_token_ratio(std::span<const corpus::Token> tokens,
                                CountingPolicy policy = CountingPolicy::alpha_all);

struct FrequencyEntry {
  std::string term;
  std::size_t count = 0;
  bool operator==(const FrequencyEntry&) const = default;
};

// Sorted by count descending, ties broken by term ascending (byte order of
// the UTF-8 form). `total` is the sum of the listed counts.
struct FrequencyTable {
  std::vector<FrequencyEntry> entries;
  std::size_t total = 0;
  bool operator==(const FrequencyTable&) const = default;
};

FrequencyTable word_frequencies(std::span<const corpus::Token> tokens,
                                const corpus::Stoplist& stoplist, std::size_t top_n);

std::string to_csv(const FrequencyTable& table);

struct Canvas {
  double width = 800;
  double height = 600;
};

struct Box {
  double x0, y0, x1, y1;
  // open-interval test: shared edges do not count as overlap
  bool intersects(const Box& o) const { return x0 < o.x1 && o.x0 < x1 && y0 < o.y1 && o.y0 < y1; }
};

struct WordCloudItem {
  std::string term;
  double weight;
  double font_size;
  double x;  // centre of the bounding box
  double y;
  Box box;
};

struct WordCloudOptions {
  double min_font_size = 10;
  double max_font_size = 64;
  double glyph_advance = 0.6;  // em fraction per code point
  double line_height = 1.0;    // em fraction
  double padding = 2;
};

struct WordCloudSpec {
  std::vector<WordCloudItem> items;
  std::vector<std::string> omitted;
  Canvas canvas;
  std::uint32_t seed = 0;
};

double font_size_for(double weight, const WordCloudOptions& opts = {});

// Greedy archimedean-spiral placement from the canvas centre, heaviest term
// first. Terms that do not fit are listed in `omitted`; failing to place the
// heaviest term throws CanvasExhaustedError.
WordCloudSpec wordcloud_layout(const FrequencyTable& table, Canvas canvas, std::uint32_t seed,
                               const WordCloudOptions& opts = {});

}  // namespace dramaturg::lexstats
