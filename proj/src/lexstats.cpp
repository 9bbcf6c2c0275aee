#include "dramaturg/lexstats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <unordered_map>
#include <unordered_set>

#include "dramaturg/error.hpp"
#include "dramaturg/utf8.hpp"

namespace dramaturg::lexstats {

const char* to_string(CountingPolicy policy) {
  return policy == CountingPolicy::alpha_all ? "alpha_all" : "alpha_nonstop";
}

CountingPolicy parse_counting_policy(std::string_view name) {
  if (name == "alpha_all") return CountingPolicy::alpha_all;
  if (name == "alpha_nonstop") return CountingPolicy::alpha_nonstop;
  throw ConfigError("unknown counting policy '" + std::string(name) + "'");
}

LexicalSummary type_token_ratio(std::span<const corpus::Token> tokens, CountingPolicy policy) {
  std::unordered_set<std::string_view> types;
  std::size_t count = 0;
  for (const auto& t : tokens) {
    if (!t.is_alpha) continue;
    if (policy == CountingPolicy::alpha_nonstop && t.is_stopword) continue;
    ++count;
    types.insert(t.lower);
  }
  if (count == 0) throw EmptyScopeError("empty scope: no tokens admitted for TTR");
  LexicalSummary s;
  s.token_count = count;
  s.type_count = types.size();
  s.ttr = static_cast<double>(s.type_count) / static_cast<double>(s.token_count);
  s.policy = policy;
  return s;
}

FrequencyTable word_frequencies(std::span<const corpus::Token> tokens,
                                const corpus::Stoplist& stoplist, std::size_t top_n) {
  if (top_n == 0) throw ConfigError("top_n must be at least 1");
  std::unordered_map<std::string_view, std::size_t> counts;
  for (const auto& t : tokens) {
    if (!t.is_alpha || stoplist.count(t.lower)) continue;
    ++counts[t.lower];
  }
  FrequencyTable table;
  table.entries.reserve(counts.size());
  for (const auto& [term, n] : counts) table.entries.push_back({std::string(term), n});
  auto by_rank = [](const FrequencyEntry& a, const FrequencyEntry& b) {
    return a.count != b.count ? a.count > b.count : a.term < b.term;
  };
  if (table.entries.size() > top_n) {
    std::partial_sort(table.entries.begin(), table.entries.begin() + static_cast<std::ptrdiff_t>(top_n),
                      table.entries.end(), by_rank);
    table.entries.resize(top_n);
  } else {
    std::sort(table.entries.begin(), table.entries.end(), by_rank);
  }
  for (const auto& e : table.entries) table.total += e.count;
  return table;
}

std::string to_csv(const FrequencyTable& table) {
  std::string out = "term,count\n";
  for (const auto& e : table.entries) {
    if (e.term.find_first_of(",\"\n") != std::string::npos) {
      out += '"';
      for (char c : e.term) {
        if (c == '"') out += '"';
        out += c;
      }
      out += '"';
    } else {
      out += e.term;
    }
    out += ',' + std::to_string(e.count) + '\n';
  }
  return out;
}

double font_size_for(double weight, const WordCloudOptions& opts) {
  return opts.min_font_size + (opts.max_font_size - opts.min_font_size) * weight;
}

WordCloudSpec wordcloud_layout(const FrequencyTable& table, Canvas canvas, std::uint32_t seed,
                               const WordCloudOptions& opts) {
  if (table.entries.empty()) throw EmptyScopeError("empty scope: word cloud needs at least one term");
  if (!(canvas.width > 0) || !(canvas.height > 0)) throw ConfigError("canvas dimensions must be positive");

  constexpr double kSpiralPitch = 1.5;  // radius growth per radian
  constexpr double kArcStep = 2.0;      // approximate distance between probes

  WordCloudSpec spec;
  spec.canvas = canvas;
  spec.seed = seed;

  std::mt19937 rng(seed);
  const double max_count = static_cast<double>(
      std::max_element(table.entries.begin(), table.entries.end(),
                       [](const auto& a, const auto& b) { return a.count < b.count; })
          ->count);
  const double cx = canvas.width / 2;
  const double cy = canvas.height / 2;
  const double r_max = std::hypot(canvas.width, canvas.height) / 2;

  std::vector<FrequencyEntry> order = table.entries;
  std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
    return a.count != b.count ? a.count > b.count : a.term < b.term;
  });

  for (const auto& entry : order) {
    const double weight = static_cast<double>(entry.count) / max_count;
    const double size = font_size_for(weight, opts);
    const double half_w =
        (size * opts.glyph_advance * static_cast<double>(utf8::length(entry.term))) / 2 + opts.padding;
    const double half_h = (size * opts.line_height) / 2 + opts.padding;
    const double phase = static_cast<double>(rng() % 3600) * (2 * std::numbers::pi / 3600);

    std::optional<WordCloudItem> placed;
    if (2 * half_w <= canvas.width && 2 * half_h <= canvas.height) {
      for (double theta = 0;; ) {
        const double r = kSpiralPitch * theta;
        if (r > r_max) break;
        const double x = cx + r * std::cos(theta + phase);
        const double y = cy + r * std::sin(theta + phase);
        const Box box{x - half_w, y - half_h, x + half_w, y + half_h};
        const bool inside = box.x0 >= 0 && box.y0 >= 0 && box.x1 <= canvas.width && box.y1 <= canvas.height;
        if (inside && std::none_of(spec.items.begin(), spec.items.end(),
                                   [&](const WordCloudItem& it) { return it.box.intersects(box); })) {
          placed = WordCloudItem{entry.term, weight, size, x, y, box};
          break;
        }
        theta += std::clamp(kArcStep / std::max(r, 1.0), 0.02, 0.5);
      }
    }
    if (placed) {
      spec.items.push_back(std::move(*placed));
    } else if (spec.items.empty()) {
      throw CanvasExhaustedError(entry.term);
    } else {
      spec.omitted.push_back(entry.term);
    }
  }
  return spec;
}

}  // namespace dramaturg::lexstats
