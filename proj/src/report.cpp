#include "dramaturg/report.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "dramaturg/canonical.hpp"
#include "dramaturg/error.hpp"
#include "dramaturg/lexicon.hpp"

namespace dramaturg::report {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::set<std::string> kConfigKeys = {
    "dehyphenate_linebreaks", "strip_control_chars", "collapse_whitespace", "drop_patterns",
    "speaker_label_policy",   "stoplist_path",       "window",              "include_partial_tail",
    "top_n",                  "ttr_policy",          "scorer",              "sentiment_lexicon",
    "emotion_lexicon",        "granularity",         "wordcloud"};

std::string read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_bytes(const fs::path& path, std::string_view data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw IoError("cannot write " + path.string());
}

fs::path resolve(const fs::path& p, const fs::path& base) {
  return (p.is_absolute() || base.empty()) ? p : base / p;
}

template <typename T>
T get_as(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

fs::path sentiment_lexicon_path(const AnalysisConfig& cfg) {
  return cfg.sentiment_lexicon.value_or(corpus::data_dir() / "lexicons" / "sentiment_fr.csv");
}

fs::path emotion_lexicon_path(const AnalysisConfig& cfg) {
  return cfg.emotion_lexicon.value_or(corpus::data_dir() / "lexicons" / "emotion_fr.csv");
}

fs::path stoplist_path(const AnalysisConfig& cfg) {
  return cfg.stoplist_path.value_or(corpus::data_dir() / "stoplist_fr.txt");
}

bool is_external(const AnalysisConfig& cfg) { return cfg.scorer.rfind("external:", 0) == 0; }

// Runs `body`, labelling any library error with `stage`.
template <typename F>
auto staged(const char* stage, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (Error& e) {
    if (e.stage().empty()) e.set_stage(stage);
    throw;
  }
}

json emotions_json(const EmotionScores& s) {
  json j = json::object();
  for (std::size_t i = 0; i < kEmotionCount; ++i) j[std::string(kEmotionNames[i])] = s[i];
  return j;
}

EmotionScores emotions_from_json(const json& j) {
  EmotionScores s{};
  for (std::size_t i = 0; i < kEmotionCount; ++i) s[i] = j.at(std::string(kEmotionNames[i])).get<double>();
  return s;
}

}  // namespace

AnalysisConfig config_from_json(const json& j, const fs::path& base_dir) {
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!kConfigKeys.count(it.key())) throw ConfigError("unknown configuration key '" + it.key() + "'");
  }
  AnalysisConfig cfg;
  if (j.contains("dehyphenate_linebreaks")) cfg.cleaning.dehyphenate_linebreaks = get_as<bool>(j, "dehyphenate_linebreaks");
  if (j.contains("strip_control_chars")) cfg.cleaning.strip_control_chars = get_as<bool>(j, "strip_control_chars");
  if (j.contains("collapse_whitespace")) cfg.cleaning.collapse_whitespace = get_as<bool>(j, "collapse_whitespace");
  if (j.contains("drop_patterns")) cfg.cleaning.drop_patterns = get_as<std::vector<std::string>>(j, "drop_patterns");
  if (j.contains("speaker_label_policy")) {
    const auto p = get_as<std::string>(j, "speaker_label_policy");
    if (p == "keep") {
      cfg.cleaning.speaker_label_policy = corpus::SpeakerLabelPolicy::keep;
    } else if (p == "drop") {
      cfg.cleaning.speaker_label_policy = corpus::SpeakerLabelPolicy::drop;
    } else {
      throw ConfigError("speaker_label_policy must be 'keep' or 'drop'");
    }
  }
  if (j.contains("stoplist_path")) cfg.stoplist_path = resolve(get_as<std::string>(j, "stoplist_path"), base_dir);
  if (j.contains("window")) {
    const auto w = get_as<std::int64_t>(j, "window");
    if (w < 1) throw ConfigError("window must be at least 1");
    cfg.window = static_cast<std::size_t>(w);
  }
  if (j.contains("include_partial_tail")) cfg.include_partial_tail = get_as<bool>(j, "include_partial_tail");
  if (j.contains("top_n")) {
    const auto n = get_as<std::int64_t>(j, "top_n");
    if (n < 1) throw ConfigError("top_n must be at least 1");
    cfg.top_n = static_cast<std::size_t>(n);
  }
  if (j.contains("ttr_policy")) cfg.ttr_policy = lexstats::parse_counting_policy(get_as<std::string>(j, "ttr_policy"));
  if (j.contains("scorer")) cfg.scorer = get_as<std::string>(j, "scorer");
  if (j.contains("sentiment_lexicon")) cfg.sentiment_lexicon = resolve(get_as<std::string>(j, "sentiment_lexicon"), base_dir);
  if (j.contains("emotion_lexicon")) cfg.emotion_lexicon = resolve(get_as<std::string>(j, "emotion_lexicon"), base_dir);
  if (j.contains("granularity")) {
    const auto g = get_as<std::string>(j, "granularity");
    if (g == "sentence") {
      cfg.granularity = affect::Granularity::sentence;
    } else if (g == "segment") {
      cfg.granularity = affect::Granularity::segment;
    } else {
      throw ConfigError("granularity must be 'sentence' or 'segment'");
    }
  }
  if (j.contains("wordcloud")) {
    const auto& wc = j.at("wordcloud");
    if (!wc.is_object()) throw ConfigError("'wordcloud' must be an object");
    for (const auto& [key, _] : wc.items()) {
      if (key != "width" && key != "height" && key != "seed") throw ConfigError("unknown config key 'wordcloud." + key + "'");
    }
    if (wc.contains("width")) cfg.canvas.width = get_as<double>(wc, "width");
    if (wc.contains("height")) cfg.canvas.height = get_as<double>(wc, "height");
    if (wc.contains("seed")) cfg.seed = get_as<std::uint32_t>(wc, "seed");
    if (!(cfg.canvas.width > 0 && cfg.canvas.height > 0)) throw ConfigError("word-cloud canvas must be positive");
  }
  if (cfg.scorer != "lexicon" && !is_external(cfg)) {
    throw ConfigError("scorer must be 'lexicon' or 'external:<endpoint>'");
  }
  return cfg;
}

AnalysisConfig load_config(const fs::path& path) {
  json j;
  try {
    j = json::parse(read_bytes(path));
  } catch (const json::parse_error& e) {
    throw ConfigError("malformed config " + path.string() + ": " + e.what());
  }
  return config_from_json(j, path.parent_path());
}

json to_json(const AnalysisConfig& cfg) {
  json j;
  j["dehyphenate_linebreaks"] = cfg.cleaning.dehyphenate_linebreaks;
  j["strip_control_chars"] = cfg.cleaning.strip_control_chars;
  j["collapse_whitespace"] = cfg.cleaning.collapse_whitespace;
  j["drop_patterns"] = cfg.cleaning.drop_patterns;
  j["speaker_label_policy"] = cfg.cleaning.speaker_label_policy == corpus::SpeakerLabelPolicy::keep ? "keep" : "drop";
  j["stoplist_path"] = stoplist_path(cfg).string();
  j["window"] = cfg.window;
  j["include_partial_tail"] = cfg.include_partial_tail;
  j["top_n"] = cfg.top_n;
  j["ttr_policy"] = lexstats::to_string(cfg.ttr_policy);
  j["scorer"] = cfg.scorer;
  j["sentiment_lexicon"] = sentiment_lexicon_path(cfg).string();
  j["emotion_lexicon"] = emotion_lexicon_path(cfg).string();
  j["granularity"] = cfg.granularity == affect::Granularity::segment ? "segment" : "sentence";
  j["wordcloud"] = {{"width", cfg.canvas.width}, {"height", cfg.canvas.height}, {"seed", cfg.seed}};
  return j;
}

std::string config_fingerprint(std::string_view input_bytes, const AnalysisConfig& cfg,
                               const bridge::Handshake* scorer) {
  json f;
  f["format"] = kReportFormat;
  json c = to_json(cfg);
  // resources are identified by content, not location
  c["stoplist_path"] = canonical::sha256_hex(read_bytes(stoplist_path(cfg)));
  if (is_external(cfg)) {
    c.erase("sentiment_lexicon");
    c.erase("emotion_lexicon");
  } else {
    c["sentiment_lexicon"] = canonical::sha256_hex(read_bytes(sentiment_lexicon_path(cfg)));
    c["emotion_lexicon"] = canonical::sha256_hex(read_bytes(emotion_lexicon_path(cfg)));
  }
  f["config"] = std::move(c);
  if (scorer) {
    json caps = json::array();
    for (auto t : scorer->capabilities) caps.push_back(std::string(bridge::name_of(t)));
    f["scorer"] = {{"model", scorer->model}, {"protocol", scorer->protocol_version}, {"capabilities", caps}};
  }
  f["input"] = canonical::sha256_hex(input_bytes);
  return canonical::sha256_hex(canonical::dump(f));
}

json to_json(const PlayReport& r) {
  json j;
  j["format"] = kReportFormat;
  j["title"] = r.title;
  j["config_fingerprint"] = r.config_fingerprint;
  j["compat"] = {{"window", r.compat.window},
                 {"sentiment_scorer", r.compat.sentiment_scorer},
                 {"emotion_scorer", r.compat.emotion_scorer},
                 {"ttr_policy", r.compat.ttr_policy}};
  j["lexical"] = {{"token_count", r.lexical.token_count},
                  {"type_count", r.lexical.type_count},
                  {"ttr", r.lexical.ttr},
                  {"policy", lexstats::to_string(r.lexical.policy)}};
  json entries = json::array();
  for (const auto& e : r.frequencies.entries) entries.push_back({{"term", e.term}, {"count", e.count}});
  j["frequencies"] = {{"top_n", r.top_n}, {"total", r.frequencies.total}, {"entries", std::move(entries)}};
  json segments = json::array();
  for (std::size_t i = 0; i < r.segments.size(); ++i) {
    segments.push_back({{"index", i}, {"word_count", r.segments[i].word_count}, {"partial", r.segments[i].is_partial}});
  }
  j["segments"] = std::move(segments);
  json points = json::array();
  for (const auto& p : r.arc.points) {
    json pj;
    pj["segment"] = p.segment_index;
    pj["valence"] = p.valence ? json(p.valence->value()) : json(nullptr);
    pj["emotions"] = p.emotions ? emotions_json(p.emotions->scores) : json(nullptr);
    pj["no_signal"] = p.emotions ? json(p.emotions->no_signal) : json(nullptr);
    points.push_back(std::move(pj));
  }
  j["arc"] = {{"window", r.arc.window}, {"points", std::move(points)}};
  j["percentages"] = r.percentages ? emotions_json(*r.percentages) : json(nullptr);
  if (r.tension) {
    j["tension"] = {{"final_third_delta", r.tension->final_third_delta},
                    {"peak_negativity_index", r.tension->peak_negativity_index},
                    {"mean_valence", r.tension->mean_valence}};
  } else {
    j["tension"] = nullptr;
  }
  j["wordcloud"] = {{"width", r.canvas.width}, {"height", r.canvas.height}, {"seed", r.seed}};
  return j;
}

PlayReport play_report_from_json(const json& j) {
  try {
    if (j.at("format").get<std::string>() != kReportFormat) {
      throw ConfigError("unsupported report format '" + j.at("format").get<std::string>() + "'");
    }
    PlayReport r;
    r.title = j.at("title").get<std::string>();
    r.config_fingerprint = j.at("config_fingerprint").get<std::string>();
    const auto& c = j.at("compat");
    r.compat = {c.at("window").get<std::size_t>(), c.at("sentiment_scorer").get<std::string>(),
                c.at("emotion_scorer").get<std::string>(), c.at("ttr_policy").get<std::string>()};
    const auto& lex = j.at("lexical");
    r.lexical.token_count = lex.at("token_count").get<std::size_t>();
    r.lexical.type_count = lex.at("type_count").get<std::size_t>();
    r.lexical.ttr = lex.at("ttr").get<double>();
    r.lexical.policy = lexstats::parse_counting_policy(lex.at("policy").get<std::string>());
    r.lexical.title = r.title;
    const auto& freq = j.at("frequencies");
    r.top_n = freq.at("top_n").get<std::size_t>();
    r.frequencies.total = freq.at("total").get<std::size_t>();
    for (const auto& e : freq.at("entries")) {
      r.frequencies.entries.push_back({e.at("term").get<std::string>(), e.at("count").get<std::size_t>()});
    }
    for (const auto& s : j.at("segments")) {
      r.segments.push_back({s.at("word_count").get<std::size_t>(), s.at("partial").get<bool>()});
    }
    const auto& arc = j.at("arc");
    r.arc.play = r.title;
    r.arc.window = arc.at("window").get<std::size_t>();
    for (const auto& pj : arc.at("points")) {
      affect::ArcPoint p;
      p.segment_index = pj.at("segment").get<std::size_t>();
      if (!pj.at("valence").is_null()) p.valence = affect::Valence(pj.at("valence").get<double>());
      if (!pj.at("emotions").is_null()) {
        p.emotions = affect::EmotionProfile{emotions_from_json(pj.at("emotions")), pj.at("no_signal").get<bool>()};
      }
      r.arc.points.push_back(std::move(p));
    }
    if (!j.at("percentages").is_null()) r.percentages = emotions_from_json(j.at("percentages"));
    if (!j.at("tension").is_null()) {
      const auto& t = j.at("tension");
      r.tension = affect::TensionMetrics{t.at("final_third_delta").get<double>(),
                                         t.at("peak_negativity_index").get<std::size_t>(),
                                         t.at("mean_valence").get<double>()};
    }
    const auto& wc = j.at("wordcloud");
    r.canvas = {wc.at("width").get<double>(), wc.at("height").get<double>()};
    r.seed = wc.at("seed").get<std::uint32_t>();
    return r;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed report: ") + e.what());
  } catch (const std::out_of_range& e) {
    throw ConfigError(std::string("malformed report: ") + e.what());
  }
}

PlayReport load_report(const fs::path& path) {
  try {
    return play_report_from_json(json::parse(read_bytes(path)));
  } catch (const json::parse_error& e) {
    throw ConfigError("malformed report " + path.string() + ": " + e.what());
  }
}

std::optional<Emotion> dominant_emotion(const PlayReport& r) {
  if (!r.percentages) return std::nullopt;
  std::size_t best = 0;
  for (std::size_t i = 1; i < kEmotionCount; ++i) {
    if ((*r.percentages)[i] > (*r.percentages)[best]) best = i;
  }
  return kEmotions[best];
}

AnalyzeResult analyze_play(const fs::path& input, const AnalysisConfig& cfg, const AnalyzeOptions& opts) {
  const std::string raw = staged("clean", [&] { return read_bytes(input); });
  const std::string title = opts.title.value_or(input.stem().string());

  // An external scorer is contacted up front: its model identity is part of
  // the fingerprint.
  std::shared_ptr<bridge::ScorerClient> client;
  if (is_external(cfg)) {
    client = staged("score", [&] {
      return std::make_shared<bridge::ScorerClient>(
          bridge::open_scorer(cfg.scorer.substr(std::string_view("external:").size()), opts.client));
    });
  }
  const std::string fingerprint = staged("clean", [&] {
    return config_fingerprint(raw + '\0' + title, cfg, client ? &client->handshake() : nullptr);
  });
  fs::path cache_file;
  if (opts.cache_dir) {
    cache_file = *opts.cache_dir / (fingerprint + ".json");
    if (fs::exists(cache_file)) {
      auto cached = staged("report", [&] { return load_report(cache_file); });
      if (cached.config_fingerprint == fingerprint) return {std::move(cached), true};
    }
  }

  auto doc = staged("clean", [&] {
    return std::make_shared<const corpus::RawDocument>(corpus::make_document(title, raw, input));
  });
  const auto stoplist = staged("tokenize", [&] { return corpus::load_stoplist(stoplist_path(cfg)); });
  corpus::TokenizedPlay play;
  play.document = doc;
  play.cleaned_text = staged("clean", [&] { return corpus::clean_text(*doc, cfg.cleaning); });
  staged("tokenize", [&] {
    play.tokens = corpus::tokenize(play.cleaned_text, stoplist);
    play.sentences = corpus::split_sentences(play.tokens);
  });
  const auto segments = staged("segment", [&] {
    const corpus::SegmentationConfig seg_cfg(cfg.window, cfg.include_partial_tail);
    auto segs = corpus::segment_tokens(play, seg_cfg);
    const auto words = std::accumulate(segs.begin(), segs.end(), std::size_t{0},
                                       [](std::size_t n, const auto& s) { return n + s.word_count; });
    if (words == 0) throw EmptyScopeError("empty scope: no words to segment in " + input.string());
    return segs;
  });

  PlayReport r;
  r.title = title;
  r.config_fingerprint = fingerprint;
  r.top_n = cfg.top_n;
  r.canvas = cfg.canvas;
  r.seed = cfg.seed;
  staged("report", [&] {
    r.lexical = lexstats::type_token_ratio(play.tokens, cfg.ttr_policy);
    r.lexical.title = title;
    r.frequencies = lexstats::word_frequencies(play.tokens, stoplist, cfg.top_n);
  });
  for (const auto& s : segments) r.segments.push_back({s.word_count, s.is_partial});

  staged("score", [&] {
    std::unique_ptr<affect::SentimentScorer> sentiment;
    std::unique_ptr<affect::EmotionScorer> emotion;
    if (client) {
      if (client->supports(bridge::Task::sentiment)) sentiment = std::make_unique<bridge::ExternalSentimentScorer>(client);
      if (client->supports(bridge::Task::emotion)) emotion = std::make_unique<bridge::ExternalEmotionScorer>(client);
    } else {
      sentiment = affect::make_lexicon_sentiment_scorer(
          {affect::ScorerKind::lexicon_sentiment, sentiment_lexicon_path(cfg).string(), cfg.granularity});
      emotion = affect::make_lexicon_emotion_scorer(
          {affect::ScorerKind::lexicon_emotion, emotion_lexicon_path(cfg).string(), cfg.granularity});
    }
    r.compat = {cfg.window, sentiment ? sentiment->identity() : std::string{},
                emotion ? emotion->identity() : std::string{}, lexstats::to_string(cfg.ttr_policy)};
    r.arc = affect::build_arc(play, segments, cfg.window, sentiment.get(), emotion.get());
  });

  try {
    r.percentages = affect::emotion_percentages(r.arc);
  } catch (const NoEmotionalSignalError&) {
  }
  try {
    r.tension = affect::tension_metrics(r.arc);
  } catch (const ArcTooShortError&) {
  }

  return staged("report", [&] {
    const std::string text = canonical::dump(to_json(r));
    if (opts.cache_dir) {
      std::error_code ec;
      fs::create_directories(*opts.cache_dir, ec);
      if (ec) throw IoError("cannot create cache directory " + opts.cache_dir->string());
      // write-then-rename so concurrent workers never observe partial files
      const auto tmp = cache_file.string() + ".tmp" + std::to_string(std::hash<std::string>{}(title));
      write_bytes(tmp, text);
      fs::rename(tmp, cache_file, ec);
      if (ec) throw IoError("cannot write cache entry " + cache_file.string());
    }
    return AnalyzeResult{play_report_from_json(json::parse(text)), false};
  });
}

ComparativeReport compare_plays(std::span<const PlayReport> reports) {
  if (reports.size() < 2) throw ConfigError("comparison needs at least two reports");
  std::vector<std::string> differing;
  const auto& ref = reports.front().compat;
  for (const auto& r : reports.subspan(1)) {
    auto note = [&](const char* key, bool same) {
      if (!same && std::find(differing.begin(), differing.end(), key) == differing.end()) differing.emplace_back(key);
    };
    note("window", r.compat.window == ref.window);
    note("sentiment_scorer", r.compat.sentiment_scorer == ref.sentiment_scorer);
    note("emotion_scorer", r.compat.emotion_scorer == ref.emotion_scorer);
    note("ttr_policy", r.compat.ttr_policy == ref.ttr_policy);
  }
  if (!differing.empty()) throw IncompatibleReportsError(differing);

  ComparativeReport c;
  std::vector<const PlayReport*> order;
  for (const auto& r : reports) {
    c.plays.push_back(r.title);
    order.push_back(&r);
    c.dominant_emotion[r.title] = dominant_emotion(r);
  }

  std::stable_sort(order.begin(), order.end(), [](const PlayReport* a, const PlayReport* b) {
    return a->lexical.ttr != b->lexical.ttr ? a->lexical.ttr > b->lexical.ttr : a->title < b->title;
  });
  for (const auto* r : order) c.ttr_ranking.push_back(r->title);

  std::stable_sort(order.begin(), order.end(), [](const PlayReport* a, const PlayReport* b) {
    if (a->tension.has_value() != b->tension.has_value()) return a->tension.has_value();
    if (a->tension && a->tension->final_third_delta != b->tension->final_third_delta) {
      return a->tension->final_third_delta > b->tension->final_third_delta;
    }
    return a->title < b->title;
  });
  for (const auto* r : order) c.tension_ranking.push_back(r->title);

  std::set<std::string> shared;
  for (const auto& e : reports.front().frequencies.entries) shared.insert(e.term);
  for (const auto& r : reports.subspan(1)) {
    std::set<std::string> terms;
    for (const auto& e : r.frequencies.entries) {
      if (shared.count(e.term)) terms.insert(e.term);
    }
    shared = std::move(terms);
  }
  c.shared_top_terms.assign(shared.begin(), shared.end());
  return c;
}

json to_json(const ComparativeReport& c) {
  json j;
  j["format"] = "dramaturg.comparison/1";
  j["plays"] = c.plays;
  j["ttr_ranking"] = c.ttr_ranking;
  j["tension_ranking"] = c.tension_ranking;
  j["shared_top_terms"] = c.shared_top_terms;
  json dom = json::object();
  for (const auto& [title, e] : c.dominant_emotion) dom[title] = e ? json(std::string(name_of(*e))) : json(nullptr);
  j["dominant_emotion"] = std::move(dom);
  return j;
}

}  // namespace dramaturg::report
