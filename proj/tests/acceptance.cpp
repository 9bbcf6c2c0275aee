// Acceptance run: one PASS/FAIL line per criterion, each under its own time
// limit. Exit status is non-zero when any line fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dramaturg/affect.hpp"
#include "dramaturg/corpus.hpp"
#include "dramaturg/error.hpp"
#include "dramaturg/lexicon.hpp"
#include "dramaturg/lexstats.hpp"
#include "dramaturg/render.hpp"
#include "dramaturg/report.hpp"
#include "dramaturg/scorer_bridge.hpp"
#include "support/oracles.hpp"
#include "support/scripted.hpp"

namespace fs = std::filesystem;
using namespace dramaturg;

namespace {

const fs::path kFixtures = DRAMATURG_FIXTURES;
const fs::path kSynthetic = kFixtures / "synthetic";
const fs::path kGolden = DRAMATURG_GOLDEN;
const std::string kMock = MOCK_SCORER;

// Collects the first few failure messages of a criterion.
class Verdict {
 public:
  void expect(bool ok, const std::string& what) {
    ++checks_;
    if (ok) return;
    if (failures_.size() < 5) failures_.push_back(what);
    ++failed_;
  }
  void note(std::string s) { notes_ = std::move(s); }
  bool ok() const { return failed_ == 0; }
  std::string summary() const {
    std::ostringstream os;
    os << checks_ << " checks";
    if (!notes_.empty()) os << ", " << notes_;
    for (const auto& f : failures_) os << "\n    - " << f;
    if (failed_ > failures_.size()) os << "\n    - ... " << failed_ - failures_.size() << " more";
    return os.str();
  }

 private:
  std::size_t checks_ = 0;
  std::size_t failed_ = 0;
  std::vector<std::string> failures_;
  std::string notes_;
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// oracle equivalence

struct Vocab {
  std::string surface;
  std::string lower;
};

const std::vector<Vocab> kWords = {
    {"homme", "homme"}, {"Homme", "homme"}, {"HOMME", "homme"}, {"désir", "désir"}, {"Désir", "désir"},
    {"DÉSIR", "désir"}, {"été", "été"},     {"Été", "été"},     {"ÉTÉ", "été"},     {"froid", "froid"},
    {"nuit", "nuit"},   {"Nuit", "nuit"},   {"rue", "rue"},     {"main", "main"},   {"cœur", "cœur"},
    {"Œil", "œil"},     {"garçon", "garçon"}, {"ça", "ça"},     {"où", "où"},       {"lèvre", "lèvre"},
    {"île", "île"},     {"Noël", "noël"},   {"vent", "vent"},   {"heure", "heure"}, {"animal", "animal"},
    {"le", "le"},       {"Le", "le"},       {"la", "la"},       {"de", "de"},       {"et", "et"},
    {"vous", "vous"},   {"Vous", "vous"},   {"je", "je"},       {"il", "il"},       {"que", "que"},
};
const std::vector<std::string> kElided = {"l'", "L'", "d'", "D'", "qu'", "l’", "d’", "j'", "n'", "s'"};
const std::vector<std::string> kElisionTargets = {"homme", "Homme", "été", "heure", "animal", "enfant", "œil", "île"};
const std::vector<std::string> kNonAlpha = {",", ".", "!", "?", "…", "«", "»", "—", ";", ":", "12", "1988", "(", ")"};

// Builds text chunk by chunk while recording the word sequence the text is
// meant to contain.
struct Corpus {
  std::string text;
  std::vector<oracle::Word> words;
};

Corpus random_corpus(std::mt19937& rng, std::size_t target_tokens) {
  Corpus c;
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  auto add = [&](const std::string& surface, const std::string& lower, bool alpha) {
    if (!c.text.empty()) c.text += (pick(12) == 0 ? "\n" : " ");
    c.text += surface;
    c.words.push_back({lower, alpha});
  };
  // distinct rare words keep the type count from saturating
  std::size_t rare = 0;
  auto rare_word = [&] {
    std::string w = "mot";
    for (std::size_t k = ++rare; k > 0; k /= 26) w += static_cast<char>('a' + k % 26);
    return w;
  };
  while (c.words.size() < target_tokens) {
    const auto roll = pick(100);
    if (roll < 55) {
      const auto& w = kWords[pick(kWords.size())];
      add(w.surface, w.lower, true);
    } else if (roll < 65) {
      const auto w = rare_word();
      add(w, w, true);
    } else if (roll < 75 && c.words.size() + 2 <= target_tokens) {
      const auto& clitic = kElided[pick(kElided.size())];
      const auto& target = kElisionTargets[pick(kElisionTargets.size())];
      std::string lower_clitic;
      for (char ch : clitic) lower_clitic += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
      if (lower_clitic.size() > 2 && lower_clitic.substr(lower_clitic.size() - 3) == "\xE2\x80\x99") {
        lower_clitic = lower_clitic.substr(0, lower_clitic.size() - 3) + "'";
      }
      std::string lower_target = target == "Homme" ? "homme" : target;
      if (!c.text.empty()) c.text += ' ';
      c.text += clitic + target;
      c.words.push_back({lower_clitic, true});
      c.words.push_back({lower_target, true});
    } else if (roll < 80 && c.words.size() + 3 <= target_tokens) {
      if (!c.text.empty()) c.text += ' ';
      c.text += pick(2) ? "peut-être" : "Peut-être";
      c.words.push_back({"peut", true});
      c.words.push_back({"-", false});
      c.words.push_back({"être", true});
    } else {
      add(kNonAlpha[pick(kNonAlpha.size())], "", false);
    }
  }
  return c;
}

void oracle_equivalence(Verdict& v) {
  std::mt19937 rng(1729);
  const corpus::Stoplist stop_lib{"le", "la", "de", "et", "l'", "d'", "que", "je", "il"};
  const std::set<std::string> stop(stop_lib.begin(), stop_lib.end());
  std::size_t largest = 0;
  constexpr std::size_t kCorpora = 120;
  for (std::size_t i = 0; i < kCorpora; ++i) {
    std::size_t size = std::uniform_int_distribution<std::size_t>(1, 10000)(rng);
    if (i == 0) size = 10000;
    if (i == 1) size = 1;
    const auto c = random_corpus(rng, size);
    largest = std::max(largest, c.words.size());
    const std::string tag = "corpus " + std::to_string(i) + ": ";

    const auto tokens = corpus::tokenize(c.text, stop_lib);
    bool same_tokens = tokens.size() == c.words.size();
    for (std::size_t k = 0; same_tokens && k < tokens.size(); ++k) {
      same_tokens = tokens[k].is_alpha == c.words[k].alpha && (!c.words[k].alpha || tokens[k].lower == c.words[k].lower);
    }
    v.expect(same_tokens, tag + "token stream differs from the generated words");

    const auto [n_all, t_all] = oracle::ttr_counts(c.words);
    if (n_all > 0) {
      const auto s = lexstats::type_token_ratio(tokens, lexstats::CountingPolicy::alpha_all);
      v.expect(s.token_count == n_all && s.type_count == t_all, tag + "alpha_all counts " +
                                                                   std::to_string(s.token_count) + "/" +
                                                                   std::to_string(s.type_count));
      v.expect(s.ttr == static_cast<double>(t_all) / static_cast<double>(n_all), tag + "alpha_all ratio");
    }
    const auto [n_ns, t_ns] = oracle::ttr_counts(c.words, stop);
    if (n_ns > 0) {
      const auto s = lexstats::type_token_ratio(tokens, lexstats::CountingPolicy::alpha_nonstop);
      v.expect(s.token_count == n_ns && s.type_count == t_ns, tag + "alpha_nonstop counts");
      v.expect(s.ttr == static_cast<double>(t_ns) / static_cast<double>(n_ns), tag + "alpha_nonstop ratio");
    } else {
      bool threw = false;
      try {
        lexstats::type_token_ratio(tokens, lexstats::CountingPolicy::alpha_nonstop);
      } catch (const EmptyScopeError&) {
        threw = true;
      }
      v.expect(threw, tag + "empty scope not reported");
    }

    const std::size_t top_n = std::uniform_int_distribution<std::size_t>(1, 25)(rng);
    const auto expected = oracle::top_terms(c.words, stop, top_n);
    const auto table = lexstats::word_frequencies(tokens, stop_lib, top_n);
    bool same_table = table.entries.size() == expected.size();
    std::size_t total = 0;
    for (std::size_t k = 0; k < expected.size(); ++k) {
      total += expected[k].second;
      if (same_table) {
        same_table = table.entries[k].term == expected[k].first && table.entries[k].count == expected[k].second;
      }
    }
    v.expect(same_table && table.total == total, tag + "top-" + std::to_string(top_n) + " table differs");
  }
  v.note(std::to_string(kCorpora) + " corpora, largest " + std::to_string(largest) + " tokens");
}

// ---------------------------------------------------------------------------
// segmentation invariants

void segmentation_invariants(Verdict& v) {
  std::mt19937 rng(150);
  std::vector<std::size_t> lengths{0, 1, 149, 150, 151, 299, 300, 301, 10000};
  while (lengths.size() < 200) lengths.push_back(std::uniform_int_distribution<std::size_t>(0, 10000)(rng));

  for (std::size_t li = 0; li < lengths.size(); ++li) {
    const std::size_t len = lengths[li];
    const double p_alpha = li % 17 == 5 ? 0.0 : std::uniform_real_distribution<double>(0.3, 1.0)(rng);
    std::vector<corpus::Token> tokens(len);
    std::size_t alpha = 0;
    for (auto& t : tokens) {
      t.is_alpha = std::bernoulli_distribution(p_alpha)(rng);
      t.surface = t.lower = t.is_alpha ? "mot" : ",";
      alpha += t.is_alpha;
    }
    const std::string tag = "length " + std::to_string(len) + ": ";

    for (bool partial_tail : {true, false}) {
      const auto segs = corpus::segment_tokens(tokens, corpus::SegmentationConfig(150, partial_tail));
      if (len == 0) {
        v.expect(segs.empty(), tag + "empty input gives segments");
        continue;
      }
      std::size_t expect_begin = 0, words = 0;
      for (std::size_t s = 0; s < segs.size(); ++s) {
        const auto& seg = segs[s];
        const bool last = s + 1 == segs.size();
        v.expect(seg.index == s, tag + "index gap");
        v.expect(seg.token_range.begin == expect_begin, tag + "ranges not contiguous");
        expect_begin = seg.token_range.end;
        std::size_t counted = 0;
        for (std::size_t k = seg.token_range.begin; k < seg.token_range.end; ++k) counted += tokens[k].is_alpha;
        v.expect(counted == seg.word_count, tag + "word_count disagrees with the range");
        v.expect(s == 0 || tokens[seg.token_range.begin].is_alpha, tag + "segment starts on punctuation");
        if (!last) v.expect(seg.word_count == 150 && !seg.is_partial, tag + "non-final segment not full");
        v.expect(seg.is_partial == (seg.word_count < 150), tag + "is_partial flag wrong");
        v.expect(seg.word_count <= 150, tag + "segment over window");
        if (!partial_tail) v.expect(!seg.is_partial, tag + "partial tail kept");
        words += seg.word_count;
      }
      if (partial_tail) {
        v.expect(expect_begin == len, tag + "segments do not cover every token");
        v.expect(words == alpha, tag + "word total differs");
        v.expect(segs.size() == std::max<std::size_t>(1, (alpha + 149) / 150), tag + "segment count");
      } else {
        v.expect(words == alpha / 150 * 150, tag + "full segments lose words");
      }
    }
  }
  v.note(std::to_string(lengths.size()) + " token lists, lengths 0..10000");
}

// ---------------------------------------------------------------------------
// golden pipeline

void golden_pipeline(Verdict& v) {
  oracle::TempDir tmp;
  const auto cfg = report::load_config(kSynthetic / "config.json");
  report::AnalyzeOptions opts;
  opts.cache_dir = tmp / "cache";
  const auto result = report::analyze_play(kSynthetic / "synthetic_play.txt", cfg, opts);
  const auto& r = result.report;
  const auto out = tmp / "out";
  render::render_play(r, {render::Format::json, render::Format::csv, render::Format::svg}, out);
  for (const char* name : {"report.json", "arc.csv", "frequencies.csv", "arc.svg", "emotions.svg", "wordcloud.svg"}) {
    const auto golden = oracle::read_file(kGolden / "synthetic_play" / name);
    v.expect(!golden.empty() && oracle::read_file(out / name) == golden, std::string(name) + " differs from golden");
  }

  // values written with 6 decimals
  constexpr double kQuantum = 5e-7 + 1e-12;
  const auto expected = nlohmann::json::parse(oracle::read_file(kSynthetic / "expected.json"));
  v.expect(r.arc.points.size() == expected["points"].size(), "segment count");
  for (std::size_t i = 0; i < std::min(r.arc.points.size(), expected["points"].size()); ++i) {
    const auto& e = expected["points"][i];
    const auto& p = r.arc.points[i];
    v.expect(p.valence && std::abs(p.valence->value() - e["valence"].get<double>()) <= kQuantum,
             "valence of segment " + std::to_string(i));
    v.expect(p.emotions && p.emotions->no_signal == e["no_signal"].get<bool>(), "no_signal of segment " + std::to_string(i));
    for (std::size_t k = 0; p.emotions && k < kEmotionCount; ++k) {
      v.expect(std::abs(p.emotions->scores[k] - e["emotions"][std::string(kEmotionNames[k])].get<double>()) <= kQuantum,
               "emotion " + std::string(kEmotionNames[k]) + " of segment " + std::to_string(i));
    }
  }
  v.expect(r.percentages.has_value(), "percentages missing");
  for (std::size_t k = 0; r.percentages && k < kEmotionCount; ++k) {
    v.expect(std::abs((*r.percentages)[k] - expected["percentages"][std::string(kEmotionNames[k])].get<double>()) <= kQuantum,
             "percentage " + std::string(kEmotionNames[k]));
  }
  v.expect(r.tension && std::abs(r.tension->final_third_delta - expected["tension"]["final_third_delta"].get<double>()) <= kQuantum,
           "final-third delta");
  v.expect(r.tension && r.tension->peak_negativity_index == expected["tension"]["peak_negativity_index"].get<std::size_t>(),
           "peak negativity index");
  v.expect(r.lexical.token_count == expected["word_count"].get<std::size_t>() &&
               r.lexical.type_count == expected["type_count"].get<std::size_t>(),
           "ttr counts");
  v.expect(r.frequencies.entries.size() == expected["frequencies"].size(), "frequency table size");
  for (std::size_t k = 0; k < std::min(r.frequencies.entries.size(), expected["frequencies"].size()); ++k) {
    v.expect(r.frequencies.entries[k].term == expected["frequencies"][k]["term"].get<std::string>() &&
                 r.frequencies.entries[k].count == expected["frequencies"][k]["count"].get<std::size_t>(),
             "frequency row " + std::to_string(k));
  }

  // Lexicon arithmetic: two hits at +1 and one at -1 give p = 1/3.
  affect::LexiconSentimentScorer scorer(affect::SentimentLexicon::parse("term,polarity\nbon,1\nmauvais,-1\n"));
  const std::vector<std::string> unit{"C'est bon, très bon, puis mauvais."};
  const double got = scorer.score_units(unit).at(0).value();
  const double want = (1.0 / 3.0 + 1.0) / 2.0;
  v.expect(std::abs(got - want) < 1e-9, "p=1/3 valence " + num(got));
  v.expect(std::abs(got - 0.66667) < 5e-6, "p=1/3 valence not 0.66667 at five places");
  v.note("6 files byte-identical, valence(p=1/3)=" + num(got));
}

// ---------------------------------------------------------------------------
// injected tension

// Twelve 150-word segments of fifteen 10-word sentences. Each listed count is
// the number of sentences in that segment carrying one strongly negative word.
std::string tension_play(std::mt19937& rng, const std::vector<int>& negatives_per_segment) {
  static const std::vector<std::string> filler = {
      "table", "chaise", "route", "ville", "porte", "mur",   "fenêtre", "chemin", "pierre", "sable",
      "bois",  "verre",  "carte", "plage", "train", "livre", "papier",  "lampe",  "jardin", "place"};
  std::string text;
  for (int negatives : negatives_per_segment) {
    std::vector<int> sentence_ids(15);
    std::iota(sentence_ids.begin(), sentence_ids.end(), 0);
    std::shuffle(sentence_ids.begin(), sentence_ids.end(), rng);
    const std::set<int> dark(sentence_ids.begin(), sentence_ids.begin() + negatives);
    for (int s = 0; s < 15; ++s) {
      const int slot = dark.count(s) ? std::uniform_int_distribution<int>(1, 9)(rng) : -1;
      for (int w = 0; w < 10; ++w) {
        std::string word = w == slot ? "colère" : filler[std::uniform_int_distribution<std::size_t>(0, filler.size() - 1)(rng)];
        if (w == 0) word[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(word[0])));
        text += word;
        text += w == 9 ? ".\n" : " ";
      }
    }
  }
  return text;
}

void injected_tension(Verdict& v) {
  oracle::TempDir tmp;
  report::AnalysisConfig cfg;
  cfg.sentiment_lexicon = kSynthetic / "sentiment.csv";
  cfg.emotion_lexicon = kSynthetic / "emotion.csv";
  std::mt19937 rng(303);
  double min_delta = 1e9, max_uniform = 0;
  for (int trial = 0; trial < 4; ++trial) {
    const std::vector<int> uniform(12, 4);
    std::vector<int> doubled(12, 4);
    for (std::size_t s = 8; s < 12; ++s) doubled[s] = 8;

    const auto u_path = tmp / ("uniform_" + std::to_string(trial) + ".txt");
    const auto d_path = tmp / ("doubled_" + std::to_string(trial) + ".txt");
    oracle::write_file(u_path, tension_play(rng, uniform));
    oracle::write_file(d_path, tension_play(rng, doubled));
    const auto u = report::analyze_play(u_path, cfg).report;
    const auto d = report::analyze_play(d_path, cfg).report;
    v.expect(u.arc.points.size() == 12 && d.arc.points.size() == 12, "expected 12 segments");
    v.expect(u.tension && std::abs(u.tension->final_third_delta) < 1e-9,
             "uniform play delta " + (u.tension ? num(u.tension->final_third_delta) : std::string("missing")));
    v.expect(d.tension && d.tension->final_third_delta > 0,
             "injected play delta " + (d.tension ? num(d.tension->final_third_delta) : std::string("missing")));
    if (d.tension) min_delta = std::min(min_delta, d.tension->final_third_delta);
    if (u.tension) max_uniform = std::max(max_uniform, std::abs(u.tension->final_third_delta));
    // every dark sentence scores 0, the rest 0.5: negativity 1 - 11/30 vs 1 - 7/30
    v.expect(d.tension && std::abs(d.tension->final_third_delta - 4.0 / 30.0) <= 5e-7 + 1e-12, "injected delta magnitude");
  }
  v.note("min injected delta " + num(min_delta) + ", max |uniform delta| " + num(max_uniform));
}

// ---------------------------------------------------------------------------
// affect invariants

void check_arc(Verdict& v, std::mt19937& rng, const affect::AffectArc& arc, const std::string& tag) {
  bool any_signal = false;
  for (const auto& p : arc.points) {
    const auto& e = *p.emotions;
    const double sum = std::accumulate(e.scores.begin(), e.scores.end(), 0.0);
    bool nonneg = std::all_of(e.scores.begin(), e.scores.end(), [](double x) { return x >= 0; });
    v.expect(nonneg, tag + "negative score");
    v.expect(e.no_signal || std::abs(sum - 1.0) <= 1e-9, tag + "profile sums to " + num(sum));
    any_signal = any_signal || !e.no_signal;
  }
  if (!any_signal) {
    bool threw = false;
    try {
      affect::emotion_percentages(arc);
    } catch (const NoEmotionalSignalError&) {
      threw = true;
    }
    v.expect(threw, tag + "all-no-signal arc not flagged");
    return;
  }
  const auto pct = affect::emotion_percentages(arc);
  const double total = std::accumulate(pct.begin(), pct.end(), 0.0);
  v.expect(std::abs(total - 100.0) <= 1e-6, tag + "percentages sum to " + num(total));

  EmotionScores mass{};
  double all = 0;
  for (const auto& p : arc.points) {
    if (p.emotions->no_signal) continue;
    for (std::size_t k = 0; k < kEmotionCount; ++k) {
      mass[k] += p.emotions->scores[k];
      all += p.emotions->scores[k];
    }
  }
  for (std::size_t k = 0; k < kEmotionCount; ++k) {
    v.expect(std::abs(pct[k] - 100.0 * mass[k] / all) <= 1e-9, tag + "percentage differs from mass share");
  }

  auto shuffled = arc;
  for (int round = 0; round < 20; ++round) {
    std::shuffle(shuffled.points.begin(), shuffled.points.end(), rng);
    const auto again = affect::emotion_percentages(shuffled);
    for (std::size_t k = 0; k < kEmotionCount; ++k) {
      v.expect(std::abs(again[k] - pct[k]) <= 1e-9, tag + "percentages change under permutation");
    }
  }
}

void affect_invariants(Verdict& v) {
  std::mt19937 rng(606);
  auto emotion_lexicon = affect::EmotionLexicon::load(kSynthetic / "emotion.csv");
  const std::vector<std::string> charged = {"tristesse", "larme", "mort", "joie", "rire", "amour",
                                            "caresse",   "colère", "rage", "peur", "surprise", "soudain"};
  const std::vector<std::string> plain = {"table", "route", "ville", "porte", "mur", "chemin", "pierre", "sable"};

  std::size_t arcs = 0;
  // lexicon-scored plays with uneven and sometimes absent signal
  for (int play = 0; play < 40; ++play) {
    const std::size_t segments = std::uniform_int_distribution<std::size_t>(1, 12)(rng);
    const double density = play % 8 == 0 ? 0.0 : std::uniform_real_distribution<double>(0.0, 0.1)(rng);
    std::string text;
    for (std::size_t w = 0; w < segments * 150; ++w) {
      const bool hit = std::bernoulli_distribution(density)(rng);
      const auto& pool = hit ? charged : plain;
      text += pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
      text += w % 10 == 9 ? ". " : " ";
    }
    auto doc = std::make_shared<const corpus::RawDocument>(corpus::make_document("p" + std::to_string(play), text));
    const auto tokenized = corpus::tokenize_play(doc, {}, corpus::Stoplist{});
    const auto segs = corpus::segment_tokens(tokenized, corpus::SegmentationConfig{});
    affect::LexiconEmotionScorer scorer(emotion_lexicon);
    const auto arc = affect::build_arc(tokenized, segs, 150, nullptr, &scorer);
    check_arc(v, rng, arc, "play " + std::to_string(play) + ": ");
    ++arcs;
  }
  // profiles from arbitrary non-negative mass, as an external model might return
  for (int a = 0; a < 100; ++a) {
    affect::AffectArc arc;
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 40)(rng);
    for (std::size_t i = 0; i < n; ++i) {
      EmotionScores mass{};
      if (!std::bernoulli_distribution(0.2)(rng)) {
        for (auto& m : mass) m = std::bernoulli_distribution(0.3)(rng) ? 0.0 : std::uniform_real_distribution<double>(0, 1e3)(rng);
      }
      arc.points.push_back({i, std::nullopt, affect::EmotionProfile::from_mass(mass)});
    }
    check_arc(v, rng, arc, "random arc " + std::to_string(a) + ": ");
    ++arcs;
  }
  v.note(std::to_string(arcs) + " arcs, 20 permutations each");
}

// ---------------------------------------------------------------------------
// word-cloud safety

bool boxes_overlap(const lexstats::Box& a, const lexstats::Box& b) {
  const double w = std::min(a.x1, b.x1) - std::max(a.x0, b.x0);
  const double h = std::min(a.y1, b.y1) - std::max(a.y0, b.y0);
  return w > 1e-9 && h > 1e-9;
}

std::size_t code_points(const std::string& s) {
  return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](char c) { return (c & 0xC0) != 0x80; }));
}

void wordcloud_safety(Verdict& v) {
  std::mt19937 rng(4242);
  const std::vector<std::string> letters = {"a", "b", "c", "d", "e", "i", "l", "m", "n", "o", "r", "s", "t", "u",
                                            "é", "è", "à", "ç", "ô", "û", "œ"};
  const lexstats::Canvas canvas{800, 600};
  const lexstats::WordCloudOptions opts;
  std::size_t placed = 0, omitted = 0;
  for (int t = 0; t < 50; ++t) {
    const std::string tag = "table " + std::to_string(t) + ": ";
    const std::size_t size = std::uniform_int_distribution<std::size_t>(1, 60)(rng);
    std::set<std::string> terms;
    while (terms.size() < size) {
      std::string term;
      const std::size_t len = std::uniform_int_distribution<std::size_t>(1, 14)(rng);
      for (std::size_t k = 0; k < len; ++k) term += letters[std::uniform_int_distribution<std::size_t>(0, letters.size() - 1)(rng)];
      terms.insert(term);
    }
    lexstats::FrequencyTable table;
    for (const auto& term : terms) {
      table.entries.push_back({term, std::uniform_int_distribution<std::size_t>(1, 500)(rng)});
      table.total += table.entries.back().count;
    }
    std::stable_sort(table.entries.begin(), table.entries.end(),
                     [](const auto& a, const auto& b) { return a.count > b.count; });
    const std::uint32_t seed = rng();

    const auto spec = lexstats::wordcloud_layout(table, canvas, seed, opts);
    placed += spec.items.size();
    omitted += spec.omitted.size();

    std::multiset<std::string> seen;
    for (const auto& it : spec.items) seen.insert(it.term);
    for (const auto& o : spec.omitted) seen.insert(o);
    v.expect(std::multiset<std::string>(terms.begin(), terms.end()) == seen, tag + "terms lost or duplicated");
    v.expect(!spec.items.empty() && spec.items.front().term == table.entries.front().term, tag + "heaviest term not placed first");

    for (std::size_t i = 0; i < spec.items.size(); ++i) {
      const auto& a = spec.items[i];
      v.expect(a.box.x0 >= 0 && a.box.y0 >= 0 && a.box.x1 <= canvas.width && a.box.y1 <= canvas.height,
               tag + "'" + a.term + "' leaves the canvas");
      // the box must really cover the text as measured
      const double text_w = a.font_size * opts.glyph_advance * static_cast<double>(code_points(a.term));
      const double text_h = a.font_size * opts.line_height;
      v.expect(a.box.x1 - a.box.x0 >= text_w - 1e-9 && a.box.y1 - a.box.y0 >= text_h - 1e-9,
               tag + "'" + a.term + "' box smaller than its text");
      v.expect(std::abs((a.box.x0 + a.box.x1) / 2 - a.x) < 1e-9 && std::abs((a.box.y0 + a.box.y1) / 2 - a.y) < 1e-9,
               tag + "anchor is not the box centre");
      for (std::size_t j = i + 1; j < spec.items.size(); ++j) {
        v.expect(!boxes_overlap(a.box, spec.items[j].box), tag + "'" + a.term + "' overlaps '" + spec.items[j].term + "'");
      }
    }

    const auto first = render::wordcloud_svg(spec);
    const auto second = render::wordcloud_svg(lexstats::wordcloud_layout(table, canvas, seed, opts));
    v.expect(first == second, tag + "same seed, different SVG");
  }
  v.note(std::to_string(placed) + " terms placed, " + std::to_string(omitted) + " omitted");
}

// ---------------------------------------------------------------------------
// protocol conformance

std::vector<std::string> log_lines(const fs::path& p) {
  std::vector<std::string> out;
  std::istringstream in(oracle::read_file(p));
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

void protocol_conformance(Verdict& v) {
  oracle::TempDir tmp;
  bridge::ClientOptions opts;
  opts.batch_size = 8;
  opts.handshake_timeout = std::chrono::milliseconds(2000);
  opts.request_timeout = std::chrono::milliseconds(2000);

  // reordered replies, every fifth id failing, ids not contiguous
  {
    const auto log = tmp / "reorder.log";
    auto client = bridge::open_scorer(kMock + " --reorder --fail-every 5 --log " + log.string(), opts);
    std::vector<bridge::ScoreRequest> reqs;
    for (int i = 0; i < 40; ++i) {
      const auto task = i % 3 == 0 ? bridge::Task::emotion : bridge::Task::sentiment;
      reqs.push_back({1000 + 3 * i, task, "réplique " + std::to_string(i) + std::string(static_cast<std::size_t>(i), 'a')});
    }
    const auto out = client.score_batch(reqs);
    v.expect(out.size() == reqs.size(), "reorder: response count " + std::to_string(out.size()));
    std::size_t errors = 0;
    for (std::size_t i = 0; i < std::min(out.size(), reqs.size()); ++i) {
      const auto& q = reqs[i];
      const auto& r = out[i];
      const std::string tag = "reorder: id " + std::to_string(q.id) + ": ";
      v.expect(r.id == q.id, tag + "out of request order (got " + std::to_string(r.id) + ")");
      if (q.id % 5 == 4) {
        v.expect(r.error() != nullptr, tag + "expected an item error");
        errors += r.error() != nullptr;
      } else if (q.task == bridge::Task::sentiment) {
        v.expect(r.valence() && std::abs(*r.valence() - mock::scripted_valence(q.text)) < 1e-12, tag + "wrong valence");
      } else {
        const auto want = mock::scripted_emotions(q.text);
        bool same = r.scores() != nullptr;
        for (std::size_t k = 0; same && k < kEmotionCount; ++k) same = std::abs((*r.scores())[k] - want[k]) < 1e-12;
        v.expect(same, tag + "wrong emotion scores");
      }
    }
    const auto lines = log_lines(log);
    std::multiset<std::int64_t> sent;
    for (const auto& l : lines) sent.insert(nlohmann::json::parse(l).at("id").get<std::int64_t>());
    std::multiset<std::int64_t> wanted;
    for (const auto& q : reqs) wanted.insert(q.id);
    v.expect(sent == wanted, "reorder: each request must reach the server exactly once");
    v.expect(errors == 8, "reorder: " + std::to_string(errors) + " item errors, expected 8");
  }

  // connection dropped after 13 replies, in order
  {
    auto client = bridge::open_scorer(kMock + " --drop-after 13", opts);
    std::vector<bridge::ScoreRequest> reqs;
    for (int i = 0; i < 20; ++i) reqs.push_back({i, bridge::Task::sentiment, "texte " + std::to_string(i)});
    bool caught = false;
    try {
      client.score_batch(reqs);
    } catch (const ConnectionDroppedError& e) {
      caught = true;
      v.expect(e.last_acknowledged_id() && *e.last_acknowledged_id() == 12,
               "drop: last acknowledged id " + (e.last_acknowledged_id() ? std::to_string(*e.last_acknowledged_id()) : "none"));
      v.expect(e.pending() == 3, "drop: pending " + std::to_string(e.pending()));
    }
    v.expect(caught, "drop: ConnectionDroppedError not raised");
  }

  // same drop with reversed replies: the last id received is acknowledged
  {
    const auto log = tmp / "drop.log";
    auto client = bridge::open_scorer(kMock + " --reorder --drop-after 13 --log " + log.string(), opts);
    std::vector<bridge::ScoreRequest> reqs;
    for (int i = 0; i < 20; ++i) reqs.push_back({i, bridge::Task::sentiment, "texte " + std::to_string(i)});
    bool caught = false;
    try {
      client.score_batch(reqs);
    } catch (const ConnectionDroppedError& e) {
      caught = true;
      const auto id = e.last_acknowledged_id();
      v.expect(id && *id >= 8 && *id <= 15, "reordered drop: last acknowledged id outside the second batch");
      v.expect(e.pending() == 3, "reordered drop: pending " + std::to_string(e.pending()));
    }
    v.expect(caught, "reordered drop: ConnectionDroppedError not raised");
    v.expect(log_lines(log).size() == 16, "reordered drop: third batch was sent after the failure");
  }
  v.note("40 reordered requests, 2 drop scenarios");
}

// ---------------------------------------------------------------------------
// comparative

std::string pseudo_word(std::size_t k) {
  std::string w = "vo";
  for (std::size_t i = 0; i < 3; ++i, k /= 26) w += static_cast<char>('a' + k % 26);
  return w;
}

std::vector<std::string> play_words(std::mt19937& rng, std::size_t tokens, std::size_t types) {
  std::vector<std::string> words;
  for (std::size_t k = 0; k < types; ++k) words.push_back(pseudo_word(k));
  while (words.size() < tokens) words.push_back(words[std::uniform_int_distribution<std::size_t>(0, types - 1)(rng)]);
  std::shuffle(words.begin(), words.end(), rng);
  return words;
}

void comparative(Verdict& v) {
  oracle::TempDir tmp;
  std::mt19937 rng(808);
  report::AnalysisConfig cfg;
  struct Spec {
    std::string title;
    std::size_t types;
  };
  // titles deliberately out of alphabetical order relative to richness
  const std::vector<Spec> specs = {{"b_poor", 30}, {"c_rich", 80}, {"a_mid", 50}};
  std::vector<report::PlayReport> reports;
  for (const auto& s : specs) {
    const auto words = play_words(rng, 100, s.types);
    std::vector<oracle::Word> ow;
    std::string text;
    for (std::size_t i = 0; i < words.size(); ++i) {
      text += words[i];
      text += i % 10 == 9 ? ".\n" : " ";
      ow.push_back({words[i], true});
    }
    const auto [n, t] = oracle::ttr_counts(ow);
    v.expect(n == 100 && t == s.types, s.title + ": generator ttr " + std::to_string(t) + "/" + std::to_string(n));
    const auto path = tmp / (s.title + ".txt");
    oracle::write_file(path, text);
    reports.push_back(report::analyze_play(path, cfg).report);
    v.expect(reports.back().lexical.ttr == static_cast<double>(s.types) / 100.0,
             s.title + ": report ttr " + num(reports.back().lexical.ttr));
  }
  const auto cmp = report::compare_plays(reports);
  v.expect(cmp.ttr_ranking == std::vector<std::string>{"c_rich", "a_mid", "b_poor"}, "ttr ranking order");

  // dominant emotion against a first-maximum scan
  std::size_t ties = 0;
  for (int batch = 0; batch < 20; ++batch) {
    std::vector<report::PlayReport> rs;
    for (int i = 0; i < 10; ++i) {
      report::PlayReport r;
      r.title = "r" + std::to_string(batch) + "_" + std::to_string(i);
      if (!std::bernoulli_distribution(0.1)(rng)) {
        EmotionScores w{};
        double sum = 0;
        for (auto& x : w) sum += x = static_cast<double>(std::uniform_int_distribution<int>(0, 5)(rng));
        if (sum == 0) w[3] = sum = 1;
        for (auto& x : w) x = 100.0 * x / sum;
        r.percentages = w;
      }
      rs.push_back(std::move(r));
    }
    const auto c = report::compare_plays(rs);
    for (const auto& r : rs) {
      std::optional<Emotion> want;
      if (r.percentages) {
        std::size_t best = 0;
        for (std::size_t k = 1; k < kEmotionCount; ++k) {
          if ((*r.percentages)[k] > (*r.percentages)[best]) best = k;
        }
        want = kEmotions[best];
        ties += std::count(r.percentages->begin(), r.percentages->end(), (*r.percentages)[best]) > 1;
      }
      v.expect(report::dominant_emotion(r) == want, r.title + ": dominant emotion");
      v.expect(c.dominant_emotion.count(r.title) && c.dominant_emotion.at(r.title) == want,
               r.title + ": comparison dominant emotion");
    }
  }
  v.note("200 random reports, " + std::to_string(ties) + " with tied maxima");
}

struct Criterion {
  const char* name;
  long limit_ms;
  std::function<void(Verdict&)> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"oracle-equivalence", 10000, oracle_equivalence},
      {"segmentation-invariants", 5000, segmentation_invariants},
      {"golden-pipeline", 5000, golden_pipeline},
      {"injected-tension", 2000, injected_tension},
      {"affect-invariants", 5000, affect_invariants},
      {"wordcloud-safety", 5000, wordcloud_safety},
      {"protocol-conformance", 5000, protocol_conformance},
      {"comparative", 2000, comparative},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Verdict v;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.run(v);
    } catch (const std::exception& e) {
      v.expect(false, std::string("unexpected exception: ") + e.what());
    }
    const auto ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
    v.expect(ms <= c.limit_ms, "time limit exceeded");
    const bool ok = v.ok();
    failed += !ok;
    std::cout << (ok ? "PASS " : "FAIL ") << c.name << " (" << ms << " ms, limit " << c.limit_ms << " ms) "
              << v.summary() << std::endl;
  }
  std::cout << (failed ? std::to_string(failed) + " criteria failed" : std::string("all criteria passed")) << '\n';
  return failed ? 1 : 0;
}
