#include "dramaturg/scorer_bridge.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include <json.hpp>

#include "dramaturg/error.hpp"

namespace dramaturg::bridge {

using nlohmann::json;

std::string_view name_of(Task task) { return task == Task::sentiment ? "sentiment" : "emotion"; }

std::optional<Task> parse_task(std::string_view name) {
  if (name == "sentiment") return Task::sentiment;
  if (name == "emotion") return Task::emotion;
  return std::nullopt;
}

namespace {

std::string quote(std::string_view s) { return json(std::string(s)).dump(); }

std::string number(double v) { return json(v).dump(); }

json parse_object(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ProtocolError("malformed protocol line: " + std::string(e.what()));
  }
  if (!j.is_object()) throw ProtocolError("protocol line is not a JSON object");
  return j;
}

std::int64_t require_id(const json& j) {
  auto it = j.find("id");
  if (it == j.end() || !it->is_number_integer()) throw ProtocolError("message lacks an integer 'id'");
  return it->get<std::int64_t>();
}

EmotionScores parse_scores(const json& obj) {
  if (!obj.is_object()) throw ProtocolError("'scores' must be an object");
  EmotionScores s{};
  for (std::size_t i = 0; i < kEmotionCount; ++i) {
    auto it = obj.find(std::string(kEmotionNames[i]));
    if (it == obj.end()) {
      throw ProtocolError("emotion scores missing label '" + std::string(kEmotionNames[i]) + "'");
    }
    if (!it->is_number()) throw ProtocolError("score for '" + std::string(kEmotionNames[i]) + "' is not a number");
    const double v = it->get<double>();
    if (!std::isfinite(v) || v < 0) {
      throw ProtocolError("score for '" + std::string(kEmotionNames[i]) + "' must be finite and non-negative");
    }
    s[i] = v;
  }
  return s;
}

}  // namespace

std::string encode_hello() { return R"({"v":1,"hello":true})"; }

std::string encode_request(const ScoreRequest& req) {
  return "{\"id\":" + std::to_string(req.id) + ",\"task\":" + quote(name_of(req.task)) +
         ",\"text\":" + quote(req.text) + "}";
}

std::string encode_response(const ScoreResponse& resp) {
  std::string out = "{\"id\":" + std::to_string(resp.id) + ",";
  if (const double* v = resp.valence()) {
    out += "\"valence\":" + number(*v);
  } else if (const EmotionScores* s = resp.scores()) {
    out += "\"scores\":{";
    for (std::size_t i = 0; i < kEmotionCount; ++i) {
      if (i) out += ',';
      out += quote(kEmotionNames[i]) + ":" + number((*s)[i]);
    }
    out += "}";
  } else {
    out += "\"error\":" + quote(*resp.error());
  }
  return out + "}";
}

std::string encode_handshake(const Handshake& hs) {
  std::string caps;
  for (auto t : hs.capabilities) {
    if (!caps.empty()) caps += ',';
    caps += quote(name_of(t));
  }
  return "{\"v\":" + std::to_string(hs.protocol_version) + ",\"capabilities\":[" + caps +
         "],\"model\":" + quote(hs.model) + "}";
}

bool is_hello(std::string_view line) {
  try {
    const auto j = json::parse(line);
    return j.is_object() && j.value("hello", false) == true;
  } catch (const json::exception&) {
    return false;
  }
}

ScoreRequest parse_request(std::string_view line) {
  const auto j = parse_object(line);
  ScoreRequest req;
  req.id = require_id(j);
  auto task = j.find("task");
  if (task == j.end() || !task->is_string()) throw ProtocolError("request lacks 'task'");
  const auto parsed = parse_task(task->get<std::string>());
  if (!parsed) throw ProtocolError("unknown task '" + task->get<std::string>() + "'");
  req.task = *parsed;
  auto text = j.find("text");
  if (text == j.end() || !text->is_string()) throw ProtocolError("request lacks 'text'");
  req.text = text->get<std::string>();
  return req;
}

ScoreResponse parse_response(std::string_view line) {
  const auto j = parse_object(line);
  ScoreResponse resp;
  resp.id = require_id(j);
  const int present = static_cast<int>(j.contains("valence")) + static_cast<int>(j.contains("scores")) +
                      static_cast<int>(j.contains("error"));
  if (present != 1) {
    throw ProtocolError("response " + std::to_string(resp.id) +
                        " must carry exactly one of valence, scores, error");
  }
  if (auto it = j.find("valence"); it != j.end()) {
    if (!it->is_number()) throw ProtocolError("valence is not a number");
    const double v = it->get<double>();
    if (!(v >= 0.0 && v <= 1.0)) throw ProtocolError("valence outside [0,1]");
    resp.payload = v;
  } else if (auto it = j.find("scores"); it != j.end()) {
    resp.payload = parse_scores(*it);
  } else {
    const auto& e = j.at("error");
    resp.payload = e.is_string() ? e.get<std::string>() : e.dump();
  }
  return resp;
}

Handshake parse_handshake(std::string_view line) {
  const auto j = parse_object(line);
  Handshake hs;
  auto v = j.find("v");
  if (v == j.end() || !v->is_number_integer()) throw ProtocolError("handshake lacks integer 'v'");
  hs.protocol_version = v->get<int>();
  if (auto caps = j.find("capabilities"); caps != j.end()) {
    if (!caps->is_array()) throw ProtocolError("'capabilities' must be an array");
    for (const auto& c : *caps) {
      if (!c.is_string()) throw ProtocolError("capability is not a string");
      // unknown capabilities are ignored so servers can advertise extras
      if (auto t = parse_task(c.get<std::string>())) {
        if (std::find(hs.capabilities.begin(), hs.capabilities.end(), *t) == hs.capabilities.end()) {
          hs.capabilities.push_back(*t);
        }
      }
    }
  }
  if (auto model = j.find("model"); model != j.end() && model->is_string()) hs.model = model->get<std::string>();
  return hs;
}

ScorerClient::ScorerClient(std::unique_ptr<Transport> transport, ClientOptions options)
    : transport_(std::move(transport)), options_(options) {
  if (options_.batch_size == 0) throw ConfigError("batch size must be at least 1");
  description_ = transport_->describe();
  auto launch_failure = [&](const std::string& why) {
    std::string msg = "scorer " + description_ + " " + why;
    if (auto* sub = dynamic_cast<SubprocessTransport*>(transport_.get())) {
      if (auto status = sub->exit_status()) msg += " (exit status " + std::to_string(*status) + ")";
    }
    return LaunchError(msg);
  };
  if (!transport_->send(encode_hello())) throw launch_failure("is not accepting input");
  const auto got = transport_->receive(options_.handshake_timeout);
  if (got.status == Transport::Status::timeout) {
    throw HandshakeTimeoutError("no handshake from " + description_ + " within " +
                                std::to_string(options_.handshake_timeout.count()) + " ms");
  }
  if (got.status == Transport::Status::eof) throw launch_failure("closed before the handshake");
  handshake_ = parse_handshake(got.line);
  if (handshake_.protocol_version != kProtocolVersion) {
    throw VersionMismatchError(kProtocolVersion, handshake_.protocol_version);
  }
  if (handshake_.capabilities.empty()) throw ProtocolError("handshake advertises no capabilities");
}

bool ScorerClient::supports(Task task) const {
  return std::find(handshake_.capabilities.begin(), handshake_.capabilities.end(), task) !=
         handshake_.capabilities.end();
}

std::vector<ScoreResponse> ScorerClient::score_batch(std::span<const ScoreRequest> requests) {
  std::set<std::int64_t> ids;
  for (const auto& r : requests) {
    if (!ids.insert(r.id).second) throw ConfigError("duplicate request id " + std::to_string(r.id));
  }
  std::vector<ScoreResponse> out;
  out.reserve(requests.size());
  std::vector<ScoreRequest> sendable;
  for (const auto& r : requests) {
    if (!supports(r.task)) {
      out.push_back({r.id, std::string("unsupported task")});
    } else if (r.text.empty()) {
      out.push_back({r.id, std::string("empty text")});
    } else {
      sendable.push_back(r);
    }
  }
  for (std::size_t start = 0; start < sendable.size(); start += options_.batch_size) {
    const auto len = std::min(options_.batch_size, sendable.size() - start);
    run_chunk(std::span(sendable).subspan(start, len), out);
  }
  std::map<std::int64_t, ScoreResponse> by_id;
  for (auto& r : out) by_id.emplace(r.id, std::move(r));
  std::vector<ScoreResponse> ordered;
  ordered.reserve(requests.size());
  for (const auto& r : requests) ordered.push_back(std::move(by_id.at(r.id)));
  return ordered;
}

void ScorerClient::run_chunk(std::span<const ScoreRequest> chunk, std::vector<ScoreResponse>& out) {
  std::map<std::int64_t, Task> pending;
  for (const auto& r : chunk) pending.emplace(r.id, r.task);
  for (const auto& r : chunk) {
    if (!transport_->send(encode_request(r))) throw ConnectionDroppedError(last_acked_, pending.size());
  }
  while (!pending.empty()) {
    const auto got = transport_->receive(options_.request_timeout);
    if (got.status == Transport::Status::eof) throw ConnectionDroppedError(last_acked_, pending.size());
    if (got.status == Transport::Status::timeout) {
      throw RequestTimeoutError("no response from " + description_ + " within " +
                                std::to_string(options_.request_timeout.count()) + " ms; " +
                                std::to_string(pending.size()) + " requests pending");
    }
    auto resp = parse_response(got.line);
    auto it = pending.find(resp.id);
    if (it == pending.end()) {
      if (resp.error()) throw ProtocolError("server error for id " + std::to_string(resp.id) + ": " + *resp.error());
      throw ProtocolError("unexpected response id " + std::to_string(resp.id));
    }
    if ((it->second == Task::sentiment && resp.scores()) || (it->second == Task::emotion && resp.valence())) {
      throw ProtocolError("response " + std::to_string(resp.id) + " does not match its task");
    }
    pending.erase(it);
    last_acked_ = resp.id;
    out.push_back(std::move(resp));
  }
}

std::vector<ScoreResponse> ScorerClient::score_texts(Task task, std::span<const std::string> texts) {
  std::vector<ScoreRequest> reqs;
  reqs.reserve(texts.size());
  for (const auto& t : texts) reqs.push_back({next_id(), task, t});
  return score_batch(reqs);
}

ScorerClient open_scorer(const std::string& endpoint, ClientOptions options) {
  return ScorerClient(make_transport(endpoint), options);
}

ExternalSentimentScorer::ExternalSentimentScorer(std::shared_ptr<ScorerClient> client)
    : client_(std::move(client)) {
  if (!client_->supports(Task::sentiment)) throw ScorerError("scorer does not advertise sentiment");
}

std::string ExternalSentimentScorer::identity() const {
  return "external_sentiment:" + client_->handshake().model;
}

std::vector<affect::Valence> ExternalSentimentScorer::score_units(std::span<const std::string> units) {
  std::vector<affect::Valence> out;
  for (const auto& r : client_->score_texts(Task::sentiment, units)) {
    if (r.error()) throw ScorerError("sentiment request " + std::to_string(r.id) + " failed: " + *r.error());
    out.emplace_back(*r.valence());
  }
  return out;
}

ExternalEmotionScorer::ExternalEmotionScorer(std::shared_ptr<ScorerClient> client)
    : client_(std::move(client)) {
  if (!client_->supports(Task::emotion)) throw ScorerError("scorer does not advertise emotion");
}

std::string ExternalEmotionScorer::identity() const {
  return "external_emotion:" + client_->handshake().model;
}

affect::EmotionProfile ExternalEmotionScorer::score_units(std::span<const std::string> units) {
  EmotionScores mean{};
  const auto responses = client_->score_texts(Task::emotion, units);
  for (const auto& r : responses) {
    if (r.error()) throw ScorerError("emotion request " + std::to_string(r.id) + " failed: " + *r.error());
    const auto& s = *r.scores();
    double total = 0;
    for (double v : s) total += v;
    if (total <= 0) throw ProtocolError("emotion response " + std::to_string(r.id) + " has zero mass");
    for (std::size_t i = 0; i < kEmotionCount; ++i) mean[i] += s[i] / total;
  }
  for (auto& v : mean) v /= static_cast<double>(responses.size());
  return affect::EmotionProfile::from_mass(mean);
}

}  // namespace dramaturg::bridge
