#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dramaturg/affect.hpp"
#include "dramaturg/emotion.hpp"

// Client side of the newline-delimited JSON scoring protocol.
//
//   client: {"v":1,"hello":true}
//   server: {"v":1,"capabilities":["sentiment","emotion"],"model":"..."}
//   client: {"id":N,"task":"sentiment"|"emotion","text":"..."}
//   server: {"id":N,"valence":x} | {"id":N,"scores":{...}} | {"id":N,"error":"..."}
//
// One JSON object per line, UTF-8, no pretty-printing.
namespace dramaturg::bridge {

inline constexpr int kProtocolVersion = 1;

enum class Task { sentiment, emotion };

std::string_view name_of(Task task);
std::optional<Task> parse_task(std::string_view name);

struct ScoreRequest {
  std::int64_t id = 0;
  Task task = Task::sentiment;
  std::string text;
  bool operator==(const ScoreRequest&) const = default;
};

struct ScoreResponse {
  std::int64_t id = 0;
  std::variant<double, EmotionScores, std::string> payload;  // valence | scores | error

  bool ok() const { return payload.index() != 2; }
  const double* valence() const { return std::get_if<0>(&payload); }
  const EmotionScores* scores() const { return std::get_if<1>(&payload); }
  const std::string* error() const { return std::get_if<2>(&payload); }
  bool operator==(const ScoreResponse&) const = default;
};

struct Handshake {
  int protocol_version = kProtocolVersion;
  std::vector<Task> capabilities;
  std::string model;
  bool operator==(const Handshake&) const = default;
};

std::string encode_hello();
std::string encode_request(const ScoreRequest& req);
std::string encode_response(const ScoreResponse& resp);
std::string encode_handshake(const Handshake& hs);

// Parsers throw ProtocolError on malformed input. A response missing an
// emotion label is rejected with the label named.
bool is_hello(std::string_view line);
ScoreRequest parse_request(std::string_view line);
ScoreResponse parse_response(std::string_view line);
Handshake parse_handshake(std::string_view line);

// Line-oriented channel to a scoring server.
class Transport {
 public:
  enum class Status { line, eof, timeout };
  struct Received {
    Status status;
    std::string line;
  };

  virtual ~Transport() = default;
  // Returns false when the peer is gone.
  virtual bool send(std::string_view line) = 0;
  virtual Received receive(std::chrono::milliseconds timeout) = 0;
  virtual std::string describe() const = 0;
};

// Spawns `/bin/sh -c command` and talks over its stdin/stdout.
class SubprocessTransport final : public Transport {
 public:
  explicit SubprocessTransport(const std::string& command);
  ~SubprocessTransport() override;
  SubprocessTransport(const SubprocessTransport&) = delete;
  SubprocessTransport& operator=(const SubprocessTransport&) = delete;

  bool send(std::string_view line) override;
  Received receive(std::chrono::milliseconds timeout) override;
  std::string describe() const override { return "subprocess '" + command_ + "'"; }

  // Exit status once the child has terminated.
  std::optional<int> exit_status();

 private:
  void shutdown();

  std::string command_;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
  std::optional<int> status_;
};

// POST /score: the body carries the lines queued by send(), the response
// body carries the answering lines.
class HttpTransport final : public Transport {
 public:
  HttpTransport(std::string host, int port);
  ~HttpTransport() override;

  bool send(std::string_view line) override;
  Received receive(std::chrono::milliseconds timeout) override;
  std::string describe() const override;

 private:
  std::string host_;
  int port_;
  std::vector<std::string> outgoing_;
  std::vector<std::string> incoming_;
  std::size_t next_incoming_ = 0;
};

struct ClientOptions {
  std::chrono::milliseconds handshake_timeout{10'000};
  std::chrono::milliseconds request_timeout{30'000};
  std::size_t batch_size = 32;
};

// Endpoints of the form host:port or http://host:port select HTTP; anything
// else is a command line for a subprocess.
std::unique_ptr<Transport> make_transport(const std::string& endpoint);

// One handle per connection; not safe for concurrent callers.
class ScorerClient {
 public:
  // Performs the handshake. Throws LaunchError, HandshakeTimeoutError,
  // VersionMismatchError or ProtocolError.
  ScorerClient(std::unique_ptr<Transport> transport, ClientOptions options = {});

  const Handshake& handshake() const { return handshake_; }
  bool supports(Task task) const;
  std::int64_t next_id() { return next_id_++; }

  // One response per request, in request order. Unsupported tasks and empty
  // texts come back as item errors without reaching the server. Throws
  // ConnectionDroppedError, RequestTimeoutError or ProtocolError.
  std::vector<ScoreResponse> score_batch(std::span<const ScoreRequest> requests);

  // Convenience: assigns fresh ids to `texts` and scores them.
  std::vector<ScoreResponse> score_texts(Task task, std::span<const std::string> texts);

  const std::string& endpoint_description() const { return description_; }

 private:
  void run_chunk(std::span<const ScoreRequest> chunk, std::vector<ScoreResponse>& out);

  std::unique_ptr<Transport> transport_;
  ClientOptions options_;
  Handshake handshake_;
  std::string description_;
  std::int64_t next_id_ = 0;
  std::optional<std::int64_t> last_acked_;
};

ScorerClient open_scorer(const std::string& endpoint, ClientOptions options = {});

class ExternalSentimentScorer final : public affect::SentimentScorer {
 public:
  explicit ExternalSentimentScorer(std::shared_ptr<ScorerClient> client);
  std::string identity() const override;
  std::vector<affect::Valence> score_units(std::span<const std::string> units) override;

 private:
  std::shared_ptr<ScorerClient> client_;
};

// Unit distributions are renormalized, averaged, then renormalized again.
class ExternalEmotionScorer final : public affect::EmotionScorer {
 public:
  explicit ExternalEmotionScorer(std::shared_ptr<ScorerClient> client);
  std::string identity() const override;
  affect::EmotionProfile score_units(std::span<const std::string> units) override;

 private:
  std::shared_ptr<ScorerClient> client_;
};

}  // namespace dramaturg::bridge
