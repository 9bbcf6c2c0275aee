#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dramaturg {

enum class ErrorKind {
  decode,
  config,
  io,
  empty_scope,
  canvas_exhausted,
  arc_too_short,
  no_emotional_signal,
  incompatible,
  scorer,
};

const char* to_string(ErrorKind kind);

// Base of everything the library throws. `stage` is filled in by the
// pipeline driver (clean/tokenize/segment/score/report) as the error
// propagates; it is empty when an operation is called directly.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& stage() const noexcept { return stage_; }
  void set_stage(std::string stage) { stage_ = std::move(stage); }

 private:
  ErrorKind kind_;
  std::string stage_;
};

class DecodeError : public Error {
 public:
  explicit DecodeError(std::size_t byte_offset)
      : Error(ErrorKind::decode,
              "invalid UTF-8 at byte offset " + std::to_string(byte_offset)),
        byte_offset_(byte_offset) {}
  std::size_t byte_offset() const noexcept { return byte_offset_; }

 private:
  std::size_t byte_offset_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message)
      : Error(ErrorKind::config, message) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message) : Error(ErrorKind::io, message) {}
};

class EmptyScopeError : public Error {
 public:
  explicit EmptyScopeError(const std::string& what = "empty scope")
      : Error(ErrorKind::empty_scope, what) {}
};

class CanvasExhaustedError : public Error {
 public:
  explicit CanvasExhaustedError(const std::string& term)
      : Error(ErrorKind::canvas_exhausted,
              "canvas exhausted: cannot place '" + term + "'") {}
};

class ArcTooShortError : public Error {
 public:
  explicit ArcTooShortError(std::size_t points)
      : Error(ErrorKind::arc_too_short,
              "arc too short: " + std::to_string(points) +
                  " sentiment points, need at least 3") {}
};

class NoEmotionalSignalError : public Error {
 public:
  NoEmotionalSignalError() : Error(ErrorKind::no_emotional_signal, "no emotional signal") {}
};

class IncompatibleReportsError : public Error {
 public:
  explicit IncompatibleReportsError(std::vector<std::string> keys);
  const std::vector<std::string>& keys() const noexcept { return keys_; }

 private:
  std::vector<std::string> keys_;
};

// Scorer failures. Carries the segment index once the arc builder has
// annotated it.
class ScorerError : public Error {
 public:
  explicit ScorerError(const std::string& message) : Error(ErrorKind::scorer, message) {}

  const std::optional<std::size_t>& segment_index() const noexcept { return segment_; }
  void set_segment_index(std::size_t index) { segment_ = index; }

 private:
  std::optional<std::size_t> segment_;
};

class LaunchError : public ScorerError {
 public:
  using ScorerError::ScorerError;
};

class HandshakeTimeoutError : public ScorerError {
 public:
  using ScorerError::ScorerError;
};

class VersionMismatchError : public ScorerError {
 public:
  VersionMismatchError(int expected, int got)
      : ScorerError("protocol version mismatch: expected " + std::to_string(expected) +
                    ", server speaks " + std::to_string(got)),
        got_(got) {}
  int server_version() const noexcept { return got_; }

 private:
  int got_;
};

class ProtocolError : public ScorerError {
 public:
  using ScorerError::ScorerError;
};

class RequestTimeoutError : public ScorerError {
 public:
  using ScorerError::ScorerError;
};

// The peer went away mid-batch. `last_acknowledged_id` is the id of the
// last response received on the connection, if any.
class ConnectionDroppedError : public ScorerError {
 public:
  ConnectionDroppedError(std::optional<std::int64_t> last_acked, std::size_t pending);
  const std::optional<std::int64_t>& last_acknowledged_id() const noexcept { return last_acked_; }
  std::size_t pending() const noexcept { return pending_; }

 private:
  std::optional<std::int64_t> last_acked_;
  std::size_t pending_;
};

}  // namespace dramaturg
