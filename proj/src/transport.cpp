#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <mutex>
#include <regex>
#include <thread>

#include <httplib.h>

#include "dramaturg/error.hpp"
#include "dramaturg/scorer_bridge.hpp"

namespace dramaturg::bridge {

namespace {

void ignore_sigpipe() {
  static std::once_flag once;
  std::call_once(once, [] { ::signal(SIGPIPE, SIG_IGN); });
}

void close_fd(int& fd) {
  if (fd >= 0) ::close(fd);
  fd = -1;
}

}  // namespace

SubprocessTransport::SubprocessTransport(const std::string& command) : command_(command) {
  ignore_sigpipe();
  int in_pipe[2];   // parent -> child
  int out_pipe[2];  // child -> parent
  if (::pipe2(in_pipe, O_CLOEXEC) != 0) throw LaunchError("pipe failed: " + std::string(std::strerror(errno)));
  if (::pipe2(out_pipe, O_CLOEXEC) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    throw LaunchError("pipe failed: " + std::string(std::strerror(errno)));
  }
  pid_ = ::fork();
  if (pid_ < 0) {
    for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) ::close(fd);
    throw LaunchError("fork failed: " + std::string(std::strerror(errno)));
  }
  if (pid_ == 0) {
    // own process group, so shutdown reaches whatever the shell spawns
    ::setpgid(0, 0);
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::setpgid(pid_, pid_);
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
}

SubprocessTransport::~SubprocessTransport() { shutdown(); }

void SubprocessTransport::shutdown() {
  close_fd(to_child_);
  close_fd(from_child_);
  if (pid_ <= 0 || status_) return;
  using namespace std::chrono_literals;
  // closing stdin asks a well-behaved server to exit; escalate if it doesn't
  for (int sig : {0, SIGTERM, SIGKILL}) {
    if (sig) ::kill(-pid_, sig);
    const auto deadline = std::chrono::steady_clock::now() + 500ms;
    while (std::chrono::steady_clock::now() < deadline) {
      if (exit_status()) {
        if (sig) ::kill(-pid_, SIGKILL);
        return;
      }
      std::this_thread::sleep_for(5ms);
    }
  }
  int status = 0;
  if (::waitpid(pid_, &status, 0) == pid_) {
    status_ = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
  }
}

std::optional<int> SubprocessTransport::exit_status() {
  if (status_ || pid_ <= 0) return status_;
  int status = 0;
  if (::waitpid(pid_, &status, WNOHANG) == pid_) {
    status_ = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
  }
  return status_;
}

bool SubprocessTransport::send(std::string_view line) {
  if (to_child_ < 0) return false;
  std::string framed(line);
  framed.push_back('\n');
  std::size_t written = 0;
  while (written < framed.size()) {
    const auto n = ::write(to_child_, framed.data() + written, framed.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    written += static_cast<std::size_t>(n);
  }
  return true;
}

Transport::Received SubprocessTransport::receive(std::chrono::milliseconds timeout) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  while (true) {
    if (const auto nl = buffer_.find('\n'); nl != std::string::npos) {
      Received r{Status::line, buffer_.substr(0, nl)};
      buffer_.erase(0, nl + 1);
      return r;
    }
    if (from_child_ < 0) return {Status::eof, {}};
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) return {Status::timeout, {}};
    pollfd pfd{from_child_, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, static_cast<int>(left.count()));
    if (ready < 0) {
      if (errno == EINTR) continue;
      close_fd(from_child_);
      return {Status::eof, {}};
    }
    if (ready == 0) return {Status::timeout, {}};
    char chunk[4096];
    const auto n = ::read(from_child_, chunk, sizeof chunk);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) {
      close_fd(from_child_);
      buffer_.clear();  // an unterminated trailing fragment is not a message
      return {Status::eof, {}};
    }
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

HttpTransport::HttpTransport(std::string host, int port) : host_(std::move(host)), port_(port) {}

HttpTransport::~HttpTransport() = default;

std::string HttpTransport::describe() const { return "http://" + host_ + ":" + std::to_string(port_) + "/score"; }

bool HttpTransport::send(std::string_view line) {
  outgoing_.emplace_back(line);
  return true;
}

Transport::Received HttpTransport::receive(std::chrono::milliseconds timeout) {
  if (next_incoming_ < incoming_.size()) return {Status::line, incoming_[next_incoming_++]};
  if (outgoing_.empty()) return {Status::eof, {}};  // nothing more will arrive

  std::string body;
  for (const auto& l : outgoing_) body += l + '\n';
  outgoing_.clear();
  incoming_.clear();
  next_incoming_ = 0;

  httplib::Client client(host_, port_);
  const auto secs = timeout.count() / 1000;
  const auto usecs = (timeout.count() % 1000) * 1000;
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);
  auto res = client.Post("/score", body, "application/x-ndjson");
  if (!res) {
    return {res.error() == httplib::Error::Read ? Status::timeout : Status::eof, {}};
  }
  if (res->status != 200) return {Status::eof, {}};
  std::size_t start = 0;
  const std::string& text = res->body;
  while (start < text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string::npos) nl = text.size();
    if (nl > start) incoming_.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  if (incoming_.empty()) return {Status::eof, {}};
  return {Status::line, incoming_[next_incoming_++]};
}

std::unique_ptr<Transport> make_transport(const std::string& endpoint) {
  static const std::regex kHostPort(R"(^(?:http://)?([A-Za-z0-9.\-]+|\[[0-9A-Fa-f:]+\]):(\d{1,5})/?$)");
  std::smatch m;
  if (std::regex_match(endpoint, m, kHostPort)) {
    const int port = std::stoi(m[2].str());
    if (port <= 0 || port > 65535) throw ConfigError("bad port in endpoint '" + endpoint + "'");
    return std::make_unique<HttpTransport>(m[1].str(), port);
  }
  if (endpoint.find_first_not_of(" \t") == std::string::npos) {
    throw ConfigError("empty scorer endpoint");
  }
  return std::make_unique<SubprocessTransport>(endpoint);
}

}  // namespace dramaturg::bridge
