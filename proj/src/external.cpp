#include "houses/external.hpp"

#include <cerrno>
#include <cmath>
#include <csignal>
#include <cstring>

#include <poll.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include "houses/errors.hpp"

namespace houses {

std::string WireRequest::to_line() const {
  return nlohmann::json{{"id", id}, {"params", params}}.dump() + "\n";
}

WireRequest WireRequest::parse(std::string_view line) {
  try {
    const auto doc = nlohmann::json::parse(line);
    WireRequest r;
    r.id = doc.at("id").get<std::int64_t>();
    r.params = doc.at("params");
    if (!r.params.is_object()) throw FormatError("request 'params' must be an object");
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed request: ") + e.what());
  }
}

std::string WireResponse::to_line() const {
  nlohmann::json doc{{"id", id}, {"status", ok ? "ok" : "error"}};
  if (objective) doc["objective"] = *objective;
  if (message) doc["message"] = *message;
  return doc.dump() + "\n";
}

WireResponse WireResponse::parse(std::string_view line) {
  try {
    const auto doc = nlohmann::json::parse(line);
    WireResponse r;
    r.id = doc.at("id").get<std::int64_t>();
    const auto status = doc.at("status").get<std::string>();
    if (status != "ok" && status != "error") throw FormatError("response status must be 'ok' or 'error'");
    r.ok = status == "ok";
    if (doc.contains("objective") && !doc["objective"].is_null()) r.objective = doc["objective"].get<double>();
    if (doc.contains("message") && !doc["message"].is_null()) r.message = doc["message"].get<std::string>();
    if (r.ok && !r.objective) throw FormatError("ok response without 'objective'");
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed response: ") + e.what());
  }
}

nlohmann::json wire_params(const SearchSpace& space, std::span<const double> raw) {
  nlohmann::json params = nlohmann::json::object();
  for (std::size_t d = 0; d < space.dim(); ++d) {
    const auto& p = space.param(d);
    if (p.kind == ParamKind::integer) {
      params[p.name] = static_cast<std::int64_t>(std::llround(raw[d]));
    } else {
      params[p.name] = raw[d];
    }
  }
  return params;
}

ExternalObjective::ExternalObjective(std::string command, SearchSpace space, std::chrono::milliseconds timeout)
    : command_(std::move(command)), space_(std::move(space)), timeout_(timeout) {
  if (command_.empty()) throw ArgumentError("external objective: empty command");
}

ExternalObjective::~ExternalObjective() { stop(); }

void ExternalObjective::start() {
  int sv[2];
  if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, sv) != 0) {
    throw std::runtime_error(std::string("socketpair: ") + std::strerror(errno));
  }
  const pid_t pid = ::fork();
  if (pid < 0) {
    ::close(sv[0]);
    ::close(sv[1]);
    throw std::runtime_error(std::string("fork: ") + std::strerror(errno));
  }
  if (pid == 0) {
    ::dup2(sv[1], STDIN_FILENO);
    ::dup2(sv[1], STDOUT_FILENO);
    ::execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(sv[1]);
  pid_ = pid;
  fd_ = sv[0];
  buffer_.clear();
}

void ExternalObjective::stop() {
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
  if (pid_ > 0) {
    int status = 0;
    if (::waitpid(pid_, &status, WNOHANG) == 0) {
      ::kill(pid_, SIGKILL);
      ::waitpid(pid_, &status, 0);
    }
    pid_ = -1;
  }
  buffer_.clear();
}

std::optional<std::string> ExternalObjective::read_line(std::chrono::steady_clock::time_point deadline,
                                                        std::string& error) {
  for (;;) {
    if (const auto pos = buffer_.find('\n'); pos != std::string::npos) {
      std::string line = buffer_.substr(0, pos);
      buffer_.erase(0, pos + 1);
      return line;
    }
    const auto remaining =
        std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (remaining.count() <= 0) {
      error = "timeout";
      return std::nullopt;
    }
    pollfd pfd{fd_, POLLIN, 0};
    const int rc = ::poll(&pfd, 1, static_cast<int>(std::min<long long>(remaining.count(), 1 << 30)));
    if (rc < 0) {
      if (errno == EINTR) continue;
      error = std::string("poll: ") + std::strerror(errno);
      return std::nullopt;
    }
    if (rc == 0) continue;
    char chunk[4096];
    const ssize_t got = ::read(fd_, chunk, sizeof chunk);
    if (got < 0) {
      if (errno == EINTR) continue;
      error = std::string("read: ") + std::strerror(errno);
      return std::nullopt;
    }
    if (got == 0) {
      int status = 0;
      if (pid_ > 0 && ::waitpid(pid_, &status, 0) == pid_) {
        pid_ = -1;
        error = WIFEXITED(status) ? "worker exited with code " + std::to_string(WEXITSTATUS(status))
                                  : "worker terminated by signal";
      } else {
        error = "worker closed its output";
      }
      return std::nullopt;
    }
    buffer_.append(chunk, static_cast<std::size_t>(got));
  }
}

EvalOutcome ExternalObjective::evaluate(const Configuration& config) {
  if (fd_ < 0) {
    try {
      start();
    } catch (const std::exception& e) {
      return EvalOutcome::failure(e.what());
    }
  }
  const auto deadline = std::chrono::steady_clock::now() + timeout_;
  WireRequest req{next_id_++, wire_params(space_, config.raw)};
  const std::string line = req.to_line();
  std::size_t sent = 0;
  while (sent < line.size()) {
    const ssize_t n = ::send(fd_, line.data() + sent, line.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      const std::string why = std::string("send: ") + std::strerror(errno);
      stop();
      return EvalOutcome::failure(why);
    }
    sent += static_cast<std::size_t>(n);
  }
  std::string error;
  const auto reply = read_line(deadline, error);
  if (!reply) {
    stop();
    return EvalOutcome::failure(error);
  }
  WireResponse resp;
  try {
    resp = WireResponse::parse(*reply);
  } catch (const FormatError& e) {
    stop();
    return EvalOutcome::failure(e.what());
  }
  if (resp.id != req.id) {
    stop();
    return EvalOutcome::failure("response id " + std::to_string(resp.id) + " does not match request " +
                                std::to_string(req.id));
  }
  if (!resp.ok) return EvalOutcome::failure(resp.message.value_or("worker reported an error"));
  if (!std::isfinite(*resp.objective)) return EvalOutcome::failure("worker returned a non-finite objective");
  return EvalOutcome::success(*resp.objective);
}

}  // namespace houses
