#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "houses/objective.hpp"

namespace houses {

/// `{"id": <int>, "params": {<name>: <value>, ...}}`, one line.
struct WireRequest {
  std::int64_t id = 0;
  nlohmann::json params = nlohmann::json::object();

  std::string to_line() const;
  static WireRequest parse(std::string_view line);
  bool operator==(const WireRequest&) const = default;
};

/// `{"id": <int>, "status": "ok"|"error", "objective": <float>, "message": <string>}`.
struct WireResponse {
  std::int64_t id = 0;
  bool ok = true;
  std::optional<double> objective;
  std::optional<std::string> message;

  std::string to_line() const;
  static WireResponse parse(std::string_view line);
  bool operator==(const WireResponse&) const = default;
};

/// Request parameters keyed by name; integer parameters are sent as integers.
nlohmann::json wire_params(const SearchSpace& space, std::span<const double> raw);

/// Objective served by a long-lived worker process speaking the line
/// protocol over its stdin/stdout. The worker is started on first use and
/// restarted after a timeout, crash or protocol violation.
class ExternalObjective final : public Objective {
 public:
  ExternalObjective(std::string command, SearchSpace space,
                    std::chrono::milliseconds timeout = std::chrono::seconds(600));
  ~ExternalObjective() override;
  ExternalObjective(const ExternalObjective&) = delete;
  ExternalObjective& operator=(const ExternalObjective&) = delete;

  EvalOutcome evaluate(const Configuration& config) override;
  std::string describe() const override { return "exec:" + command_; }

 private:
  void start();
  void stop();
  std::optional<std::string> read_line(std::chrono::steady_clock::time_point deadline, std::string& error);

  std::string command_;
  SearchSpace space_;
  std::chrono::milliseconds timeout_;
  int pid_ = -1;
  int fd_ = -1;
  std::string buffer_;
  std::int64_t next_id_ = 0;
};

}  // namespace houses
