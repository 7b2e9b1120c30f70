#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "houses/objective.hpp"

namespace houses {

// Run logs are JSON lines: a header line {"header": {...}} carrying the space,
// run configuration, seed and objective, then one EvaluationRecord per line.

nlohmann::json record_to_json(const EvaluationRecord& record);
EvaluationRecord record_from_json(const nlohmann::json& doc);

struct ReplayResult {
  std::optional<nlohmann::json> header;
  std::vector<EvaluationRecord> records;
  std::vector<std::string> warnings;
};

/// Reads a run log. A corrupt final line is dropped with a warning; a corrupt
/// interior line throws FormatError. An empty file yields an empty result.
ReplayResult replay_run_log(const std::filesystem::path& path);

/// Append-only writer; every line is flushed before append() returns.
class RunLogWriter {
 public:
  /// Starts a new log (truncating) with `header` followed by `records`.
  RunLogWriter(const std::filesystem::path& path, const nlohmann::json& header,
               const std::vector<EvaluationRecord>& records = {});

  void append(const EvaluationRecord& record);
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

}  // namespace houses
