#include "houses/run_log.hpp"

#include <cmath>

#include "houses/errors.hpp"

namespace houses {

nlohmann::json record_to_json(const EvaluationRecord& r) {
  nlohmann::json doc{{"index", r.index},
                     {"unit", r.unit},
                     {"raw", r.raw},
                     {"value", nullptr},
                     {"status", to_string(r.status)},
                     {"wall_ms", r.wall_ms},
                     {"generation", r.generation},
                     {"rng", r.rng}};
  if (r.ok() && std::isfinite(r.value)) doc["value"] = r.value;
  if (!r.message.empty()) doc["message"] = r.message;
  return doc;
}

EvaluationRecord record_from_json(const nlohmann::json& doc) {
  try {
    EvaluationRecord r;
    r.index = doc.at("index").get<std::size_t>();
    r.unit = doc.at("unit").get<std::vector<double>>();
    r.raw = doc.at("raw").get<std::vector<double>>();
    const auto status = doc.at("status").get<std::string>();
    if (status != "ok" && status != "failed") throw FormatError("unknown record status '" + status + "'");
    r.status = status == "ok" ? EvalStatus::ok : EvalStatus::failed;
    if (r.ok()) {
      if (doc.at("value").is_null()) throw FormatError("ok record without a value");
      r.value = doc.at("value").get<double>();
    }
    r.wall_ms = doc.value("wall_ms", 0.0);
    r.generation = doc.value("generation", std::size_t{0});
    r.rng = doc.value("rng", std::string{});
    r.message = doc.value("message", std::string{});
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed record: ") + e.what());
  }
}

ReplayResult replay_run_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open run log '" + path.string() + "'");
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();

  ReplayResult result;
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const bool last = n + 1 == lines.size();
    try {
      if (lines[n].empty()) throw FormatError("blank line");
      const auto doc = nlohmann::json::parse(lines[n]);
      if (doc.is_object() && doc.contains("header")) {
        if (n != 0) throw FormatError("header after the first line");
        result.header = doc["header"];
        continue;
      }
      auto rec = record_from_json(doc);
      if (rec.index != result.records.size()) {
        throw FormatError("record index " + std::to_string(rec.index) + " out of sequence");
      }
      result.records.push_back(std::move(rec));
    } catch (const std::exception& e) {
      const std::string where = path.string() + ":" + std::to_string(n + 1) + ": " + e.what();
      if (last) {
        result.warnings.push_back("ignoring corrupt trailing line " + where);
        break;
      }
      throw FormatError("corrupt run log line " + where);
    }
  }
  return result;
}

RunLogWriter::RunLogWriter(const std::filesystem::path& path, const nlohmann::json& header,
                           const std::vector<EvaluationRecord>& records)
    : path_(path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  out_.open(path, std::ios::out | std::ios::trunc);
  if (!out_) throw ArgumentError("cannot write run log '" + path.string() + "'");
  out_ << nlohmann::json{{"header", header}}.dump() << '\n';
  for (const auto& r : records) out_ << record_to_json(r).dump() << '\n';
  out_.flush();
}

void RunLogWriter::append(const EvaluationRecord& record) {
  out_ << record_to_json(record).dump() << '\n';
  out_.flush();
  if (!out_) throw std::runtime_error("failed writing run log '" + path_.string() + "'");
}

}  // namespace houses
