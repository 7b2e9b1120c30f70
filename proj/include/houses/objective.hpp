#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "houses/search_space.hpp"

namespace houses {

enum class EvalStatus { ok, failed };

std::string to_string(EvalStatus status);

struct EvalOutcome {
  double value = std::numeric_limits<double>::quiet_NaN();
  EvalStatus status = EvalStatus::failed;
  std::string message;

  static EvalOutcome success(double v) { return {v, EvalStatus::ok, {}}; }
  static EvalOutcome failure(std::string why) {
    return {std::numeric_limits<double>::quiet_NaN(), EvalStatus::failed, std::move(why)};
  }
};

/// One true objective evaluation; the unit of persistence in run logs.
struct EvaluationRecord {
  std::size_t index = 0;
  std::vector<double> unit;
  std::vector<double> raw;
  double value = std::numeric_limits<double>::quiet_NaN();  // lower is better
  EvalStatus status = EvalStatus::ok;
  double wall_ms = 0.0;
  std::size_t generation = 0;
  std::string rng;      // key of the random stream that produced the point
  std::string message;  // failure reason, empty when ok

  bool ok() const { return status == EvalStatus::ok; }
};

/// Black-box function to minimize. evaluate() must not throw for ordinary
/// failures; it reports them through EvalOutcome.
class Objective {
 public:
  virtual ~Objective() = default;
  virtual EvalOutcome evaluate(const Configuration& config) = 0;
  virtual std::string describe() const = 0;
};

const std::vector<std::string>& builtin_objective_names();
bool is_builtin_objective(const std::string& name);

/// Required dimension of a builtin, or 0 when any dimension works.
std::size_t builtin_dimension(const std::string& name);

/// Five-parameter space of the mlp_synth objective.
SearchSpace mlp_synth_space();

/// Value of a builtin at unit-cube coordinates. mlp_synth interprets them
/// through mlp_synth_space() with data seed 0.
double eval_builtin(const std::string& name, std::span<const double> unit);

class BuiltinObjective final : public Objective {
 public:
  /// Throws ArgumentError for unknown names or a space of the wrong dimension.
  BuiltinObjective(std::string name, const SearchSpace& space, std::uint64_t data_seed = 0);
  EvalOutcome evaluate(const Configuration& config) override;
  std::string describe() const override { return name_; }

 private:
  std::string name_;
  std::uint64_t data_seed_;
};

/// Wraps a callable; exceptions it throws become failed evaluations.
class FunctionObjective final : public Objective {
 public:
  using Fn = std::function<EvalOutcome(const Configuration&)>;
  explicit FunctionObjective(Fn fn, std::string name = "function") : fn_(std::move(fn)), name_(std::move(name)) {}
  EvalOutcome evaluate(const Configuration& config) override;
  std::string describe() const override { return name_; }

 private:
  Fn fn_;
  std::string name_;
};

}  // namespace houses
