#include "houses/objective.hpp"

#include <algorithm>
#include <cmath>

#include "houses/benchmarks.hpp"
#include "houses/errors.hpp"
#include "houses/mlp_synth.hpp"

namespace houses {

std::string to_string(EvalStatus status) { return status == EvalStatus::ok ? "ok" : "failed"; }

const std::vector<std::string>& builtin_objective_names() {
  static const std::vector<std::string> names{"sphere", "branin", "hartmann6", "rastrigin", "mlp_synth"};
  return names;
}

bool is_builtin_objective(const std::string& name) {
  const auto& names = builtin_objective_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

std::size_t builtin_dimension(const std::string& name) {
  if (name == "branin") return 2;
  if (name == "hartmann6") return 6;
  if (name == "mlp_synth") return 5;
  if (name == "sphere" || name == "rastrigin") return 0;
  throw ArgumentError("unknown builtin objective '" + name + "'");
}

SearchSpace mlp_synth_space() {
  return SearchSpace({{"learning_rate", ParamKind::continuous, 1e-3, 1.0, Scale::logarithmic},
                      {"hidden_units", ParamKind::integer, 2, 64, Scale::linear},
                      {"l2", ParamKind::continuous, 1e-6, 1e-1, Scale::logarithmic},
                      {"epochs", ParamKind::integer, 5, 200, Scale::linear},
                      {"batch_size", ParamKind::integer, 4, 64, Scale::linear}});
}

double eval_builtin(const std::string& name, std::span<const double> unit) {
  const std::size_t dim = builtin_dimension(name);
  if (dim != 0 && unit.size() != dim) {
    throw ArgumentError("objective '" + name + "' expects dimension " + std::to_string(dim) + ", got " +
                        std::to_string(unit.size()));
  }
  if (unit.empty()) throw ArgumentError("objective '" + name + "': empty input");
  if (name == "sphere") return bench::sphere(unit);
  if (name == "branin") return bench::branin(unit);
  if (name == "hartmann6") return bench::hartmann6(unit);
  if (name == "rastrigin") return bench::rastrigin(unit);
  const auto raw = denormalize(mlp_synth_space(), unit);
  return train_mlp_synth(MlpHyperparameters::from_raw(raw), 0).validation_error;
}

BuiltinObjective::BuiltinObjective(std::string name, const SearchSpace& space, std::uint64_t data_seed)
    : name_(std::move(name)), data_seed_(data_seed) {
  const std::size_t dim = builtin_dimension(name_);
  if (dim != 0 && space.dim() != dim) {
    throw ArgumentError("objective '" + name_ + "' needs a " + std::to_string(dim) + "-dimensional space, got " +
                        std::to_string(space.dim()));
  }
}

EvalOutcome BuiltinObjective::evaluate(const Configuration& config) {
  if (name_ == "mlp_synth") {
    const auto result = train_mlp_synth(MlpHyperparameters::from_raw(config.raw), data_seed_);
    if (result.diverged) return EvalOutcome::failure("training diverged (non-finite loss)");
    return EvalOutcome::success(result.validation_error);
  }
  return EvalOutcome::success(eval_builtin(name_, config.unit));
}

EvalOutcome FunctionObjective::evaluate(const Configuration& config) {
  try {
    EvalOutcome out = fn_(config);
    if (out.status == EvalStatus::ok && !std::isfinite(out.value)) {
      return EvalOutcome::failure("objective returned a non-finite value");
    }
    return out;
  } catch (const std::exception& e) {
    return EvalOutcome::failure(e.what());
  }
}

}  // namespace houses
