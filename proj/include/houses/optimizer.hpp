#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "houses/acquisition.hpp"
#include "houses/es_search.hpp"
#include "houses/fanova.hpp"
#include "houses/kernels.hpp"
#include "houses/objective.hpp"
#include "houses/search_space.hpp"

namespace houses {

enum class Strategy { houses, gp_stationary, random };

std::string to_string(Strategy s);
Strategy parse_strategy(const std::string& s);

struct RunConfig {
  std::size_t n0 = 0;        // initial LHS size; 0 means max(10, 2 D)
  std::size_t budget = 200;  // total true evaluations
  Strategy strategy = Strategy::houses;
  KernelKind kernel = KernelKind::houses;  // surrogate kernel for the houses strategy
  AcquisitionKind acquisition = AcquisitionKind::ucb;
  double ucb_w = 2.0;
  ESConfig es;
  std::uint64_t seed = 0;
  std::size_t refit_every = 5;  // full hyperparameter refit cadence
  std::size_t fit_starts = 8;
  FanovaOptions fanova;         // seed field is ignored; derived per generation

  std::size_t initial_size(std::size_t dim) const;
  /// Kernel actually used: ARD for the stationary baseline.
  KernelKind surrogate_kernel() const;
  void validate(std::size_t dim) const;

  nlohmann::json to_json() const;
  static RunConfig from_json(const nlohmann::json& doc);
};

struct RunState {
  std::vector<EvaluationRecord> history;
  std::optional<std::size_t> best_index;  // into history; empty while nothing succeeded
  AnchorPoint anchor;
  std::size_t generation = 0;
  std::uint64_t seed = 0;
  std::optional<KernelParams> surrogate_params;  // last fitted hyperparameters
  std::vector<double> importance;                // last importance vector used

  std::optional<double> best_value() const;
  const EvaluationRecord* best() const;
};

/// Called after each true evaluation, before the loop proceeds.
using RecordSink = std::function<void(const EvaluationRecord&)>;

/// Surrogate-assisted evolutionary search: LHS start, then per generation
/// fit, grid-select, mutate, score, evaluate the best candidate, move the
/// anchor to the incumbent. Strategy random skips all modelling.
RunState run(const SearchSpace& space, Objective& objective, const RunConfig& config,
             const RecordSink& sink = {});

/// Continues a run from a replayed history prefix. For deterministic
/// objectives the result equals an uninterrupted run with the same config.
RunState resume(const SearchSpace& space, Objective& objective, const RunConfig& config,
                std::vector<EvaluationRecord> history, const RecordSink& sink = {});

/// Random Search baseline: `budget` i.i.d. uniform points.
RunState run_random(const SearchSpace& space, Objective& objective, std::size_t budget, std::uint64_t seed,
                    const RecordSink& sink = {});

/// Unit vector of the lowest successful record, earliest on ties.
AnchorPoint update_anchor(const RunState& state);

/// best_so_far[i] = min of successful values in history[0..i]; +inf before
/// the first success.
std::vector<double> best_so_far(const std::vector<EvaluationRecord>& history);

}  // namespace houses
