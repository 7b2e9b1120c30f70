#include "houses/optimizer.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "houses/errors.hpp"
#include "houses/gp.hpp"
#include "houses/rng.hpp"

namespace houses {

namespace {

// Stream tags; each (seed, tag, evaluation index) names one random stream so
// any step can be recomputed from the history alone.
constexpr std::uint64_t kRandomTag = 0x52;
constexpr std::uint64_t kFitTag = 0x46;
constexpr std::uint64_t kFanovaTag = 0x41;
constexpr std::uint64_t kProposeTag = 0x50;

std::optional<std::size_t> best_of(const std::vector<EvaluationRecord>& history, std::size_t count) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < count; ++i) {
    const auto& r = history[i];
    if (!r.ok()) continue;
    if (!best || r.value < history[*best].value) best = i;
  }
  return best;
}

struct TrainingSet {
  Eigen::MatrixXd X;
  std::vector<double> y;
  std::vector<Individual> individuals;
};

TrainingSet training_set(const std::vector<EvaluationRecord>& history, std::size_t count, std::size_t dim) {
  TrainingSet t;
  std::size_t n = 0;
  for (std::size_t i = 0; i < count; ++i) n += history[i].ok() ? 1 : 0;
  t.X.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
  std::size_t row = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const auto& r = history[i];
    if (!r.ok()) continue;
    for (std::size_t d = 0; d < dim; ++d) t.X(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(d)) = r.unit[d];
    t.y.push_back(r.value);
    t.individuals.push_back({r.unit, r.value, r.index});
    ++row;
  }
  return t;
}

class Engine {
 public:
  Engine(const SearchSpace& space, Objective& objective, const RunConfig& config, const RecordSink& sink)
      : space_(space), objective_(objective), config_(config), sink_(sink), dim_(space.dim()) {}

  RunState go(std::vector<EvaluationRecord> history) {
    config_.validate(dim_);
    state_.seed = config_.seed;
    for (std::size_t i = 0; i < history.size(); ++i) {
      if (history[i].index != i) throw DataError("history indices must be dense from 0");
      if (history[i].unit.size() != dim_) throw DataError("history record dimension does not match the space");
    }
    if (history.size() > config_.budget) throw DataError("history is longer than the budget");
    state_.history = std::move(history);
    state_.best_index = best_of(state_.history, state_.history.size());
    state_.anchor = update_anchor(state_);
    state_.generation = state_.history.empty() ? 0 : state_.history.back().generation;

    if (config_.strategy == Strategy::random) {
      for (std::size_t i = state_.history.size(); i < config_.budget; ++i) {
        Rng rng(config_.seed, {kRandomTag, i});
        std::vector<double> unit(dim_);
        for (auto& u : unit) u = rng.uniform();
        evaluate(unit, 0, rng.key());
      }
      return std::move(state_);
    }

    const std::size_t n0 = config_.initial_size(dim_);
    if (state_.history.size() < n0) {
      const auto design = lhs_sample(space_, n0, config_.seed);
      for (std::size_t i = state_.history.size(); i < n0; ++i) {
        evaluate(design[i].unit, 0, Rng(config_.seed, {0x1b5}).key() + "#" + std::to_string(i));
      }
    }
    while (state_.history.size() < config_.budget) step();
    return std::move(state_);
  }

 private:
  void evaluate(const std::vector<double>& unit, std::size_t generation, std::string rng_key) {
    EvaluationRecord rec;
    rec.index = state_.history.size();
    rec.unit = unit;
    rec.raw = denormalize(space_, unit);
    rec.generation = generation;
    rec.rng = std::move(rng_key);
    const Configuration cfg{rec.unit, rec.raw};
    const auto t0 = std::chrono::steady_clock::now();
    EvalOutcome out;
    try {
      out = objective_.evaluate(cfg);
    } catch (const std::exception& e) {
      out = EvalOutcome::failure(e.what());
    }
    rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    if (out.status == EvalStatus::ok && !std::isfinite(out.value)) {
      out = EvalOutcome::failure("non-finite objective value");
    }
    rec.status = out.status;
    rec.value = out.status == EvalStatus::ok ? out.value : std::numeric_limits<double>::quiet_NaN();
    rec.message = out.message;
    state_.history.push_back(rec);
    state_.generation = generation;
    if (rec.ok() && (!state_.best_index || rec.value < state_.history[*state_.best_index].value)) {
      state_.best_index = rec.index;
      state_.anchor = AnchorPoint{rec.unit};
    }
    if (sink_) sink_(state_.history.back());
  }

  std::optional<AnchorPoint> anchor_for(std::size_t count) const {
    const auto b = best_of(state_.history, count);
    if (!b) return std::nullopt;
    return AnchorPoint{state_.history[*b].unit};
  }

  // Hyperparameters fitted at the most recent refit index, recomputed from
  // the history prefix when this engine has not fitted them itself (resume).
  const KernelParams& surrogate_params(std::size_t i, const TrainingSet& current) {
    const std::size_t n0 = config_.initial_size(dim_);
    const std::size_t every = std::max<std::size_t>(1, config_.refit_every);
    const std::size_t refit_at = n0 + ((i - n0) / every) * every;
    if (params_fitted_at_ != refit_at || !state_.surrogate_params) {
      const TrainingSet prefix = refit_at == i ? current : training_set(state_.history, refit_at, dim_);
      const KernelKind kind = config_.surrogate_kernel();
      std::optional<AnchorPoint> anchor;
      if (kind != KernelKind::ard_se) anchor = anchor_for(refit_at);
      FitOptions options;
      options.starts = config_.fit_starts;
      const Rng fit_rng(config_.seed, {kFitTag, refit_at});
      const GPModel fitted =
          GPModel::fit(prefix.X, prefix.y, kind, anchor, Rng(fit_rng).next_u64(), options);
      state_.surrogate_params = fitted.params();
      params_fitted_at_ = refit_at;
    }
    return *state_.surrogate_params;
  }

  void step() {
    const std::size_t i = state_.history.size();
    const std::size_t generation = i - config_.initial_size(dim_) + 1;
    Rng rng(config_.seed, {kProposeTag, i});
    const TrainingSet train = training_set(state_.history, i, dim_);
    if (train.y.empty()) {
      std::vector<double> unit(dim_);
      for (auto& u : unit) u = rng.uniform();
      evaluate(unit, generation, rng.key());
      return;
    }

    const KernelKind kind = config_.surrogate_kernel();
    std::optional<AnchorPoint> anchor;
    if (kind != KernelKind::ard_se) anchor = state_.anchor;

    std::optional<GPModel> model;
    try {
      model = GPModel::build(train.X, train.y, surrogate_params(i, train), anchor);
    } catch (const ConditioningError&) {
      FitOptions options;
      options.starts = config_.fit_starts;
      model = GPModel::fit(train.X, train.y, kind, anchor, Rng(config_.seed, {kFitTag, i, 1}).next_u64(), options);
    }

    std::vector<double> importance(dim_, 1.0 / static_cast<double>(dim_));
    if (train.y.size() >= 2 * dim_) {
      FanovaOptions fo = config_.fanova;
      fo.seed = Rng(config_.seed, {kFanovaTag, i}).next_u64();
      importance = houses::importance(*model, fo).importances;
    }
    state_.importance = importance;

    const auto parents = grid_select(train.individuals, config_.es.grids);
    AcquisitionSpec spec{config_.acquisition, config_.ucb_w, state_.history[*state_.best_index].value};
    std::vector<std::vector<double>> evaluated;
    evaluated.reserve(i);
    for (const auto& r : state_.history) evaluated.push_back(r.unit);
    const Proposal proposal = propose(*model, spec, parents, importance, config_.es, rng, evaluated);
    evaluate(proposal.unit, generation, rng.key());
  }

  const SearchSpace& space_;
  Objective& objective_;
  RunConfig config_;
  const RecordSink& sink_;
  std::size_t dim_;
  RunState state_;
  std::optional<std::size_t> params_fitted_at_;
};

}  // namespace

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::houses: return "houses";
    case Strategy::gp_stationary: return "gp";
    case Strategy::random: return "random";
  }
  return "?";
}

Strategy parse_strategy(const std::string& s) {
  if (s == "houses") return Strategy::houses;
  if (s == "gp" || s == "gp_stationary") return Strategy::gp_stationary;
  if (s == "random") return Strategy::random;
  throw ArgumentError("unknown strategy '" + s + "'");
}

std::size_t RunConfig::initial_size(std::size_t dim) const {
  return n0 > 0 ? n0 : std::max<std::size_t>(10, 2 * dim);
}

KernelKind RunConfig::surrogate_kernel() const {
  return strategy == Strategy::gp_stationary ? KernelKind::ard_se : kernel;
}

void RunConfig::validate(std::size_t dim) const {
  if (budget < 1) throw ArgumentError("budget must be >= 1");
  if (strategy != Strategy::random) {
    if (initial_size(dim) < 2) throw ArgumentError("initial population must be >= 2");
    if (budget < initial_size(dim)) {
      throw ArgumentError("budget (" + std::to_string(budget) + ") must be >= initial population (" +
                          std::to_string(initial_size(dim)) + ")");
    }
    es.validate();
  }
  if (!(ucb_w >= 0.0)) throw ArgumentError("UCB weight must be >= 0");
}

nlohmann::json RunConfig::to_json() const {
  return nlohmann::json{{"n0", n0},
                        {"budget", budget},
                        {"strategy", to_string(strategy)},
                        {"kernel", to_string(kernel)},
                        {"acquisition", to_string(acquisition)},
                        {"ucb_w", ucb_w},
                        {"es",
                         {{"grids", es.grids},
                          {"offspring", es.offspring},
                          {"pm", es.pm},
                          {"eta", es.eta},
                          {"p_min", es.p_min},
                          {"p_max", es.p_max}}},
                        {"seed", seed},
                        {"refit_every", refit_every},
                        {"fit_starts", fit_starts},
                        {"fanova", {{"grid_size", fanova.grid_size}, {"mc_samples", fanova.mc_samples}}}};
}

RunConfig RunConfig::from_json(const nlohmann::json& doc) {
  RunConfig c;
  try {
    c.n0 = doc.value("n0", c.n0);
    c.budget = doc.value("budget", c.budget);
    c.strategy = parse_strategy(doc.value("strategy", std::string("houses")));
    c.kernel = parse_kernel_kind(doc.value("kernel", std::string("houses")));
    c.acquisition = parse_acquisition_kind(doc.value("acquisition", std::string("ucb")));
    c.ucb_w = doc.value("ucb_w", c.ucb_w);
    if (doc.contains("es")) {
      const auto& es = doc["es"];
      c.es.grids = es.value("grids", c.es.grids);
      c.es.offspring = es.value("offspring", c.es.offspring);
      c.es.pm = es.value("pm", c.es.pm);
      c.es.eta = es.value("eta", c.es.eta);
      c.es.p_min = es.value("p_min", c.es.p_min);
      c.es.p_max = es.value("p_max", c.es.p_max);
    }
    c.seed = doc.value("seed", c.seed);
    c.refit_every = doc.value("refit_every", c.refit_every);
    c.fit_starts = doc.value("fit_starts", c.fit_starts);
    if (doc.contains("fanova")) {
      c.fanova.grid_size = doc["fanova"].value("grid_size", c.fanova.grid_size);
      c.fanova.mc_samples = doc["fanova"].value("mc_samples", c.fanova.mc_samples);
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed run configuration: ") + e.what());
  }
  return c;
}

std::optional<double> RunState::best_value() const {
  if (!best_index) return std::nullopt;
  return history[*best_index].value;
}

const EvaluationRecord* RunState::best() const { return best_index ? &history[*best_index] : nullptr; }

RunState run(const SearchSpace& space, Objective& objective, const RunConfig& config, const RecordSink& sink) {
  return Engine(space, objective, config, sink).go({});
}

RunState resume(const SearchSpace& space, Objective& objective, const RunConfig& config,
                std::vector<EvaluationRecord> history, const RecordSink& sink) {
  return Engine(space, objective, config, sink).go(std::move(history));
}

RunState run_random(const SearchSpace& space, Objective& objective, std::size_t budget, std::uint64_t seed,
                    const RecordSink& sink) {
  RunConfig config;
  config.strategy = Strategy::random;
  config.budget = budget;
  config.seed = seed;
  return run(space, objective, config, sink);
}

AnchorPoint update_anchor(const RunState& state) {
  const auto b = best_of(state.history, state.history.size());
  if (!b) return state.anchor;
  return AnchorPoint{state.history[*b].unit};
}

std::vector<double> best_so_far(const std::vector<EvaluationRecord>& history) {
  std::vector<double> trace(history.size());
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < history.size(); ++i) {
    if (history[i].ok() && history[i].value < best) best = history[i].value;
    trace[i] = best;
  }
  return trace;
}

}  // namespace houses
