#include "houses/es_search.hpp"

#include <algorithm>
#include <cmath>

#include "houses/errors.hpp"
#include "houses/gp.hpp"

namespace houses {

namespace {

constexpr double kImportanceFloor = 0.01;
constexpr double kDuplicateTolerance = 1e-9;
constexpr int kDuplicateRetries = 10;

bool is_duplicate(std::span<const double> x, std::span<const std::vector<double>> evaluated) {
  for (const auto& e : evaluated) {
    bool same = e.size() == x.size();
    for (std::size_t d = 0; same && d < x.size(); ++d) same = std::abs(e[d] - x[d]) <= kDuplicateTolerance;
    if (same) return true;
  }
  return false;
}

}  // namespace

void ESConfig::validate() const {
  if (grids < 1) throw ArgumentError("ES: grids must be >= 1");
  if (offspring < 1) throw ArgumentError("ES: offspring must be >= 1");
  if (pm > 1.0) throw ArgumentError("ES: mutation rate must be in (0, 1]");
  if (!(eta > 0.0)) throw ArgumentError("ES: eta must be > 0");
  if (!(p_min > 0.0 && p_min <= p_max && p_max <= 1.0)) {
    throw ArgumentError("ES: probability clamps must satisfy 0 < p_min <= p_max <= 1");
  }
}

std::vector<Individual> grid_select(std::span<const Individual> history, std::size_t grids) {
  if (history.empty()) throw ArgumentError("grid_select: empty history");
  if (grids < 1) throw ArgumentError("grid_select: grids must be >= 1");
  const std::size_t dim = history.front().unit.size();
  std::vector<std::size_t> chosen;
  std::vector<std::ptrdiff_t> best(grids);
  for (std::size_t d = 0; d < dim; ++d) {
    std::fill(best.begin(), best.end(), -1);
    for (std::size_t i = 0; i < history.size(); ++i) {
      const double u = history[i].unit[d];
      const auto bin = std::min<std::size_t>(static_cast<std::size_t>(u * static_cast<double>(grids)), grids - 1);
      if (best[bin] < 0 || history[i].value < history[static_cast<std::size_t>(best[bin])].value) {
        best[bin] = static_cast<std::ptrdiff_t>(i);
      }
    }
    for (auto b : best) {
      if (b < 0) continue;
      const auto idx = static_cast<std::size_t>(b);
      if (std::find(chosen.begin(), chosen.end(), idx) == chosen.end()) chosen.push_back(idx);
    }
  }
  std::vector<Individual> parents;
  parents.reserve(chosen.size());
  for (auto idx : chosen) parents.push_back(history[idx]);
  return parents;
}

std::vector<double> mutation_probabilities(std::span<const double> importance, const ESConfig& config) {
  const std::size_t dim = importance.size();
  if (dim == 0) throw ArgumentError("mutation_probabilities: empty importance vector");
  double total = 0.0;
  for (double v : importance) total += v + kImportanceFloor;
  const double rate = config.base_rate(dim);
  std::vector<double> p(dim);
  for (std::size_t d = 0; d < dim; ++d) {
    const double raw = rate * static_cast<double>(dim) * (importance[d] + kImportanceFloor) / total;
    p[d] = std::clamp(raw, config.p_min, config.p_max);
  }
  return p;
}

std::vector<double> polynomial_mutation(std::span<const double> parent, std::span<const double> probs, double eta,
                                        Rng& rng) {
  if (parent.size() != probs.size()) throw ArgumentError("polynomial_mutation: size mismatch");
  std::vector<double> child(parent.begin(), parent.end());
  const double power = 1.0 / (eta + 1.0);
  for (std::size_t d = 0; d < child.size(); ++d) {
    if (!(rng.uniform() < probs[d])) continue;
    const double x = child[d];
    const double r = rng.uniform();
    double moved;
    if (r < 0.5) {
      const double delta = std::pow(2.0 * r, power) - 1.0;  // in [-1, 0)
      moved = x + delta * x;
    } else {
      const double delta = 1.0 - std::pow(2.0 * (1.0 - r), power);  // in [0, 1)
      moved = x + delta * (1.0 - x);
    }
    child[d] = std::clamp(moved, 0.0, 1.0);
  }
  return child;
}

Proposal propose(const GPModel& model, const AcquisitionSpec& spec, std::span<const Individual> parents,
                 std::span<const double> importance, const ESConfig& config, Rng& rng,
                 std::span<const std::vector<double>> evaluated, bool keep_candidates) {
  if (parents.empty()) throw ArgumentError("propose: no parents");
  config.validate();
  const auto probs = mutation_probabilities(importance, config);

  std::vector<Candidate> candidates;
  candidates.reserve(parents.size() * config.offspring);
  for (std::size_t k = 0; k < parents.size(); ++k) {
    Rng stream = rng.split(k);
    for (std::size_t c = 0; c < config.offspring; ++c) {
      Candidate cand;
      cand.point = polynomial_mutation(parents[k].unit, probs, config.eta, stream);
      const Prediction pr = model.predict(cand.point);
      cand.mean = pr.mean;
      cand.sigma = std::sqrt(pr.variance);
      candidates.push_back(std::move(cand));
    }
  }
  const std::size_t best = argbest(spec, candidates);

  Proposal out;
  out.unit = candidates[best].point;
  out.mean = candidates[best].mean;
  out.sigma = candidates[best].sigma;
  out.score = score(spec, out.mean, out.sigma);
  out.candidates = candidates.size();

  if (!evaluated.empty() && is_duplicate(out.unit, evaluated)) {
    Rng retry = rng.split(parents.size() + 1);
    bool fixed = false;
    for (int attempt = 0; attempt < kDuplicateRetries && !fixed; ++attempt) {
      auto next = polynomial_mutation(out.unit, probs, config.eta, retry);
      if (!is_duplicate(next, evaluated)) {
        out.unit = std::move(next);
        fixed = true;
      }
    }
    if (!fixed) {
      for (double& u : out.unit) u = retry.uniform();
    }
    const Prediction pr = model.predict(out.unit);
    out.mean = pr.mean;
    out.sigma = std::sqrt(pr.variance);
    out.score = score(spec, out.mean, out.sigma);
    out.replaced_duplicate = true;
  }
  // The parent stream advances once per proposal regardless of the path taken.
  rng.next_u64();
  if (keep_candidates) out.scored = std::move(candidates);
  return out;
}

}  // namespace houses
