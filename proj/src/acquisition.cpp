#include "houses/acquisition.hpp"

#include <cmath>
#include <numbers>

#include "houses/errors.hpp"

namespace houses {

std::string to_string(AcquisitionKind kind) {
  switch (kind) {
    case AcquisitionKind::pi: return "pi";
    case AcquisitionKind::ei: return "ei";
    case AcquisitionKind::ucb: return "ucb";
  }
  return "?";
}

AcquisitionKind parse_acquisition_kind(const std::string& s) {
  if (s == "pi") return AcquisitionKind::pi;
  if (s == "ei") return AcquisitionKind::ei;
  if (s == "ucb") return AcquisitionKind::ucb;
  throw ArgumentError("unknown acquisition '" + s + "'");
}

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double score(const AcquisitionSpec& spec, double mean, double sigma) {
  if (!std::isfinite(mean) || !std::isfinite(sigma) || !std::isfinite(spec.f_best)) {
    throw DomainError("acquisition: non-finite input");
  }
  if (sigma < 0.0) throw DomainError("acquisition: sigma must be >= 0");
  if (spec.kind == AcquisitionKind::ucb) {
    if (!(spec.w >= 0.0)) throw DomainError("acquisition: UCB weight must be >= 0");
    return spec.w * sigma - mean;
  }
  const double improvement = spec.f_best - mean;
  if (sigma == 0.0) {
    if (spec.kind == AcquisitionKind::pi) return improvement > 0.0 ? 1.0 : 0.0;
    return std::max(improvement, 0.0);
  }
  const double gamma = improvement / sigma;
  if (spec.kind == AcquisitionKind::pi) return normal_cdf(gamma);
  const double ei = sigma * (gamma * normal_cdf(gamma) + normal_pdf(gamma));
  return ei > 0.0 ? ei : 0.0;
}

std::size_t argbest(const AcquisitionSpec& spec, std::span<const Candidate> candidates) {
  if (candidates.empty()) throw ArgumentError("argbest: no candidates");
  std::size_t best = 0;
  double best_score = score(spec, candidates[0].mean, candidates[0].sigma);
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const double s = score(spec, candidates[i].mean, candidates[i].sigma);
    if (s > best_score || (s == best_score && candidates[i].mean < candidates[best].mean)) {
      best = i;
      best_score = s;
    }
  }
  return best;
}

}  // namespace houses
