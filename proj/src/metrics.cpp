#include "houses/metrics.hpp"

namespace houses {

namespace {

std::optional<double> ratio(std::uint64_t num, std::uint64_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

ClassificationMetrics metrics(std::uint64_t tp, std::uint64_t fp, std::uint64_t fn, std::uint64_t tn) {
  return {ratio(tp + tn, tp + fp + fn + tn), ratio(tp, tp + fn), ratio(tn, tn + fp)};
}

}  // namespace houses
