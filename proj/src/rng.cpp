#include "houses/rng.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace houses {

namespace {

std::mt19937_64 seeded_engine(const std::vector<std::uint64_t>& path) {
  std::vector<std::uint32_t> words;
  words.reserve(path.size() * 2 + 1);
  words.push_back(static_cast<std::uint32_t>(path.size()));
  for (std::uint64_t v : path) {
    words.push_back(static_cast<std::uint32_t>(v & 0xffffffffu));
    words.push_back(static_cast<std::uint32_t>(v >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}

}  // namespace

Rng::Rng(std::uint64_t seed, std::initializer_list<std::uint64_t> stream) {
  path_.push_back(seed);
  path_.insert(path_.end(), stream.begin(), stream.end());
  engine_ = seeded_engine(path_);
}

Rng::Rng(std::vector<std::uint64_t> path) : path_(std::move(path)), engine_(seeded_engine(path_)) {}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n <= 1) return 0;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t v = engine_();
  while (v >= limit) v = engine_();
  return v % n;
}

Rng Rng::split(std::uint64_t tag) const {
  auto path = path_;
  path.push_back(tag);
  return Rng(std::move(path));
}

std::string Rng::key() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < path_.size(); ++i) {
    if (i) os << '/';
    os << path_[i];
  }
  return os.str();
}

}  // namespace houses
