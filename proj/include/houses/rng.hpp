#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string>
#include <vector>

namespace houses {

/// Deterministic random stream keyed by a seed plus a path of stream tags.
///
/// Streams are derived with std::seed_seq, whose algorithm is fully specified,
/// and values are produced from raw std::mt19937_64 output rather than through
/// the implementation-defined std distributions, so sequences are identical on
/// every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::initializer_list<std::uint64_t> stream = {});

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal (Box-Muller).
  double normal();
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

  /// Independent child stream; does not advance this stream.
  Rng split(std::uint64_t tag) const;

  /// Stable textual key of the stream (seed and tag path), for logs.
  std::string key() const;

 private:
  explicit Rng(std::vector<std::uint64_t> path);

  std::vector<std::uint64_t> path_;
  std::mt19937_64 engine_;
};

}  // namespace houses
