#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "houses/objective.hpp"
#include "houses/search_space.hpp"

namespace houses::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // objective/data/runtime failure
inline constexpr int kExitUsage = 2;    // missing or invalid flags, unreadable inputs

/// Entry point of the `houses` tool: `optimize`, `compare`, `importance`.
int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Builtin name, or `exec:<shell command>` for an external worker.
std::unique_ptr<Objective> make_objective(const std::string& spec, const SearchSpace& space,
                                          double timeout_seconds, std::uint64_t data_seed);

/// Shortest round-trip decimal form; "inf"/"-inf"/"nan" for non-finite values.
std::string format_double(double v);

/// Type-7 (linear interpolation) sample quantile of unsorted values.
double quantile(std::vector<double> values, double q);

}  // namespace houses::cli
