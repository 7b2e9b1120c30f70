#include "houses/cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "houses/errors.hpp"
#include "houses/external.hpp"
#include "houses/fanova.hpp"
#include "houses/gp.hpp"
#include "houses/optimizer.hpp"
#include "houses/run_log.hpp"

namespace houses::cli {

namespace fs = std::filesystem;

namespace {

// Invalid or missing inputs detected after flag parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommonOptions {
  std::string space_path;
  std::string objective = "";
  std::size_t budget = 200;
  std::string kernel = "houses";
  std::string acq = "ucb";
  double ucb_w = 2.0;
  std::size_t n0 = 0;
  std::size_t es_grids = 5;
  std::size_t es_offspring = 10;
  double es_pm = 0.0;
  double es_eta = 20.0;
  double timeout = 600.0;
  std::uint64_t objective_seed = 0;
  std::string out;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--space", o.space_path, "Search-space definition (JSON)")->required();
  cmd->add_option("--objective", o.objective, "Builtin objective name or exec:<command>")->required();
  cmd->add_option("--budget", o.budget, "True evaluations per run")->capture_default_str();
  cmd->add_option("--kernel", o.kernel, "Surrogate kernel for the houses strategy {ard|houses}")
      ->capture_default_str();
  cmd->add_option("--acq", o.acq, "Acquisition function {ei|pi|ucb}")->capture_default_str();
  cmd->add_option("--ucb-w", o.ucb_w, "UCB exploration weight")->capture_default_str();
  cmd->add_option("--n0", o.n0, "Initial LHS population (0 = max(10, 2D))")->capture_default_str();
  cmd->add_option("--es-grids", o.es_grids, "Grid bins per dimension for parent selection")->capture_default_str();
  cmd->add_option("--es-offspring", o.es_offspring, "Offspring per parent")->capture_default_str();
  cmd->add_option("--es-pm", o.es_pm, "Base mutation rate (0 = 1/D)")->capture_default_str();
  cmd->add_option("--es-eta", o.es_eta, "Polynomial mutation distribution index")->capture_default_str();
  cmd->add_option("--timeout", o.timeout, "External objective timeout in seconds")->capture_default_str();
  cmd->add_option("--objective-seed", o.objective_seed, "Data seed of the mlp_synth objective")
      ->capture_default_str();
  cmd->add_option("--out", o.out, "Output directory (default: $HOUSES_LOG_DIR or ./houses_out)");
}

std::string output_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("HOUSES_LOG_DIR"); env && *env) return env;
  return "houses_out";
}

SearchSpace load_space(const std::string& path) {
  try {
    return SearchSpace::load(path);
  } catch (const std::exception& e) {
    throw UsageError(std::string("--space: ") + e.what());
  }
}

RunConfig make_config(const CommonOptions& o, Strategy strategy, std::uint64_t seed) {
  RunConfig c;
  c.budget = o.budget;
  c.strategy = strategy;
  c.n0 = o.n0;
  c.ucb_w = o.ucb_w;
  c.seed = seed;
  c.es.grids = o.es_grids;
  c.es.offspring = o.es_offspring;
  c.es.pm = o.es_pm;
  c.es.eta = o.es_eta;
  try {
    c.kernel = parse_kernel_kind(o.kernel);
  } catch (const ArgumentError& e) {
    throw UsageError(std::string("--kernel: ") + e.what());
  }
  if (c.kernel == KernelKind::relative_distance) throw UsageError("--kernel: expected 'ard' or 'houses'");
  try {
    c.acquisition = parse_acquisition_kind(o.acq);
  } catch (const ArgumentError& e) {
    throw UsageError(std::string("--acq: ") + e.what());
  }
  return c;
}

void check_objective_flag(const CommonOptions& o, const SearchSpace& space) {
  if (o.objective.rfind("exec:", 0) == 0) {
    if (o.objective.size() == 5) throw UsageError("--objective: empty command after 'exec:'");
    return;
  }
  if (!is_builtin_objective(o.objective)) {
    throw UsageError("--objective: unknown builtin '" + o.objective +
                     "' (expected sphere, branin, hartmann6, rastrigin, mlp_synth or exec:<command>)");
  }
  const std::size_t dim = builtin_dimension(o.objective);
  if (dim != 0 && dim != space.dim()) {
    throw UsageError("--objective: '" + o.objective + "' needs a " + std::to_string(dim) +
                     "-dimensional space, --space has " + std::to_string(space.dim()));
  }
}

nlohmann::json make_header(const SearchSpace& space, const RunConfig& config, const std::string& objective,
                           std::uint64_t objective_seed) {
  return nlohmann::json{{"version", 1},
                        {"space", space.to_json()},
                        {"config", config.to_json()},
                        {"seed", config.seed},
                        {"objective", objective},
                        {"objective_seed", objective_seed}};
}

nlohmann::json raw_object(const SearchSpace& space, const std::vector<double>& raw) {
  return wire_params(space, raw);
}

nlohmann::json summary_json(const SearchSpace& space, const RunState& state, const RunConfig& config,
                            const std::string& objective) {
  std::size_t failed = 0;
  for (const auto& r : state.history) failed += r.ok() ? 0 : 1;
  nlohmann::json s{{"objective", objective},
                   {"strategy", to_string(config.strategy)},
                   {"kernel", to_string(config.surrogate_kernel())},
                   {"acquisition", to_string(config.acquisition)},
                   {"seed", config.seed},
                   {"budget", config.budget},
                   {"evaluations", state.history.size()},
                   {"failed", failed},
                   {"best_value", nullptr},
                   {"best_index", nullptr}};
  if (const auto* best = state.best()) {
    s["best_value"] = best->value;
    s["best_index"] = best->index;
    s["best_unit"] = best->unit;
    s["best_raw"] = raw_object(space, best->raw);
  }
  return s;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::out | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
}

int cmd_optimize(const CommonOptions& o, const std::string& strategy_flag, std::uint64_t seed, bool resume_flag,
                 std::ostream& out, std::ostream& err) {
  const SearchSpace space = load_space(o.space_path);
  check_objective_flag(o, space);
  Strategy strategy;
  try {
    strategy = parse_strategy(strategy_flag);
  } catch (const ArgumentError& e) {
    throw UsageError(std::string("--strategy: ") + e.what());
  }
  const RunConfig config = make_config(o, strategy, seed);
  try {
    config.validate(space.dim());
  } catch (const ArgumentError& e) {
    throw UsageError(e.what());
  }
  auto objective = make_objective(o.objective, space, o.timeout, o.objective_seed);

  const fs::path dir = output_dir(o.out);
  const fs::path log_path = dir / "run.jsonl";
  const nlohmann::json header = make_header(space, config, o.objective, o.objective_seed);
  std::vector<EvaluationRecord> prefix;
  if (resume_flag && fs::exists(log_path)) {
    auto replay = replay_run_log(log_path);
    for (const auto& w : replay.warnings) err << "warning: " << w << '\n';
    if (replay.header) {
      auto old = *replay.header;
      auto now = header;
      old["config"].erase("budget");
      now["config"].erase("budget");
      if (old != now) throw UsageError("--resume: existing log was written with a different configuration");
    }
    prefix = std::move(replay.records);
    if (prefix.size() > config.budget) throw UsageError("--resume: log already holds more records than --budget");
    out << "resuming from " << prefix.size() << " logged evaluations\n";
  }
  RunLogWriter writer(log_path, header, prefix);
  const RecordSink sink = [&](const EvaluationRecord& r) { writer.append(r); };
  const RunState state = resume(space, *objective, config, std::move(prefix), sink);

  const auto summary = summary_json(space, state, config, o.objective);
  write_text(dir / "summary.json", summary.dump(2) + "\n");
  if (const auto* best = state.best()) {
    out << "best value " << format_double(best->value) << " at evaluation " << best->index << '\n';
    for (std::size_t d = 0; d < space.dim(); ++d) {
      out << "  " << space.param(d).name << " = " << format_double(best->raw[d]) << '\n';
    }
  } else {
    out << "no successful evaluation\n";
  }
  out << "log: " << log_path.string() << '\n';
  return state.best() ? kExitOk : kExitFailure;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, ',')) {
    cur.erase(0, cur.find_first_not_of(" \t"));
    cur.erase(cur.find_last_not_of(" \t") + 1);
    if (!cur.empty()) parts.push_back(cur);
  }
  return parts;
}

int cmd_compare(const CommonOptions& o, const std::string& strategies_flag, std::size_t seeds,
                std::uint64_t seed_base, std::size_t jobs, std::ostream& out, std::ostream& err) {
  const SearchSpace space = load_space(o.space_path);
  check_objective_flag(o, space);
  if (seeds < 1) throw UsageError("--seeds: must be >= 1");
  std::vector<Strategy> strategies;
  for (const auto& s : split_list(strategies_flag)) {
    try {
      strategies.push_back(parse_strategy(s));
    } catch (const ArgumentError& e) {
      throw UsageError(std::string("--strategies: ") + e.what());
    }
  }
  if (strategies.empty()) throw UsageError("--strategies: empty list");
  for (auto s : strategies) {
    try {
      make_config(o, s, 0).validate(space.dim());
    } catch (const ArgumentError& e) {
      throw UsageError(e.what());
    }
  }
  const fs::path dir = output_dir(o.out);

  struct Cell {
    Strategy strategy;
    std::uint64_t seed;
    std::vector<double> trace;
    std::string error;
  };
  std::vector<Cell> cells;
  for (auto s : strategies)
    for (std::size_t k = 0; k < seeds; ++k) cells.push_back({s, seed_base + k, {}, {}});

  std::mutex next_mutex;
  std::size_t next = 0;
  auto worker = [&]() {
    for (;;) {
      std::size_t idx;
      {
        std::lock_guard lock(next_mutex);
        if (next >= cells.size()) return;
        idx = next++;
      }
      Cell& cell = cells[idx];
      try {
        const RunConfig config = make_config(o, cell.strategy, cell.seed);
        auto objective = make_objective(o.objective, space, o.timeout, o.objective_seed);
        RunLogWriter writer(dir / "runs" / (to_string(cell.strategy) + "_seed" + std::to_string(cell.seed) + ".jsonl"),
                            make_header(space, config, o.objective, o.objective_seed));
        const RecordSink sink = [&](const EvaluationRecord& r) { writer.append(r); };
        const RunState state = run(space, *objective, config, sink);
        cell.trace = best_so_far(state.history);
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
    }
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(jobs, cells.size()));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& c : cells) {
    if (!c.error.empty()) {
      err << "error: " << to_string(c.strategy) << " seed " << c.seed << ": " << c.error << '\n';
      return kExitFailure;
    }
  }

  std::ostringstream csv;
  csv << "strategy,seed,eval_index,best_so_far\n";
  for (const auto& c : cells) {
    for (std::size_t i = 0; i < c.trace.size(); ++i) {
      csv << to_string(c.strategy) << ',' << c.seed << ',' << i << ',' << format_double(c.trace[i]) << '\n';
    }
  }
  write_text(dir / "compare.csv", csv.str());

  std::ostringstream summary;
  summary << "strategy,eval_index,median,q25,q75\n";
  std::map<Strategy, double> final_median;
  for (auto s : strategies) {
    for (std::size_t i = 0; i < o.budget; ++i) {
      std::vector<double> v;
      for (const auto& c : cells)
        if (c.strategy == s) v.push_back(c.trace[i]);
      summary << to_string(s) << ',' << i << ',' << format_double(quantile(v, 0.5)) << ','
              << format_double(quantile(v, 0.25)) << ',' << format_double(quantile(v, 0.75)) << '\n';
      if (i + 1 == o.budget) final_median[s] = quantile(v, 0.5);
    }
  }
  write_text(dir / "compare_summary.csv", summary.str());

  out << "median final best-so-far over " << seeds << " seeds (budget " << o.budget << ")\n";
  for (auto s : strategies) out << "  " << std::setw(8) << std::left << to_string(s) << format_double(final_median[s]) << '\n';
  out << "wins/losses/ties on final best (row vs column)\n" << std::setw(10) << "";
  for (auto s : strategies) out << std::setw(12) << std::left << to_string(s);
  out << '\n';
  for (auto a : strategies) {
    out << std::setw(10) << std::left << to_string(a);
    for (auto b : strategies) {
      std::size_t w = 0, l = 0, t = 0;
      for (std::size_t k = 0; k < seeds; ++k) {
        double fa = 0, fb = 0;
        for (const auto& c : cells) {
          if (c.seed != seed_base + k) continue;
          if (c.strategy == a) fa = c.trace.back();
          if (c.strategy == b) fb = c.trace.back();
        }
        if (fa < fb) ++w;
        else if (fa > fb) ++l;
        else ++t;
      }
      std::ostringstream cell;
      cell << w << '/' << l << '/' << t;
      out << std::setw(12) << std::left << cell.str();
    }
    out << '\n';
  }
  out << "wrote " << (dir / "compare.csv").string() << " and " << (dir / "compare_summary.csv").string() << '\n';
  return kExitOk;
}

int cmd_importance(const std::string& log_flag, const std::string& out_flag, std::size_t grid, std::size_t samples,
                   std::uint64_t seed, std::ostream& out, std::ostream& err) {
  if (!fs::exists(log_flag)) throw UsageError("--log: no such file '" + log_flag + "'");
  ReplayResult replay;
  try {
    replay = replay_run_log(log_flag);
  } catch (const std::exception& e) {
    throw UsageError(std::string("--log: ") + e.what());
  }
  for (const auto& w : replay.warnings) err << "warning: " << w << '\n';
  if (!replay.header || !replay.header->contains("space")) throw UsageError("--log: run log has no header");
  const SearchSpace space = SearchSpace::from_json(replay.header->at("space"));
  RunConfig config;
  if (replay.header->contains("config")) config = RunConfig::from_json(replay.header->at("config"));
  const std::size_t dim = space.dim();

  Eigen::MatrixXd X;
  std::vector<double> y;
  std::vector<std::vector<double>> rows;
  for (const auto& r : replay.records) {
    if (!r.ok()) continue;
    rows.push_back(r.unit);
    y.push_back(r.value);
  }
  if (rows.size() < 2 * dim) {
    throw DataError("run log holds " + std::to_string(rows.size()) + " successful records; importance needs at least " +
                    std::to_string(2 * dim));
  }
  X.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(dim));
  std::size_t best = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t d = 0; d < dim; ++d) X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) = rows[i][d];
    if (y[i] < y[best]) best = i;
  }
  const KernelKind kind = config.surrogate_kernel();
  std::optional<AnchorPoint> anchor;
  if (kind != KernelKind::ard_se) anchor = AnchorPoint{rows[best]};
  const GPModel model = GPModel::fit(X, y, kind, anchor, seed);
  FanovaOptions fo;
  fo.grid_size = grid;
  fo.mc_samples = samples;
  fo.seed = seed;
  const ImportanceReport report = importance(model, fo);

  const fs::path dir = output_dir(out_flag);
  std::ostringstream table;
  table << "name,variance,importance\n";
  for (std::size_t d = 0; d < dim; ++d) {
    table << space.param(d).name << ',' << format_double(report.variances[d]) << ','
          << format_double(report.importances[d]) << '\n';
    std::ostringstream curve;
    curve << "grid_value,marginal\n";
    const auto& c = report.curves[d];
    for (std::size_t g = 0; g < c.grid.size(); ++g) {
      curve << format_double(c.grid[g]) << ',' << format_double(c.values[g]) << '\n';
    }
    write_text(dir / ("marginal_" + space.param(d).name + ".csv"), curve.str());
  }
  write_text(dir / "importance.csv", table.str());

  out << std::left << std::setw(20) << "parameter" << std::setw(16) << "variance" << "importance\n";
  for (std::size_t d = 0; d < dim; ++d) {
    out << std::left << std::setw(20) << space.param(d).name << std::setw(16) << std::setprecision(6)
        << report.variances[d] << std::fixed << std::setprecision(4) << report.importances[d]
        << std::defaultfloat << '\n';
  }
  return kExitOk;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw ArgumentError("quantile of an empty set");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  if (frac == 0.0 || values[lo] == values[hi]) return values[lo];
  return values[lo] + frac * (values[hi] - values[lo]);
}

std::unique_ptr<Objective> make_objective(const std::string& spec, const SearchSpace& space, double timeout_seconds,
                                          std::uint64_t data_seed) {
  if (spec.rfind("exec:", 0) == 0) {
    const auto ms = std::chrono::milliseconds(static_cast<long long>(std::llround(timeout_seconds * 1000.0)));
    return std::make_unique<ExternalObjective>(spec.substr(5), space, ms);
  }
  return std::make_unique<BuiltinObjective>(spec, space, data_seed);
}

int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Surrogate-assisted evolutionary hyperparameter optimization", "houses"};
  app.require_subcommand(1);

  CommonOptions opt_o;
  std::string opt_strategy = "houses";
  std::uint64_t opt_seed = 0;
  bool opt_resume = false;
  auto* optimize = app.add_subcommand("optimize", "Run one optimization and write its log and summary");
  add_common(optimize, opt_o);
  optimize->add_option("--strategy", opt_strategy, "{houses|gp|random}")->capture_default_str();
  optimize->add_option("--seed", opt_seed, "Random seed")->capture_default_str();
  optimize->add_flag("--resume", opt_resume, "Continue from an existing run.jsonl in --out");

  CommonOptions cmp_o;
  std::string cmp_strategies = "houses,gp,random";
  std::size_t cmp_seeds = 5;
  std::uint64_t cmp_seed_base = 0;
  std::size_t cmp_jobs = 1;
  auto* compare = app.add_subcommand("compare", "Run several strategies over repeated seeds");
  add_common(compare, cmp_o);
  compare->add_option("--seeds", cmp_seeds, "Number of seeds per strategy")->capture_default_str();
  compare->add_option("--seed-base", cmp_seed_base, "First seed")->capture_default_str();
  compare->add_option("--strategies", cmp_strategies, "Comma-separated strategies")->capture_default_str();
  compare->add_option("--jobs", cmp_jobs, "Concurrent (strategy, seed) cells")->capture_default_str();

  std::string imp_log;
  std::string imp_out;
  std::size_t imp_grid = 20;
  std::size_t imp_samples = 512;
  std::uint64_t imp_seed = 0;
  auto* imp = app.add_subcommand("importance", "Fit a surrogate to a run log and report per-parameter importance");
  imp->add_option("--log", imp_log, "Run log (run.jsonl)")->required();
  imp->add_option("--out", imp_out, "Output directory (default: $HOUSES_LOG_DIR or ./houses_out)");
  imp->add_option("--grid", imp_grid, "Grid points per marginal curve")->capture_default_str();
  imp->add_option("--samples", imp_samples, "Quasi-random samples per grid point")->capture_default_str();
  imp->add_option("--seed", imp_seed, "Seed for fitting and integration")->capture_default_str();

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (optimize->parsed()) return cmd_optimize(opt_o, opt_strategy, opt_seed, opt_resume, out, err);
    if (compare->parsed()) {
      return cmd_compare(cmp_o, cmp_strategies, cmp_seeds, cmp_seed_base, cmp_jobs, out, err);
    }
    if (imp->parsed()) return cmd_importance(imp_log, imp_out, imp_grid, imp_samples, imp_seed, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace houses::cli
