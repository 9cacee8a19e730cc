// Command-line front end: simulate, theory, analyze, fit, validate.
//
// Exit codes: 0 success, 1 runtime or check failure, 2 usage error.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "nhpp/analytic.hpp"
#include "nhpp/inference.hpp"
#include "nhpp/io.hpp"
#include "nhpp/simulate.hpp"
#include "nhpp/validation.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = NHPP_VERSION;

// Bad flag values that CLI11 cannot catch on its own.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Exit 1 after a report has already been written.
class CheckFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

nhpp::IntensityParams make_params(double a, double b) {
  try {
    return nhpp::IntensityParams(a, b);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

void prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw UsageError("cannot create output directory " + dir.string());
  }
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

template <class Writer>
std::string render(Writer&& write) {
  std::ostringstream out;
  write(out);
  return out.str();
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
  double a = 0, b = 0;
  std::optional<double> horizon;
  std::optional<std::size_t> count;
  std::size_t replicas = 1;
  std::uint64_t seed = 0;
  std::string method = "inversion";
  std::string layout = "per-file";
  unsigned threads = 0;
  std::string out;
};

void run_simulate(const SimulateArgs& args) {
  nhpp::SimulationConfig cfg;
  cfg.params = make_params(args.a, args.b);
  if (args.horizon) {
    if (!(*args.horizon > 0.0)) throw UsageError("--horizon must be > 0");
    cfg.horizon = nhpp::TimeHorizon{*args.horizon};
  } else {
    if (*args.count == 0) throw UsageError("--count must be >= 1");
    cfg.horizon = nhpp::EventCount{*args.count};
  }
  if (args.replicas == 0) throw UsageError("--replicas must be >= 1");
  cfg.replicas = args.replicas;
  cfg.master_seed = args.seed;
  cfg.method = args.method == "thinning" ? nhpp::SamplingMethod::kThinning
                                         : nhpp::SamplingMethod::kInversion;
  cfg.threads = args.threads;
  const fs::path dir(args.out);
  prepare_dir(dir);

  const auto result = nhpp::simulate_ensemble(cfg);

  auto files = ordered_json::array();
  if (args.layout == "combined") {
    nhpp::io::atomic_write(dir / "ensemble.csv", render([&](std::ostream& o) {
                             nhpp::io::write_ensemble_csv(o, result.paths);
                           }));
    files.push_back("ensemble.csv");
  } else {
    for (std::size_t r = 0; r < result.paths.size(); ++r) {
      char name[32];
      std::snprintf(name, sizeof name, "series_%06zu.csv", r);
      nhpp::io::atomic_write(dir / name, render([&](std::ostream& o) {
                               nhpp::io::write_series_csv(o, result.paths[r]);
                             }));
      files.push_back(name);
    }
  }

  ordered_json manifest;
  manifest["artifact"] = "nhpp";
  manifest["version"] = kVersion;
  manifest["command"] = "simulate";
  manifest["a"] = args.a;
  manifest["b"] = args.b;
  if (args.horizon) {
    manifest["horizon"] = *args.horizon;
  } else {
    manifest["count"] = *args.count;
  }
  manifest["replicas"] = args.replicas;
  manifest["seed"] = args.seed;
  manifest["method"] = args.method;
  manifest["layout"] = args.layout;
  manifest["seed_derivation"] =
      "replica i uses splitmix64(seed + (i + 1) * 0x9E3779B97F4A7C15)";
  manifest["files"] = std::move(files);
  nhpp::io::atomic_write(dir / "manifest.json", dump(manifest));
}

// ---------------------------------------------------------------------------

struct TheoryArgs {
  double a = 0, b = 0;
  std::size_t n = 1;
  double grid_start = 1e-3, grid_end = 1e6;
  std::size_t grid_points = 50;
  std::size_t nodes = 64;
  double rtol = 1e-8;
  int max_refinements = 8;
  std::string format = "csv";
  std::string out;
};

std::vector<double> log_grid(double lo, double hi, std::size_t points) {
  if (points == 0) throw UsageError("--grid-points must be >= 1");
  if (points == 1) {
    if (!(lo >= 0.0)) throw UsageError("--grid-start must be >= 0");
    return {lo};
  }
  if (!(lo > 0.0) || !(hi > lo)) {
    throw UsageError("log grid needs 0 < --grid-start < --grid-end");
  }
  std::vector<double> grid(points);
  const double l0 = std::log10(lo), l1 = std::log10(hi);
  for (std::size_t i = 0; i < points; ++i) {
    grid[i] = std::pow(10.0, l0 + (l1 - l0) * static_cast<double>(i) /
                                      static_cast<double>(points - 1));
  }
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

void run_theory(const TheoryArgs& args) {
  const auto params = make_params(args.a, args.b);
  if (args.n == 0) throw UsageError("--n must be >= 1");
  nhpp::QuadratureConfig quad{args.nodes, args.rtol, args.max_refinements};
  try {
    quad.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const auto grid = log_grid(args.grid_start, args.grid_end, args.grid_points);
  const fs::path dir(args.out);
  prepare_dir(dir);

  std::vector<std::pair<double, double>> rows;
  rows.reserve(grid.size());
  for (double t : grid) {
    try {
      rows.emplace_back(nhpp::survival_Tn(params, args.n, t, quad),
                        nhpp::density_Tn(params, args.n, t, quad));
    } catch (const nhpp::AccuracyError& e) {
      std::ostringstream msg;
      msg << e.what() << " at t=" << nhpp::io::format_double(t)
          << " (best estimate " << nhpp::io::format_double(e.best_estimate())
          << ", error bound " << nhpp::io::format_double(e.error_bound()) << ")";
      throw std::runtime_error(msg.str());
    }
  }

  if (args.format == "json") {
    auto j = ordered_json::array();
    for (std::size_t i = 0; i < grid.size(); ++i) {
      j.push_back({{"t", grid[i]}, {"survival", rows[i].first}, {"density", rows[i].second}});
    }
    nhpp::io::atomic_write(dir / "theory.json", dump(j));
    return;
  }
  std::ostringstream out;
  out << "t,survival,density\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out << nhpp::io::format_double(grid[i]) << ','
        << nhpp::io::format_double(rows[i].first) << ','
        << nhpp::io::format_double(rows[i].second) << '\n';
  }
  nhpp::io::atomic_write(dir / "theory.csv", out.str());
}

// ---------------------------------------------------------------------------

struct AnalyzeArgs {
  std::string input;
  int bins_per_decade = 10;
  std::vector<double> fit_range{0.0, 0.95};
  std::optional<double> tmin;
  std::string mode = "pooled";
  std::size_t n = 1;
  std::string tie_policy = "resolve";
  std::optional<double> tie_resolution;
  std::string out;
};

nhpp::io::TimestampTable load(const std::string& input) {
  if (!fs::is_regular_file(input)) throw UsageError("cannot read input " + input);
  try {
    return nhpp::io::read_timestamps(fs::path(input));
  } catch (const nhpp::io::FormatError& e) {
    throw UsageError(input + ": " + e.what());
  }
}

void run_analyze(const AnalyzeArgs& args) {
  if (args.bins_per_decade < 1) throw UsageError("--bins-per-decade must be >= 1");
  if (args.fit_range.size() != 2 || !(args.fit_range[0] >= 0.0) ||
      !(args.fit_range[1] <= 1.0) || !(args.fit_range[0] < args.fit_range[1])) {
    throw UsageError("--fit-range takes two quantiles q_lo,q_hi with 0 <= q_lo < q_hi <= 1");
  }
  if (args.tie_resolution && !(*args.tie_resolution > 0.0)) {
    throw UsageError("--tie-resolution must be > 0");
  }
  const auto series = nhpp::io::to_series(load(args.input));
  const auto mode = args.mode == "fixed" ? nhpp::CollectionMode::kFixedIndex
                                         : nhpp::CollectionMode::kPooled;
  nhpp::TieHandling ties;
  ties.policy = args.tie_policy == "drop" ? nhpp::TiePolicy::kDrop : nhpp::TiePolicy::kResolve;
  ties.resolution = args.tie_resolution;

  const auto sample = nhpp::intervals_from_events(series, mode, args.n, ties);
  const auto pdf = nhpp::log_binned_pdf(sample, args.bins_per_decade);
  const auto ccdf = nhpp::log_binned_ccdf(sample, args.bins_per_decade);

  // Distributions are written before the fits so they survive a fit that
  // lacks data.
  const fs::path dir(args.out);
  prepare_dir(dir);
  nhpp::io::atomic_write(dir / "intervals.csv", render([&](std::ostream& o) {
                           nhpp::io::write_intervals_csv(o, sample);
                         }));
  nhpp::io::atomic_write(dir / "pdf.csv", render([&](std::ostream& o) {
                           nhpp::io::write_distribution_csv(o, pdf);
                         }));
  nhpp::io::atomic_write(dir / "ccdf.csv", render([&](std::ostream& o) {
                           nhpp::io::write_distribution_csv(o, ccdf);
                         }));
  const auto range = nhpp::mass_fit_range(sample, args.fit_range[0], args.fit_range[1]);
  const auto regression = nhpp::fit_loglog_regression(pdf, range);
  const double t_min = args.tmin ? *args.tmin : nhpp::median(sample.intervals);
  const auto hill = nhpp::fit_hill_mle(sample, t_min);
  nhpp::io::atomic_write(dir / "fit_regression.json", dump(nhpp::io::to_json(regression)));
  nhpp::io::atomic_write(dir / "fit_hill.json", dump(nhpp::io::to_json(hill)));
}

// ---------------------------------------------------------------------------

struct FitArgs {
  std::string input;
  std::optional<double> horizon;
  std::string out;
};

void run_fit(const FitArgs& args) {
  if (args.horizon && !(*args.horizon > 0.0)) throw UsageError("--horizon must be > 0");
  std::vector<nhpp::EventSeries> series;
  try {
    series = nhpp::io::to_series(load(args.input), args.horizon);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const auto fit = nhpp::fit_nhpp_mle(series);
  const fs::path dir(args.out);
  prepare_dir(dir);
  nhpp::io::atomic_write(dir / "nhpp_fit.json", dump(nhpp::io::to_json(fit)));
}

// ---------------------------------------------------------------------------

struct ValidateArgs {
  std::uint64_t seed = 0;
  std::size_t replicas = 10000;
  bool negative_control = false;
  unsigned threads = 0;
  std::string out;
};

void run_validate(const ValidateArgs& args) {
  if (args.replicas < 100) throw UsageError("--replicas must be >= 100");
  nhpp::ValidationOptions options;
  options.seed = args.seed;
  options.replicas = args.replicas;
  options.negative_control = args.negative_control;
  options.threads = args.threads;
  const fs::path dir(args.out);
  prepare_dir(dir);

  const auto report = nhpp::run_validation(options);
  auto j = nhpp::to_json(report, options);
  j["version"] = kVersion;
  nhpp::io::atomic_write(dir / "report.json", dump(j));
  for (const auto& c : report.checks) {
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << "  statistic="
              << nhpp::io::format_double(c.statistic)
              << " threshold=" << nhpp::io::format_double(c.threshold) << '\n';
  }
  if (!report.all_pass()) throw CheckFailure("validation failed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation, exact inter-event laws and inference for the decaying-rate Poisson process"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  const auto method_check = CLI::IsMember({"inversion", "thinning"});

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Sample event series");
  simulate->add_option("--a", sim.a, "Decay rate a >= 0")->required();
  simulate->add_option("--b", sim.b, "Initial rate b > 0")->required();
  auto* horizon = simulate->add_option("--horizon", sim.horizon, "Observation window length");
  auto* count = simulate->add_option("--count", sim.count, "Stop each replica at this many events");
  horizon->excludes(count);
  simulate->add_option("--replicas", sim.replicas, "Independent replicas")->capture_default_str();
  simulate->add_option("--seed", sim.seed, "Master seed")->required();
  simulate->add_option("--method", sim.method, "inversion|thinning")
      ->check(method_check)
      ->capture_default_str();
  simulate->add_option("--layout", sim.layout, "per-file|combined")
      ->check(CLI::IsMember({"per-file", "combined"}))
      ->capture_default_str();
  simulate->add_option("--threads", sim.threads, "Worker threads, 0 for all cores");
  simulate->add_option("--out", sim.out, "Output directory")->required();

  TheoryArgs th;
  auto* theory = app.add_subcommand("theory", "Exact survival and density of the n-th gap");
  theory->add_option("--a", th.a, "Decay rate a >= 0")->required();
  theory->add_option("--b", th.b, "Initial rate b > 0")->required();
  theory->add_option("--n", th.n, "Gap index n >= 1")->capture_default_str();
  theory->add_option("--grid-start", th.grid_start)->capture_default_str();
  theory->add_option("--grid-end", th.grid_end)->capture_default_str();
  theory->add_option("--grid-points", th.grid_points)->capture_default_str();
  theory->add_option("--nodes", th.nodes, "Gauss-Legendre points per panel")
      ->capture_default_str();
  theory->add_option("--rtol", th.rtol, "Relative tolerance")->capture_default_str();
  theory->add_option("--max-refinements", th.max_refinements)->capture_default_str();
  theory->add_option("--format", th.format, "csv|json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  theory->add_option("--out", th.out, "Output directory")->required();

  AnalyzeArgs an;
  auto* analyze = app.add_subcommand("analyze", "Intervals, log-binned distributions, exponent fits");
  analyze->add_option("--input", an.input, "Timestamp CSV (t or replica,t)")->required();
  analyze->add_option("--bins-per-decade", an.bins_per_decade)->capture_default_str();
  analyze->add_option("--fit-range", an.fit_range, "Regression mass range q_lo,q_hi")
      ->delimiter(',')
      ->expected(2)
      ->capture_default_str();
  analyze->add_option("--tmin", an.tmin, "Hill threshold (default: median interval)");
  analyze->add_option("--mode", an.mode, "pooled|fixed")
      ->check(CLI::IsMember({"pooled", "fixed"}))
      ->capture_default_str();
  analyze->add_option("--n", an.n, "Event index for fixed mode")->capture_default_str();
  analyze->add_option("--tie-policy", an.tie_policy, "resolve|drop")
      ->check(CLI::IsMember({"resolve", "drop"}))
      ->capture_default_str();
  analyze->add_option("--tie-resolution", an.tie_resolution,
                      "Replacement for zero gaps (default: smallest positive gap)");
  analyze->add_option("--out", an.out, "Output directory")->required();

  FitArgs ft;
  auto* fit = app.add_subcommand("fit", "Maximum-likelihood (a, b)");
  fit->add_option("--input", ft.input, "Timestamp CSV (t or replica,t)")->required();
  fit->add_option("--horizon", ft.horizon, "Observation window (default: last event per series)");
  fit->add_option("--out", ft.out, "Output directory")->required();

  ValidateArgs va;
  auto* validate = app.add_subcommand("validate", "Run the cross-module check suite");
  validate->add_option("--seed", va.seed, "Master seed")->required();
  validate->add_option("--replicas", va.replicas)->capture_default_str();
  validate->add_flag("--negative-control", va.negative_control,
                     "Add a check that must fail");
  validate->add_option("--threads", va.threads, "Worker threads, 0 for all cores");
  validate->add_option("--out", va.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  if (simulate->parsed() && !sim.horizon && !sim.count) {
    std::cerr << "simulate: one of --horizon or --count is required\n";
    return 2;
  }

  try {
    if (simulate->parsed()) run_simulate(sim);
    if (theory->parsed()) run_theory(th);
    if (analyze->parsed()) run_analyze(an);
    if (fit->parsed()) run_fit(ft);
    if (validate->parsed()) run_validate(va);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const nhpp::InsufficientDataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const CheckFailure& e) {
    std::cerr << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
