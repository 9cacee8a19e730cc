#include "nhpp/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <optional>
#include <thread>

namespace nhpp {

namespace {

// Thinning in count mode can stall when lambda(t)/b is tiny.
constexpr std::uint64_t kMaxThinningCandidates = 2'000'000'000ULL;

void validate_horizon(const Horizon& horizon) {
  if (const auto* h = std::get_if<TimeHorizon>(&horizon)) {
    if (!(h->value > 0.0) || !std::isfinite(h->value)) {
      throw std::invalid_argument("horizon must be finite and > 0, got " +
                                  std::to_string(h->value));
    }
  } else if (std::get<EventCount>(horizon).value < 1) {
    throw std::invalid_argument("event count must be >= 1");
  }
}

}  // namespace

EventSeries::EventSeries(std::vector<double> times, double window_end)
    : times_(std::move(times)), window_end_(window_end) {
  if (!(window_end_ >= 0.0) || !std::isfinite(window_end_)) {
    throw std::invalid_argument("window_end must be finite and >= 0");
  }
  for (std::size_t i = 0; i < times_.size(); ++i) {
    const double t = times_[i];
    if (!(t >= 0.0) || t > window_end_) {
      throw std::invalid_argument("event time " + std::to_string(t) +
                                  " outside [0, window_end]");
    }
    if (i > 0 && t < times_[i - 1]) {
      throw std::invalid_argument("event times must be sorted");
    }
  }
}

std::size_t EventSeries::count_until(double t) const {
  return static_cast<std::size_t>(
      std::upper_bound(times_.begin(), times_.end(), t) - times_.begin());
}

ReplicaError::ReplicaError(std::size_t replica, const std::string& what)
    : std::runtime_error("replica " + std::to_string(replica) + ": " + what),
      replica_(replica) {}

double Rng::exponential() { return -std::log1p(-uniform()); }

std::uint64_t child_seed(std::uint64_t master_seed, std::size_t replica) {
  std::uint64_t z = master_seed + (static_cast<std::uint64_t>(replica) + 1) *
                                      0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

EventSeries sample_path_inversion(const IntensityParams& params, Horizon horizon,
                                  std::uint64_t seed) {
  validate_horizon(horizon);
  Rng rng(seed);
  std::vector<double> times;
  double u = 0.0;

  if (const auto* h = std::get_if<TimeHorizon>(&horizon)) {
    // Compare in the unit-rate clock first so nothing past the window is
    // ever inverted.
    const double u_end = cumulative_intensity(params, h->value);
    times.reserve(static_cast<std::size_t>(u_end + 4.0 * std::sqrt(u_end) + 8));
    for (;;) {
      u += rng.exponential();
      if (u > u_end) break;
      times.push_back(std::min(inverse_cumulative(params, u), h->value));
    }
    return EventSeries(std::move(times), h->value);
  }

  const std::size_t k = std::get<EventCount>(horizon).value;
  times.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    u += rng.exponential();
    times.push_back(inverse_cumulative(params, u));
  }
  const double end = times.back();
  return EventSeries(std::move(times), end);
}

EventSeries sample_path_inversion(const IntensityParams& params, double horizon,
                                  std::uint64_t seed) {
  return sample_path_inversion(params, Horizon{TimeHorizon{horizon}}, seed);
}

EventSeries sample_path_thinning(const IntensityParams& params, Horizon horizon,
                                 std::uint64_t seed) {
  validate_horizon(horizon);
  Rng rng(seed);
  std::vector<double> times;
  const double a = params.a();
  const double b = params.b();

  const auto* time_horizon = std::get_if<TimeHorizon>(&horizon);
  const double t_end = time_horizon ? time_horizon->value
                                    : std::numeric_limits<double>::infinity();
  const std::size_t k = time_horizon ? std::numeric_limits<std::size_t>::max()
                                     : std::get<EventCount>(horizon).value;

  double t = 0.0;
  std::uint64_t candidates = 0;
  while (times.size() < k) {
    t += rng.exponential() / b;
    if (t > t_end) break;
    if (!std::isfinite(t) || ++candidates > kMaxThinningCandidates) {
      throw std::runtime_error(
          "thinning exhausted its candidate budget before reaching the "
          "requested event count");
    }
    // Accept with probability lambda(t) / b = 1 / (a t + 1).
    if (rng.uniform() * (a * t + 1.0) < 1.0) times.push_back(t);
  }
  const double end = time_horizon ? t_end : times.back();
  return EventSeries(std::move(times), end);
}

EventSeries sample_path_thinning(const IntensityParams& params, double horizon,
                                 std::uint64_t seed) {
  return sample_path_thinning(params, Horizon{TimeHorizon{horizon}}, seed);
}

EventSeries sample_path(const IntensityParams& params, Horizon horizon,
                        SamplingMethod method, std::uint64_t seed) {
  return method == SamplingMethod::kInversion
             ? sample_path_inversion(params, horizon, seed)
             : sample_path_thinning(params, horizon, seed);
}

EnsembleResult simulate_ensemble(const SimulationConfig& cfg) {
  if (cfg.replicas < 1) throw std::invalid_argument("replicas must be >= 1");
  validate_horizon(cfg.horizon);

  EnsembleResult result;
  result.paths.resize(cfg.replicas);
  std::vector<std::optional<std::string>> errors(cfg.replicas);

  unsigned workers = cfg.threads ? cfg.threads
                                 : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(
      std::min<std::size_t>(workers, cfg.replicas));

  auto run = [&](std::size_t first) {
    for (std::size_t i = first; i < cfg.replicas; i += workers) {
      try {
        result.paths[i] = sample_path(cfg.params, cfg.horizon, cfg.method,
                                      child_seed(cfg.master_seed, i));
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };

  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
  }

  for (std::size_t i = 0; i < cfg.replicas; ++i) {
    if (errors[i]) throw ReplicaError(i, *errors[i]);
  }
  result.pooled = pooled_intervals(result.paths);
  result.pooled.source = "simulation";
  return result;
}

IntervalSample pooled_intervals(std::span<const EventSeries> paths) {
  IntervalSample sample;
  sample.mode = CollectionMode::kPooled;
  for (const auto& path : paths) {
    const auto& times = path.times();
    for (std::size_t i = 1; i < times.size(); ++i) {
      sample.intervals.push_back(times[i] - times[i - 1]);
    }
  }
  return sample;
}

IntervalSample fixed_index_intervals(std::span<const EventSeries> paths,
                                     std::size_t n) {
  if (n < 1) throw std::invalid_argument("event index n must be >= 1");
  IntervalSample sample;
  sample.mode = CollectionMode::kFixedIndex;
  sample.index = n;
  for (const auto& path : paths) {
    const auto& times = path.times();
    if (times.size() >= n + 1) sample.intervals.push_back(times[n] - times[n - 1]);
  }
  return sample;
}

double mean_count(std::span<const EventSeries> paths, double t) {
  if (paths.empty()) throw std::invalid_argument("no paths");
  double total = 0.0;
  for (const auto& path : paths) total += static_cast<double>(path.count_until(t));
  return total / static_cast<double>(paths.size());
}

}  // namespace nhpp
