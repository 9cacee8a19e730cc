#ifndef NHPP_SIMULATE_HPP_
#define NHPP_SIMULATE_HPP_

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "nhpp/intensity.hpp"

namespace nhpp {

// Sorted event timestamps S_1 <= ... <= S_n observed on [0, window_end].
// The origin S_0 = 0 is implicit and never stored.
class EventSeries {
 public:
  EventSeries() = default;
  // Throws std::invalid_argument if times are unsorted, negative, or beyond
  // window_end.
  EventSeries(std::vector<double> times, double window_end);

  const std::vector<double>& times() const noexcept { return times_; }
  double window_end() const noexcept { return window_end_; }
  std::size_t size() const noexcept { return times_.size(); }
  bool empty() const noexcept { return times_.empty(); }

  // N(t): number of events in [0, t].
  std::size_t count_until(double t) const;

  friend bool operator==(const EventSeries&, const EventSeries&) = default;

 private:
  std::vector<double> times_;
  double window_end_ = 0.0;
};

enum class CollectionMode { kPooled, kFixedIndex };

// Multiset of inter-event durations with the way they were collected.
struct IntervalSample {
  std::vector<double> intervals;
  CollectionMode mode = CollectionMode::kPooled;
  // Event index n for fixed-index samples (each entry is S_{n+1} - S_n).
  std::size_t index = 0;
  std::string source;
};

struct TimeHorizon {
  double value;
};

// Stop right after the k-th event, whatever its time.
struct EventCount {
  std::size_t value;
};

using Horizon = std::variant<TimeHorizon, EventCount>;

enum class SamplingMethod { kInversion, kThinning };

struct SimulationConfig {
  IntensityParams params{1.0, 1.0};
  Horizon horizon = TimeHorizon{1.0};
  std::size_t replicas = 1;
  std::uint64_t master_seed = 0;
  SamplingMethod method = SamplingMethod::kInversion;
  // 0 picks std::thread::hardware_concurrency(). Output does not depend on it.
  unsigned threads = 0;
};

// A replica failed; carries the replica index.
class ReplicaError : public std::runtime_error {
 public:
  ReplicaError(std::size_t replica, const std::string& what);
  std::size_t replica() const noexcept { return replica_; }

 private:
  std::size_t replica_;
};

// Uniform and unit-exponential variates on top of mt19937_64. The conversions
// are written out so streams are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  // Exp(1) by inversion.
  double exponential();

 private:
  std::mt19937_64 engine_;
};

// SplitMix64 finalizer over (master_seed + (replica + 1) * 0x9E3779B97F4A7C15).
std::uint64_t child_seed(std::uint64_t master_seed, std::size_t replica);

// Exact sampling by time change: unit-rate arrival times u_i are mapped
// through the inverse cumulative intensity.
EventSeries sample_path_inversion(const IntensityParams& params, Horizon horizon,
                                  std::uint64_t seed);
EventSeries sample_path_inversion(const IntensityParams& params, double horizon,
                                  std::uint64_t seed);

// Lewis-Shedler thinning of a rate-b homogeneous process; a candidate at t is
// kept with probability lambda(t) / b.
EventSeries sample_path_thinning(const IntensityParams& params, Horizon horizon,
                                 std::uint64_t seed);
EventSeries sample_path_thinning(const IntensityParams& params, double horizon,
                                 std::uint64_t seed);

EventSeries sample_path(const IntensityParams& params, Horizon horizon,
                        SamplingMethod method, std::uint64_t seed);

struct EnsembleResult {
  std::vector<EventSeries> paths;
  IntervalSample pooled;
};

// Replica i is sample_path(..., child_seed(master_seed, i)). Replicas may run
// concurrently; results are stored in replica order.
EnsembleResult simulate_ensemble(const SimulationConfig& cfg);

// Successive differences within each series, concatenated in series order.
IntervalSample pooled_intervals(std::span<const EventSeries> paths);

// S_{n+1} - S_n from every series holding at least n + 1 events. n >= 1.
IntervalSample fixed_index_intervals(std::span<const EventSeries> paths,
                                     std::size_t n);

// Mean of N(t) over the ensemble.
double mean_count(std::span<const EventSeries> paths, double t);

}  // namespace nhpp

#endif  // NHPP_SIMULATE_HPP_
