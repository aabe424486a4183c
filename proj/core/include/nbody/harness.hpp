#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "nbody/kernels.hpp"
#include "nbody/particle_system.hpp"

namespace nbody {

// Floating-point operations charged per pairwise interaction.
inline constexpr double kFlopsPerInteraction = 20.0;

// 20 * n^2 * steps / (seconds * 1e9). Throws std::invalid_argument when
// seconds <= 0.
double gflops(std::uint64_t n, std::uint64_t steps, double seconds);

struct BenchConfig {
  std::size_t n_bodies = 256;
  SimParams params;  // params.steps is the I of the GFLOPS formula
  KernelVariant variant;
  Precision precision = Precision::Double;
  Seed seed;
  unsigned repetitions = 5;
  unsigned warmup_runs = 1;

  void validate() const;
};

struct BenchResult {
  BenchConfig config;
  std::vector<double> times_s;
  std::vector<double> gflops_per_run;
  double best_time_s = 0.0;
  double mean_time_s = 0.0;
  double gflops_best = 0.0;
  double gflops_mean = 0.0;
  double checksum = 0.0;
  std::string status = "ok";  // ok | skipped | error:<reason>
  std::chrono::system_clock::time_point timestamp;
  std::string host_label;

  bool ok() const { return status == "ok"; }
};

// Identifies a sweep combination in results and CSV files.
struct ResultKey {
  std::string variant;  // KernelVariant::label()
  std::size_t n_bodies = 0;
  unsigned threads = 1;
  Precision precision = Precision::Double;

  friend auto operator<=>(const ResultKey&, const ResultKey&) = default;
};

ResultKey key_of(const BenchConfig& config);

// Builds the initial system for a measurement. Tests substitute a slow one to
// prove initialization stays outside the timed region.
using SystemFactory = std::function<ParticleSystem(const BenchConfig&)>;

ParticleSystem default_system(const BenchConfig& config);

// Warmup runs, then `repetitions` timed simulations, each from a fresh copy of
// the initial system. Only simulate() is inside the monotonic-clock window.
BenchResult measure(const BenchConfig& config,
                    const SystemFactory& factory = default_system);

struct SweepPlan {
  std::vector<std::size_t> n_values{256};
  std::vector<unsigned> thread_counts{1};
  // Thread counts here are ignored; thread_counts supplies them.
  std::vector<KernelVariant> variants{KernelVariant::reference()};
  std::vector<Precision> precisions{Precision::Double};
  SimParams params;
  Seed seed;
  unsigned repetitions = 5;
  unsigned warmup_runs = 1;
  // Combinations already present in a resumed CSV.
  std::set<ResultKey> completed;
};

struct SkippedCombination {
  BenchConfig config;
  std::string reason;
};

struct SweepCombinations {
  std::vector<BenchConfig> runnable;
  std::vector<SkippedCombination> skipped;  // invalid per KernelVariant
  std::vector<BenchConfig> already_done;    // present in plan.completed
};

// Cross product in run order: variants, then precisions, then threads, then
// n ascending.
SweepCombinations enumerate(const SweepPlan& plan);

struct SweepSink {
  std::function<void(const BenchResult&)> on_result;
  std::function<void(const SkippedCombination&)> on_skip;
};

// Measures every runnable combination in order, streaming each result to the
// sink. A combination that throws becomes an error row; the sweep continues.
std::vector<BenchResult> run_sweep(const SweepPlan& plan, const SweepSink& sink = {},
                                   const SystemFactory& factory = default_system);

std::string host_label();
std::string format_utc(std::chrono::system_clock::time_point t);

}  // namespace nbody
