#include "nbody/harness.hpp"

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <ctime>
#include <numeric>
#include <stdexcept>

namespace nbody {

double gflops(std::uint64_t n, std::uint64_t steps, double seconds) {
  if (!(seconds > 0.0)) {
    throw std::invalid_argument("gflops: seconds must be positive");
  }
  const double nd = static_cast<double>(n);
  return kFlopsPerInteraction * nd * nd * static_cast<double>(steps) /
         (seconds * 1e9);
}

void BenchConfig::validate() const {
  if (n_bodies < 1) throw std::invalid_argument("n_bodies must be >= 1");
  if (repetitions < 1) throw std::invalid_argument("repetitions must be >= 1");
  params.validate();
  variant.validate(n_bodies);
}

ResultKey key_of(const BenchConfig& config) {
  return {config.variant.label(), config.n_bodies, config.variant.threads,
          config.precision};
}

ParticleSystem default_system(const BenchConfig& config) {
  return init_system(config.n_bodies, config.seed, config.precision,
                     config.variant.layout);
}

std::string host_label() {
  char buf[256] = {};
  if (gethostname(buf, sizeof(buf) - 1) != 0 || buf[0] == '\0') {
    return "unknown-host";
  }
  std::string out(buf);
  std::replace(out.begin(), out.end(), ',', '_');
  return out;
}

std::string format_utc(std::chrono::system_clock::time_point t) {
  const std::time_t tt = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

BenchResult measure(const BenchConfig& config, const SystemFactory& factory) {
  config.validate();
  BenchResult result;
  result.config = config;
  result.timestamp = std::chrono::system_clock::now();
  result.host_label = host_label();

  const ParticleSystem initial = factory(config);
  for (unsigned w = 0; w < config.warmup_runs; ++w) {
    ParticleSystem scratch = initial;
    simulate_in_place(scratch, config.params, config.variant);
  }

  ParticleSystem last = initial;
  for (unsigned r = 0; r < config.repetitions; ++r) {
    last = initial;
    const auto start = std::chrono::steady_clock::now();
    simulate_in_place(last, config.params, config.variant);
    const auto stop = std::chrono::steady_clock::now();
    double seconds = std::chrono::duration<double>(stop - start).count();
    // A zero reading means the run was shorter than the clock resolution.
    if (seconds <= 0.0) seconds = std::chrono::duration<double>(
                                      std::chrono::steady_clock::duration(1))
                                      .count();
    result.times_s.push_back(seconds);
    result.gflops_per_run.push_back(
        gflops(config.n_bodies, config.params.steps, seconds));
  }

  result.best_time_s = *std::min_element(result.times_s.begin(), result.times_s.end());
  result.mean_time_s =
      std::accumulate(result.times_s.begin(), result.times_s.end(), 0.0) /
      static_cast<double>(result.times_s.size());
  result.gflops_best = gflops(config.n_bodies, config.params.steps, result.best_time_s);
  result.gflops_mean = gflops(config.n_bodies, config.params.steps, result.mean_time_s);
  result.checksum = checksum(last);
  if (!std::isfinite(result.checksum)) result.status = "error:non-finite checksum";
  return result;
}

SweepCombinations enumerate(const SweepPlan& plan) {
  SweepCombinations out;
  std::vector<std::size_t> ns = plan.n_values;
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
  for (const auto& shape : plan.variants) {
    for (const Precision precision : plan.precisions) {
      for (const unsigned threads : plan.thread_counts) {
        for (const std::size_t n : ns) {
          BenchConfig config;
          config.n_bodies = n;
          config.params = plan.params;
          config.variant = shape;
          config.variant.threads = threads;
          config.precision = precision;
          config.seed = plan.seed;
          config.repetitions = plan.repetitions;
          config.warmup_runs = plan.warmup_runs;
          if (auto why = config.variant.invalid_reason(n)) {
            out.skipped.push_back({config, *why});
          } else if (plan.completed.count(key_of(config)) != 0) {
            out.already_done.push_back(config);
          } else {
            out.runnable.push_back(config);
          }
        }
      }
    }
  }
  return out;
}

std::vector<BenchResult> run_sweep(const SweepPlan& plan, const SweepSink& sink,
                                   const SystemFactory& factory) {
  const SweepCombinations combos = enumerate(plan);
  if (sink.on_skip) {
    for (const auto& s : combos.skipped) sink.on_skip(s);
  }
  std::vector<BenchResult> results;
  results.reserve(combos.runnable.size());
  for (const auto& config : combos.runnable) {
    BenchResult result;
    try {
      result = measure(config, factory);
    } catch (const std::exception& e) {
      result = BenchResult{};
      result.config = config;
      result.timestamp = std::chrono::system_clock::now();
      result.host_label = host_label();
      result.status = std::string("error:") + e.what();
    }
    if (sink.on_result) sink.on_result(result);
    results.push_back(std::move(result));
  }
  return results;
}

}  // namespace nbody
