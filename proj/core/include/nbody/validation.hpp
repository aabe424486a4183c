#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nbody/kernels.hpp"
#include "nbody/particle_system.hpp"

namespace nbody {

// Relative checksum tolerances per precision.
inline constexpr double kDoubleTolerance = 1e-9;
inline constexpr double kSingleTolerance = 5e-4;
inline constexpr double kMomentumDriftBound = 1e-9;

double tolerance_for(Precision precision);

struct Diagnostics {
  double kinetic_energy = 0.0;
  double potential_energy = 0.0;  // softened, same eps^2 as the force kernel
  Vec3<double> total_momentum;
  double momentum_scale = 0.0;  // sum of m_i |v_i|
  double checksum = 0.0;

  double total_energy() const { return kinetic_energy + potential_energy; }
  double momentum_norm() const;
};

Diagnostics diagnostics(const ParticleSystem& system, const SimParams& params);

// Brute-force double-precision accelerations, written without any of the
// kernel code so it can serve as an oracle. Returns one vector per body.
std::vector<Vec3<double>> reference_accelerations(const ParticleSystem& system,
                                                  const SimParams& params);

// Oracle trajectory in double precision using reference_accelerations and
// the same update rule as the kernels. Returns the final body states.
std::vector<BodyState> reference_simulate(std::span<const BodyState> initial,
                                          const SimParams& params);

struct LadderEntry {
  KernelVariant variant;
  Precision precision = Precision::Double;

  std::string label() const;  // e.g. "soa_b64_recip/t4/single"
};

// The ladder exercised by the equivalence checks: aos; soa; soa blocked for
// each block size; soa at each thread count; each soa rung in both math forms;
// everything in both precisions.
std::vector<LadderEntry> full_ladder(std::span<const std::size_t> block_sizes,
                                     std::span<const unsigned> thread_counts);

struct VariantCheck {
  LadderEntry entry;
  double checksum = 0.0;
  // Relative to the kernels' reference variant run (zero for that variant).
  double checksum_rel_dev = 0.0;
  // Relative to the independent oracle trajectory.
  double oracle_rel_dev = 0.0;
  // max_i max_k |a_ik - ref_ik| / |ref_i| on the initial system.
  double acceleration_rel_dev = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string reason;  // empty when passed
};

struct ValidationReport {
  std::size_t n_bodies = 0;
  std::uint64_t steps = 0;
  std::uint64_t seed = 0;
  double reference_checksum = 0.0;  // kernels' reference variant, double
  double oracle_checksum = 0.0;     // independent oracle, double
  // |sum m v| / sum m |v| at the end of the reference run.
  double momentum_drift = 0.0;
  double energy_drift = 0.0;
  bool energy_drift_is_relative = true;
  std::vector<VariantCheck> checks;

  bool all_passed() const;
  double max_checksum_rel_dev() const;
};

ValidationReport cross_validate(std::size_t n, Seed seed,
                                const SimParams& params,
                                std::span<const LadderEntry> variants);

// Same checks from explicit initial conditions (used for constructed cases
// such as coincident bodies).
ValidationReport cross_validate(std::span<const BodyState> initial,
                                const SimParams& params,
                                std::span<const LadderEntry> variants);

std::string render_text(const ValidationReport& report);

// Header plus one row per variant, for the machine-readable report.
std::string render_csv(const ValidationReport& report);

struct EnergyDrift {
  double value = 0.0;
  // False when the initial energy is zero and value is the absolute drift.
  bool relative = true;
};

// |E_final - E_initial| / |E_initial| over params.steps using the kernel.
EnergyDrift energy_drift(const ParticleSystem& initial, const SimParams& params,
                         const KernelVariant& variant);

}  // namespace nbody
