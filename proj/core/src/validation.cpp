#include "nbody/validation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace nbody {

double tolerance_for(Precision precision) {
  return precision == Precision::Single ? kSingleTolerance : kDoubleTolerance;
}

double Diagnostics::momentum_norm() const {
  return std::sqrt(total_momentum.x * total_momentum.x +
                   total_momentum.y * total_momentum.y +
                   total_momentum.z * total_momentum.z);
}

namespace {

double norm(const Vec3<double>& v) {
  return std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z);
}

Diagnostics diagnose(std::span<const BodyState> bodies, const SimParams& params) {
  Diagnostics d;
  for (const auto& b : bodies) {
    const double speed_sq = b.velocity.x * b.velocity.x +
                            b.velocity.y * b.velocity.y +
                            b.velocity.z * b.velocity.z;
    d.kinetic_energy += 0.5 * b.mass * speed_sq;
    d.total_momentum.x += b.mass * b.velocity.x;
    d.total_momentum.y += b.mass * b.velocity.y;
    d.total_momentum.z += b.mass * b.velocity.z;
    d.momentum_scale += b.mass * std::sqrt(speed_sq);
    d.checksum += b.position.x + b.position.y + b.position.z;
  }
  for (std::size_t i = 0; i < bodies.size(); ++i) {
    for (std::size_t j = i + 1; j < bodies.size(); ++j) {
      const double dx = bodies[i].position.x - bodies[j].position.x;
      const double dy = bodies[i].position.y - bodies[j].position.y;
      const double dz = bodies[i].position.z - bodies[j].position.z;
      d.potential_energy -=
          params.gravitational_constant * bodies[i].mass * bodies[j].mass /
          std::sqrt(dx * dx + dy * dy + dz * dz + params.softening_sq);
    }
  }
  return d;
}

std::vector<Vec3<double>> oracle_accelerations(std::span<const BodyState> bodies,
                                               const SimParams& params) {
  std::vector<Vec3<double>> acc(bodies.size());
  for (std::size_t i = 0; i < bodies.size(); ++i) {
    Vec3<double> a;
    for (std::size_t j = 0; j < bodies.size(); ++j) {
      if (j == i) continue;
      const Vec3<double> d{bodies[j].position.x - bodies[i].position.x,
                           bodies[j].position.y - bodies[i].position.y,
                           bodies[j].position.z - bodies[i].position.z};
      const double dist_sq = d.x * d.x + d.y * d.y + d.z * d.z + params.softening_sq;
      const double w = bodies[j].mass * std::pow(dist_sq, -1.5);
      a.x += w * d.x;
      a.y += w * d.y;
      a.z += w * d.z;
    }
    acc[i] = {params.gravitational_constant * a.x,
              params.gravitational_constant * a.y,
              params.gravitational_constant * a.z};
  }
  return acc;
}

bool all_finite(std::span<const BodyState> bodies) {
  return std::all_of(bodies.begin(), bodies.end(), [](const BodyState& b) {
    return std::isfinite(b.position.x) && std::isfinite(b.position.y) &&
           std::isfinite(b.position.z) && std::isfinite(b.velocity.x) &&
           std::isfinite(b.velocity.y) && std::isfinite(b.velocity.z);
  });
}

double relative_deviation(double value, double reference) {
  const double diff = std::abs(value - reference);
  if (diff == 0.0) return 0.0;
  return diff / std::abs(reference);
}

double acceleration_deviation(const AccelerationBuffer& got,
                              std::span<const Vec3<double>> ref) {
  double worst = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    const Vec3<double> a = got.at(i);
    const double scale = norm(ref[i]);
    for (const double diff : {std::abs(a.x - ref[i].x), std::abs(a.y - ref[i].y),
                              std::abs(a.z - ref[i].z)}) {
      if (std::isnan(diff)) return diff;
      if (diff == 0.0) continue;
      worst = std::max(worst, diff / scale);
    }
  }
  return worst;
}

struct Baseline {
  double reference_checksum = 0.0;
  double oracle_checksum = 0.0;
  bool oracle_finite = true;
};

VariantCheck check_variant(const LadderEntry& entry,
                           std::span<const BodyState> initial,
                           const SimParams& params, const Baseline& base) {
  VariantCheck c;
  c.entry = entry;
  c.tolerance = tolerance_for(entry.precision);
  try {
    ParticleSystem system =
        ParticleSystem::from_bodies(initial, entry.precision, entry.variant.layout);

    AccelerationBuffer acc(system.count(), system.precision());
    compute_accelerations(system, params, entry.variant, acc);
    // Compared against the oracle evaluated on the same (possibly rounded)
    // positions, so the deviation isolates the kernel.
    const auto ref_acc = oracle_accelerations(system.bodies(), params);
    c.acceleration_rel_dev = acceleration_deviation(acc, ref_acc);

    simulate_in_place(system, params, entry.variant);
    c.checksum = checksum(system);
    c.checksum_rel_dev = relative_deviation(c.checksum, base.reference_checksum);
    c.oracle_rel_dev = relative_deviation(c.checksum, base.oracle_checksum);

    if (!system.is_finite() || !std::isfinite(c.checksum) || !acc.is_finite()) {
      c.reason = "non-finite state";
    } else if (!base.oracle_finite) {
      c.reason = "non-finite oracle state";
    } else if (!(c.checksum_rel_dev <= c.tolerance)) {
      c.reason = "checksum deviation from reference above tolerance";
    } else if (!(c.oracle_rel_dev <= c.tolerance)) {
      c.reason = "checksum deviation from oracle above tolerance";
    } else if (!(c.acceleration_rel_dev <= c.tolerance)) {
      c.reason = "acceleration deviation above tolerance";
    }
  } catch (const std::exception& e) {
    c.reason = e.what();
  }
  c.passed = c.reason.empty();
  return c;
}

ValidationReport validate_from(std::span<const BodyState> initial,
                               const SimParams& params,
                               std::span<const LadderEntry> variants) {
  params.validate();
  ValidationReport report;
  report.n_bodies = initial.size();
  report.steps = params.steps;

  Baseline base;
  const std::vector<BodyState> oracle_final = reference_simulate(initial, params);
  base.oracle_finite = all_finite(oracle_final);
  for (const auto& b : oracle_final) {
    base.oracle_checksum += b.position.x + b.position.y + b.position.z;
  }

  ParticleSystem reference =
      ParticleSystem::from_bodies(initial, Precision::Double, Layout::Soa);
  simulate_in_place(reference, params, KernelVariant::reference());
  base.reference_checksum = checksum(reference);
  report.reference_checksum = base.reference_checksum;
  report.oracle_checksum = base.oracle_checksum;

  const std::vector<BodyState> ref_final = reference.bodies();
  const Diagnostics start = diagnose(initial, params);
  const Diagnostics end = diagnose(ref_final, params);
  report.momentum_drift = end.momentum_scale > 0.0
                              ? end.momentum_norm() / end.momentum_scale
                              : end.momentum_norm();
  const double e0 = start.total_energy();
  const double de = std::abs(end.total_energy() - e0);
  report.energy_drift_is_relative = e0 != 0.0;
  report.energy_drift = e0 != 0.0 ? de / std::abs(e0) : de;

  for (const auto& entry : variants) {
    report.checks.push_back(check_variant(entry, initial, params, base));
  }
  return report;
}

}  // namespace

Diagnostics diagnostics(const ParticleSystem& system, const SimParams& params) {
  return diagnose(system.bodies(), params);
}

std::vector<Vec3<double>> reference_accelerations(const ParticleSystem& system,
                                                  const SimParams& params) {
  return oracle_accelerations(system.bodies(), params);
}

std::vector<BodyState> reference_simulate(std::span<const BodyState> initial,
                                          const SimParams& params) {
  params.validate();
  std::vector<BodyState> bodies(initial.begin(), initial.end());
  const double dt = params.dt;
  for (std::uint64_t s = 0; s < params.steps; ++s) {
    const auto acc = oracle_accelerations(bodies, params);
    for (std::size_t i = 0; i < bodies.size(); ++i) {
      auto& b = bodies[i];
      const Vec3<double> dv{acc[i].x * dt, acc[i].y * dt, acc[i].z * dt};
      b.position.x += (b.velocity.x + 0.5 * dv.x) * dt;
      b.position.y += (b.velocity.y + 0.5 * dv.y) * dt;
      b.position.z += (b.velocity.z + 0.5 * dv.z) * dt;
      b.velocity.x += dv.x;
      b.velocity.y += dv.y;
      b.velocity.z += dv.z;
    }
  }
  return bodies;
}

std::string LadderEntry::label() const {
  return variant.label() + "/t" + std::to_string(variant.threads) + "/" +
         std::string(to_string(precision));
}

std::vector<LadderEntry> full_ladder(std::span<const std::size_t> block_sizes,
                                     std::span<const unsigned> thread_counts) {
  std::vector<KernelVariant> shapes;
  shapes.push_back({Layout::Aos, MathForm::PowThenDivide, std::nullopt, 1});
  for (const MathForm form :
       {MathForm::PowThenDivide, MathForm::ReciprocalMultiply}) {
    shapes.push_back({Layout::Soa, form, std::nullopt, 1});
    for (const std::size_t b : block_sizes) {
      shapes.push_back({Layout::Soa, form, b, 1});
    }
    for (const unsigned t : thread_counts) {
      if (t == 1) continue;
      shapes.push_back({Layout::Soa, form, std::nullopt, t});
    }
  }
  std::vector<LadderEntry> out;
  for (const Precision p : {Precision::Double, Precision::Single}) {
    for (const auto& v : shapes) out.push_back({v, p});
  }
  return out;
}

bool ValidationReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const VariantCheck& c) { return c.passed; });
}

double ValidationReport::max_checksum_rel_dev() const {
  double worst = 0.0;
  for (const auto& c : checks) {
    worst = std::max({worst, c.checksum_rel_dev, c.oracle_rel_dev});
  }
  return worst;
}

ValidationReport cross_validate(std::size_t n, Seed seed,
                                const SimParams& params,
                                std::span<const LadderEntry> variants) {
  const ParticleSystem initial =
      init_system(n, seed, Precision::Double, Layout::Soa);
  ValidationReport report = validate_from(initial.bodies(), params, variants);
  report.seed = seed.value;
  return report;
}

ValidationReport cross_validate(std::span<const BodyState> initial,
                                const SimParams& params,
                                std::span<const LadderEntry> variants) {
  if (initial.empty()) throw std::invalid_argument("cross_validate: no bodies");
  return validate_from(initial, params, variants);
}

std::string render_text(const ValidationReport& r) {
  std::ostringstream os;
  os << "validation: n=" << r.n_bodies << " steps=" << r.steps
     << " seed=" << r.seed << "\n";
  os << "reference checksum: " << format_checksum(r.reference_checksum) << "\n";
  os << "oracle checksum: " << format_checksum(r.oracle_checksum) << "\n";
  os << "momentum drift: " << r.momentum_drift << "\n";
  os << "energy drift" << (r.energy_drift_is_relative ? " (relative): " : " (absolute): ")
     << r.energy_drift << "\n";
  for (const auto& c : r.checks) {
    os << (c.passed ? "  PASS " : "  FAIL ") << c.entry.label()
       << "  checksum=" << format_checksum(c.checksum)
       << "  rel_dev=" << c.checksum_rel_dev << "  oracle_rel_dev=" << c.oracle_rel_dev
       << "  acc_rel_dev=" << c.acceleration_rel_dev << "  tol=" << c.tolerance;
    if (!c.passed) os << "  (" << c.reason << ")";
    os << "\n";
  }
  os << (r.all_passed() ? "all variants passed\n" : "some variants FAILED\n");
  return os.str();
}

std::string render_csv(const ValidationReport& r) {
  std::ostringstream os;
  os << "variant,layout,math_form,block_size,threads,precision,n_bodies,steps,"
        "seed,checksum,reference_checksum,oracle_checksum,checksum_rel_dev,"
        "oracle_rel_dev,acceleration_rel_dev,"
        "tolerance,status\n";
  for (const auto& c : r.checks) {
    const auto& v = c.entry.variant;
    std::string reason = c.reason;
    std::replace(reason.begin(), reason.end(), ',', ';');
    os << v.label() << ',' << to_string(v.layout) << ',' << to_string(v.math_form)
       << ',' << (v.block_size ? std::to_string(*v.block_size) : "") << ','
       << v.threads << ',' << to_string(c.entry.precision) << ',' << r.n_bodies
       << ',' << r.steps << ',' << r.seed << ',' << format_checksum(c.checksum)
       << ',' << format_checksum(r.reference_checksum) << ','
       << format_checksum(r.oracle_checksum) << ','
       << format_checksum(c.checksum_rel_dev) << ','
       << format_checksum(c.oracle_rel_dev) << ','
       << format_checksum(c.acceleration_rel_dev) << ',' << c.tolerance << ','
       << (c.passed ? "ok" : "error:" + reason) << "\n";
  }
  return os.str();
}

EnergyDrift energy_drift(const ParticleSystem& initial, const SimParams& params,
                         const KernelVariant& variant) {
  const double e0 = diagnostics(initial, params).total_energy();
  const ParticleSystem final_state = simulate(initial, params, variant);
  const double e1 = diagnostics(final_state, params).total_energy();
  const double de = std::abs(e1 - e0);
  if (e0 == 0.0) return {de, false};
  return {de / std::abs(e0), true};
}

}  // namespace nbody
