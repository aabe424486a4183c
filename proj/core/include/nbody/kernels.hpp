#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "nbody/particle_system.hpp"

namespace nbody {

// Algebraic form of the inverse-cube denominator.
enum class MathForm {
  PowThenDivide,       // m * d / (r2 * sqrt(r2)), one division per component
  ReciprocalMultiply,  // inv = 1 / (r2 * sqrt(r2)) once per pair, then multiply
};

std::string_view to_string(MathForm form);  // "pow" / "recip"
MathForm parse_math_form(std::string_view text);

// A point on the optimization ladder.
struct KernelVariant {
  Layout layout = Layout::Soa;
  MathForm math_form = MathForm::PowThenDivide;
  std::optional<std::size_t> block_size;  // bodies per j-tile; empty = unblocked
  unsigned threads = 1;

  // Unblocked, sequential structure-of-arrays with pow_then_divide.
  static KernelVariant reference() { return {}; }

  // Stable name used as the CSV `variant` column, e.g. "soa_b64_recip".
  std::string label() const;

  // Empty when the variant is admissible for an n-body system.
  std::optional<std::string> invalid_reason(std::size_t n) const;
  void validate(std::size_t n) const;

  friend bool operator==(const KernelVariant&, const KernelVariant&) = default;
};

template <typename T>
struct Vec3Arrays {
  std::vector<T> x, y, z;
};

class AccelerationBuffer {
 public:
  using Storage = std::variant<Vec3Arrays<float>, Vec3Arrays<double>>;

  AccelerationBuffer(std::size_t n, Precision precision);

  std::size_t count() const;
  Precision precision() const;
  Vec3<double> at(std::size_t index) const;
  bool is_finite() const;

  const Storage& storage() const { return storage_; }
  Storage& storage() { return storage_; }

 private:
  Storage storage_;
};

// Phase 1: out_i = G * sum_j m_j (p_j - p_i) / (|p_j - p_i|^2 + eps^2)^(3/2).
// The self pair is skipped. Zero softening with two coincident bodies yields
// non-finite output.
void compute_accelerations(const ParticleSystem& system, const SimParams& params,
                           const KernelVariant& variant,
                           AccelerationBuffer& out);

// Phase 2: v += a dt; p += (v_old + a dt / 2) dt.
void integrate_step(ParticleSystem& system, const AccelerationBuffer& acc,
                    const SimParams& params, const KernelVariant& variant);

// params.steps iterations of compute then integrate, with a barrier between
// the phases and between steps. Repeated runs with the same inputs and thread
// count are bitwise identical.
ParticleSystem simulate(ParticleSystem system, const SimParams& params,
                        const KernelVariant& variant);
void simulate_in_place(ParticleSystem& system, const SimParams& params,
                       const KernelVariant& variant);

// Contiguous near-equal index ranges, one per worker.
struct IndexRange {
  std::size_t begin = 0;
  std::size_t end = 0;
};
std::vector<IndexRange> static_partition(std::size_t n, unsigned parts);

}  // namespace nbody
