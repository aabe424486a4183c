#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace nbody {

enum class Precision { Single, Double };
enum class Layout { Aos, Soa };

std::string_view to_string(Precision precision);
std::string_view to_string(Layout layout);
Precision parse_precision(std::string_view text);
Layout parse_layout(std::string_view text);

template <typename T>
struct Vec3 {
  T x{};
  T y{};
  T z{};

  friend bool operator==(const Vec3&, const Vec3&) = default;
};

// One body in an array-of-structures system.
template <typename T>
struct BodyRecord {
  Vec3<T> position;
  Vec3<T> velocity;
  T mass{};
};

// Structure-of-arrays storage: one contiguous buffer per coordinate axis.
template <typename T>
struct SoaBodies {
  using value_type = T;

  std::vector<T> px, py, pz;
  std::vector<T> vx, vy, vz;
  std::vector<T> mass;

  std::size_t size() const { return mass.size(); }
};

template <typename T>
struct AosBodies {
  using value_type = T;

  std::vector<BodyRecord<T>> records;

  std::size_t size() const { return records.size(); }
};

// Layout-neutral view of one body, widened to double.
struct BodyState {
  Vec3<double> position;
  Vec3<double> velocity;
  double mass = 1.0;
};

// N bodies stored in one declared layout and precision.
//
// Construction validates the invariants (matching lengths, finite values,
// strictly positive masses). Kernels mutate the storage in place and do not
// re-validate, so a simulated system may become non-finite when softening is
// disabled; is_finite() reports that.
class ParticleSystem {
 public:
  using Storage = std::variant<SoaBodies<float>, SoaBodies<double>,
                               AosBodies<float>, AosBodies<double>>;

  explicit ParticleSystem(Storage storage);

  // Builds a system from double-precision body states, rounding to float when
  // precision is Single.
  static ParticleSystem from_bodies(std::span<const BodyState> bodies,
                                    Precision precision, Layout layout);

  std::size_t count() const;
  Layout layout() const;
  Precision precision() const;

  BodyState body(std::size_t index) const;
  std::vector<BodyState> bodies() const;

  bool is_finite() const;

  const Storage& storage() const { return storage_; }
  Storage& storage() { return storage_; }

  // Bitwise comparison of every stored scalar (layout and precision included).
  bool bitwise_equal(const ParticleSystem& other) const;

 private:
  Storage storage_;
};

struct SimParams {
  double gravitational_constant = 1.0;
  double dt = 0.01;
  double softening_sq = 1e-9;
  std::uint64_t steps = 100;

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
};

struct Seed {
  std::uint64_t value = 42;
};

// splitmix64; the exact recurrence is part of the cross-runtime contract.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 random bits.
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

// Positions uniform in [0,1)^3, zero velocities, masses uniform in (0,1].
// Draws are consumed as (x, y, z, mass) per body in index order.
ParticleSystem init_system(std::size_t n, Seed seed, Precision precision,
                           Layout layout);

ParticleSystem convert_layout(const ParticleSystem& system, Layout target);

// Sum over bodies of (x + y + z), accumulated in double in index order.
double checksum(const ParticleSystem& system);

// 17 significant digits, the external rendering of checksums.
std::string format_checksum(double value);

}  // namespace nbody
