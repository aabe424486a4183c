#include "nbody/particle_system.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <stdexcept>
#include <type_traits>

namespace nbody {

std::string_view to_string(Precision precision) {
  return precision == Precision::Single ? "single" : "double";
}

std::string_view to_string(Layout layout) {
  return layout == Layout::Aos ? "aos" : "soa";
}

Precision parse_precision(std::string_view text) {
  if (text == "single") return Precision::Single;
  if (text == "double") return Precision::Double;
  throw std::invalid_argument("unknown precision '" + std::string(text) + "'");
}

Layout parse_layout(std::string_view text) {
  if (text == "aos") return Layout::Aos;
  if (text == "soa") return Layout::Soa;
  throw std::invalid_argument("unknown layout '" + std::string(text) + "'");
}

namespace {

template <typename T>
bool finite_and_positive_mass(const SoaBodies<T>& b, std::string* why) {
  const std::size_t n = b.size();
  for (const auto* v : {&b.px, &b.py, &b.pz, &b.vx, &b.vy, &b.vz}) {
    if (v->size() != n) {
      *why = "coordinate sequence length differs from mass count";
      return false;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(b.px[i]) || !std::isfinite(b.py[i]) ||
        !std::isfinite(b.pz[i]) || !std::isfinite(b.vx[i]) ||
        !std::isfinite(b.vy[i]) || !std::isfinite(b.vz[i]) ||
        !std::isfinite(b.mass[i])) {
      *why = "non-finite value at body " + std::to_string(i);
      return false;
    }
    if (!(b.mass[i] > T{0})) {
      *why = "non-positive mass at body " + std::to_string(i);
      return false;
    }
  }
  return true;
}

template <typename T>
bool finite_and_positive_mass(const AosBodies<T>& b, std::string* why) {
  for (std::size_t i = 0; i < b.size(); ++i) {
    const auto& r = b.records[i];
    if (!std::isfinite(r.position.x) || !std::isfinite(r.position.y) ||
        !std::isfinite(r.position.z) || !std::isfinite(r.velocity.x) ||
        !std::isfinite(r.velocity.y) || !std::isfinite(r.velocity.z) ||
        !std::isfinite(r.mass)) {
      *why = "non-finite value at body " + std::to_string(i);
      return false;
    }
    if (!(r.mass > T{0})) {
      *why = "non-positive mass at body " + std::to_string(i);
      return false;
    }
  }
  return true;
}

template <typename T>
BodyState read_body(const SoaBodies<T>& b, std::size_t i) {
  return {{b.px[i], b.py[i], b.pz[i]}, {b.vx[i], b.vy[i], b.vz[i]}, b.mass[i]};
}

template <typename T>
BodyState read_body(const AosBodies<T>& b, std::size_t i) {
  const auto& r = b.records[i];
  return {{r.position.x, r.position.y, r.position.z},
          {r.velocity.x, r.velocity.y, r.velocity.z},
          r.mass};
}

template <typename T>
SoaBodies<T> to_soa(const AosBodies<T>& src) {
  SoaBodies<T> out;
  const std::size_t n = src.size();
  for (auto* v : {&out.px, &out.py, &out.pz, &out.vx, &out.vy, &out.vz,
                  &out.mass}) {
    v->resize(n);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = src.records[i];
    out.px[i] = r.position.x;
    out.py[i] = r.position.y;
    out.pz[i] = r.position.z;
    out.vx[i] = r.velocity.x;
    out.vy[i] = r.velocity.y;
    out.vz[i] = r.velocity.z;
    out.mass[i] = r.mass;
  }
  return out;
}

template <typename T>
AosBodies<T> to_aos(const SoaBodies<T>& src) {
  AosBodies<T> out;
  out.records.resize(src.size());
  for (std::size_t i = 0; i < src.size(); ++i) {
    out.records[i] = {{src.px[i], src.py[i], src.pz[i]},
                      {src.vx[i], src.vy[i], src.vz[i]},
                      src.mass[i]};
  }
  return out;
}

template <typename T>
ParticleSystem::Storage build_storage(std::span<const BodyState> bodies,
                                      Layout layout) {
  SoaBodies<T> soa;
  for (auto* v :
       {&soa.px, &soa.py, &soa.pz, &soa.vx, &soa.vy, &soa.vz, &soa.mass}) {
    v->reserve(bodies.size());
  }
  for (const auto& b : bodies) {
    soa.px.push_back(static_cast<T>(b.position.x));
    soa.py.push_back(static_cast<T>(b.position.y));
    soa.pz.push_back(static_cast<T>(b.position.z));
    soa.vx.push_back(static_cast<T>(b.velocity.x));
    soa.vy.push_back(static_cast<T>(b.velocity.y));
    soa.vz.push_back(static_cast<T>(b.velocity.z));
    soa.mass.push_back(static_cast<T>(b.mass));
  }
  if (layout == Layout::Aos) return to_aos(soa);
  return soa;
}

template <typename T>
bool same_bits(const std::vector<T>& a, const std::vector<T>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::bit_cast<std::conditional_t<sizeof(T) == 4, std::uint32_t,
                                         std::uint64_t>>(a[i]) !=
        std::bit_cast<std::conditional_t<sizeof(T) == 4, std::uint32_t,
                                         std::uint64_t>>(b[i])) {
      return false;
    }
  }
  return true;
}

}  // namespace

ParticleSystem::ParticleSystem(Storage storage) : storage_(std::move(storage)) {
  std::string why;
  const bool ok = std::visit(
      [&](const auto& b) {
        if (b.size() == 0) {
          why = "system must contain at least one body";
          return false;
        }
        return finite_and_positive_mass(b, &why);
      },
      storage_);
  if (!ok) throw std::invalid_argument("invalid particle system: " + why);
}

ParticleSystem ParticleSystem::from_bodies(std::span<const BodyState> bodies,
                                           Precision precision, Layout layout) {
  if (precision == Precision::Single) {
    return ParticleSystem(build_storage<float>(bodies, layout));
  }
  return ParticleSystem(build_storage<double>(bodies, layout));
}

std::size_t ParticleSystem::count() const {
  return std::visit([](const auto& b) { return b.size(); }, storage_);
}

Layout ParticleSystem::layout() const {
  return (std::holds_alternative<AosBodies<float>>(storage_) ||
          std::holds_alternative<AosBodies<double>>(storage_))
             ? Layout::Aos
             : Layout::Soa;
}

Precision ParticleSystem::precision() const {
  return (std::holds_alternative<SoaBodies<float>>(storage_) ||
          std::holds_alternative<AosBodies<float>>(storage_))
             ? Precision::Single
             : Precision::Double;
}

BodyState ParticleSystem::body(std::size_t index) const {
  if (index >= count()) throw std::out_of_range("body index out of range");
  return std::visit([&](const auto& b) { return read_body(b, index); },
                    storage_);
}

std::vector<BodyState> ParticleSystem::bodies() const {
  std::vector<BodyState> out(count());
  std::visit(
      [&](const auto& b) {
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = read_body(b, i);
      },
      storage_);
  return out;
}

bool ParticleSystem::is_finite() const {
  return std::visit(
      [](const auto& b) {
        for (std::size_t i = 0; i < b.size(); ++i) {
          const BodyState s = read_body(b, i);
          if (!std::isfinite(s.position.x) || !std::isfinite(s.position.y) ||
              !std::isfinite(s.position.z) || !std::isfinite(s.velocity.x) ||
              !std::isfinite(s.velocity.y) || !std::isfinite(s.velocity.z)) {
            return false;
          }
        }
        return true;
      },
      storage_);
}

bool ParticleSystem::bitwise_equal(const ParticleSystem& other) const {
  if (storage_.index() != other.storage_.index()) return false;
  return std::visit(
      [&](const auto& a) {
        using S = std::decay_t<decltype(a)>;
        const auto& b = std::get<S>(other.storage_);
        if constexpr (std::is_same_v<S, SoaBodies<float>> ||
                      std::is_same_v<S, SoaBodies<double>>) {
          return same_bits(a.px, b.px) && same_bits(a.py, b.py) &&
                 same_bits(a.pz, b.pz) && same_bits(a.vx, b.vx) &&
                 same_bits(a.vy, b.vy) && same_bits(a.vz, b.vz) &&
                 same_bits(a.mass, b.mass);
        } else {
          const auto sa = to_soa(a);
          const auto sb = to_soa(b);
          return same_bits(sa.px, sb.px) && same_bits(sa.py, sb.py) &&
                 same_bits(sa.pz, sb.pz) && same_bits(sa.vx, sb.vx) &&
                 same_bits(sa.vy, sb.vy) && same_bits(sa.vz, sb.vz) &&
                 same_bits(sa.mass, sb.mass);
        }
      },
      storage_);
}

void SimParams::validate() const {
  if (!(gravitational_constant > 0.0) || !std::isfinite(gravitational_constant)) {
    throw std::invalid_argument("gravitational_constant must be positive");
  }
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw std::invalid_argument("dt must be positive");
  }
  if (!(softening_sq >= 0.0) || !std::isfinite(softening_sq)) {
    throw std::invalid_argument("softening_sq must be non-negative");
  }
  if (steps < 1) throw std::invalid_argument("steps must be at least 1");
}

ParticleSystem init_system(std::size_t n, Seed seed, Precision precision,
                           Layout layout) {
  if (n == 0) throw std::invalid_argument("init_system: n must be >= 1");
  SplitMix64 rng(seed.value);
  std::vector<BodyState> bodies(n);
  for (auto& b : bodies) {
    b.position.x = rng.next_unit();
    b.position.y = rng.next_unit();
    b.position.z = rng.next_unit();
    b.mass = 1.0 - rng.next_unit();
  }
  return ParticleSystem::from_bodies(bodies, precision, layout);
}

ParticleSystem convert_layout(const ParticleSystem& system, Layout target) {
  if (system.layout() == target) return system;
  return std::visit(
      [](const auto& b) -> ParticleSystem {
        using S = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<S, SoaBodies<float>> ||
                      std::is_same_v<S, SoaBodies<double>>) {
          return ParticleSystem(to_aos(b));
        } else {
          return ParticleSystem(to_soa(b));
        }
      },
      system.storage());
}

double checksum(const ParticleSystem& system) {
  double total = 0.0;
  std::visit(
      [&](const auto& b) {
        for (std::size_t i = 0; i < b.size(); ++i) {
          const BodyState s = read_body(b, i);
          total += s.position.x + s.position.y + s.position.z;
        }
      },
      system.storage());
  return total;
}

std::string format_checksum(double value) {
  char buf[64];
  const auto res =
      std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

}  // namespace nbody
