#include "nbody/kernels.hpp"

#include <algorithm>
#include <barrier>
#include <cmath>
#include <stdexcept>
#include <thread>
#include <type_traits>

namespace nbody {

std::string_view to_string(MathForm form) {
  return form == MathForm::PowThenDivide ? "pow" : "recip";
}

MathForm parse_math_form(std::string_view text) {
  if (text == "pow") return MathForm::PowThenDivide;
  if (text == "recip") return MathForm::ReciprocalMultiply;
  throw std::invalid_argument("unknown math form '" + std::string(text) + "'");
}

std::string KernelVariant::label() const {
  std::string out(to_string(layout));
  if (block_size) out += "_b" + std::to_string(*block_size);
  if (math_form == MathForm::ReciprocalMultiply) out += "_recip";
  return out;
}

std::optional<std::string> KernelVariant::invalid_reason(std::size_t n) const {
  if (threads < 1) return "threads must be >= 1";
  if (layout == Layout::Aos &&
      (math_form != MathForm::PowThenDivide || block_size || threads != 1)) {
    return "aos layout admits only unblocked sequential pow_then_divide";
  }
  if (block_size) {
    if (*block_size < 1) return "block size must be >= 1";
    if (*block_size > n) {
      return "block size " + std::to_string(*block_size) + " exceeds n=" +
             std::to_string(n);
    }
  }
  return std::nullopt;
}

void KernelVariant::validate(std::size_t n) const {
  if (auto why = invalid_reason(n)) {
    throw std::invalid_argument("invalid kernel variant " + label() + ": " +
                                *why);
  }
}

AccelerationBuffer::AccelerationBuffer(std::size_t n, Precision precision)
    : storage_(precision == Precision::Single
                   ? Storage(Vec3Arrays<float>{std::vector<float>(n),
                                               std::vector<float>(n),
                                               std::vector<float>(n)})
                   : Storage(Vec3Arrays<double>{std::vector<double>(n),
                                                std::vector<double>(n),
                                                std::vector<double>(n)})) {}

std::size_t AccelerationBuffer::count() const {
  return std::visit([](const auto& a) { return a.x.size(); }, storage_);
}

Precision AccelerationBuffer::precision() const {
  return std::holds_alternative<Vec3Arrays<float>>(storage_)
             ? Precision::Single
             : Precision::Double;
}

Vec3<double> AccelerationBuffer::at(std::size_t index) const {
  return std::visit(
      [&](const auto& a) {
        return Vec3<double>{a.x.at(index), a.y.at(index), a.z.at(index)};
      },
      storage_);
}

bool AccelerationBuffer::is_finite() const {
  return std::visit(
      [](const auto& a) {
        for (std::size_t i = 0; i < a.x.size(); ++i) {
          if (!std::isfinite(a.x[i]) || !std::isfinite(a.y[i]) ||
              !std::isfinite(a.z[i])) {
            return false;
          }
        }
        return true;
      },
      storage_);
}

std::vector<IndexRange> static_partition(std::size_t n, unsigned parts) {
  if (parts == 0) throw std::invalid_argument("static_partition: parts == 0");
  std::vector<IndexRange> out(parts);
  const std::size_t base = n / parts;
  const std::size_t extra = n % parts;
  std::size_t begin = 0;
  for (unsigned k = 0; k < parts; ++k) {
    const std::size_t len = base + (k < extra ? 1 : 0);
    out[k] = {begin, begin + len};
    begin += len;
  }
  return out;
}

namespace {

// Adds the pull of bodies [j_begin, j_end) on the body at (xi, yi, zi).
// The j loop is the SIMD axis.
template <typename T, MathForm Form>
inline void pull_from_range(const T* __restrict px, const T* __restrict py,
                            const T* __restrict pz, const T* __restrict m,
                            T xi, T yi, T zi, T eps2, std::size_t j_begin,
                            std::size_t j_end, Vec3<T>& sum) {
  T sx{}, sy{}, sz{};
#pragma omp simd reduction(+ : sx, sy, sz)
  for (std::size_t j = j_begin; j < j_end; ++j) {
    const T dx = px[j] - xi;
    const T dy = py[j] - yi;
    const T dz = pz[j] - zi;
    const T r2 = dx * dx + dy * dy + dz * dz + eps2;
    const T r3 = r2 * std::sqrt(r2);
    if constexpr (Form == MathForm::PowThenDivide) {
      sx += m[j] * dx / r3;
      sy += m[j] * dy / r3;
      sz += m[j] * dz / r3;
    } else {
      const T s = m[j] * (T{1} / r3);
      sx += dx * s;
      sy += dy * s;
      sz += dz * s;
    }
  }
  sum.x += sx;
  sum.y += sy;
  sum.z += sz;
}

// Interactions of rows [rows.begin, rows.end) with the tile [j_begin, j_end).
// The self pair is excluded by splitting the range around i, so it adds
// exactly zero without a per-pair test.
template <typename T, MathForm Form>
void soa_tile(const SoaBodies<T>& b, T eps2, IndexRange rows,
              std::size_t j_begin, std::size_t j_end, Vec3Arrays<T>& out,
              bool accumulate) {
  const T* px = b.px.data();
  const T* py = b.py.data();
  const T* pz = b.pz.data();
  const T* m = b.mass.data();
  for (std::size_t i = rows.begin; i < rows.end; ++i) {
    Vec3<T> sum{};
    const std::size_t split = std::clamp(i, j_begin, j_end);
    pull_from_range<T, Form>(px, py, pz, m, px[i], py[i], pz[i], eps2, j_begin,
                             split, sum);
    pull_from_range<T, Form>(px, py, pz, m, px[i], py[i], pz[i], eps2,
                             std::max(split, std::min(i + 1, j_end)), j_end,
                             sum);
    if (accumulate) {
      out.x[i] += sum.x;
      out.y[i] += sum.y;
      out.z[i] += sum.z;
    } else {
      out.x[i] = sum.x;
      out.y[i] = sum.y;
      out.z[i] = sum.z;
    }
  }
}

template <typename T, MathForm Form>
void soa_forces(const SoaBodies<T>& b, const SimParams& params,
                const KernelVariant& variant, Vec3Arrays<T>& out,
                IndexRange rows) {
  const T eps2 = static_cast<T>(params.softening_sq);
  const std::size_t n = b.size();
  if (!variant.block_size) {
    soa_tile<T, Form>(b, eps2, rows, 0, n, out, false);
  } else {
    const std::size_t block = *variant.block_size;
    for (std::size_t i = rows.begin; i < rows.end; ++i) {
      out.x[i] = out.y[i] = out.z[i] = T{0};
    }
    for (std::size_t jb = 0; jb < n; jb += block) {
      soa_tile<T, Form>(b, eps2, rows, jb, std::min(n, jb + block), out, true);
    }
  }
  const T g = static_cast<T>(params.gravitational_constant);
  for (std::size_t i = rows.begin; i < rows.end; ++i) {
    out.x[i] *= g;
    out.y[i] *= g;
    out.z[i] *= g;
  }
}

template <typename T>
void forces(const SoaBodies<T>& b, const SimParams& params,
            const KernelVariant& variant, Vec3Arrays<T>& out,
            IndexRange rows) {
  if (variant.math_form == MathForm::PowThenDivide) {
    soa_forces<T, MathForm::PowThenDivide>(b, params, variant, out, rows);
  } else {
    soa_forces<T, MathForm::ReciprocalMultiply>(b, params, variant, out, rows);
  }
}

// Array-of-structures rung: plain scalar loops, pow_then_divide only.
template <typename T>
void forces(const AosBodies<T>& b, const SimParams& params,
            const KernelVariant&, Vec3Arrays<T>& out, IndexRange rows) {
  const T eps2 = static_cast<T>(params.softening_sq);
  const T g = static_cast<T>(params.gravitational_constant);
  const auto& recs = b.records;
  for (std::size_t i = rows.begin; i < rows.end; ++i) {
    const Vec3<T> pi = recs[i].position;
    T sx{}, sy{}, sz{};
    for (std::size_t j = 0; j < recs.size(); ++j) {
      if (j == i) continue;
      const auto& rj = recs[j];
      const T dx = rj.position.x - pi.x;
      const T dy = rj.position.y - pi.y;
      const T dz = rj.position.z - pi.z;
      const T r2 = dx * dx + dy * dy + dz * dz + eps2;
      const T r3 = r2 * std::sqrt(r2);
      sx += rj.mass * dx / r3;
      sy += rj.mass * dy / r3;
      sz += rj.mass * dz / r3;
    }
    out.x[i] = sx * g;
    out.y[i] = sy * g;
    out.z[i] = sz * g;
  }
}

template <typename T>
void integrate(SoaBodies<T>& b, const Vec3Arrays<T>& a, T dt, IndexRange rows) {
  const T half{0.5};
  for (std::size_t i = rows.begin; i < rows.end; ++i) {
    const T dvx = a.x[i] * dt;
    const T dvy = a.y[i] * dt;
    const T dvz = a.z[i] * dt;
    b.px[i] += (b.vx[i] + dvx * half) * dt;
    b.py[i] += (b.vy[i] + dvy * half) * dt;
    b.pz[i] += (b.vz[i] + dvz * half) * dt;
    b.vx[i] += dvx;
    b.vy[i] += dvy;
    b.vz[i] += dvz;
  }
}

template <typename T>
void integrate(AosBodies<T>& b, const Vec3Arrays<T>& a, T dt, IndexRange rows) {
  const T half{0.5};
  for (std::size_t i = rows.begin; i < rows.end; ++i) {
    auto& r = b.records[i];
    const T dvx = a.x[i] * dt;
    const T dvy = a.y[i] * dt;
    const T dvz = a.z[i] * dt;
    r.position.x += (r.velocity.x + dvx * half) * dt;
    r.position.y += (r.velocity.y + dvy * half) * dt;
    r.position.z += (r.velocity.z + dvz * half) * dt;
    r.velocity.x += dvx;
    r.velocity.y += dvy;
    r.velocity.z += dvz;
  }
}

void force_phase(const ParticleSystem& system, const SimParams& params,
                 const KernelVariant& variant, AccelerationBuffer& acc,
                 IndexRange rows) {
  std::visit(
      [&](const auto& bodies) {
        using T = typename std::decay_t<decltype(bodies)>::value_type;
        forces(bodies, params, variant, std::get<Vec3Arrays<T>>(acc.storage()),
               rows);
      },
      system.storage());
}

void integrate_phase(ParticleSystem& system, const AccelerationBuffer& acc,
                     const SimParams& params, IndexRange rows) {
  std::visit(
      [&](auto& bodies) {
        using T = typename std::decay_t<decltype(bodies)>::value_type;
        integrate(bodies, std::get<Vec3Arrays<T>>(acc.storage()),
                  static_cast<T>(params.dt), rows);
      },
      system.storage());
}

void check_inputs(const ParticleSystem& system, const SimParams& params,
                  const KernelVariant& variant) {
  params.validate();
  variant.validate(system.count());
  if (system.layout() != variant.layout) {
    throw std::invalid_argument("variant " + variant.label() +
                                " does not match system layout " +
                                std::string(to_string(system.layout())));
  }
}

void check_buffer(const ParticleSystem& system, const AccelerationBuffer& acc) {
  if (acc.count() != system.count() || acc.precision() != system.precision()) {
    throw std::invalid_argument(
        "acceleration buffer does not match system size or precision");
  }
}

}  // namespace

void compute_accelerations(const ParticleSystem& system, const SimParams& params,
                           const KernelVariant& variant,
                           AccelerationBuffer& out) {
  check_inputs(system, params, variant);
  check_buffer(system, out);
  const auto ranges = static_partition(system.count(), variant.threads);
  {
    std::vector<std::jthread> workers;
    workers.reserve(ranges.size() - 1);
    for (std::size_t k = 1; k < ranges.size(); ++k) {
      workers.emplace_back(
          [&, k] { force_phase(system, params, variant, out, ranges[k]); });
    }
    force_phase(system, params, variant, out, ranges[0]);
  }
}

void integrate_step(ParticleSystem& system, const AccelerationBuffer& acc,
                    const SimParams& params, const KernelVariant& variant) {
  check_inputs(system, params, variant);
  check_buffer(system, acc);
  const auto ranges = static_partition(system.count(), variant.threads);
  {
    std::vector<std::jthread> workers;
    workers.reserve(ranges.size() - 1);
    for (std::size_t k = 1; k < ranges.size(); ++k) {
      workers.emplace_back(
          [&, k] { integrate_phase(system, acc, params, ranges[k]); });
    }
    integrate_phase(system, acc, params, ranges[0]);
  }
}

void simulate_in_place(ParticleSystem& system, const SimParams& params,
                       const KernelVariant& variant) {
  check_inputs(system, params, variant);
  AccelerationBuffer acc(system.count(), system.precision());
  const auto ranges = static_partition(system.count(), variant.threads);

  if (ranges.size() == 1) {
    for (std::uint64_t s = 0; s < params.steps; ++s) {
      force_phase(system, params, variant, acc, ranges[0]);
      integrate_phase(system, acc, params, ranges[0]);
    }
    return;
  }

  // Each worker owns one slice of bodies for the whole run. The first barrier
  // keeps every position unchanged until all forces are known; the second
  // keeps any worker from starting the next step early.
  std::barrier sync(static_cast<std::ptrdiff_t>(ranges.size()));
  auto worker = [&](std::size_t k) {
    for (std::uint64_t s = 0; s < params.steps; ++s) {
      force_phase(system, params, variant, acc, ranges[k]);
      sync.arrive_and_wait();
      integrate_phase(system, acc, params, ranges[k]);
      sync.arrive_and_wait();
    }
  };
  std::vector<std::jthread> workers;
  workers.reserve(ranges.size() - 1);
  for (std::size_t k = 1; k < ranges.size(); ++k) {
    workers.emplace_back(worker, k);
  }
  worker(0);
}

ParticleSystem simulate(ParticleSystem system, const SimParams& params,
                        const KernelVariant& variant) {
  simulate_in_place(system, params, variant);
  return system;
}

}  // namespace nbody
