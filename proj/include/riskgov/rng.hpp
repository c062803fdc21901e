#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>

namespace riskgov {

// Counter-derived random streams.
//
// Every normal variate is a pure function of (stream key, step, slot), so
// draws never depend on evaluation order, worker count, or how many other
// variates were consumed. Stream keys are derived from the master seed and a
// (domain, block, path) triple:
//
//   key  = mix(mix(mix(seed ^ C0*domain) ^ C1*block) ^ C2*path)
//   base = mix(key ^ C3*(step+1))                    (once per step)
//   u    = mix(base ^ C4*(slot+1))                   (one 64-bit word per slot)
//
// where mix is the splitmix64 finalizer. Uniforms map the word to (0,1] and
// normals come from Box-Muller applied to slot pairs (2m, 2m+1).

namespace detail {

inline constexpr std::uint64_t kDomainMul = 0x9e3779b97f4a7c15ull;
inline constexpr std::uint64_t kBlockMul = 0xc2b2ae3d27d4eb4full;
inline constexpr std::uint64_t kPathMul = 0xd6e8feb86659fd93ull;
inline constexpr std::uint64_t kStepMul = 0xa0761d6478bd642full;
inline constexpr std::uint64_t kSlotMul = 0xe7037ed1a0b428dbull;

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// 64-bit word -> (0,1]; never 0, so log() below is always finite
inline double to_unit(std::uint64_t u) {
  return (static_cast<double>(u >> 11) + 1.0) * 0x1.0p-53;
}

}  // namespace detail

// Identity of one independent stream of variates.
struct StreamKey {
  std::uint64_t key = 0;
};

// Purpose tags keeping unrelated consumers of the same master seed apart.
enum class StreamDomain : std::uint64_t {
  outer_path = 1,   // realized governance path; block = quarter index
  inner_eval = 2,   // candidate evaluations; block = quarter, path shared across candidates
  loss_dist = 3,    // loss-distribution runs; same path keys for model variants
  pmf = 4,          // pseudo-mean-field / mean-field ensembles
  validation = 5,   // self-check estimators
};

inline StreamKey derive_stream(std::uint64_t seed, StreamDomain domain,
                               std::uint64_t block, std::uint64_t path) {
  using namespace detail;
  std::uint64_t k = mix64(seed ^ (kDomainMul * static_cast<std::uint64_t>(domain)));
  k = mix64(k ^ (kBlockMul * (block + 1)));
  k = mix64(k ^ (kPathMul * (path + 1)));
  return StreamKey{k};
}

// Fills out[0..n) with standard normals for the given (stream, step).
inline void fill_normals(StreamKey stream, std::uint64_t step, std::span<double> out) {
  using namespace detail;
  const std::uint64_t base = mix64(stream.key ^ (kStepMul * (step + 1)));
  const std::size_t n = out.size();
  for (std::size_t m = 0; m < n; m += 2) {
    const double u1 = to_unit(mix64(base ^ (kSlotMul * (m + 1))));
    const double u2 = to_unit(mix64(base ^ (kSlotMul * (m + 2))));
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    out[m] = r * std::cos(theta);
    if (m + 1 < n) out[m + 1] = r * std::sin(theta);
  }
}

inline double normal_at(StreamKey stream, std::uint64_t step, std::uint64_t slot) {
  using namespace detail;
  const std::uint64_t base = mix64(stream.key ^ (kStepMul * (step + 1)));
  const std::uint64_t m = slot & ~1ull;
  const double u1 = to_unit(mix64(base ^ (kSlotMul * (m + 1))));
  const double u2 = to_unit(mix64(base ^ (kSlotMul * (m + 2))));
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  return (slot & 1ull) ? r * std::sin(theta) : r * std::cos(theta);
}

}  // namespace riskgov
