#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "riskgov/rng.hpp"

namespace riskgov {

// Correlated Wiener increments for one Euler step of length dt.
struct NoiseBlock {
  std::vector<double> dW;  // asset increments
  std::vector<double> dZ;  // liability increments
};

// Slot layout within a (stream, step): asset factors first (common factor,
// then one per bank), liability factors after. Increments for all banks are
// always produced, dead or not, so surviving banks' streams do not depend on
// who has defaulted.
class CorrelatedNoise {
 public:
  CorrelatedNoise(StreamKey stream, int n_banks)
      : stream_(stream), n_(n_banks), scratch_(2 * (n_banks + 1)) {}

  void fill(std::uint64_t step, double rho_a, double rho_l, double dt, NoiseBlock& out) {
    if (std::abs(rho_a) > 1.0 || std::abs(rho_l) > 1.0)
      throw std::domain_error("draw_noise: |rho| must be <= 1");
    if (!(dt > 0.0)) throw std::domain_error("draw_noise: dt must be > 0");
    fill_normals(stream_, step, scratch_);
    const double sdt = std::sqrt(dt);
    const double wa = std::sqrt(1.0 - rho_a * rho_a);
    const double wl = std::sqrt(1.0 - rho_l * rho_l);
    out.dW.resize(n_);
    out.dZ.resize(n_);
    const double* xa = scratch_.data();       // xa[0] common, xa[1 + i] per bank
    const double* xl = scratch_.data() + n_ + 1;
    for (int i = 0; i < n_; ++i) {
      out.dW[i] = sdt * (rho_a * xa[0] + wa * xa[1 + i]);
      out.dZ[i] = sdt * (rho_l * xl[0] + wl * xl[1 + i]);
    }
  }

 private:
  StreamKey stream_;
  int n_;
  std::vector<double> scratch_;
};

inline NoiseBlock draw_noise(StreamKey stream, std::uint64_t step, double rho_a, double rho_l,
                             int n_banks, double dt) {
  NoiseBlock block;
  CorrelatedNoise gen(stream, n_banks);
  gen.fill(step, rho_a, rho_l, dt, block);
  return block;
}

}  // namespace riskgov
