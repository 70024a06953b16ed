#pragma once

// Counter-based complex Wiener increments for quantum state diffusion.
//
// Every increment is a pure function of (seed, step, channel): the stream
// needs no sequential state, so trajectories can be replayed, split across
// workers, or sampled at arbitrary steps with identical results.

#include <array>
#include <complex>
#include <cstdint>

namespace qmeas {

// Philox4x32-10 block function (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

std::uint64_t splitmix64(std::uint64_t x);

// Per-trajectory seed derived from an ensemble master seed.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index);

class NoiseStream {
 public:
  NoiseStream(std::uint64_t seed, double dt) : seed_(seed), dt_(dt) {}

  std::uint64_t seed() const { return seed_; }
  double dt() const { return dt_; }

  // Two independent standard normals for (step, channel).
  std::array<double, 2> normals(std::uint64_t step, std::uint32_t channel) const;

  // d xi = (eta_1 + i eta_2) sqrt(dt / 2): E[d xi] = E[d xi^2] = 0, E|d xi|^2 = dt.
  std::complex<double> increment(std::uint64_t step, std::uint32_t channel) const;

 private:
  std::uint64_t seed_;
  double dt_;
};

}  // namespace qmeas
