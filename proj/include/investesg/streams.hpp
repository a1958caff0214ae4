#pragma once

// Random streams. Climate events and policy noise come from independent
// generators so the event sequence can be frozen while policies vary.

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "investesg/market.hpp"

namespace investesg {

using PolicyRng = std::mt19937_64;

/// All climate randomness for one episode, drawn up front: three event
/// uniforms per period and, for Gaussian damage, one standard normal per
/// company and event type. Normals come from a generator derived from the
/// same seed, so enabling Gaussian damage leaves the event uniforms intact.
class ClimateStream {
 public:
  ClimateStream() = default;
  ClimateStream(std::uint64_t seed, int horizon, std::size_t num_companies, bool gaussian_damage);

  [[nodiscard]] market::PeriodDraws draws(int period) const;
  [[nodiscard]] std::span<const double> uniforms(int period) const;
  [[nodiscard]] std::span<const double> normals(int period) const;
  [[nodiscard]] int horizon() const { return horizon_; }
  [[nodiscard]] std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_ = 0;
  int horizon_ = 0;
  std::size_t num_companies_ = 0;
  std::vector<double> uniforms_;
  std::vector<double> normals_;
};

PolicyRng make_policy_rng(std::uint64_t seed);

}  // namespace investesg
