#include "investesg/streams.hpp"

#include <stdexcept>

namespace investesg {

namespace {
constexpr std::uint64_t kNormalStreamSalt = 0x6a09e667f3bcc909ULL;
}

ClimateStream::ClimateStream(std::uint64_t seed, int horizon, std::size_t num_companies,
                             bool gaussian_damage)
    : seed_(seed), horizon_(horizon), num_companies_(num_companies) {
  if (horizon < 0) throw std::invalid_argument("horizon must be >= 0");
  const auto periods = static_cast<std::size_t>(horizon);
  std::mt19937_64 events(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  uniforms_.resize(periods * climate::kNumEvents);
  for (double& u : uniforms_) u = unit(events);
  if (gaussian_damage) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(kNormalStreamSalt),
                      static_cast<std::uint32_t>(kNormalStreamSalt >> 32)};
    std::mt19937_64 damage(seq);
    std::normal_distribution<double> normal(0.0, 1.0);
    normals_.resize(periods * num_companies * climate::kNumEvents);
    for (double& z : normals_) z = normal(damage);
  }
}

std::span<const double> ClimateStream::uniforms(int period) const {
  if (period < 0 || period >= horizon_) throw std::out_of_range("period outside the climate stream");
  return std::span<const double>(uniforms_).subspan(static_cast<std::size_t>(period) * climate::kNumEvents,
                                                    climate::kNumEvents);
}

std::span<const double> ClimateStream::normals(int period) const {
  if (normals_.empty()) return {};
  if (period < 0 || period >= horizon_) throw std::out_of_range("period outside the climate stream");
  const std::size_t width = num_companies_ * climate::kNumEvents;
  return std::span<const double>(normals_).subspan(static_cast<std::size_t>(period) * width, width);
}

market::PeriodDraws ClimateStream::draws(int period) const {
  market::PeriodDraws d;
  const auto u = uniforms(period);
  for (std::size_t e = 0; e < climate::kNumEvents; ++e) d.uniforms[e] = u[e];
  d.damage_normals = normals(period);
  return d;
}

PolicyRng make_policy_rng(std::uint64_t seed) { return PolicyRng(seed); }

}  // namespace investesg
