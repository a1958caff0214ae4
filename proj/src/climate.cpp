#include "investesg/climate.hpp"

#include <cmath>

namespace investesg::climate {

namespace {

const char* event_name(std::size_t e) {
  static constexpr const char* kNames[] = {"heat", "precip", "drought"};
  return kNames[e];
}

}  // namespace

void ClimateParams::validate() const {
  for (std::size_t e = 0; e < kNumEvents; ++e) {
    if (!(base[e] >= 0.0 && base[e] <= 1.0))
      throw CalibrationError(std::string("base risk for ") + event_name(e) + " must lie in [0,1]");
    if (!(growth[e] >= 0.0) || !std::isfinite(growth[e]))
      throw CalibrationError(std::string("growth rate for ") + event_name(e) + " must be >= 0");
    if (!(elasticity[e] >= 0.0) || !std::isfinite(elasticity[e]))
      throw CalibrationError(std::string("elasticity for ") + event_name(e) + " must be >= 0");
  }
  if (horizon < 0) throw CalibrationError("horizon must be >= 0");
}

ClimateRisks derive_growth_rates(const ClimateRisks& base, const ClimateRisks& target_at_80) {
  std::array<double, kNumEvents> growth{};
  for (std::size_t e = 0; e < kNumEvents; ++e) {
    const double rise = target_at_80[e] - base[e];
    if (!(rise >= 0.0))
      throw CalibrationError(std::string("target below base risk for ") + event_name(e));
    growth[e] = rise / kCalibrationPeriod;
  }
  return ClimateRisks::from_array(growth);
}

ClimateRisks risk_at(double t, double cumulative_mitigation, const ClimateParams& params) {
  std::array<double, kNumEvents> p{};
  for (std::size_t e = 0; e < kNumEvents; ++e) {
    p[e] = clamp_probability(unclamped_risk(params.base[e], params.growth[e], params.elasticity[e],
                                            t, cumulative_mitigation));
  }
  return ClimateRisks::from_array(p);
}

double overall_risk(const ClimateRisks& risks) {
  return 1.0 - (1.0 - risks.heat) * (1.0 - risks.precip) * (1.0 - risks.drought);
}

EventOutcome sample_events(const ClimateRisks& risks, const std::array<double, kNumEvents>& uniforms) {
  EventOutcome out;
  out.heat = uniforms[0] < risks.heat;
  out.precip = uniforms[1] < risks.precip;
  out.drought = uniforms[2] < risks.drought;
  out.count = int{out.heat} + int{out.precip} + int{out.drought};
  return out;
}

ClimateRisks calibrate_elasticity(double annual_budget, const ClimateRisks& target_at_80,
                                  const ClimateParams& params) {
  if (!(annual_budget > 0.0) || !std::isfinite(annual_budget))
    throw CalibrationError("annual mitigation budget must be > 0");
  const double cumulative = kCalibrationPeriod * annual_budget;
  std::array<double, kNumEvents> lambda{};
  for (std::size_t e = 0; e < kNumEvents; ++e) {
    const double rise = params.growth[e] * kCalibrationPeriod;
    const double reduced = target_at_80[e] - params.base[e];
    if (rise == 0.0 && reduced == 0.0) {
      lambda[e] = 0.0;  // nothing to mitigate
      continue;
    }
    if (!(reduced > 0.0) || reduced > rise)
      throw CalibrationError(std::string("target risk for ") + event_name(e) +
                             " must lie in (base, no-mitigation risk at period 80]");
    lambda[e] = (rise / reduced - 1.0) / cumulative;
  }
  return ClimateRisks::from_array(lambda);
}

ClimateParams default_params(double annual_budget, double target_fraction) {
  ClimateParams params;
  params.base = kDefaultBase;
  params.growth = derive_growth_rates(kDefaultBase, kNoMitigationAt80);
  std::array<double, kNumEvents> target{};
  for (std::size_t e = 0; e < kNumEvents; ++e)
    target[e] = params.base[e] + target_fraction * params.growth[e] * kCalibrationPeriod;
  params.elasticity = calibrate_elasticity(annual_budget, ClimateRisks::from_array(target), params);
  return params;
}

}  // namespace investesg::climate
