#pragma once

// Climate risk evolution for the three tracked event types (extreme heat,
// heavy precipitation, drought). The risk triple is the whole climate state.

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace investesg::climate {

inline constexpr std::size_t kNumEvents = 3;

/// Calibration window: risks reach their no-mitigation endpoint at this
/// period (calendar 2100).
inline constexpr int kCalibrationPeriod = 80;

class CalibrationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Per-event probabilities, ordered heat, precipitation, drought.
struct ClimateRisks {
  double heat = 0.0;
  double precip = 0.0;
  double drought = 0.0;

  [[nodiscard]] double operator[](std::size_t e) const {
    return e == 0 ? heat : (e == 1 ? precip : drought);
  }
  [[nodiscard]] std::array<double, kNumEvents> as_array() const { return {heat, precip, drought}; }
  static ClimateRisks from_array(const std::array<double, kNumEvents>& a) { return {a[0], a[1], a[2]}; }

  friend bool operator==(const ClimateRisks&, const ClimateRisks&) = default;
};

struct ClimateParams {
  ClimateRisks base{0.28, 0.13, 0.17};
  ClimateRisks growth{};      // per-year risk growth with zero mitigation
  ClimateRisks elasticity{};  // per trillion USD of cumulative mitigation
  int horizon = 100;

  /// Throws CalibrationError when any field is out of its domain.
  void validate() const;
};

struct EventOutcome {
  bool heat = false;
  bool precip = false;
  bool drought = false;
  int count = 0;

  [[nodiscard]] bool occurred(std::size_t e) const {
    return e == 0 ? heat : (e == 1 ? precip : drought);
  }
  friend bool operator==(const EventOutcome&, const EventOutcome&) = default;
};

/// Linear growth rates that carry `base` to `target_at_80` over the
/// calibration window with no mitigation.
ClimateRisks derive_growth_rates(const ClimateRisks& base, const ClimateRisks& target_at_80);

/// Risk growth term for one event type, before clamping.
inline double unclamped_risk(double base, double growth, double elasticity, double t,
                             double cumulative_mitigation) {
  return growth * t / (1.0 + elasticity * cumulative_mitigation) + base;
}

inline double clamp_probability(double p) { return p < 0.0 ? 0.0 : (p > 1.0 ? 1.0 : p); }

ClimateRisks risk_at(double t, double cumulative_mitigation, const ClimateParams& params);

/// Probability of at least one event in a period.
double overall_risk(const ClimateRisks& risks);

EventOutcome sample_events(const ClimateRisks& risks, const std::array<double, kNumEvents>& uniforms);

/// Fits the mitigation elasticities so that `annual_budget` per year,
/// accumulated over the calibration window, lands exactly on `target_at_80`.
ClimateRisks calibrate_elasticity(double annual_budget, const ClimateRisks& target_at_80,
                                  const ClimateParams& params);

/// Default params: base (0.28, 0.13, 0.17), the 2100 no-mitigation endpoint
/// (0.94, 0.27, 0.41), and elasticities fitted to `annual_budget` reaching
/// base + target_fraction * (no-mitigation growth) at period 80.
ClimateParams default_params(double annual_budget, double target_fraction);

inline constexpr ClimateRisks kDefaultBase{0.28, 0.13, 0.17};
inline constexpr ClimateRisks kNoMitigationAt80{0.94, 0.27, 0.41};

}  // namespace investesg::climate
