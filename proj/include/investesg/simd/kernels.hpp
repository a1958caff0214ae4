#pragma once

// Lane-parallel arithmetic for the batch runner. Every array argument holds
// one value per episode lane; `n` is the lane count. The scalar table is the
// reference; other tables must reproduce it bit-for-bit, which is why the
// build disables FMA contraction and kernels keep the reference operation
// order.

#include <cstddef>
#include <string_view>

namespace investesg::simd {

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa);

struct RiskCoeffs {
  double base[3];
  double growth[3];
  double elasticity[3];
};

struct KernelTable {
  Isa isa;

  // heat/precip/drought = clamp(growth*t / (1 + elasticity*U) + base)
  void (*update_risks)(double t, const double* cumulative_mitigation, const RiskCoeffs& coeffs,
                       double* heat, double* precip, double* drought, std::size_t n);

  // out = 1 - (1-h)(1-p)(1-d)
  void (*overall_risk)(const double* heat, const double* precip, const double* drought, double* out,
                       std::size_t n);

  // x_e = (u_e < p_e) ? 1 : 0, count = x_h + x_p + x_d
  void (*sample_events)(const double* heat, const double* precip, const double* drought,
                        const double* u_heat, const double* u_precip, const double* u_drought,
                        double* x_heat, double* x_precip, double* x_drought, double* count,
                        std::size_t n);

  // acc += value
  void (*accumulate)(double* acc, const double* value, std::size_t n);

  // acc += flag != 0 ? value : 0
  void (*accumulate_masked)(double* acc, const double* flag, const double* value, std::size_t n);

  // acc += x * y
  void (*accumulate_product)(double* acc, const double* x, const double* y, std::size_t n);

  // out = capital - withdrawn + invested
  void (*interim)(const double* capital, const double* withdrawn, const double* invested, double* out,
                  std::size_t n);

  // out = (prior + frac * interim) / interim
  void (*resilience_ratio)(const double* prior, const double* frac, const double* interim, double* out,
                           std::size_t n);

  // out = m + beta * g
  void (*esg)(const double* mitigation, const double* greenwash, double beta, double* out, std::size_t n);

  // out = count * vulnerability
  void (*event_loss)(const double* count, const double* vulnerability, double* out, std::size_t n);

  // out = (1 - m - g - r)(1 + growth)(1 - loss) - 1
  void (*margins)(const double* mitigation, const double* greenwash, const double* resilience,
                  const double* loss, double growth, double* out, std::size_t n);

  // out = (1 + margin) * base
  void (*grow)(const double* margin, const double* base, double* out, std::size_t n);

  // out = flag != 0 ? (1 + margin) * share : 0
  void (*grow_masked)(const double* flag, const double* margin, const double* share, double* out,
                      std::size_t n);

  // out = a - b
  void (*subtract)(const double* a, const double* b, double* out, std::size_t n);
};

const KernelTable& scalar_kernels();

/// AVX2 table, or nullptr when not compiled in or the CPU lacks AVX2.
const KernelTable* avx2_kernels();

/// Best table for this CPU. The INVESTESG_SIMD environment variable
/// ("scalar" or "avx2") overrides the choice.
const KernelTable& active_kernels();

const KernelTable& kernels_for(Isa isa);

}  // namespace investesg::simd
