// AVX2 variant of the lane kernels. This file is compiled with -mavx2 and
// must only be entered after the runtime CPU check in avx2_kernels().

#include "investesg/simd/kernels.hpp"

#if defined(INVESTESG_HAVE_AVX2)

#include <immintrin.h>

namespace investesg::simd {

namespace {

constexpr std::size_t kWidth = 4;

inline __m256d clamp01(__m256d p) {
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  p = _mm256_blendv_pd(p, zero, _mm256_cmp_pd(p, zero, _CMP_LT_OQ));
  return _mm256_blendv_pd(p, one, _mm256_cmp_pd(p, one, _CMP_GT_OQ));
}

void update_risks(double t, const double* cum, const RiskCoeffs& c, double* heat, double* precip,
                  double* drought, std::size_t n) {
  double* out[3] = {heat, precip, drought};
  const __m256d one = _mm256_set1_pd(1.0);
  for (int e = 0; e < 3; ++e) {
    const double rise = c.growth[e] * t;
    const __m256d vrise = _mm256_set1_pd(rise);
    const __m256d vel = _mm256_set1_pd(c.elasticity[e]);
    const __m256d vbase = _mm256_set1_pd(c.base[e]);
    std::size_t k = 0;
    for (; k + kWidth <= n; k += kWidth) {
      const __m256d denom = _mm256_add_pd(one, _mm256_mul_pd(vel, _mm256_loadu_pd(cum + k)));
      const __m256d p = _mm256_add_pd(_mm256_div_pd(vrise, denom), vbase);
      _mm256_storeu_pd(out[e] + k, clamp01(p));
    }
    for (; k < n; ++k) {
      const double p = rise / (1.0 + c.elasticity[e] * cum[k]) + c.base[e];
      out[e][k] = p < 0.0 ? 0.0 : (p > 1.0 ? 1.0 : p);
    }
  }
}

void overall_risk(const double* h, const double* p, const double* d, double* out, std::size_t n) {
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t k = 0;
  for (; k + kWidth <= n; k += kWidth) {
    const __m256d qh = _mm256_sub_pd(one, _mm256_loadu_pd(h + k));
    const __m256d qp = _mm256_sub_pd(one, _mm256_loadu_pd(p + k));
    const __m256d qd = _mm256_sub_pd(one, _mm256_loadu_pd(d + k));
    _mm256_storeu_pd(out + k, _mm256_sub_pd(one, _mm256_mul_pd(_mm256_mul_pd(qh, qp), qd)));
  }
  for (; k < n; ++k) out[k] = 1.0 - (1.0 - h[k]) * (1.0 - p[k]) * (1.0 - d[k]);
}

void sample_events(const double* h, const double* p, const double* d, const double* uh,
                   const double* up, const double* ud, double* xh, double* xp, double* xd,
                   double* count, std::size_t n) {
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t k = 0;
  for (; k + kWidth <= n; k += kWidth) {
    const __m256d eh = _mm256_and_pd(_mm256_cmp_pd(_mm256_loadu_pd(uh + k), _mm256_loadu_pd(h + k), _CMP_LT_OQ), one);
    const __m256d ep = _mm256_and_pd(_mm256_cmp_pd(_mm256_loadu_pd(up + k), _mm256_loadu_pd(p + k), _CMP_LT_OQ), one);
    const __m256d ed = _mm256_and_pd(_mm256_cmp_pd(_mm256_loadu_pd(ud + k), _mm256_loadu_pd(d + k), _CMP_LT_OQ), one);
    _mm256_storeu_pd(xh + k, eh);
    _mm256_storeu_pd(xp + k, ep);
    _mm256_storeu_pd(xd + k, ed);
    _mm256_storeu_pd(count + k, _mm256_add_pd(_mm256_add_pd(eh, ep), ed));
  }
  for (; k < n; ++k) {
    xh[k] = uh[k] < h[k] ? 1.0 : 0.0;
    xp[k] = up[k] < p[k] ? 1.0 : 0.0;
    xd[k] = ud[k] < d[k] ? 1.0 : 0.0;
    count[k] = xh[k] + xp[k] + xd[k];
  }
}

void accumulate(double* acc, const double* value, std::size_t n) {
  std::size_t k = 0;
  for (; k + kWidth <= n; k += kWidth)
    _mm256_storeu_pd(acc + k, _mm256_add_pd(_mm256_loadu_pd(acc + k), _mm256_loadu_pd(value + k)));
  for (; k < n; ++k) acc[k] += value[k];
}

void accumulate_masked(double* acc, const double* flag, const double* value, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + kWidth <= n; k += kWidth) {
    const __m256d a = _mm256_loadu_pd(acc + k);
    const __m256d set = _mm256_cmp_pd(_mm256_loadu_pd(flag + k), zero, _CMP_NEQ_UQ);
    const __m256d sum = _mm256_add_pd(a, _mm256_loadu_pd(value + k));
    _mm256_storeu_pd(acc + k, _mm256_blendv_pd(a, sum, set));
  }
  for (; k < n; ++k)
    if (flag[k] != 0.0) acc[k] += value[k];
}

void accumulate_product(double* acc, const double* x, const double* y, std::size_t n) {
  std::size_t k = 0;
  for (; k + kWidth <= n; k += kWidth) {
    const __m256d prod = _mm256_mul_pd(_mm256_loadu_pd(x + k), _mm256_loadu_pd(y + k));
    _mm256_storeu_pd(acc + k, _mm256_add_pd(_mm256_loadu_pd(acc + k), prod));
  }
  for (; k < n; ++k) acc[k] += x[k] * y[k];
}

void interim(const double* capital, const double* withdrawn, const double* invested, double* out,
             std::size_t n) {
  std::size_t k = 0;
  for (; k + kWidth <= n; k += kWidth) {
    const __m256d kept = _mm256_sub_pd(_mm256_loadu_pd(capital + k), _mm256_loadu_pd(withdrawn + k));
    _mm256_storeu_pd(out + k, _mm256_add_pd(kept, _mm256_loadu_pd(invested + k)));
  }
  for (; k < n; ++k) out[k] = capital[k] - withdrawn[k] + invested[k];
}

void resilience_ratio(const double* prior, const double* frac, const double* interim_cap, double* out,
                      std::size_t n) {
  std::size_t k = 0;
  for (; k + kWidth <= n; k += kWidth) {
    const __m256d cap = _mm256_loadu_pd(interim_cap + k);
    const __m256d num = _mm256_add_pd(_mm256_loadu_pd(prior + k), _mm256_mul_pd(_mm256_loadu_pd(frac + k), cap));
    _mm256_storeu_pd(out + k, _mm256_div_pd(num, cap));
  }
  for (; k < n; ++k) out[k] = (prior[k] + frac[k] * interim_cap[k]) / interim_cap[k];
}

void esg(const double* m, const double* g, double beta, double* out, std::size_t n) {
  const __m256d vb = _mm256_set1_pd(beta);
  std::size_t k = 0;
  for (; k + kWidth <= n; k += kWidth)
    _mm256_storeu_pd(out + k, _mm256_add_pd(_mm256_loadu_pd(m + k), _mm256_mul_pd(vb, _mm256_loadu_pd(g + k))));
  for (; k < n; ++k) out[k] = m[k] + beta * g[k];
}

void event_loss(const double* count, const double* vulnerability, double* out, std::size_t n) {
  std::size_t k = 0;
  for (; k + kWidth <= n; k += kWidth)
    _mm256_storeu_pd(out + k, _mm256_mul_pd(_mm256_loadu_pd(count + k), _mm256_loadu_pd(vulnerability + k)));
  for (; k < n; ++k) out[k] = count[k] * vulnerability[k];
}

void margins(const double* m, const double* g, const double* r, const double* loss, double growth,
             double* out, std::size_t n) {
  const double gross = 1.0 + growth;
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d vgross = _mm256_set1_pd(gross);
  std::size_t k = 0;
  for (; k + kWidth <= n; k += kWidth) {
    __m256d retained = _mm256_sub_pd(one, _mm256_loadu_pd(m + k));
    retained = _mm256_sub_pd(retained, _mm256_loadu_pd(g + k));
    retained = _mm256_sub_pd(retained, _mm256_loadu_pd(r + k));
    const __m256d kept = _mm256_sub_pd(one, _mm256_loadu_pd(loss + k));
    const __m256d rho = _mm256_sub_pd(_mm256_mul_pd(_mm256_mul_pd(retained, vgross), kept), one);
    _mm256_storeu_pd(out + k, rho);
  }
  for (; k < n; ++k) {
    const double retained = 1.0 - m[k] - g[k] - r[k];
    out[k] = retained * gross * (1.0 - loss[k]) - 1.0;
  }
}

void grow(const double* margin, const double* base, double* out, std::size_t n) {
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t k = 0;
  for (; k + kWidth <= n; k += kWidth)
    _mm256_storeu_pd(out + k, _mm256_mul_pd(_mm256_add_pd(one, _mm256_loadu_pd(margin + k)), _mm256_loadu_pd(base + k)));
  for (; k < n; ++k) out[k] = (1.0 + margin[k]) * base[k];
}

void grow_masked(const double* flag, const double* margin, const double* share, double* out,
                 std::size_t n) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + kWidth <= n; k += kWidth) {
    const __m256d set = _mm256_cmp_pd(_mm256_loadu_pd(flag + k), zero, _CMP_NEQ_UQ);
    const __m256d v = _mm256_mul_pd(_mm256_add_pd(one, _mm256_loadu_pd(margin + k)), _mm256_loadu_pd(share + k));
    _mm256_storeu_pd(out + k, _mm256_blendv_pd(zero, v, set));
  }
  for (; k < n; ++k) out[k] = flag[k] != 0.0 ? (1.0 + margin[k]) * share[k] : 0.0;
}

void subtract(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t k = 0;
  for (; k + kWidth <= n; k += kWidth)
    _mm256_storeu_pd(out + k, _mm256_sub_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k)));
  for (; k < n; ++k) out[k] = a[k] - b[k];
}

constexpr KernelTable kAvx2{
    Isa::Avx2,       update_risks, overall_risk, sample_events, accumulate, accumulate_masked,
    accumulate_product, interim,   resilience_ratio, esg,        event_loss, margins,
    grow,            grow_masked,  subtract,
};

}  // namespace

const KernelTable* avx2_kernels() {
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &kAvx2 : nullptr;
}

}  // namespace investesg::simd

#else

namespace investesg::simd {
const KernelTable* avx2_kernels() { return nullptr; }
}  // namespace investesg::simd

#endif
