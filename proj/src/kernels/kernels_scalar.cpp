#include "investesg/simd/kernels.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace investesg::simd {

namespace {

inline double clamp01(double p) { return p < 0.0 ? 0.0 : (p > 1.0 ? 1.0 : p); }

void update_risks(double t, const double* cum, const RiskCoeffs& c, double* heat, double* precip,
                  double* drought, std::size_t n) {
  double* out[3] = {heat, precip, drought};
  for (int e = 0; e < 3; ++e) {
    const double rise = c.growth[e] * t;
    for (std::size_t k = 0; k < n; ++k)
      out[e][k] = clamp01(rise / (1.0 + c.elasticity[e] * cum[k]) + c.base[e]);
  }
}

void overall_risk(const double* h, const double* p, const double* d, double* out, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) out[k] = 1.0 - (1.0 - h[k]) * (1.0 - p[k]) * (1.0 - d[k]);
}

void sample_events(const double* h, const double* p, const double* d, const double* uh,
                   const double* up, const double* ud, double* xh, double* xp, double* xd,
                   double* count, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) {
    xh[k] = uh[k] < h[k] ? 1.0 : 0.0;
    xp[k] = up[k] < p[k] ? 1.0 : 0.0;
    xd[k] = ud[k] < d[k] ? 1.0 : 0.0;
    count[k] = xh[k] + xp[k] + xd[k];
  }
}

void accumulate(double* acc, const double* value, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) acc[k] += value[k];
}

void accumulate_masked(double* acc, const double* flag, const double* value, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k)
    if (flag[k] != 0.0) acc[k] += value[k];
}

void accumulate_product(double* acc, const double* x, const double* y, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) acc[k] += x[k] * y[k];
}

void interim(const double* capital, const double* withdrawn, const double* invested, double* out,
             std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) out[k] = capital[k] - withdrawn[k] + invested[k];
}

void resilience_ratio(const double* prior, const double* frac, const double* interim, double* out,
                      std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) out[k] = (prior[k] + frac[k] * interim[k]) / interim[k];
}

void esg(const double* m, const double* g, double beta, double* out, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) out[k] = m[k] + beta * g[k];
}

void event_loss(const double* count, const double* vulnerability, double* out, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) out[k] = count[k] * vulnerability[k];
}

void margins(const double* m, const double* g, const double* r, const double* loss, double growth,
             double* out, std::size_t n) {
  const double gross = 1.0 + growth;
  for (std::size_t k = 0; k < n; ++k) {
    const double retained = 1.0 - m[k] - g[k] - r[k];
    out[k] = retained * gross * (1.0 - loss[k]) - 1.0;
  }
}

void grow(const double* margin, const double* base, double* out, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) out[k] = (1.0 + margin[k]) * base[k];
}

void grow_masked(const double* flag, const double* margin, const double* share, double* out,
                 std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) out[k] = flag[k] != 0.0 ? (1.0 + margin[k]) * share[k] : 0.0;
}

void subtract(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) out[k] = a[k] - b[k];
}

constexpr KernelTable kScalar{
    Isa::Scalar,     update_risks, overall_risk, sample_events, accumulate, accumulate_masked,
    accumulate_product, interim,   resilience_ratio, esg,        event_loss, margins,
    grow,            grow_masked,  subtract,
};

}  // namespace

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
  }
  return "unknown";
}

const KernelTable& scalar_kernels() { return kScalar; }

const KernelTable& kernels_for(Isa isa) {
  if (isa == Isa::Scalar) return kScalar;
  const KernelTable* t = avx2_kernels();
  if (t == nullptr) throw std::runtime_error("AVX2 kernels are not available on this machine");
  return *t;
}

const KernelTable& active_kernels() {
  static const KernelTable* chosen = [] {
    if (const char* env = std::getenv("INVESTESG_SIMD")) {
      const std::string want(env);
      if (want == "scalar") return &kScalar;
      if (want == "avx2" && avx2_kernels() != nullptr) return avx2_kernels();
    }
    const KernelTable* avx2 = avx2_kernels();
    return avx2 != nullptr ? avx2 : &kScalar;
  }();
  return *chosen;
}

}  // namespace investesg::simd
