// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.

#include <immintrin.h>

#include <array>
#include <bit>

#include "indefbif/kernels.hpp"

namespace indefbif::kernels {

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

GapSum gap_sum_avx2(const GapSumArgs& a, std::span<const double> z, std::span<const double> w) {
  const int q = a.q_int;
  std::array<double, 16> rpow{};
  double rp = 1.0;
  for (int m = 1; m < q; ++m) {
    rp *= a.r;
    rpow[m] = rp;
  }
  const __m256d vr = _mm256_set1_pd(a.r);
  const __m256d v2r = _mm256_set1_pd(2.0 * a.r);
  const __m256d vscale = _mm256_set1_pd(a.scale);
  const __m256d vlam = _mm256_set1_pd(a.lambda);
  const __m256d vk = _mm256_set1_pd(a.k);
  const __m256d ve0 = _mm256_set1_pd(a.e0);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);

  __m256d acc = zero;
  std::size_t bad = 0;
  const std::size_t n = z.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_mul_pd(vscale, _mm256_loadu_pd(z.data() + i));
    const __m256d u = _mm256_add_pd(vr, d);
    __m256d s = one;
    for (int m = 1; m < q; ++m) s = _mm256_fmadd_pd(s, u, _mm256_set1_pd(rpow[m]));
    const __m256d inner = _mm256_fmadd_pd(vk, s, _mm256_mul_pd(vlam, _mm256_add_pd(v2r, d)));
    const __m256d g = _mm256_fnmadd_pd(d, inner, ve0);
    const __m256d ok = _mm256_and_pd(_mm256_cmp_pd(g, zero, _CMP_GT_OQ),
                                     _mm256_cmp_pd(u, zero, _CMP_GE_OQ));
    const __m256d val = _mm256_div_pd(_mm256_loadu_pd(w.data() + i), _mm256_sqrt_pd(g));
    acc = _mm256_add_pd(acc, _mm256_and_pd(ok, val));
    bad += 4 - static_cast<std::size_t>(std::popcount(static_cast<unsigned>(_mm256_movemask_pd(ok))));
  }
  GapSum out;
  out.sum = hsum(acc);
  out.nonpositive = bad;
  if (i < n) {
    const GapSum tail = gap_sum_scalar(a, z.subspan(i), w.subspan(i));
    out.sum += tail.sum;
    out.nonpositive += tail.nonpositive;
  }
  return out;
}

void energies_avx2(double lambda, double k, int q_int, std::span<const double> u,
                   std::span<const double> v, std::span<double> out) {
  const __m256d vlam = _mm256_set1_pd(lambda);
  const __m256d vk = _mm256_set1_pd(k);
  const std::size_t n = u.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d uu = _mm256_loadu_pd(u.data() + i);
    const __m256d vv = _mm256_loadu_pd(v.data() + i);
    __m256d uq = uu;
    for (int m = 1; m < q_int; ++m) uq = _mm256_mul_pd(uq, uu);
    __m256d e = _mm256_mul_pd(vv, vv);
    e = _mm256_fmadd_pd(vlam, _mm256_mul_pd(uu, uu), e);
    e = _mm256_fmadd_pd(vk, uq, e);
    _mm256_storeu_pd(out.data() + i, e);
  }
  if (i < n)
    energies_scalar(lambda, k, static_cast<double>(q_int), q_int, u.subspan(i), v.subspan(i),
                    out.subspan(i));
}

}  // namespace indefbif::kernels
