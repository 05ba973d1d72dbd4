#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "indefbif/core.hpp"
#include "indefbif/kernels.hpp"
#include "indefbif/tanh_sinh.hpp"

using namespace indefbif;
namespace k = indefbif::kernels;

TEST_CASE("dispatch reports a usable variant") {
  CHECK(k::isa_available(k::Isa::scalar));
  const auto isa = k::active_isa();
  CHECK(k::isa_available(isa));
  MESSAGE("active kernel: " << k::isa_name(isa));
}

#if defined(INDEFBIF_HAVE_AVX2)
TEST_CASE("avx2 gap sums agree with the scalar reference") {
  if (!k::isa_available(k::Isa::avx2)) return;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const auto& tab = TanhSinhTable::instance();
  for (int q : {2, 3, 4, 7}) {
    const Well w(5.0, -2.0, q - 1.0);
    for (int trial = 0; trial < 50; ++trial) {
      const double lo = w.center() * (0.05 + 0.9 * U(rng));
      const double hi = lo + (w.extent() - lo) * (0.1 + 0.8 * U(rng));
      const double E = std::max(w.phi(lo), w.phi(hi)) + 0.01 * U(rng);
      const double hw = 0.5 * (hi - lo);
      for (int side = 0; side < 2; ++side) {
        const double r = side == 0 ? lo : hi;
        k::GapSumArgs a{r, E - w.phi(r), side == 0 ? hw : -hw, w.lambda(), w.k(), w.q(), q};
        for (int level = 0; level <= 6; ++level) {
          const auto zs = tab.z(level, side == 0);
          const auto ws = tab.w(level, side == 0);
          const auto s = k::gap_sum_scalar(a, zs, ws);
          const auto v = k::gap_sum_avx2(a, zs, ws);
          CHECK(v.nonpositive == s.nonpositive);
          CHECK(v.sum == doctest::Approx(s.sum).epsilon(1e-13));
        }
      }
    }
  }
}

TEST_CASE("avx2 gap sums count invalid nodes like the scalar one") {
  if (!k::isa_available(k::Isa::avx2)) return;
  const Well w(1.0, -1.0, 2.0);
  std::vector<double> z{0.1, 0.5, 0.9, 1.3, 1.7, 2.5, 3.0}, wt(z.size(), 1.0);
  // e0 so small that nodes far from r fall outside the level
  k::GapSumArgs a{1.2, 1e-3, 0.2, w.lambda(), w.k(), w.q(), 3};
  const auto s = k::gap_sum_scalar(a, z, wt);
  const auto v = k::gap_sum_avx2(a, z, wt);
  CHECK(s.nonpositive > 0);
  CHECK(v.nonpositive == s.nonpositive);
  CHECK(v.sum == doctest::Approx(s.sum).epsilon(1e-13));
}

TEST_CASE("avx2 batched energies agree with the scalar reference") {
  if (!k::isa_available(k::Isa::avx2)) return;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(0.0, 2.0);
  for (std::size_t n : {1u, 3u, 4u, 7u, 64u, 1001u}) {
    std::vector<double> u(n), v(n), a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      u[i] = U(rng);
      v[i] = U(rng) - 1.0;
    }
    k::energies_scalar(-3.0, 0.7, 3.0, 3, u, v, a);
    k::energies_avx2(-3.0, 0.7, 3, u, v, b);
    for (std::size_t i = 0; i < n; ++i) CHECK(b[i] == doctest::Approx(a[i]).epsilon(1e-14));
  }
}
#endif

TEST_CASE("override pins the dispatch") {
  k::set_isa_override(k::Isa::scalar);
  CHECK(k::active_isa() == k::Isa::scalar);
  k::clear_isa_override();
  CHECK(k::isa_available(k::active_isa()));
}

TEST_CASE("non-integer exponent uses the real-power path") {
  const Well w(1.0, -1.0, 1.7);
  CHECK(w.integer_q() == -1);
  std::vector<double> z{0.25, 0.5, 1.0}, wt{1.0, 1.0, 1.0};
  const double r = 0.4, hw = 0.1, E = w.phi(r) + 0.05;
  k::GapSumArgs a{r, E - w.phi(r), hw, w.lambda(), w.k(), w.q(), -1};
  const auto s = k::gap_sum(a, z, wt);
  double ref = 0.0;
  for (double zi : z) ref += 1.0 / std::sqrt(E - w.phi(r + hw * zi));
  CHECK(s.sum == doctest::Approx(ref).epsilon(1e-12));
}
