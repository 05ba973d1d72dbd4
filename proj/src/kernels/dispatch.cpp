#include <atomic>

#include "indefbif/kernels.hpp"

namespace indefbif::kernels {

namespace {

// -1: no override
std::atomic<int> g_override{-1};

bool cpu_has_avx2() {
#if defined(INDEFBIF_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
  static const bool ok = [] {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  }();
  return ok;
#else
  return false;
#endif
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
  }
  return "unknown";
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2: return cpu_has_avx2();
  }
  return false;
}

Isa active_isa() {
  const int o = g_override.load(std::memory_order_relaxed);
  if (o >= 0) return static_cast<Isa>(o);
  return cpu_has_avx2() ? Isa::avx2 : Isa::scalar;
}

void set_isa_override(Isa isa) {
  g_override.store(isa_available(isa) ? static_cast<int>(isa) : static_cast<int>(Isa::scalar));
}

void clear_isa_override() { g_override.store(-1); }

GapSum gap_sum(const GapSumArgs& args, std::span<const double> z, std::span<const double> w) {
#if defined(INDEFBIF_HAVE_AVX2)
  if (args.q_int >= 2 && active_isa() == Isa::avx2) return gap_sum_avx2(args, z, w);
#endif
  return gap_sum_scalar(args, z, w);
}

void energies(double lambda, double k, double q, int q_int, std::span<const double> u,
              std::span<const double> v, std::span<double> out) {
#if defined(INDEFBIF_HAVE_AVX2)
  if (q_int >= 2 && active_isa() == Isa::avx2) {
    energies_avx2(lambda, k, q_int, u, v, out);
    return;
  }
#endif
  energies_scalar(lambda, k, q, q_int, u, v, out);
}

}  // namespace indefbif::kernels
