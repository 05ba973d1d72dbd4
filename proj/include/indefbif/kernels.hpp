#pragma once

// Inner loops of the singular time-map quadrature.
//
// Every tanh-sinh node contributes w_i / sqrt(e0 + gap(r, s * z_i)) where
// gap(r, d) = phi(r) - phi(r + d), z_i is the node's distance to the
// interval end (in units of the half width) and s the signed half width.
// The scalar kernels are the reference; the AVX2 kernel covers integer
// exponents q = p + 1 and must agree with the scalar one to rounding.

#include <cstddef>
#include <span>
#include <string_view>

namespace indefbif::kernels {

struct GapSumArgs {
  double r = 0.0;       // reference abscissa (interval end)
  double e0 = 0.0;      // E - phi(r); zero when r is a turning point
  double scale = 0.0;   // signed half width: d_i = scale * z_i
  double lambda = 0.0;
  double k = 0.0;       // 2b/(p+1)
  double q = 0.0;       // p + 1
  int q_int = -1;       // q when integral, -1 otherwise
};

struct GapSum {
  double sum = 0.0;
  std::size_t nonpositive = 0;  // nodes where e0 + gap <= 0 (skipped)
};

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);

/// True when the running CPU supports the instruction set and it was built.
bool isa_available(Isa isa);

/// The variant chosen for the running CPU (or forced by set_isa_override).
Isa active_isa();

/// Test hook: pin the dispatch to one variant. Pass nullptr-like reset via
/// clear_isa_override().
void set_isa_override(Isa isa);
void clear_isa_override();

GapSum gap_sum_scalar(const GapSumArgs& args, std::span<const double> z,
                      std::span<const double> w);

#if defined(INDEFBIF_HAVE_AVX2)
/// Requires args.q_int >= 2.
GapSum gap_sum_avx2(const GapSumArgs& args, std::span<const double> z, std::span<const double> w);
#endif

/// Dispatching entry point; falls back to the scalar kernel for
/// non-integer exponents.
GapSum gap_sum(const GapSumArgs& args, std::span<const double> z, std::span<const double> w);

/// Batched energies v_i^2 + lambda u_i^2 + k u_i^q (scalar reference and
/// dispatching form); used when scanning energy along boundary curves.
void energies_scalar(double lambda, double k, double q, int q_int, std::span<const double> u,
                     std::span<const double> v, std::span<double> out);
#if defined(INDEFBIF_HAVE_AVX2)
void energies_avx2(double lambda, double k, int q_int, std::span<const double> u,
                   std::span<const double> v, std::span<double> out);
#endif
void energies(double lambda, double k, double q, int q_int, std::span<const double> u,
              std::span<const double> v, std::span<double> out);

}  // namespace indefbif::kernels
