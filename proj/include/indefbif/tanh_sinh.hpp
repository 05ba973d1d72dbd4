#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace indefbif {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;  // |I_k - I_{k-1}| of the last level doubling
  int levels = 0;
  std::size_t evaluations = 0;
  bool converged = false;
};

/// Double-exponential node table on [-1, 1], stored per level as the
/// distance z = 1 - |x| to the nearer end (exact even where x rounds to
/// +-1) together with the weight. Built once, shared read-only.
class TanhSinhTable {
 public:
  static constexpr int kMaxLevel = 12;
  static constexpr double kTMax = 4.5;

  static const TanhSinhTable& instance();

  /// Nodes of one level; level 0 of the left half also carries the
  /// midpoint (z = 1).
  std::span<const double> z(int level, bool left) const;
  std::span<const double> w(int level, bool left) const;

 private:
  TanhSinhTable();
  std::vector<std::vector<double>> z_left_, w_left_, z_right_, w_right_;
};

/// Level-doubling driver. half_sum(level, left) must return an object with
/// members `sum` (weighted node sum of that level's half) and `nonpositive`.
/// The integral is half_width * h_level * (sum over all levels so far).
template <class HalfSum>
QuadResult tanh_sinh_integrate(double half_width, HalfSum&& half_sum, double rel_tol,
                               int max_levels = TanhSinhTable::kMaxLevel, int min_levels = 3,
                               std::size_t* nonpositive = nullptr) {
  const auto& table = TanhSinhTable::instance();
  QuadResult res;
  double acc = 0.0;
  double prev = 0.0;
  std::size_t bad = 0;
  for (int level = 0; level <= max_levels; ++level) {
    const auto l = half_sum(level, true);
    const auto r = half_sum(level, false);
    acc += l.sum + r.sum;
    bad += l.nonpositive + r.nonpositive;
    res.evaluations += table.z(level, true).size() + table.z(level, false).size();
    const double h = std::ldexp(1.0, -level);
    const double value = half_width * h * acc;
    res.levels = level;
    if (level > 0) res.error = std::abs(value - prev);
    res.value = value;
    if (level >= min_levels && res.error <= rel_tol * std::abs(value)) {
      res.converged = true;
      break;
    }
    prev = value;
  }
  if (nonpositive) *nonpositive = bad;
  return res;
}

}  // namespace indefbif
