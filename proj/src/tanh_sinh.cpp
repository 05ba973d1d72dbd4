#include "indefbif/tanh_sinh.hpp"

#include <numbers>

namespace indefbif {

const TanhSinhTable& TanhSinhTable::instance() {
  static const TanhSinhTable table;
  return table;
}

TanhSinhTable::TanhSinhTable()
    : z_left_(kMaxLevel + 1), w_left_(kMaxLevel + 1), z_right_(kMaxLevel + 1),
      w_right_(kMaxLevel + 1) {
  constexpr double half_pi = std::numbers::pi / 2.0;
  for (int level = 0; level <= kMaxLevel; ++level) {
    const double h = std::ldexp(1.0, -level);
    auto push = [&](double t) {
      const double s = half_pi * std::sinh(t);
      const double ch = std::cosh(s);
      const double z = 2.0 / (std::exp(2.0 * s) + 1.0);
      const double w = half_pi * std::cosh(t) / (ch * ch);
      z_left_[level].push_back(z);
      w_left_[level].push_back(w);
      z_right_[level].push_back(z);
      w_right_[level].push_back(w);
    };
    if (level == 0) {
      z_left_[0].push_back(1.0);
      w_left_[0].push_back(half_pi);
      for (double t = 1.0; t <= kTMax; t += 1.0) push(t);
    } else {
      for (long m = 1;; m += 2) {
        const double t = m * h;
        if (t > kTMax) break;
        push(t);
      }
    }
  }
}

std::span<const double> TanhSinhTable::z(int level, bool left) const {
  return left ? z_left_[level] : z_right_[level];
}

std::span<const double> TanhSinhTable::w(int level, bool left) const {
  return left ? w_left_[level] : w_right_[level];
}

}  // namespace indefbif
