#pragma once

#include <cmath>
#include <cstdint>

namespace herdsim {

// Counter-based pseudo-random generator (Philox-4x32 round function, 10
// rounds). Each (seed, stream) pair yields an independent sequence, so
// parallel realizations stay reproducible without sharing state. Output is
// identical across platforms; all deviate transforms below are implemented
// here instead of <random> for the same reason.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0, std::uint64_t stream = 0) noexcept
      : key0_(static_cast<std::uint32_t>(seed)),
        key1_(static_cast<std::uint32_t>(seed >> 32)),
        stream_lo_(static_cast<std::uint32_t>(stream)),
        stream_hi_(static_cast<std::uint32_t>(stream >> 32)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() noexcept { return next_u64(); }

  std::uint64_t next_u64() noexcept {
    if (idx_ == 2) {
      refill();
      idx_ = 0;
    }
    return block_[idx_++];
  }

  // uniform on [0, 1)
  double next_double() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // uniform on (0, 1), safe as a log() argument
  double next_double_open() noexcept {
    return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1.0p-52;
  }

  // standard normal, Marsaglia polar method with one cached value
  double next_normal() noexcept {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    double u, v, s;
    do {
      u = 2.0 * next_double() - 1.0;
      v = 2.0 * next_double() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    cached_ = v * f;
    has_cached_ = true;
    return u * f;
  }

  // Marsaglia-Tsang; shape < 1 handled by boosting
  double next_gamma(double shape) noexcept {
    if (shape < 1.0) {
      const double u = next_double_open();
      return next_gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = next_normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = next_double_open();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  double next_chi_square(double dof) noexcept {
    return 2.0 * next_gamma(0.5 * dof);
  }

  double next_student_t(double dof) noexcept {
    return next_normal() / std::sqrt(next_chi_square(dof) / dof);
  }

  double next_beta(double a, double b) noexcept {
    const double x = next_gamma(a);
    const double y = next_gamma(b);
    return x / (x + y);
  }

  // Exp(1); scale by 1/rate at the call site
  double next_exponential() noexcept { return -std::log(next_double_open()); }

 private:
  void refill() noexcept {
    std::uint32_t c0 = static_cast<std::uint32_t>(counter_);
    std::uint32_t c1 = static_cast<std::uint32_t>(counter_ >> 32);
    std::uint32_t c2 = stream_lo_;
    std::uint32_t c3 = stream_hi_;
    std::uint32_t k0 = key0_;
    std::uint32_t k1 = key1_;
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = 0xD2511F53ull * c0;
      const std::uint64_t p1 = 0xCD9E8D57ull * c2;
      const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
      const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
      c0 = hi1 ^ c1 ^ k0;
      c1 = lo1;
      c2 = hi0 ^ c3 ^ k1;
      c3 = lo0;
      k0 += 0x9E3779B9u;
      k1 += 0xBB67AE85u;
    }
    block_[0] = (static_cast<std::uint64_t>(c1) << 32) | c0;
    block_[1] = (static_cast<std::uint64_t>(c3) << 32) | c2;
    ++counter_;
  }

  std::uint32_t key0_, key1_;
  std::uint32_t stream_lo_, stream_hi_;
  std::uint64_t counter_ = 0;
  std::uint64_t block_[2] = {0, 0};
  int idx_ = 2;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace herdsim
