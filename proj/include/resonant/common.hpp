#ifndef RESONANT_COMMON_HPP
#define RESONANT_COMMON_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace resonant {

using Complex = std::complex<double>;

/// A finite complex-valued sampled signal y(1..T), stored with sample t at
/// index t-1.
using TimeSeries = std::vector<Complex>;

/// Thrown when a numerical procedure cannot produce a usable result
/// (degenerate subspace, rank-deficient least squares, ...).
class EstimationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown on malformed or schema-invalid dataset/model files.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline bool is_finite(Complex z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

inline void require_finite(const TimeSeries& y, const char* what) {
  for (const Complex& z : y) {
    if (!is_finite(z)) throw std::invalid_argument(std::string(what) + ": non-finite sample");
  }
}

inline double energy(const TimeSeries& y) {
  double e = 0.0;
  for (const Complex& z : y) e += std::norm(z);
  return e;
}

/// Deterministic random source used by every stochastic operation.
///
/// mt19937_64 plus an explicit Box-Muller transform, so that identical seeds
/// give identical draws on any platform (std::normal_distribution is
/// implementation-defined and must not be used here).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Standard normal N(0, 1).
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  /// Circularly symmetric complex normal with total variance 1
  /// (each component N(0, 1/2)).
  Complex complex_normal() {
    const double s = std::sqrt(0.5);
    const double re = normal();
    const double im = normal();
    return {s * re, s * im};
  }

  std::uint64_t next_raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace resonant

#endif  // RESONANT_COMMON_HPP
