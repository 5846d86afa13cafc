#ifndef BNN_RNG_HPP
#define BNN_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

#include "bnn/types.hpp"

namespace bnn {

// One stream per chain; never shared across threads.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform() { return unif_(gen_); }

  double normal(double mean = 0.0, double sd = 1.0) {
    return mean + sd * norm_(gen_);
  }

  Vector normal_vector(Eigen::Index n) {
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = norm_(gen_);
    return v;
  }

  // Gamma(shape, rate): mean = shape / rate.
  double gamma(double shape, double rate) {
    std::gamma_distribution<double> d(shape, 1.0 / rate);
    return d(gen_);
  }

  // InvGamma(shape, scale): density ~ x^{-shape-1} exp(-scale/x).
  // Drawn as 1 / Gamma(shape, rate = scale).
  double inv_gamma(double shape, double scale) {
    double g = gamma(shape, scale);
    // Guard against underflow for extreme scales.
    if (g <= 0.0 || !std::isfinite(g)) g = std::numeric_limits<double>::min();
    return 1.0 / g;
  }

  int uniform_int(int lo, int hi) { // inclusive range
    std::uniform_int_distribution<int> d(lo, hi);
    return d(gen_);
  }

  ActivationKind uniform_activation() {
    return activation_from_code(uniform_int(1, 4));
  }

  // Categorical draw from unnormalized log weights.
  int categorical_log(const Vector& log_w) {
    const double m = log_w.maxCoeff();
    Vector w = (log_w.array() - m).exp();
    double u = uniform() * w.sum();
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      u -= w[i];
      if (u <= 0.0) return static_cast<int>(i);
    }
    return static_cast<int>(w.size() - 1);
  }

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
  std::uniform_real_distribution<double> unif_{0.0, 1.0};
  std::normal_distribution<double> norm_{0.0, 1.0};
};

// Deterministic derived seed for parallel jobs (splitmix64 step).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

} // namespace bnn

#endif // BNN_RNG_HPP
