#ifndef BNN_SHRINKAGE_HPP
#define BNN_SHRINKAGE_HPP

#include <algorithm>
#include <cmath>

#include "bnn/rng.hpp"
#include "bnn/types.hpp"

namespace bnn {

// Conditional-parameter introspection: every update exposes the computed
// (shape, scale) / (shape, rate) pairs separately from the random draw.

struct InvGammaParams {
  double shape;
  double scale;
};

struct GammaParams {
  double shape;
  double rate;
};

// varphi^2_j | .  ~ InvGamma(1, 1/c_j + coeff_j^2 / (2 lambda^2))
inline InvGammaParams hs_local_conditional(double coeff, double aux_c,
                                           double lambda_sq) {
  return {1.0, 1.0 / aux_c + coeff * coeff / (2.0 * lambda_sq)};
}

// lambda^2 | . ~ InvGamma((n+1)/2, 1/d + sum_j coeff_j^2 / (2 varphi^2_j))
inline InvGammaParams hs_global_conditional(const Vector& coeffs,
                                            const Vector& local_scales_sq,
                                            double aux_d) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < coeffs.size(); ++j)
    s += coeffs[j] * coeffs[j] / (2.0 * local_scales_sq[j]);
  return {(static_cast<double>(coeffs.size()) + 1.0) / 2.0, 1.0 / aux_d + s};
}

// One sweep of the auxiliary-variable horseshoe hierarchy. Draw order:
// varphi^2_j, lambda^2, c_j, d -- each conditional on the freshest values.
inline HorseshoeState horseshoe_update(const Vector& coeffs,
                                       const HorseshoeState& state, Rng& rng) {
  const Eigen::Index n = coeffs.size();
  if (state.size() != n)
    throw DimensionError("horseshoe_update: block size mismatch");
  state.validate();

  HorseshoeState out = state;
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto p =
        hs_local_conditional(coeffs[j], out.aux_local[j], out.global_scale_sq);
    out.local_scales_sq[j] = rng.inv_gamma(p.shape, p.scale);
  }
  {
    const auto p = hs_global_conditional(coeffs, out.local_scales_sq,
                                         out.aux_global);
    out.global_scale_sq = rng.inv_gamma(p.shape, p.scale);
  }
  for (Eigen::Index j = 0; j < n; ++j)
    out.aux_local[j] = rng.inv_gamma(1.0, 1.0 + 1.0 / out.local_scales_sq[j]);
  out.aux_global = rng.inv_gamma(1.0, 1.0 + 1.0 / out.global_scale_sq);

  // Clamp away from the representable edge so downstream precisions stay
  // finite.
  constexpr double lo = 1e-300, hi = 1e300;
  auto clamp = [&](double v) { return std::clamp(v, lo, hi); };
  out.global_scale_sq = clamp(out.global_scale_sq);
  out.aux_global = clamp(out.aux_global);
  for (Eigen::Index j = 0; j < n; ++j) {
    out.local_scales_sq[j] = clamp(out.local_scales_sq[j]);
    out.aux_local[j] = clamp(out.aux_local[j]);
  }
  return out;
}

// Gamma full conditional of the r-th multiplicative component (0-based).
// shape = a + (Q - r) / 2, rate = 1 + (1/2) sum_{q >= r} phi_q^{(-r)} beta_q^2
// where phi_q^{(-r)} is the running product excluding component r.
inline GammaParams mgp_component_conditional(const Vector& beta,
                                             const MgpState& state,
                                             Eigen::Index r) {
  const Eigen::Index Q = beta.size();
  double rate = 1.0;
  double prod = 1.0;
  for (Eigen::Index q = 0; q < Q; ++q) {
    if (q != r) prod *= state.components[q];
    if (q >= r) rate += 0.5 * prod * beta[q] * beta[q];
  }
  const double a = (r == 0) ? state.a1 : state.a2;
  const double shape = a + static_cast<double>(Q - r) / 2.0;
  return {shape, rate};
}

inline MgpState mgp_update(const Vector& beta, const MgpState& state,
                           Rng& rng) {
  const Eigen::Index Q = beta.size();
  if (state.size() != Q) throw DimensionError("mgp_update: Q mismatch");

  MgpState out = state;
  for (Eigen::Index r = 0; r < Q; ++r) {
    const auto p = mgp_component_conditional(beta, out, r);
    double draw = rng.gamma(p.shape, p.rate);
    out.components[r] = std::clamp(draw, 1e-300, 1e300);
  }
  return out;
}

// Q* = #{q : phi_beta_q^{-1} > tau}
inline int effective_neurons(const MgpState& mgp, double tau) {
  if (!(tau > 0.0)) throw ArgumentError("effective_neurons: tau must be > 0");
  const Vector phi = mgp.precisions();
  int count = 0;
  for (Eigen::Index q = 0; q < phi.size(); ++q)
    if (1.0 / phi[q] > tau) ++count;
  return count;
}

namespace detail {

// Type-7 empirical quantile on a copy of the data.
inline double empirical_quantile(Vector v, double p) {
  std::sort(v.data(), v.data() + v.size());
  const double h = p * (static_cast<double>(v.size()) - 1.0);
  const auto lo = static_cast<Eigen::Index>(std::floor(h));
  const auto hi = std::min(lo + 1, v.size() - 1);
  const double frac = h - static_cast<double>(lo);
  return v[lo] * (1.0 - frac) + v[hi] * frac;
}

} // namespace detail

// Count of neurons whose 5th--95th percentile interval of beta_q draws
// excludes zero (closed-interval containment).
inline int active_neurons_ci(const Matrix& beta_draws) {
  if (beta_draws.rows() < 20)
    throw InsufficientDrawsError("active_neurons_ci: need at least 20 draws");
  int count = 0;
  for (Eigen::Index q = 0; q < beta_draws.cols(); ++q) {
    const double lo = detail::empirical_quantile(beta_draws.col(q), 0.05);
    const double hi = detail::empirical_quantile(beta_draws.col(q), 0.95);
    if (lo > 0.0 || hi < 0.0) ++count;
  }
  return count;
}

} // namespace bnn

#endif // BNN_SHRINKAGE_HPP
