#ifndef BNN_NEURON_POSTERIOR_HPP
#define BNN_NEURON_POSTERIOR_HPP

#include "bnn/activations.hpp"
#include "bnn/types.hpp"

namespace bnn {

// Target for the per-neuron HMC step. kappa_aug stacks (kappa_q, zeta_q);
// the bias coordinate carries a fixed N(0,1) prior. residual must be the
// partial residual with every other neuron's contribution removed.
//
// Log density up to an additive constant:
//   -1/2 sum_t (r_t - beta_q h(z_t))^2 / sigma_t^2
//   -1/2 sum_j phi_kappa_jq kappa_jq^2 - 1/2 zeta_q^2
inline double neuron_log_posterior(const Vector& kappa_aug, Eigen::Index q,
                                   const Vector& residual,
                                   const NetworkState& state,
                                   const Dataset& data) {
  const Eigen::Index K = data.K();
  if (kappa_aug.size() != K + 1)
    throw DimensionError("neuron_log_posterior: kappa_aug length mismatch");
  if (residual.size() != data.T())
    throw DimensionError("neuron_log_posterior: residual length mismatch");
  if (q < 0 || q >= state.Q())
    throw DimensionError("neuron_log_posterior: neuron index out of range");

  const ActivationKind kind = state.delta[static_cast<std::size_t>(q)];
  const double beta_q = state.beta[q];
  const Vector z =
      (data.X * kappa_aug.head(K)).array() + kappa_aug[K];

  double loglik = 0.0;
  for (Eigen::Index t = 0; t < data.T(); ++t) {
    const double e = residual[t] - beta_q * act_eval(kind, z[t]);
    loglik -= 0.5 * e * e * std::exp(-state.sv.log_vol[t]);
  }

  const HorseshoeState& hs = state.hs_kappa[static_cast<std::size_t>(q)];
  double logprior = 0.0;
  for (Eigen::Index j = 0; j < K; ++j)
    logprior -= 0.5 * kappa_aug[j] * kappa_aug[j] / hs.prior_variance(j);
  logprior -= 0.5 * kappa_aug[K] * kappa_aug[K];

  return loglik + logprior;
}

inline Vector neuron_grad(const Vector& kappa_aug, Eigen::Index q,
                          const Vector& residual, const NetworkState& state,
                          const Dataset& data) {
  const Eigen::Index K = data.K();
  if (kappa_aug.size() != K + 1)
    throw DimensionError("neuron_grad: kappa_aug length mismatch");
  if (residual.size() != data.T())
    throw DimensionError("neuron_grad: residual length mismatch");
  if (q < 0 || q >= state.Q())
    throw DimensionError("neuron_grad: neuron index out of range");

  const ActivationKind kind = state.delta[static_cast<std::size_t>(q)];
  const double beta_q = state.beta[q];
  const Vector z =
      (data.X * kappa_aug.head(K)).array() + kappa_aug[K];

  // c_t = (r_t - beta h(z_t)) beta h'(z_t) / sigma_t^2
  Vector c(data.T());
  for (Eigen::Index t = 0; t < data.T(); ++t) {
    const double e = residual[t] - beta_q * act_eval(kind, z[t]);
    c[t] = e * beta_q * act_grad(kind, z[t]) * std::exp(-state.sv.log_vol[t]);
  }

  Vector grad(K + 1);
  grad.head(K) = data.X.transpose() * c;
  grad[K] = c.sum();

  const HorseshoeState& hs = state.hs_kappa[static_cast<std::size_t>(q)];
  for (Eigen::Index j = 0; j < K; ++j)
    grad[j] -= kappa_aug[j] / hs.prior_variance(j);
  grad[K] -= kappa_aug[K];

  return grad;
}

} // namespace bnn

#endif // BNN_NEURON_POSTERIOR_HPP
