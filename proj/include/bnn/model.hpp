#ifndef BNN_MODEL_HPP
#define BNN_MODEL_HPP

#include <cmath>

#include "bnn/activations.hpp"
#include "bnn/rng.hpp"
#include "bnn/types.hpp"

namespace bnn {

namespace detail {

// Q = 0 is permitted here for the linear benchmark mode.
inline NetworkState init_state(const Dataset& data, Eigen::Index Q,
                               const SamplerConfig& config, Rng& rng) {
  const Eigen::Index K = data.K();
  const Eigen::Index T = data.T();
  if (K < 1) throw DimensionError("init_state: K must be >= 1");
  if (Q < 0) throw DimensionError("init_state: Q must be >= 0");
  (void)config;

  NetworkState s;
  s.gamma = Vector::Zero(K);
  s.beta = Vector::Zero(Q);
  s.zeta = Vector::Zero(Q);
  s.kappa = Matrix(K, Q);
  for (Eigen::Index q = 0; q < Q; ++q)
    for (Eigen::Index j = 0; j < K; ++j) s.kappa(j, q) = rng.normal(0.0, 0.1);
  s.delta.resize(static_cast<std::size_t>(Q));
  for (auto& d : s.delta) d = rng.uniform_activation();
  s.hs_gamma = HorseshoeState::ones(K);
  s.hs_kappa.assign(static_cast<std::size_t>(Q), HorseshoeState::ones(K));
  s.mgp = MgpState::ones(Q);

  const double ybar = data.y.mean();
  double var_y = (data.y.array() - ybar).square().sum() /
                 static_cast<double>(T - 1);
  if (!(var_y > 0.0)) var_y = 1e-4;
  s.sv.log_vol = Vector::Constant(T, std::log(var_y));
  s.sv.mu = s.sv.log_vol[0];
  s.sv.rho = config.sv_fix_rho_zero ? 0.0 : 0.9;
  s.sv.state_var = 0.01;

  s.validate();
  return s;
}

} // namespace detail

inline NetworkState new_network_state(const Dataset& data, Eigen::Index Q,
                                      const SamplerConfig& config, Rng& rng) {
  if (data.K() < 1 || Q < 1)
    throw DimensionError("new_network_state: dimensions must be >= 1");
  return detail::init_state(data, Q, config, rng);
}

// x'gamma + sum_q beta_q h_{delta_q}(x'kappa_q + zeta_q)
inline double conditional_mean(const NetworkState& state, const Vector& x) {
  if (x.size() != state.K())
    throw DimensionError("conditional_mean: x length mismatch");
  double out = state.gamma.dot(x);
  for (Eigen::Index q = 0; q < state.Q(); ++q) {
    const double z = state.kappa.col(q).dot(x) + state.zeta[q];
    out += state.beta[q] *
           act_eval(state.delta[static_cast<std::size_t>(q)], z);
  }
  return out;
}

// Vectorized over the rows of X.
inline Vector conditional_mean(const NetworkState& state, const Matrix& X) {
  if (X.cols() != state.K())
    throw DimensionError("conditional_mean: X width mismatch");
  Vector out = X * state.gamma;
  for (Eigen::Index q = 0; q < state.Q(); ++q) {
    Vector z = (X * state.kappa.col(q)).array() + state.zeta[q];
    out += state.beta[q] *
           act_eval(state.delta[static_cast<std::size_t>(q)], z);
  }
  return out;
}

} // namespace bnn

#endif // BNN_MODEL_HPP
