#ifndef BNN_SAMPLER_HPP
#define BNN_SAMPLER_HPP

#include <chrono>
#include <cmath>
#include <vector>

#include "bnn/hmc.hpp"
#include "bnn/model.hpp"
#include "bnn/neuron_posterior.hpp"
#include "bnn/rng.hpp"
#include "bnn/shrinkage.hpp"
#include "bnn/sv.hpp"
#include "bnn/types.hpp"

namespace bnn {

// --------------------------------------------------------------------- //
// joint (gamma, beta) draw
// --------------------------------------------------------------------- //

namespace detail {

// T x (K+Q) design with neuron columns evaluated at the current
// (kappa, zeta, delta).
inline Matrix neuron_design(const NetworkState& state, const Dataset& data) {
  const Eigen::Index K = state.K(), Q = state.Q();
  Matrix xt(data.T(), K + Q);
  xt.leftCols(K) = data.X;
  for (Eigen::Index q = 0; q < Q; ++q) {
    Vector z = (data.X * state.kappa.col(q)).array() + state.zeta[q];
    xt.col(K + q) = act_eval(state.delta[static_cast<std::size_t>(q)], z);
  }
  return xt;
}

} // namespace detail

// theta = (gamma', beta')' ~ N(Vbar xt' Sigma^{-1} y, Vbar),
// Vbar = (xt' Sigma^{-1} xt + Vunder^{-1})^{-1}, via Cholesky with one
// jitter retry.
inline std::pair<Vector, Vector> draw_theta(const NetworkState& state,
                                            const Dataset& data, Rng& rng) {
  const Eigen::Index K = state.K(), Q = state.Q();
  const Matrix xt = detail::neuron_design(state, data);
  const Vector w = (-state.sv.log_vol.array()).exp(); // 1 / sigma_t^2

  Matrix prec = xt.transpose() * w.asDiagonal() * xt;
  Vector b = xt.transpose() * (w.asDiagonal() * data.y);

  const Vector phi_beta = state.mgp.precisions();
  for (Eigen::Index j = 0; j < K; ++j)
    prec(j, j) += 1.0 / state.hs_gamma.prior_variance(j);
  for (Eigen::Index q = 0; q < Q; ++q) prec(K + q, K + q) += phi_beta[q];

  Eigen::LLT<Matrix> llt(prec);
  if (llt.info() != Eigen::Success) {
    prec.diagonal().array() += 1e-10;
    llt.compute(prec);
    if (llt.info() != Eigen::Success) {
      const double cond = prec.diagonal().maxCoeff() /
                          std::max(prec.diagonal().minCoeff(), 1e-300);
      throw NumericalError("draw_theta: posterior precision not SPD", cond);
    }
  }

  const Vector mean = llt.solve(b);
  // theta = mean + L^{-T} z
  Vector z = rng.normal_vector(K + Q);
  llt.matrixU().solveInPlace(z);
  const Vector theta = mean + z;

  return {theta.head(K), theta.tail(Q)};
}

// --------------------------------------------------------------------- //
// activation indicator draws
// --------------------------------------------------------------------- //

// Log multinomial weights for neuron q over the four activation kinds;
// exposed for testing separately from the draw.
inline Vector activation_log_weights(Eigen::Index q,
                                     const Vector& residual_excl_q,
                                     const NetworkState& state,
                                     const Dataset& data) {
  const Vector z = (data.X * state.kappa.col(q)).array() + state.zeta[q];
  const Vector inv_sigma_sq = (-state.sv.log_vol.array()).exp();
  Vector log_w(4);
  for (int m = 0; m < 4; ++m) {
    const ActivationKind kind = kAllActivations[static_cast<std::size_t>(m)];
    double ss = 0.0;
    for (Eigen::Index t = 0; t < data.T(); ++t) {
      const double e =
          residual_excl_q[t] - state.beta[q] * act_eval(kind, z[t]);
      ss += e * e * inv_sigma_sq[t];
    }
    log_w[m] = std::log(0.25) - 0.5 * ss;
  }
  return log_w;
}

inline ActivationKind draw_activation(Eigen::Index q,
                                      const Vector& residual_excl_q,
                                      const NetworkState& state,
                                      const Dataset& data, Rng& rng) {
  const Vector log_w = activation_log_weights(q, residual_excl_q, state, data);
  return kAllActivations[static_cast<std::size_t>(rng.categorical_log(log_w))];
}

// BNN variant: one indicator shared by all neurons. The joint weight of a
// kind is the sum of the per-neuron weights, each evaluated against that
// neuron's leave-one-out residual under the current state.
inline ActivationKind draw_common_activation(const NetworkState& state,
                                             const Dataset& data, Rng& rng) {
  const Vector full_mean = conditional_mean(state, data.X);
  Vector log_w = Vector::Constant(4, std::log(0.25));
  for (Eigen::Index q = 0; q < state.Q(); ++q) {
    const Vector z = (data.X * state.kappa.col(q)).array() + state.zeta[q];
    const Vector residual_excl_q =
        data.y - full_mean +
        state.beta[q] *
            act_eval(state.delta[static_cast<std::size_t>(q)], z);
    // strip the per-neuron prior factor; the shared prior is applied once
    log_w += activation_log_weights(q, residual_excl_q, state, data);
    log_w.array() -= std::log(0.25);
  }
  return kAllActivations[static_cast<std::size_t>(rng.categorical_log(log_w))];
}

// --------------------------------------------------------------------- //
// Gibbs sweep
// --------------------------------------------------------------------- //

// Per-chain mutable sampler scratch: one dual-averaging state per neuron
// plus running acceptance tallies.
struct SamplerWorkspace {
  std::vector<DualAverageState> adapt;
  NutsConfig nuts;
  Vector accept_sum;
  Vector divergence_sum;
  long long nuts_calls_per_neuron = 0; // cumulative sweeps with HMC

  SamplerWorkspace(Eigen::Index Q, const SamplerConfig& config) {
    nuts.target_accept = config.nuts_target_accept;
    nuts.max_tree_depth = config.nuts_max_depth;
    nuts.adapt_steps = config.n_burn;
    nuts.init_step_size = 0.05;
    adapt.assign(static_cast<std::size_t>(Q),
                 DualAverageState(nuts.init_step_size));
    accept_sum = Vector::Zero(Q);
    divergence_sum = Vector::Zero(Q);
  }

  void freeze_all() {
    for (auto& a : adapt) a.freeze();
  }
};

inline NetworkState gibbs_sweep(const NetworkState& state_in,
                                const Dataset& data,
                                const SamplerConfig& config, Rng& rng,
                                SamplerWorkspace* ws = nullptr) {
  NetworkState state = state_in;
  const Eigen::Index K = state.K(), Q = state.Q(), T = data.T();

  // (1) joint Gaussian draw of (gamma, beta)
  {
    auto [gamma, beta] = draw_theta(state, data, rng);
    state.gamma = gamma;
    state.beta = beta;
  }

  // (2) horseshoe on the linear block
  state.hs_gamma = horseshoe_update(state.gamma, state.hs_gamma, rng);

  if (Q > 0 && !config.linear_only) {
    // (3) MGP on the loadings
    state.mgp = mgp_update(state.beta, state.mgp, rng);

    // (4) per-neuron kappa draw: NUTS when the prior variance of beta_q is
    // non-negligible, prior draw otherwise
    const Vector phi_beta = state.mgp.precisions();
    const Vector linear = data.X * state.gamma;

    // neuron contributions at the current parameters
    Matrix contrib(T, Q);
    for (Eigen::Index q = 0; q < Q; ++q) {
      Vector z = (data.X * state.kappa.col(q)).array() + state.zeta[q];
      contrib.col(q) =
          state.beta[q] *
          act_eval(state.delta[static_cast<std::size_t>(q)], z);
    }
    Vector base = data.y - linear - contrib.rowwise().sum();

    SamplerWorkspace local_ws(Q, config);
    SamplerWorkspace& w = ws ? *ws : local_ws;

    for (Eigen::Index q = 0; q < Q; ++q) {
      const Vector residual = base + contrib.col(q);
      const HorseshoeState& hs = state.hs_kappa[static_cast<std::size_t>(q)];

      if (1.0 / phi_beta[q] > config.mgp_threshold) {
        Vector kappa_aug(K + 1);
        kappa_aug.head(K) = state.kappa.col(q);
        kappa_aug[K] = state.zeta[q];

        auto logp = [&](const Vector& v) {
          return neuron_log_posterior(v, q, residual, state, data);
        };
        auto grad = [&](const Vector& v) {
          return neuron_grad(v, q, residual, state, data);
        };
        NutsDiagnostics diag;
        kappa_aug = nuts_draw(kappa_aug, logp, grad, w.nuts,
                              w.adapt[static_cast<std::size_t>(q)], rng,
                              &diag);
        w.accept_sum[q] += diag.accept_stat;
        w.divergence_sum[q] += diag.divergent ? 1.0 : 0.0;

        state.kappa.col(q) = kappa_aug.head(K);
        state.zeta[q] = kappa_aug[K];
      } else {
        for (Eigen::Index j = 0; j < K; ++j)
          state.kappa(j, q) =
              rng.normal(0.0, std::sqrt(hs.prior_variance(j)));
        state.zeta[q] = rng.normal();
      }

      // refresh this neuron's contribution for the next partial residual
      Vector z = (data.X * state.kappa.col(q)).array() + state.zeta[q];
      Vector new_contrib =
          state.beta[q] *
          act_eval(state.delta[static_cast<std::size_t>(q)], z);
      base -= new_contrib - contrib.col(q);
      contrib.col(q) = new_contrib;
    }
    if (ws) ++ws->nuts_calls_per_neuron;

    // (5) horseshoe on each kappa block
    for (Eigen::Index q = 0; q < Q; ++q)
      state.hs_kappa[static_cast<std::size_t>(q)] = horseshoe_update(
          state.kappa.col(q), state.hs_kappa[static_cast<std::size_t>(q)],
          rng);

    // (6) activation indicators
    if (config.common_activation) {
      const ActivationKind kind = draw_common_activation(state, data, rng);
      for (auto& dq : state.delta) dq = kind;
    } else {
      for (Eigen::Index q = 0; q < Q; ++q) {
        Vector z = (data.X * state.kappa.col(q)).array() + state.zeta[q];
        Vector cur = state.beta[q] *
                     act_eval(state.delta[static_cast<std::size_t>(q)], z);
        base -= cur - contrib.col(q);
        contrib.col(q) = cur;
        const Vector residual = base + contrib.col(q);
        state.delta[static_cast<std::size_t>(q)] =
            draw_activation(q, residual, state, data, rng);
        // contribution changes with the new kind
        Vector upd = state.beta[q] *
                     act_eval(state.delta[static_cast<std::size_t>(q)], z);
        base -= upd - contrib.col(q);
        contrib.col(q) = upd;
      }
    }
  }

  // (7) stochastic volatility on the full-model residuals
  {
    const Vector residuals = data.y - conditional_mean(state, data.X);
    if (config.sv_enabled) {
      SvOptions opt;
      opt.fix_rho_zero = config.sv_fix_rho_zero;
      state.sv = sv_update(residuals, state.sv, rng, opt);
    } else {
      state.sv = sv_update_homoskedastic(residuals, state.sv, rng);
    }
  }

  return state;
}

// --------------------------------------------------------------------- //
// chain driver
// --------------------------------------------------------------------- //

// Gaussian log likelihood of the data at the current state.
inline double chain_log_density(const NetworkState& state,
                                const Dataset& data) {
  const Vector resid = data.y - conditional_mean(state, data.X);
  double ll = 0.0;
  for (Eigen::Index t = 0; t < data.T(); ++t) {
    const double nu = state.sv.log_vol[t];
    ll += -0.5 * (std::log(2.0 * M_PI) + nu +
                  resid[t] * resid[t] * std::exp(-nu));
  }
  return ll;
}

// Runs burn-in plus retained sweeps. An optional initial state warm-starts
// the chain; its SV path is padded or truncated to the sample length.
inline ChainOutput run_chain(const Dataset& data, const SamplerConfig& config,
                             Rng& rng, const NetworkState* init = nullptr) {
  data.validate();
  config.validate();
  const auto t_start = std::chrono::steady_clock::now();

  const Eigen::Index K = data.K();
  const Eigen::Index Q =
      config.linear_only ? 0 : (config.Q > 0 ? config.Q : K);

  NetworkState state;
  if (init) {
    if (init->K() != K || init->Q() != Q)
      throw DimensionError("run_chain: warm-start state shape mismatch");
    state = *init;
    const Eigen::Index T = data.T();
    if (state.sv.T() != T) {
      Vector path = Vector::Constant(T, state.sv.log_vol[state.sv.T() - 1]);
      path.head(std::min(T, state.sv.T())) =
          state.sv.log_vol.head(std::min(T, state.sv.T()));
      state.sv.log_vol = path;
    }
    state.validate();
  } else {
    state = detail::init_state(data, Q, config, rng);
  }
  SamplerWorkspace ws(Q, config);

  ChainOutput out;
  out.n_draws = config.n_draws;
  out.n_burn = config.n_burn;
  out.thin = config.thin;
  const int n_keep = config.n_draws - config.n_burn;
  out.states.reserve(static_cast<std::size_t>(n_keep / config.thin + 1));

  for (int it = 0; it < config.n_draws; ++it) {
    if (it == config.n_burn) ws.freeze_all();
    try {
      state = gibbs_sweep(state, data, config, rng, &ws);
    } catch (const NumericalError& e) {
      throw NumericalError("sweep " + std::to_string(it) + ": " + e.what(),
                           e.condition_estimate);
    }
    if (it >= config.n_burn && (it - config.n_burn) % config.thin == 0) {
      out.states.push_back(state);
      out.log_post.push_back(chain_log_density(state, data));
      out.qstar.push_back(
          Q > 0 ? effective_neurons(state.mgp, config.neuron_threshold) : 0);
    }
  }

  const double denom = std::max(1.0, static_cast<double>(config.n_draws));
  out.accept_rate = ws.accept_sum / denom;
  out.divergence_rate = ws.divergence_sum / denom;
  out.wall_seconds = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - t_start)
                         .count();
  return out;
}

// --------------------------------------------------------------------- //
// predictive draws
// --------------------------------------------------------------------- //

inline std::vector<PredictiveDraw> predict(const ChainOutput& chain,
                                           const Vector& x_new, int horizon,
                                           Rng& rng) {
  if (horizon < 1) throw ArgumentError("predict: horizon must be >= 1");
  if (chain.states.empty()) throw ArgumentError("predict: empty chain");

  std::vector<PredictiveDraw> out;
  out.reserve(chain.states.size());
  for (const auto& state : chain.states) {
    PredictiveDraw d;
    d.mean = conditional_mean(state, x_new);
    const Vector var_path = sv_forecast(state.sv, horizon, rng);
    d.variance = var_path[horizon - 1];
    d.draw = d.mean + rng.normal(0.0, std::sqrt(d.variance));
    out.push_back(d);
  }
  return out;
}

} // namespace bnn

#endif // BNN_SAMPLER_HPP
