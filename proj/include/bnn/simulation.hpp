#ifndef BNN_SIMULATION_HPP
#define BNN_SIMULATION_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "bnn/activations.hpp"
#include "bnn/rng.hpp"
#include "bnn/types.hpp"

namespace bnn {

enum class DgpKind { Linear, Nonlinear };
enum class Sparsity { Dense, Sparse };
enum class NoiseKind { Homo, Hetero };

struct DgpConfig {
  int K = 30;
  DgpKind dgp_kind = DgpKind::Nonlinear;
  Sparsity sparsity = Sparsity::Sparse;
  NoiseKind noise = NoiseKind::Homo;
  int T = 200;
  int train_size = 100;
  double c_sq = 0.5;
  std::uint64_t seed = 1;

  void validate() const {
    if (K < 1) throw ArgumentError("DgpConfig: K must be >= 1");
    if (T < 2) throw ArgumentError("DgpConfig: T must be >= 2");
    if (train_size < 1 || train_size >= T)
      throw ArgumentError("DgpConfig: require 1 <= train_size < T");
    if (!(c_sq > 0.0)) throw ArgumentError("DgpConfig: c_sq must be > 0");
  }
};

struct DgpTruth {
  Vector beta_true;                       // Q loadings
  Matrix kappa_true;                      // identity: neuron q reads x_q
  std::vector<ActivationKind> activation_true;
  Vector sigma_sq_true;                   // length T
  std::vector<bool> active_mask;
  DgpKind dgp_kind = DgpKind::Nonlinear;
};

// Neuron-per-covariate DGP: y_t = f(x_t' I_K)' beta + v_t with a uniformly
// drawn activation per neuron (nonlinear mode) or the identity map (linear
// mode). Active set is a uniformly random subset of round(0.9 Q) (dense) or
// round(0.1 Q) (sparse) neurons.
inline std::pair<Dataset, DgpTruth> generate(const DgpConfig& config,
                                             Rng& rng) {
  config.validate();
  const int K = config.K, T = config.T, Q = config.K;

  Dataset data;
  data.X = Matrix(T, K);
  for (int t = 0; t < T; ++t)
    for (int j = 0; j < K; ++j) data.X(t, j) = rng.normal();

  DgpTruth truth;
  truth.dgp_kind = config.dgp_kind;
  truth.kappa_true = Matrix::Identity(K, Q);
  truth.activation_true.resize(static_cast<std::size_t>(Q));
  for (auto& a : truth.activation_true) a = rng.uniform_activation();

  const double share = config.sparsity == Sparsity::Dense ? 0.9 : 0.1;
  const int n_active =
      std::max(1, static_cast<int>(std::lround(share * Q)));
  std::vector<int> order(static_cast<std::size_t>(Q));
  std::iota(order.begin(), order.end(), 0);
  // Fisher-Yates on the index list; the first n_active entries are active.
  for (int i = Q - 1; i > 0; --i) {
    const int j = rng.uniform_int(0, i);
    std::swap(order[static_cast<std::size_t>(i)],
              order[static_cast<std::size_t>(j)]);
  }
  truth.active_mask.assign(static_cast<std::size_t>(Q), false);
  for (int i = 0; i < n_active; ++i)
    truth.active_mask[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = true;

  truth.beta_true = Vector::Zero(Q);
  const double c = std::sqrt(config.c_sq);
  for (int q = 0; q < Q; ++q)
    if (truth.active_mask[static_cast<std::size_t>(q)])
      truth.beta_true[q] = rng.normal(0.0, c);

  truth.sigma_sq_true = Vector(T);
  for (int t = 0; t < T; ++t) {
    if (config.noise == NoiseKind::Homo) {
      truth.sigma_sq_true[t] = 0.1;
    } else {
      truth.sigma_sq_true[t] = 0.1 * std::exp(rng.normal(0.0, 0.1));
    }
  }

  data.y = Vector(T);
  data.timestamps.resize(static_cast<std::size_t>(T));
  for (int t = 0; t < T; ++t) {
    double mean = 0.0;
    for (int q = 0; q < Q; ++q) {
      if (truth.beta_true[q] == 0.0) continue;
      const double z = data.X(t, q); // kappa_true = I
      const double h =
          config.dgp_kind == DgpKind::Linear
              ? z
              : act_eval(truth.activation_true[static_cast<std::size_t>(q)],
                         z);
      mean += truth.beta_true[q] * h;
    }
    data.y[t] =
        mean + rng.normal(0.0, std::sqrt(truth.sigma_sq_true[t]));
    data.timestamps[static_cast<std::size_t>(t)] = std::to_string(t);
  }

  data.validate();
  return {std::move(data), std::move(truth)};
}

// Uniformly random partition without replacement; original row indices are
// kept in the timestamps so holdout rows stay aligned with sigma_sq_true.
inline std::pair<Dataset, Dataset> split(const Dataset& data,
                                         const DgpConfig& config, Rng& rng) {
  const int T = static_cast<int>(data.T());
  if (config.train_size >= T)
    throw ArgumentError("split: train_size must be < T");

  std::vector<int> order(static_cast<std::size_t>(T));
  std::iota(order.begin(), order.end(), 0);
  for (int i = T - 1; i > 0; --i) {
    const int j = rng.uniform_int(0, i);
    std::swap(order[static_cast<std::size_t>(i)],
              order[static_cast<std::size_t>(j)]);
  }

  auto take = [&](int from, int count) {
    std::vector<int> idx(order.begin() + from, order.begin() + from + count);
    std::sort(idx.begin(), idx.end());
    Dataset out;
    out.y = Vector(count);
    out.X = Matrix(count, data.K());
    out.timestamps.resize(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
      const int r = idx[static_cast<std::size_t>(i)];
      out.y[i] = data.y[r];
      out.X.row(i) = data.X.row(r);
      out.timestamps[static_cast<std::size_t>(i)] =
          data.timestamps.empty() ? std::to_string(r)
                                  : data.timestamps[static_cast<std::size_t>(r)];
    }
    return out;
  };

  Dataset train = take(0, config.train_size);
  Dataset holdout = take(config.train_size, T - config.train_size);
  return {std::move(train), std::move(holdout)};
}

} // namespace bnn

#endif // BNN_SIMULATION_HPP
