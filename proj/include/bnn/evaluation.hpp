#ifndef BNN_EVALUATION_HPP
#define BNN_EVALUATION_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "bnn/model.hpp"
#include "bnn/shrinkage.hpp"
#include "bnn/types.hpp"

namespace bnn {

struct ForecastRecord {
  std::vector<PredictiveDraw> draws;
  double realized = 0.0;
  std::string period;
};

namespace detail {

inline double point_forecast(const ForecastRecord& rec) {
  double s = 0.0;
  for (const auto& d : rec.draws) s += d.mean;
  return s / static_cast<double>(rec.draws.size());
}

inline double draw_quantile(const ForecastRecord& rec, double tau) {
  Vector v(static_cast<Eigen::Index>(rec.draws.size()));
  for (std::size_t i = 0; i < rec.draws.size(); ++i)
    v[static_cast<Eigen::Index>(i)] = rec.draws[i].draw;
  return empirical_quantile(std::move(v), tau);
}

inline double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

} // namespace detail

// --------------------------------------------------------------------- //
// point and density scores
// --------------------------------------------------------------------- //

inline double rmse(const std::vector<ForecastRecord>& records) {
  if (records.empty()) throw ArgumentError("rmse: empty input");
  double ss = 0.0;
  for (const auto& rec : records) {
    if (rec.draws.empty()) throw ArgumentError("rmse: record without draws");
    const double e = detail::point_forecast(rec) - rec.realized;
    ss += e * e;
  }
  return std::sqrt(ss / static_cast<double>(records.size()));
}

inline double relative_rmse(const std::vector<ForecastRecord>& model,
                            const std::vector<ForecastRecord>& benchmark) {
  return rmse(model) / rmse(benchmark);
}

// Mean pinball loss of the empirical tau-quantile of the predictive draws.
inline double quantile_score(const std::vector<ForecastRecord>& records,
                             double tau) {
  if (records.empty()) throw ArgumentError("quantile_score: empty input");
  if (!(tau > 0.0 && tau < 1.0))
    throw ArgumentError("quantile_score: tau in (0,1)");
  double total = 0.0;
  for (const auto& rec : records) {
    if (rec.draws.empty())
      throw ArgumentError("quantile_score: record without draws");
    const double q = detail::draw_quantile(rec, tau);
    const double ind = rec.realized < q ? 1.0 : 0.0;
    total += (rec.realized - q) * (tau - ind);
  }
  return total / static_cast<double>(records.size());
}

struct LplResult {
  Vector per_period;
  double cumulative = 0.0;
};

// Rao-Blackwellized Gaussian-mixture predictive likelihood, per period and
// cumulative, computed via log-sum-exp so tail evaluations stay finite.
inline LplResult lpl(const std::vector<ForecastRecord>& records) {
  if (records.empty()) throw ArgumentError("lpl: empty input");
  LplResult out;
  out.per_period = Vector(static_cast<Eigen::Index>(records.size()));
  constexpr double log2pi = 1.8378770664093453;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& rec = records[i];
    if (rec.draws.size() < 100)
      throw InsufficientDrawsError("lpl: need >= 100 draws per record");
    Vector log_dens(static_cast<Eigen::Index>(rec.draws.size()));
    for (std::size_t s = 0; s < rec.draws.size(); ++s) {
      const auto& d = rec.draws[s];
      const double e = rec.realized - d.mean;
      log_dens[static_cast<Eigen::Index>(s)] =
          -0.5 * (log2pi + std::log(d.variance) + e * e / d.variance);
    }
    const double m = log_dens.maxCoeff();
    const double lse =
        m + std::log((log_dens.array() - m).exp().sum()) -
        std::log(static_cast<double>(rec.draws.size()));
    out.per_period[static_cast<Eigen::Index>(i)] = lse;
    out.cumulative += lse;
  }
  return out;
}

// --------------------------------------------------------------------- //
// posterior summaries
// --------------------------------------------------------------------- //

struct PipResult {
  Matrix per_neuron; // Q x 4 inclusion frequencies, rows sum to one
  Vector averaged;   // neuron-averaged 4-vector
};

inline PipResult pip(const ChainOutput& chain) {
  if (chain.states.empty()) throw ArgumentError("pip: empty chain");
  const Eigen::Index Q = chain.states.front().Q();
  PipResult out;
  out.per_neuron = Matrix::Zero(Q, 4);
  for (const auto& state : chain.states)
    for (Eigen::Index q = 0; q < Q; ++q)
      out.per_neuron(
          q, static_cast<int>(state.delta[static_cast<std::size_t>(q)]) - 1) +=
          1.0;
  out.per_neuron /= static_cast<double>(chain.states.size());
  out.averaged = Q > 0 ? Vector(out.per_neuron.colwise().mean())
                       : Vector(Vector::Zero(4));
  return out;
}

// Share of response variance explained by the posterior-mean conditional
// mean.
inline double insample_r2(const ChainOutput& chain, const Dataset& data) {
  if (chain.states.empty()) throw ArgumentError("insample_r2: empty chain");
  Vector mean = Vector::Zero(data.T());
  for (const auto& state : chain.states)
    mean += conditional_mean(state, data.X);
  mean /= static_cast<double>(chain.states.size());

  const double var_y =
      (data.y.array() - data.y.mean()).square().sum();
  if (!(var_y > 0.0)) throw ArgumentError("insample_r2: zero-variance y");
  const Vector resid = data.y - mean;
  const double var_r = (resid.array() - resid.mean()).square().sum();
  return 1.0 - var_r / var_y;
}

// --------------------------------------------------------------------- //
// forecast-comparison tests
// --------------------------------------------------------------------- //

struct DmResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::string stars; // significance at 10/5/1 percent
};

// Diebold-Mariano test on a loss differential; long-run variance via the
// Bartlett kernel with h-1 lags.
inline DmResult dm_test(const Vector& loss_a, const Vector& loss_b, int h) {
  if (loss_a.size() != loss_b.size())
    throw ArgumentError("dm_test: unequal lengths");
  const Eigen::Index n = loss_a.size();
  if (n < 10) throw ArgumentError("dm_test: need at least 10 observations");
  if (h < 1) throw ArgumentError("dm_test: horizon must be >= 1");

  const Vector d = loss_a - loss_b;
  const double dbar = d.mean();
  const Vector dc = d.array() - dbar;

  double lrv = dc.squaredNorm() / static_cast<double>(n);
  for (int lag = 1; lag < h; ++lag) {
    double acov = 0.0;
    for (Eigen::Index t = lag; t < n; ++t) acov += dc[t] * dc[t - lag];
    acov /= static_cast<double>(n);
    const double w = 1.0 - static_cast<double>(lag) / static_cast<double>(h);
    lrv += 2.0 * w * acov;
  }
  if (!(lrv > 0.0))
    throw DegenerateTestError("dm_test: zero long-run variance");

  DmResult out;
  out.statistic = dbar / std::sqrt(lrv / static_cast<double>(n));
  out.p_value = 2.0 * (1.0 - detail::normal_cdf(std::abs(out.statistic)));
  if (out.p_value <= 0.01)
    out.stars = "***";
  else if (out.p_value <= 0.05)
    out.stars = "**";
  else if (out.p_value <= 0.10)
    out.stars = "*";
  return out;
}

struct FluctuationResult {
  Vector statistics;     // one per centered window position
  std::vector<int> center; // window-center index of each statistic
  double critical_value = 0.0; // two-sided 5 percent
};

namespace detail {

// Two-sided 5 percent critical values indexed by window fraction.
inline double fluctuation_critical_value(double frac) {
  static constexpr double mu[] = {0.1, 0.2, 0.3, 0.4, 0.5,
                                  0.6, 0.7, 0.8, 0.9};
  static constexpr double cv[] = {3.393, 3.179, 3.012, 2.890, 2.779,
                                  2.634, 2.560, 2.433, 2.278};
  if (frac <= mu[0]) return cv[0];
  if (frac >= mu[8]) return cv[8];
  for (int i = 0; i < 8; ++i)
    if (frac <= mu[i + 1]) {
      const double w = (frac - mu[i]) / (mu[i + 1] - mu[i]);
      return cv[i] * (1.0 - w) + cv[i + 1] * w;
    }
  return cv[8];
}

// Bartlett HAC variance with a n^{1/3} lag window.
inline double hac_variance(const Vector& d) {
  const Eigen::Index n = d.size();
  const Vector dc = d.array() - d.mean();
  const int lags = static_cast<int>(std::floor(
      std::cbrt(static_cast<double>(n))));
  double lrv = dc.squaredNorm() / static_cast<double>(n);
  for (int lag = 1; lag <= lags; ++lag) {
    double acov = 0.0;
    for (Eigen::Index t = lag; t < n; ++t) acov += dc[t] * dc[t - lag];
    acov /= static_cast<double>(n);
    const double w =
        1.0 - static_cast<double>(lag) / static_cast<double>(lags + 1);
    lrv += 2.0 * w * acov;
  }
  return lrv;
}

} // namespace detail

// Rolling standardized mean of the loss differential over a centered
// window; standardization uses the full-sample HAC variance.
inline FluctuationResult fluctuation_test(const Vector& lpl_diff,
                                          double window_frac) {
  if (!(window_frac > 0.0 && window_frac < 1.0))
    throw ArgumentError("fluctuation_test: window_frac in (0,1)");
  const Eigen::Index n = lpl_diff.size();
  const int m = static_cast<int>(
      std::lround(window_frac * static_cast<double>(n)));
  if (m < 10) throw ArgumentError("fluctuation_test: window too short");

  const double lrv = detail::hac_variance(lpl_diff);
  if (!(lrv > 0.0))
    throw DegenerateTestError("fluctuation_test: zero HAC variance");
  const double scale = 1.0 / (std::sqrt(lrv) * std::sqrt(m));

  FluctuationResult out;
  out.critical_value = detail::fluctuation_critical_value(window_frac);
  const int n_windows = static_cast<int>(n) - m + 1;
  out.statistics = Vector(n_windows);
  out.center.resize(static_cast<std::size_t>(n_windows));
  double wsum = lpl_diff.head(m).sum();
  for (int i = 0; i < n_windows; ++i) {
    out.statistics[i] = scale * wsum;
    out.center[static_cast<std::size_t>(i)] = i + m / 2;
    if (i + m < n) wsum += lpl_diff[i + m] - lpl_diff[i];
  }
  return out;
}

// --------------------------------------------------------------------- //
// MCMC diagnostics
// --------------------------------------------------------------------- //

// Inefficiency factor = n / ESS via Geyer's initial monotone positive
// sequence over paired autocorrelations.
inline double inefficiency_factor(const Vector& trace) {
  const Eigen::Index n = trace.size();
  if (n < 100)
    throw ArgumentError("inefficiency_factor: need >= 100 draws");
  const Vector c = trace.array() - trace.mean();
  const double var0 = c.squaredNorm() / static_cast<double>(n);
  if (!(var0 > 0.0))
    throw DegenerateTestError("inefficiency_factor: constant trace");

  auto rho = [&](Eigen::Index lag) {
    double acov = 0.0;
    for (Eigen::Index t = lag; t < n; ++t) acov += c[t] * c[t - lag];
    return acov / static_cast<double>(n) / var0;
  };

  double tau = 1.0;
  double prev_pair = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 1; k + 1 < n; k += 2) {
    double pair = rho(k) + rho(k + 1);
    if (pair < 0.0) break;
    pair = std::min(pair, prev_pair); // enforce monotone decrease
    tau += 2.0 * pair;
    prev_pair = pair;
  }
  return tau;
}

// Raftery-Lewis run-length estimate from the two-state chain obtained by
// dichotomizing the trace at its q-quantile (no thinning search).
inline int raftery_lewis(const Vector& trace, double q = 0.025,
                         double r = 0.025, double s = 0.95) {
  const Eigen::Index n = trace.size();
  if (n < 100) throw ArgumentError("raftery_lewis: need >= 100 draws");
  if (!(q > 0.0 && q < 1.0 && r > 0.0 && s > 0.0 && s < 1.0))
    throw ArgumentError("raftery_lewis: bad (q, r, s)");

  const double cut = detail::empirical_quantile(trace, q);
  std::vector<int> z(static_cast<std::size_t>(n));
  for (Eigen::Index t = 0; t < n; ++t) z[static_cast<std::size_t>(t)] =
      trace[t] <= cut ? 1 : 0;

  // transition frequencies of the dichotomized chain
  double n01 = 0, n0 = 0, n10 = 0, n1 = 0;
  for (Eigen::Index t = 1; t < n; ++t) {
    const int a = z[static_cast<std::size_t>(t - 1)];
    const int b = z[static_cast<std::size_t>(t)];
    if (a == 0) {
      ++n0;
      if (b == 1) ++n01;
    } else {
      ++n1;
      if (b == 0) ++n10;
    }
  }
  const double alpha = n0 > 0 ? std::max(n01 / n0, 1e-6) : 1e-6;
  const double beta = n1 > 0 ? std::max(n10 / n1, 1e-6) : 1e-6;

  // z-score for the two-sided coverage s
  const double p = (s + 1.0) / 2.0;
  // inverse normal via Newton on the CDF
  double zq = 1.0;
  for (int it = 0; it < 60; ++it) {
    const double f = detail::normal_cdf(zq) - p;
    const double fp =
        std::exp(-0.5 * zq * zq) / std::sqrt(2.0 * M_PI);
    zq -= f / fp;
  }

  const double ab = alpha + beta;
  const double n_est = alpha * beta * (2.0 - ab) / (ab * ab * ab) *
                       (zq / r) * (zq / r);
  const double burn =
      std::log(0.01 * ab / std::max(alpha, beta)) /
      std::log(std::abs(1.0 - ab));
  return static_cast<int>(std::ceil(n_est + std::max(burn, 0.0)));
}

} // namespace bnn

#endif // BNN_EVALUATION_HPP
