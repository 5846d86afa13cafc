#ifndef BNN_DIAGNOSTICS_HPP
#define BNN_DIAGNOSTICS_HPP

#include <string>
#include <vector>

#include "bnn/evaluation.hpp"
#include "bnn/sampler.hpp"
#include "bnn/types.hpp"

namespace bnn {

struct RecursiveForecastResult {
  std::vector<ForecastRecord> records;
  std::vector<ChainOutput> chains; // one per forecast origin
};

// Expanding-window one-step-ahead harness: for each t from start_index to
// T-1 fit on rows [0, t) and forecast row t. Fitting never touches rows
// >= t. Warm-starting is off by default; chains per period use derived,
// reproducible seeds either way.
inline RecursiveForecastResult recursive_forecast(
    const Dataset& data, const SamplerConfig& config, int start_index,
    bool warm_start = false, bool keep_chains = true) {
  data.validate();
  if (start_index < 40)
    throw ArgumentError("recursive_forecast: start_index must be >= 40");
  if (start_index >= data.T())
    throw ArgumentError("recursive_forecast: start_index beyond sample end");

  RecursiveForecastResult out;
  NetworkState last_state;
  bool have_last = false;
  for (Eigen::Index t = start_index; t < data.T(); ++t) {
    Dataset train;
    train.y = data.y.head(t);
    train.X = data.X.topRows(t);
    if (!data.timestamps.empty())
      train.timestamps.assign(data.timestamps.begin(),
                              data.timestamps.begin() + t);

    Rng rng(derive_seed(config.seed, static_cast<std::uint64_t>(t)));
    const NetworkState* init =
        (warm_start && have_last) ? &last_state : nullptr;
    ChainOutput chain = run_chain(train, config, rng, init);
    if (warm_start && !chain.states.empty()) {
      last_state = chain.states.back();
      have_last = true;
    }

    ForecastRecord rec;
    rec.draws = predict(chain, data.X.row(t).transpose(), 1, rng);
    rec.realized = data.y[t];
    rec.period = data.timestamps.empty()
                     ? std::to_string(t)
                     : data.timestamps[static_cast<std::size_t>(t)];
    out.records.push_back(std::move(rec));
    if (keep_chains) out.chains.push_back(std::move(chain));
  }
  return out;
}

// Period x 4 matrix of neuron-averaged activation inclusion frequencies.
inline Matrix pip_over_time(const std::vector<ChainOutput>& chains) {
  if (chains.empty()) throw ArgumentError("pip_over_time: empty input");
  Matrix out(static_cast<Eigen::Index>(chains.size()), 4);
  for (std::size_t i = 0; i < chains.size(); ++i)
    out.row(static_cast<Eigen::Index>(i)) = pip(chains[i]).averaged.transpose();
  return out;
}

// Per-period active-neuron counts under the credible-interval rule.
inline std::vector<int> qstar_over_time(
    const std::vector<ChainOutput>& chains) {
  if (chains.empty()) throw ArgumentError("qstar_over_time: empty input");
  std::vector<int> out;
  out.reserve(chains.size());
  for (const auto& chain : chains)
    out.push_back(active_neurons_ci(chain.beta_draws()));
  return out;
}

struct R2LplPoint {
  std::string period;
  double relative_r2 = 1.0;
  double relative_lpl = 0.0; // model LPL minus benchmark LPL
};

// Per-period scatter data relating in-sample fit to out-of-sample density
// accuracy. Chains and records must be aligned period by period; R2 is
// computed on the training window each chain was fitted on.
inline std::vector<R2LplPoint> r2_lpl_scatter(
    const std::vector<ForecastRecord>& model_records,
    const std::vector<ChainOutput>& model_chains,
    const std::vector<ForecastRecord>& bench_records,
    const std::vector<ChainOutput>& bench_chains, const Dataset& data,
    int start_index) {
  const std::size_t n = model_records.size();
  if (n == 0 || n != model_chains.size() || n != bench_records.size() ||
      n != bench_chains.size())
    throw ArgumentError("r2_lpl_scatter: misaligned inputs");

  std::vector<R2LplPoint> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Index t = start_index + static_cast<Eigen::Index>(i);
    Dataset train;
    train.y = data.y.head(t);
    train.X = data.X.topRows(t);

    R2LplPoint pt;
    pt.period = model_records[i].period;
    const double r2_m = insample_r2(model_chains[i], train);
    const double r2_b = insample_r2(bench_chains[i], train);
    pt.relative_r2 = r2_b != 0.0 ? r2_m / r2_b : 1.0;
    pt.relative_lpl = lpl({model_records[i]}).cumulative -
                      lpl({bench_records[i]}).cumulative;
    out[i] = pt;
  }
  return out;
}

} // namespace bnn

#endif // BNN_DIAGNOSTICS_HPP
