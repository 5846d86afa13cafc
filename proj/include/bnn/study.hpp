#ifndef BNN_STUDY_HPP
#define BNN_STUDY_HPP

#include <array>
#include <atomic>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "bnn/evaluation.hpp"
#include "bnn/sampler.hpp"
#include "bnn/simulation.hpp"

namespace bnn {

// Harness for the synthetic forecasting exercise: simulate, split, fit,
// forecast the holdout, score against the linear horseshoe-SV benchmark.

enum class ModelKind { Bnn, BnnNs, Linear };

inline const char* model_name(ModelKind m) {
  switch (m) {
    case ModelKind::Bnn: return "BNN";
    case ModelKind::BnnNs: return "BNN-NS";
    case ModelKind::Linear: return "Linear";
  }
  return "?";
}

inline SamplerConfig study_sampler_config(ModelKind model,
                                          const SamplerConfig& base) {
  SamplerConfig cfg = base;
  cfg.linear_only = model == ModelKind::Linear;
  cfg.common_activation = model == ModelKind::Bnn;
  // simulation design: no time dependence in the volatility process
  cfg.sv_fix_rho_zero = true;
  return cfg;
}

struct FitForecastResult {
  std::vector<ForecastRecord> records;
  ChainOutput chain;
};

// One replication of one model on one synthetic design. The seed drives
// both the DGP and the chain, so the same replication index sees the same
// data across models.
inline FitForecastResult simulate_fit_forecast(const DgpConfig& dgp,
                                               ModelKind model,
                                               const SamplerConfig& base,
                                               std::uint64_t rep_seed,
                                               bool keep_chain = false) {
  DgpConfig d = dgp;
  d.seed = rep_seed;
  Rng data_rng(derive_seed(rep_seed, 0));
  auto [full, truth] = generate(d, data_rng);
  auto [train, holdout] = split(full, d, data_rng);

  SamplerConfig cfg = study_sampler_config(model, base);
  cfg.seed = derive_seed(rep_seed, 1 + static_cast<std::uint64_t>(model));
  Rng chain_rng(cfg.seed);
  ChainOutput chain = run_chain(train, cfg, chain_rng);

  FitForecastResult out;
  out.records.reserve(static_cast<std::size_t>(holdout.T()));
  for (Eigen::Index t = 0; t < holdout.T(); ++t) {
    ForecastRecord rec;
    rec.draws = predict(chain, holdout.X.row(t).transpose(), 1, chain_rng);
    rec.realized = holdout.y[t];
    rec.period = holdout.timestamps.empty()
                     ? std::to_string(t)
                     : holdout.timestamps[static_cast<std::size_t>(t)];
    out.records.push_back(std::move(rec));
  }
  if (keep_chain) out.chain = std::move(chain);
  return out;
}

struct CellResult {
  // averages across replications, relative to the linear benchmark
  double rel_rmse_bnn = 0.0, rel_rmse_bnn_ns = 0.0;
  double rel_qs25_bnn = 0.0, rel_qs25_bnn_ns = 0.0;
  double rel_qs75_bnn = 0.0, rel_qs75_bnn_ns = 0.0;
  double bench_rmse = 0.0;
  int replications = 0;
  int failures = 0;
};

// One grid cell of the simulation table: fits all three models on each
// replication and averages the per-replication relative scores.
// Replication x model jobs run on the given number of worker threads with
// deterministic per-job seeds, so results do not depend on thread count.
inline CellResult run_table_cell(const DgpConfig& dgp,
                                 const SamplerConfig& base, int replications,
                                 std::uint64_t seed, int threads) {
  struct RepScores {
    double rmse_bnn = 0, rmse_ns = 0, rmse_lin = 0;
    double qs25_bnn = 0, qs25_ns = 0, qs25_lin = 0;
    double qs75_bnn = 0, qs75_ns = 0, qs75_lin = 0;
    bool ok = false;
  };
  std::vector<RepScores> scores(static_cast<std::size_t>(replications));
  std::vector<std::array<std::vector<ForecastRecord>, 3>> records(
      static_cast<std::size_t>(replications));

  struct Job {
    int rep;
    ModelKind model;
  };
  std::vector<Job> jobs;
  for (int rep = 0; rep < replications; ++rep)
    for (ModelKind m :
         {ModelKind::Bnn, ModelKind::BnnNs, ModelKind::Linear})
      jobs.push_back({rep, m});

  std::atomic<std::size_t> next{0};
  std::atomic<int> failures{0};
  std::mutex mtx;

  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      const Job job = jobs[i];
      try {
        const std::uint64_t rep_seed =
            derive_seed(seed, static_cast<std::uint64_t>(job.rep));
        auto res = simulate_fit_forecast(dgp, job.model, base, rep_seed);
        std::lock_guard<std::mutex> lock(mtx);
        records[static_cast<std::size_t>(job.rep)]
               [static_cast<std::size_t>(job.model) -
                static_cast<std::size_t>(ModelKind::Bnn)] =
                   std::move(res.records);
      } catch (const std::exception&) {
        ++failures;
      }
    }
  };

  std::vector<std::thread> pool;
  const int n_threads = std::max(1, threads);
  pool.reserve(static_cast<std::size_t>(n_threads));
  for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  CellResult out;
  out.failures = failures.load();
  double bench_rmse_sum = 0.0;
  for (int rep = 0; rep < replications; ++rep) {
    const auto& recs = records[static_cast<std::size_t>(rep)];
    if (recs[0].empty() || recs[1].empty() || recs[2].empty()) continue;
    const auto& bnn = recs[0];
    const auto& ns = recs[1];
    const auto& lin = recs[2];
    const double rmse_lin = rmse(lin);
    out.rel_rmse_bnn += rmse(bnn) / rmse_lin;
    out.rel_rmse_bnn_ns += rmse(ns) / rmse_lin;
    out.rel_qs25_bnn += quantile_score(bnn, 0.25) / quantile_score(lin, 0.25);
    out.rel_qs25_bnn_ns +=
        quantile_score(ns, 0.25) / quantile_score(lin, 0.25);
    out.rel_qs75_bnn += quantile_score(bnn, 0.75) / quantile_score(lin, 0.75);
    out.rel_qs75_bnn_ns +=
        quantile_score(ns, 0.75) / quantile_score(lin, 0.75);
    bench_rmse_sum += rmse_lin;
    ++out.replications;
  }
  if (out.replications > 0) {
    const double n = out.replications;
    out.rel_rmse_bnn /= n;
    out.rel_rmse_bnn_ns /= n;
    out.rel_qs25_bnn /= n;
    out.rel_qs25_bnn_ns /= n;
    out.rel_qs75_bnn /= n;
    out.rel_qs75_bnn_ns /= n;
    out.bench_rmse = bench_rmse_sum / n;
  }
  return out;
}

} // namespace bnn

#endif // BNN_STUDY_HPP
