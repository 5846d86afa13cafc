// Command-line surface: simulate synthetic datasets, fit the network or the
// linear benchmark, forecast from a chain archive, score forecasts, and run
// the full simulation grid.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bnn/chain_io.hpp"
#include "bnn/csv.hpp"
#include "bnn/diagnostics.hpp"
#include "bnn/evaluation.hpp"
#include "bnn/sampler.hpp"
#include "bnn/simulation.hpp"
#include "bnn/study.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw bnn::ArgumentError("cannot open config file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw bnn::ArgumentError(path + ": invalid JSON: " + e.what());
  }
  return j;
}

bnn::DgpConfig dgp_from_json(const json& j) {
  bnn::DgpConfig c;
  c.K = j.value("K", c.K);
  c.T = j.value("T", c.T);
  c.train_size = j.value("train_size", c.train_size);
  c.c_sq = j.value("c_sq", c.c_sq);
  c.seed = j.value("seed", c.seed);
  const std::string kind = j.value("dgp_kind", "nonlinear");
  if (kind == "nonlinear")
    c.dgp_kind = bnn::DgpKind::Nonlinear;
  else if (kind == "linear")
    c.dgp_kind = bnn::DgpKind::Linear;
  else
    throw bnn::ArgumentError("dgp_kind must be 'linear' or 'nonlinear'");
  const std::string sp = j.value("sparsity", "sparse");
  if (sp == "sparse")
    c.sparsity = bnn::Sparsity::Sparse;
  else if (sp == "dense")
    c.sparsity = bnn::Sparsity::Dense;
  else
    throw bnn::ArgumentError("sparsity must be 'sparse' or 'dense'");
  const std::string nk = j.value("noise", "homo");
  if (nk == "homo")
    c.noise = bnn::NoiseKind::Homo;
  else if (nk == "hetero")
    c.noise = bnn::NoiseKind::Hetero;
  else
    throw bnn::ArgumentError("noise must be 'homo' or 'hetero'");
  c.validate();
  return c;
}

// Every command drops a manifest sufficient to reproduce its outputs.
void write_manifest(const std::string& out_dir, const std::string& command,
                    const json& config) {
  json manifest = {
      {"command", command},
      {"config", config},
      {"config_hash", std::hash<std::string>{}(config.dump())},
      {"version", kVersion},
      {"hardware_threads", std::thread::hardware_concurrency()},
  };
  std::ofstream out(out_dir + "/run_manifest.json");
  if (!out) throw bnn::DataError("cannot write manifest in " + out_dir);
  out << manifest.dump(2) << '\n';
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir) {
  const json cfg_json = load_json(config_path);
  const bnn::DgpConfig cfg = dgp_from_json(cfg_json);

  bnn::Rng rng(cfg.seed);
  auto [data, truth] = bnn::generate(cfg, rng);
  auto [train, holdout] = bnn::split(data, cfg, rng);

  fs::create_directories(out_dir);
  bnn::csv::write_dataset(out_dir + "/train.csv", train);
  bnn::csv::write_dataset(out_dir + "/holdout.csv", holdout);

  json truth_json;
  truth_json["dgp_kind"] =
      truth.dgp_kind == bnn::DgpKind::Linear ? "linear" : "nonlinear";
  truth_json["beta_true"] = std::vector<double>(
      truth.beta_true.data(), truth.beta_true.data() + truth.beta_true.size());
  truth_json["sigma_sq_true"] = std::vector<double>(
      truth.sigma_sq_true.data(),
      truth.sigma_sq_true.data() + truth.sigma_sq_true.size());
  std::vector<int> act, active;
  for (std::size_t q = 0; q < truth.activation_true.size(); ++q) {
    act.push_back(static_cast<int>(truth.activation_true[q]));
    if (truth.active_mask[q]) active.push_back(static_cast<int>(q));
  }
  truth_json["activation_true"] = act;
  truth_json["active_neurons"] = active;
  truth_json["train_rows"] = train.timestamps;
  truth_json["holdout_rows"] = holdout.timestamps;
  std::ofstream tf(out_dir + "/truth.json");
  if (!tf) throw bnn::DataError("cannot write truth.json");
  tf << truth_json.dump(2) << '\n';

  write_manifest(out_dir, "simulate", cfg_json);
  std::cout << "wrote " << out_dir << "/train.csv (" << train.T()
            << " rows), holdout.csv (" << holdout.T() << " rows)\n";
  return kExitOk;
}

int cmd_fit(const std::string& data_path, const std::string& config_path,
            const std::string& out_dir) {
  const json cfg_json =
      config_path.empty() ? json::object() : load_json(config_path);
  bnn::SamplerConfig cfg = bnn::chain_io::config_from_json(cfg_json);
  cfg.validate();

  const bnn::Dataset data = bnn::csv::read_dataset(data_path);

  bnn::Rng rng(cfg.seed);
  const bnn::ChainOutput chain = bnn::run_chain(data, cfg, rng);

  fs::create_directories(out_dir);
  bnn::chain_io::save(out_dir + "/chain", chain, cfg);

  // diagnostics per parameter block: inefficiency factors and
  // Raftery-Lewis run lengths
  {
    std::ofstream out(out_dir + "/diagnostics.csv");
    out << "block,parameter,inefficiency_factor,raftery_lewis\n";
    auto emit = [&](const std::string& block, const std::string& name,
                    const bnn::Vector& trace) {
      try {
        out << block << ',' << name << ',' << bnn::inefficiency_factor(trace)
            << ',' << bnn::raftery_lewis(trace) << '\n';
      } catch (const std::exception&) {
        out << block << ',' << name << ",nan,nan\n";
      }
    };
    const Eigen::Index S = chain.size();
    const Eigen::Index K = chain.states.front().K();
    const Eigen::Index Q = chain.states.front().Q();
    bnn::Vector trace(S);
    for (Eigen::Index j = 0; j < K; ++j) {
      for (Eigen::Index s = 0; s < S; ++s)
        trace[s] = chain.states[static_cast<std::size_t>(s)].gamma[j];
      emit("gamma", "gamma" + std::to_string(j + 1), trace);
    }
    for (Eigen::Index q = 0; q < Q; ++q) {
      for (Eigen::Index s = 0; s < S; ++s)
        trace[s] = chain.states[static_cast<std::size_t>(s)].beta[q];
      emit("beta", "beta" + std::to_string(q + 1), trace);
    }
    for (Eigen::Index s = 0; s < S; ++s)
      trace[s] = chain.states[static_cast<std::size_t>(s)].sv.mu;
    emit("sv", "mu_nu", trace);
    for (Eigen::Index s = 0; s < S; ++s)
      trace[s] = chain.states[static_cast<std::size_t>(s)].sv.state_var;
    emit("sv", "xi_sq", trace);
  }

  write_manifest(out_dir, "fit", bnn::chain_io::config_to_json(cfg));
  std::cout << "retained " << chain.size() << " draws in " << out_dir
            << "/chain (" << chain.wall_seconds << " s)\n";
  return kExitOk;
}

int cmd_forecast(const std::string& chain_dir, const std::string& xnew_path,
                 int horizon, const std::string& out_dir) {
  auto loaded = bnn::chain_io::load(chain_dir);
  const auto table = bnn::csv::read_table(xnew_path);
  const Eigen::Index K = loaded.chain.states.front().K();
  if (table.values.cols() != K)
    throw bnn::DataError(xnew_path + ": expected " + std::to_string(K) +
                         " covariate columns, got " +
                         std::to_string(table.values.cols()));

  fs::create_directories(out_dir);
  std::ofstream draws(out_dir + "/draws.csv");
  draws.precision(17);
  draws << "period,draw_index,mean,variance,draw\n";
  std::ofstream summary(out_dir + "/summary.csv");
  summary.precision(10);
  summary << "period,mean,sd,q5,q25,q50,q75,q95\n";

  bnn::Rng rng(bnn::derive_seed(loaded.config.seed, 0xf0f0));
  for (Eigen::Index i = 0; i < table.values.rows(); ++i) {
    const auto pd =
        bnn::predict(loaded.chain, table.values.row(i).transpose(), horizon,
                     rng);
    bnn::Vector v(static_cast<Eigen::Index>(pd.size()));
    double mean = 0.0;
    for (std::size_t s = 0; s < pd.size(); ++s) {
      draws << i << ',' << s << ',' << pd[s].mean << ',' << pd[s].variance
            << ',' << pd[s].draw << '\n';
      v[static_cast<Eigen::Index>(s)] = pd[s].draw;
      mean += pd[s].mean;
    }
    mean /= static_cast<double>(pd.size());
    const double sd = std::sqrt(
        (v.array() - v.mean()).square().sum() /
        std::max<double>(1.0, static_cast<double>(v.size() - 1)));
    summary << i << ',' << mean << ',' << sd;
    for (double q : {0.05, 0.25, 0.50, 0.75, 0.95})
      summary << ',' << bnn::detail::empirical_quantile(v, q);
    summary << '\n';
  }

  write_manifest(out_dir, "forecast",
                 json{{"chain", chain_dir},
                      {"x_new", xnew_path},
                      {"horizon", horizon}});
  return kExitOk;
}

std::vector<bnn::ForecastRecord> read_forecast_records(
    const std::string& path, const bnn::Vector& realized) {
  const auto t = bnn::csv::read_table(path);
  if (t.header.size() < 5 || t.header[0] != "period")
    throw bnn::DataError(path + ": expected forecast draws schema "
                         "(period,draw_index,mean,variance,draw)");
  std::vector<bnn::ForecastRecord> records;
  for (Eigen::Index i = 0; i < t.values.rows(); ++i) {
    const auto period = static_cast<std::size_t>(t.values(i, 0));
    if (period >= records.size()) records.resize(period + 1);
    bnn::PredictiveDraw d;
    d.mean = t.values(i, 2);
    d.variance = t.values(i, 3);
    d.draw = t.values(i, 4);
    records[period].draws.push_back(d);
  }
  if (static_cast<Eigen::Index>(records.size()) != realized.size())
    throw bnn::DataError(path + ": forecast periods (" +
                         std::to_string(records.size()) +
                         ") do not align with realized values (" +
                         std::to_string(realized.size()) + ")");
  for (std::size_t i = 0; i < records.size(); ++i) {
    records[i].realized = realized[static_cast<Eigen::Index>(i)];
    records[i].period = std::to_string(i);
  }
  return records;
}

int cmd_evaluate(const std::string& model_path, const std::string& bench_path,
                 const std::string& realized_path, bool with_dm,
                 bool with_fluct, const std::string& out_path) {
  const auto realized_table = bnn::csv::read_table(realized_path);
  const bnn::Vector realized =
      realized_table.values.col(realized_table.values.cols() - 1);

  const auto model = read_forecast_records(model_path, realized);
  const auto bench = read_forecast_records(bench_path, realized);

  std::ofstream out(out_path);
  if (!out) throw bnn::DataError("cannot write " + out_path);
  out.precision(10);
  out << "model,metric,value\n";

  const auto lpl_m = bnn::lpl(model);
  const auto lpl_b = bnn::lpl(bench);
  auto emit = [&](const std::string& m, const std::string& metric, double v) {
    out << m << ',' << metric << ',' << v << '\n';
  };
  emit("model", "rmse", bnn::rmse(model));
  emit("benchmark", "rmse", bnn::rmse(bench));
  emit("model", "rel_rmse", bnn::relative_rmse(model, bench));
  emit("model", "qs25", bnn::quantile_score(model, 0.25));
  emit("benchmark", "qs25", bnn::quantile_score(bench, 0.25));
  emit("model", "qs75", bnn::quantile_score(model, 0.75));
  emit("benchmark", "qs75", bnn::quantile_score(bench, 0.75));
  emit("model", "lpl", lpl_m.cumulative);
  emit("benchmark", "lpl", lpl_b.cumulative);
  emit("model", "rel_lpl", lpl_m.cumulative - lpl_b.cumulative);

  if (with_dm) {
    bnn::Vector loss_m(realized.size()), loss_b(realized.size());
    for (Eigen::Index i = 0; i < realized.size(); ++i) {
      const double em =
          bnn::detail::point_forecast(model[static_cast<std::size_t>(i)]) -
          realized[i];
      const double eb =
          bnn::detail::point_forecast(bench[static_cast<std::size_t>(i)]) -
          realized[i];
      loss_m[i] = em * em;
      loss_b[i] = eb * eb;
    }
    try {
      const auto dm = bnn::dm_test(loss_m, loss_b, 1);
      emit("model", "dm_statistic", dm.statistic);
      emit("model", "dm_p_value", dm.p_value);
    } catch (const bnn::DegenerateTestError&) {
      out << "model,dm_statistic,nan\n";
    }
  }
  if (with_fluct) {
    const bnn::Vector diff = lpl_m.per_period - lpl_b.per_period;
    try {
      const auto fl = bnn::fluctuation_test(diff, 0.3);
      emit("model", "fluctuation_max", fl.statistics.maxCoeff());
      emit("model", "fluctuation_min", fl.statistics.minCoeff());
      emit("model", "fluctuation_critical_value", fl.critical_value);
    } catch (const bnn::DegenerateTestError&) {
      out << "model,fluctuation_max,nan\n";
    } catch (const bnn::ArgumentError&) {
      // sample too short for the requested window
      out << "model,fluctuation_max,nan\n";
    }
  }
  return kExitOk;
}

int cmd_replicate_table2(const std::string& config_path,
                         const std::string& out_path) {
  const json j = config_path.empty() ? json::object() : load_json(config_path);

  std::vector<int> Ks = j.value("K", std::vector<int>{30, 60});
  const int reps = j.value("replications", 5);
  const int threads = j.value("threads", 4);

  bnn::SamplerConfig base;
  base.n_draws = j.value("n_draws", 3000);
  base.n_burn = j.value("n_burn", 1000);
  base.nuts_max_depth = j.value("nuts_max_depth", 8);
  base.sv_enabled = j.value("sv_enabled", true);
  base.seed = j.value("seed", 1);
  base.validate();

  std::ofstream out(out_path);
  if (!out) throw bnn::DataError("cannot write " + out_path);
  out.precision(6);
  out << "K,sparsity,noise,dgp,model,rel_rmse,rel_qs25,rel_qs75,"
         "bench_rmse,replications,status\n";

  for (int K : Ks) {
    for (auto sparsity : {bnn::Sparsity::Dense, bnn::Sparsity::Sparse}) {
      for (auto noise : {bnn::NoiseKind::Hetero, bnn::NoiseKind::Homo}) {
        for (auto kind : {bnn::DgpKind::Nonlinear, bnn::DgpKind::Linear}) {
          bnn::DgpConfig dgp;
          dgp.K = K;
          dgp.sparsity = sparsity;
          dgp.noise = noise;
          dgp.dgp_kind = kind;
          dgp.T = j.value("T", 200);
          dgp.train_size = j.value("train_size", 100);

          const auto cell =
              bnn::run_table_cell(dgp, base, reps, base.seed, threads);
          const std::string prefix =
              std::to_string(K) + ',' +
              (sparsity == bnn::Sparsity::Dense ? "dense" : "sparse") + ',' +
              (noise == bnn::NoiseKind::Homo ? "homo" : "hetero") + ',' +
              (kind == bnn::DgpKind::Linear ? "linear" : "nonlinear");
          const std::string status =
              cell.failures == 0 ? "ok"
                                 : "partial(" + std::to_string(cell.failures) +
                                       " failed)";
          out << prefix << ",BNN," << cell.rel_rmse_bnn << ','
              << cell.rel_qs25_bnn << ',' << cell.rel_qs75_bnn << ','
              << cell.bench_rmse << ',' << cell.replications << ',' << status
              << '\n';
          out << prefix << ",BNN-NS," << cell.rel_rmse_bnn_ns << ','
              << cell.rel_qs25_bnn_ns << ',' << cell.rel_qs75_bnn_ns << ','
              << cell.bench_rmse << ',' << cell.replications << ',' << status
              << '\n';
          out.flush();
          std::cout << prefix << " done (" << cell.replications << "/" << reps
                    << " replications)\n";
        }
      }
    }
  }
  return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian neural network with shrinkage priors and SV"};
  app.require_subcommand(1);

  std::string config_path, out_dir, data_path, chain_dir, xnew_path;
  std::string model_fc, bench_fc, realized_path, out_path;
  int horizon = 1;
  bool with_dm = false, with_fluct = false;

  auto* sim = app.add_subcommand("simulate", "generate a synthetic dataset");
  sim->add_option("--config", config_path, "DGP config JSON")->required();
  sim->add_option("--out", out_dir, "output directory")->required();

  auto* fit = app.add_subcommand("fit", "fit the model to a CSV dataset");
  fit->add_option("--data", data_path, "dataset CSV")->required();
  fit->add_option("--config", config_path, "sampler config JSON");
  fit->add_option("--out", out_dir, "output directory")->required();

  auto* fc = app.add_subcommand("forecast", "predictive draws from a chain");
  fc->add_option("--chain", chain_dir, "chain archive directory")->required();
  fc->add_option("--x-new", xnew_path, "covariate CSV")->required();
  fc->add_option("--horizon", horizon, "forecast horizon");
  fc->add_option("--out", out_dir, "output directory")->required();

  auto* ev = app.add_subcommand("evaluate", "score two forecast files");
  ev->add_option("--model", model_fc, "model draws.csv")->required();
  ev->add_option("--benchmark", bench_fc, "benchmark draws.csv")->required();
  ev->add_option("--realized", realized_path, "realized values CSV")
      ->required();
  ev->add_flag("--dm", with_dm, "Diebold-Mariano test on squared errors");
  ev->add_flag("--fluctuation", with_fluct, "fluctuation test on LPL diff");
  ev->add_option("--out", out_path, "metrics CSV path")->required();

  auto* tab = app.add_subcommand("replicate-table2",
                                 "run the full simulation grid");
  tab->add_option("--config", config_path, "grid config JSON");
  tab->add_option("--out", out_path, "table CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (sim->parsed()) return cmd_simulate(config_path, out_dir);
    if (fit->parsed()) return cmd_fit(data_path, config_path, out_dir);
    if (fc->parsed()) return cmd_forecast(chain_dir, xnew_path, horizon, out_dir);
    if (ev->parsed())
      return cmd_evaluate(model_fc, bench_fc, realized_path, with_dm,
                          with_fluct, out_path);
    if (tab->parsed()) return cmd_replicate_table2(config_path, out_path);
  } catch (const bnn::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const bnn::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const bnn::DimensionError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const bnn::ArgumentError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitOk;
}
