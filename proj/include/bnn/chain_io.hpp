#ifndef BNN_CHAIN_IO_HPP
#define BNN_CHAIN_IO_HPP

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bnn/csv.hpp"
#include "bnn/types.hpp"

namespace bnn {

// Chain archive layout: one CSV per parameter block plus a JSON manifest.
// Stores everything prediction and the posterior summaries need; the
// horseshoe/MGP auxiliary states are not archived.

namespace chain_io {

inline nlohmann::json config_to_json(const SamplerConfig& c) {
  return {{"n_draws", c.n_draws},
          {"n_burn", c.n_burn},
          {"Q", c.Q},
          {"mgp_threshold", c.mgp_threshold},
          {"neuron_threshold", c.neuron_threshold},
          {"sv_enabled", c.sv_enabled},
          {"sv_fix_rho_zero", c.sv_fix_rho_zero},
          {"linear_only", c.linear_only},
          {"common_activation", c.common_activation},
          {"nuts_target_accept", c.nuts_target_accept},
          {"nuts_max_depth", c.nuts_max_depth},
          {"thin", c.thin},
          {"seed", c.seed}};
}

inline SamplerConfig config_from_json(const nlohmann::json& j) {
  SamplerConfig c;
  c.n_draws = j.value("n_draws", c.n_draws);
  c.n_burn = j.value("n_burn", c.n_burn);
  c.Q = j.value("Q", c.Q);
  c.mgp_threshold = j.value("mgp_threshold", c.mgp_threshold);
  c.neuron_threshold = j.value("neuron_threshold", c.neuron_threshold);
  c.sv_enabled = j.value("sv_enabled", c.sv_enabled);
  c.sv_fix_rho_zero = j.value("sv_fix_rho_zero", c.sv_fix_rho_zero);
  c.linear_only = j.value("linear_only", c.linear_only);
  c.common_activation = j.value("common_activation", c.common_activation);
  c.nuts_target_accept = j.value("nuts_target_accept", c.nuts_target_accept);
  c.nuts_max_depth = j.value("nuts_max_depth", c.nuts_max_depth);
  c.thin = j.value("thin", c.thin);
  c.seed = j.value("seed", c.seed);
  return c;
}

inline void save(const std::string& dir, const ChainOutput& chain,
                 const SamplerConfig& config) {
  namespace fs = std::filesystem;
  if (chain.states.empty()) throw ArgumentError("chain_io::save: empty chain");
  fs::create_directories(dir);

  const Eigen::Index S = chain.size();
  const Eigen::Index K = chain.states.front().K();
  const Eigen::Index Q = chain.states.front().Q();

  auto header_seq = [](const std::string& stem, Eigen::Index n) {
    std::vector<std::string> h;
    for (Eigen::Index i = 0; i < n; ++i)
      h.push_back(stem + std::to_string(i + 1));
    return h;
  };

  Matrix gamma(S, K), beta(S, std::max<Eigen::Index>(Q, 1));
  Matrix zeta(S, std::max<Eigen::Index>(Q, 1));
  Matrix delta(S, std::max<Eigen::Index>(Q, 1));
  Matrix kappa(S, std::max<Eigen::Index>(K * Q, 1));
  Matrix sv(S, 4);
  Matrix misc(S, 2);
  for (Eigen::Index s = 0; s < S; ++s) {
    const auto& st = chain.states[static_cast<std::size_t>(s)];
    gamma.row(s) = st.gamma.transpose();
    for (Eigen::Index q = 0; q < Q; ++q) {
      beta(s, q) = st.beta[q];
      zeta(s, q) = st.zeta[q];
      delta(s, q) =
          static_cast<double>(static_cast<int>(st.delta[static_cast<std::size_t>(q)]));
      for (Eigen::Index j = 0; j < K; ++j)
        kappa(s, q * K + j) = st.kappa(j, q);
    }
    sv(s, 0) = st.sv.mu;
    sv(s, 1) = st.sv.rho;
    sv(s, 2) = st.sv.state_var;
    sv(s, 3) = st.sv.log_vol[st.sv.T() - 1];
    misc(s, 0) = chain.log_post[static_cast<std::size_t>(s)];
    misc(s, 1) = chain.qstar[static_cast<std::size_t>(s)];
  }

  csv::write_table(dir + "/gamma.csv", header_seq("gamma", K), gamma);
  if (Q > 0) {
    csv::write_table(dir + "/beta.csv", header_seq("beta", Q), beta);
    csv::write_table(dir + "/zeta.csv", header_seq("zeta", Q), zeta);
    csv::write_table(dir + "/delta.csv", header_seq("delta", Q), delta);
    std::vector<std::string> kh;
    for (Eigen::Index q = 0; q < Q; ++q)
      for (Eigen::Index j = 0; j < K; ++j)
        kh.push_back("kappa" + std::to_string(j + 1) + "_" +
                     std::to_string(q + 1));
    csv::write_table(dir + "/kappa.csv", kh, kappa);
  }
  csv::write_table(dir + "/sv.csv", {"mu", "rho", "xi_sq", "nu_last"}, sv);
  csv::write_table(dir + "/trace.csv", {"log_post", "qstar"}, misc);

  nlohmann::json manifest = {
      {"K", K},
      {"Q", Q},
      {"retained", S},
      {"config", config_to_json(config)},
      {"format", "bnn-chain-csv-v1"},
  };
  std::ofstream mf(dir + "/manifest.json");
  if (!mf) throw DataError("cannot write " + dir + "/manifest.json");
  mf << manifest.dump(2) << '\n';
}

struct LoadedChain {
  ChainOutput chain;
  SamplerConfig config;
};

inline LoadedChain load(const std::string& dir) {
  std::ifstream mf(dir + "/manifest.json");
  if (!mf) throw DataError("cannot open " + dir + "/manifest.json");
  nlohmann::json manifest;
  mf >> manifest;
  if (manifest.value("format", "") != "bnn-chain-csv-v1")
    throw DataError(dir + ": unknown chain archive format");

  const Eigen::Index K = manifest.at("K").get<Eigen::Index>();
  const Eigen::Index Q = manifest.at("Q").get<Eigen::Index>();

  LoadedChain out;
  out.config = config_from_json(manifest.at("config"));

  const auto gamma = csv::read_table(dir + "/gamma.csv").values;
  const auto sv = csv::read_table(dir + "/sv.csv").values;
  const auto misc = csv::read_table(dir + "/trace.csv").values;
  Matrix beta, zeta, delta, kappa;
  if (Q > 0) {
    beta = csv::read_table(dir + "/beta.csv").values;
    zeta = csv::read_table(dir + "/zeta.csv").values;
    delta = csv::read_table(dir + "/delta.csv").values;
    kappa = csv::read_table(dir + "/kappa.csv").values;
  }

  const Eigen::Index S = gamma.rows();
  for (Eigen::Index s = 0; s < S; ++s) {
    NetworkState st;
    st.gamma = gamma.row(s).transpose();
    st.beta = Vector::Zero(Q);
    st.zeta = Vector::Zero(Q);
    st.kappa = Matrix::Zero(K, Q);
    st.delta.assign(static_cast<std::size_t>(Q), ActivationKind::Sigmoid);
    for (Eigen::Index q = 0; q < Q; ++q) {
      st.beta[q] = beta(s, q);
      st.zeta[q] = zeta(s, q);
      st.delta[static_cast<std::size_t>(q)] =
          activation_from_code(static_cast<int>(delta(s, q)));
      for (Eigen::Index j = 0; j < K; ++j) st.kappa(j, q) = kappa(s, q * K + j);
    }
    st.hs_gamma = HorseshoeState::ones(K);
    st.hs_kappa.assign(static_cast<std::size_t>(Q), HorseshoeState::ones(K));
    st.mgp = MgpState::ones(Q);
    st.sv.mu = sv(s, 0);
    st.sv.rho = sv(s, 1);
    st.sv.state_var = sv(s, 2);
    st.sv.log_vol = Vector::Constant(1, sv(s, 3));
    out.chain.states.push_back(std::move(st));
    out.chain.log_post.push_back(misc(s, 0));
    out.chain.qstar.push_back(static_cast<int>(misc(s, 1)));
  }
  out.chain.n_draws = out.config.n_draws;
  out.chain.n_burn = out.config.n_burn;
  out.chain.thin = out.config.thin;
  return out;
}

} // namespace chain_io
} // namespace bnn

#endif // BNN_CHAIN_IO_HPP
