#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "bnn/sampler.hpp"

using namespace bnn;

namespace {

Dataset noise_data(Eigen::Index T, Eigen::Index K, std::uint64_t seed,
                   double sd = 1.0) {
  Rng rng(seed);
  Dataset d;
  d.X = Matrix(T, K);
  for (Eigen::Index t = 0; t < T; ++t)
    for (Eigen::Index j = 0; j < K; ++j) d.X(t, j) = rng.normal();
  d.y = Vector(T);
  for (Eigen::Index t = 0; t < T; ++t) d.y[t] = rng.normal(0.0, sd);
  return d;
}

} // namespace

TEST_CASE("activation weights are uniform when the loading is zero") {
  Dataset d = noise_data(30, 2, 81);
  SamplerConfig cfg;
  Rng rng(82);
  NetworkState s = new_network_state(d, 1, cfg, rng);
  s.beta[0] = 0.0;
  s.sv.log_vol.setZero();

  const Vector log_w = activation_log_weights(0, d.y, s, d);
  for (int m = 1; m < 4; ++m)
    CHECK(log_w[m] == Catch::Approx(log_w[0]).margin(1e-12));

  // empirical frequencies of the multinomial draw
  int counts[4] = {0, 0, 0, 0};
  const int n = 100000;
  for (int i = 0; i < n; ++i)
    counts[static_cast<int>(draw_activation(0, d.y, s, d, rng)) - 1]++;
  for (int m = 0; m < 4; ++m)
    CHECK(static_cast<double>(counts[m]) / n ==
          Catch::Approx(0.25).margin(0.02));
}

TEST_CASE("a manufactured sigmoid signal is detected with certainty") {
  Rng gen(83);
  const Eigen::Index T = 80;
  Dataset d;
  d.X = Matrix(T, 1);
  for (Eigen::Index t = 0; t < T; ++t) d.X(t, 0) = gen.normal(0.0, 3.0);
  d.y = Vector::Zero(T);

  SamplerConfig cfg;
  Rng rng(84);
  NetworkState s = new_network_state(d, 1, cfg, rng);
  s.beta[0] = 2.0;
  s.kappa(0, 0) = 1.0;
  s.zeta[0] = 0.0;
  s.sv.log_vol.setConstant(std::log(0.05));

  Vector residual(T);
  for (Eigen::Index t = 0; t < T; ++t)
    residual[t] = 2.0 * act_eval(ActivationKind::Sigmoid, d.X(t, 0));

  const Vector log_w = activation_log_weights(0, residual, s, d);
  const double m = log_w.maxCoeff();
  const Vector w = (log_w.array() - m).exp();
  const double p_sigmoid = w[1] / w.sum();
  CHECK(p_sigmoid > 0.99);
}

TEST_CASE("activation kinds agreeing on the realized range tie exactly") {
  Rng gen(85);
  const Eigen::Index T = 40;
  Dataset d;
  d.X = Matrix(T, 1);
  for (Eigen::Index t = 0; t < T; ++t)
    d.X(t, 0) = 0.5 + std::abs(gen.normal()); // strictly positive
  d.y = Vector::Zero(T);

  SamplerConfig cfg;
  Rng rng(86);
  NetworkState s = new_network_state(d, 1, cfg, rng);
  s.beta[0] = 1.0;
  s.kappa(0, 0) = 1.0;
  s.zeta[0] = 0.1; // z = x + 0.1 > 0: relu and leakyrelu coincide
  s.sv.log_vol.setZero();

  const Vector log_w = activation_log_weights(0, d.y, s, d);
  CHECK(std::abs(log_w[0] - log_w[2]) < 1e-12);
}

TEST_CASE("common draw sums the per-neuron leave-one-out weights") {
  Dataset d = noise_data(20, 2, 87);
  SamplerConfig cfg;
  Rng rng(88);
  NetworkState s = new_network_state(d, 2, cfg, rng);
  s.beta << 0.8, -0.6;
  s.kappa << 0.5, -0.3, 0.2, 0.9;
  s.zeta << 0.1, -0.2;
  s.delta = {ActivationKind::Tanh, ActivationKind::Relu};
  s.sv.log_vol.setConstant(std::log(0.5));

  // expected categorical weights computed from scratch
  const Vector full_mean = conditional_mean(s, d.X);
  Vector log_w = Vector::Constant(4, std::log(0.25));
  for (Eigen::Index q = 0; q < 2; ++q) {
    const Vector z = (d.X * s.kappa.col(q)).array() + s.zeta[q];
    Vector resid = d.y - full_mean;
    for (Eigen::Index t = 0; t < d.T(); ++t)
      resid[t] += s.beta[q] *
                  act_eval(s.delta[static_cast<std::size_t>(q)], z[t]);
    for (int m = 0; m < 4; ++m) {
      double ss = 0.0;
      for (Eigen::Index t = 0; t < d.T(); ++t) {
        const double e =
            resid[t] -
            s.beta[q] * act_eval(kAllActivations[static_cast<std::size_t>(m)],
                                 z[t]);
        ss += e * e / 0.5;
      }
      log_w[m] += -0.5 * ss;
    }
  }
  const Vector w = (log_w.array() - log_w.maxCoeff()).exp();
  const Vector prob = w / w.sum();

  int counts[4] = {0, 0, 0, 0};
  const int n = 100000;
  for (int i = 0; i < n; ++i)
    counts[static_cast<int>(draw_common_activation(s, d, rng)) - 1]++;
  for (int m = 0; m < 4; ++m)
    CHECK(static_cast<double>(counts[m]) / n ==
          Catch::Approx(prob[m]).margin(0.02));
}

TEST_CASE("default configuration carries the published chain lengths") {
  SamplerConfig cfg;
  CHECK(cfg.n_draws == 20000);
  CHECK(cfg.n_burn == 10000);
  CHECK_NOTHROW(cfg.validate());
  cfg.n_burn = cfg.n_draws;
  CHECK_THROWS_AS(cfg.validate(), ArgumentError);
}

TEST_CASE("retained draw count equals n_draws minus n_burn") {
  Dataset d = noise_data(25, 2, 87);
  SamplerConfig cfg;
  cfg.n_draws = 30;
  cfg.n_burn = 12;
  cfg.Q = 2;
  cfg.seed = 88;
  Rng rng(cfg.seed);
  const ChainOutput chain = run_chain(d, cfg, rng);
  CHECK(chain.size() == 18);
  CHECK(chain.log_post.size() == 18);
  CHECK(chain.qstar.size() == 18);
}

TEST_CASE("thinning subsamples the retained draws") {
  Dataset d = noise_data(25, 2, 89);
  SamplerConfig cfg;
  cfg.n_draws = 30;
  cfg.n_burn = 10;
  cfg.Q = 1;
  cfg.thin = 5;
  Rng rng(90);
  const ChainOutput chain = run_chain(d, cfg, rng);
  CHECK(chain.size() == 4); // sweeps 10, 15, 20, 25
}

TEST_CASE("chains are reproducible from the seed") {
  Dataset d = noise_data(20, 3, 91);
  SamplerConfig cfg;
  cfg.n_draws = 3;
  cfg.n_burn = 0;
  cfg.Q = 2;

  auto run = [&]() {
    Rng rng(92);
    return run_chain(d, cfg, rng);
  };
  const ChainOutput a = run();
  const ChainOutput b = run();
  REQUIRE(a.size() == b.size());
  for (Eigen::Index s = 0; s < a.size(); ++s) {
    const auto& sa = a.states[static_cast<std::size_t>(s)];
    const auto& sb = b.states[static_cast<std::size_t>(s)];
    CHECK(sa.gamma == sb.gamma);
    CHECK(sa.beta == sb.beta);
    CHECK(sa.kappa == sb.kappa);
    CHECK(sa.sv.log_vol == sb.sv.log_vol);
    CHECK(sa.delta == sb.delta);
  }
}

TEST_CASE("an infinite shortcut threshold keeps loadings near zero on noise") {
  Dataset d = noise_data(60, 3, 93);
  SamplerConfig cfg;
  cfg.n_draws = 400;
  cfg.n_burn = 200;
  cfg.Q = 3;
  cfg.mgp_threshold = 1e300; // every neuron refreshed from its prior
  cfg.sv_enabled = false;
  Rng rng(94);
  const ChainOutput chain = run_chain(d, cfg, rng);
  const Matrix beta = chain.beta_draws();
  CHECK(beta.cwiseAbs().mean() < 0.5);
}

TEST_CASE("linear-only mode matches an independent horseshoe sampler") {
  // Benchmark restriction: y = x'gamma + eps, horseshoe on gamma, constant
  // variance. The reference below is written directly from the conjugate
  // formulas with its own RNG usage.
  Rng gen(95);
  const Eigen::Index T = 100, K = 3;
  Dataset d;
  d.X = Matrix(T, K);
  for (Eigen::Index t = 0; t < T; ++t)
    for (Eigen::Index j = 0; j < K; ++j) d.X(t, j) = gen.normal();
  Vector gamma_true(K);
  gamma_true << 1.0, 0.0, -0.5;
  d.y = d.X * gamma_true;
  for (Eigen::Index t = 0; t < T; ++t) d.y[t] += gen.normal(0.0, 0.3);

  // reference sampler
  std::mt19937_64 eng(96);
  std::normal_distribution<double> nd;
  auto rgamma = [&](double shape, double rate) {
    std::gamma_distribution<double> g(shape, 1.0 / rate);
    return g(eng);
  };
  Vector gamma = Vector::Zero(K);
  Vector phi2 = Vector::Ones(K), aux_c = Vector::Ones(K);
  double lam2 = 1.0, aux_d = 1.0, sigma2 = 1.0;
  const int n_ref = 5000, burn_ref = 500;
  std::vector<double> ref_draws;
  ref_draws.reserve(n_ref);
  const Matrix xtx = d.X.transpose() * d.X;
  const Vector xty = d.X.transpose() * d.y;
  for (int it = 0; it < n_ref + burn_ref; ++it) {
    Matrix prec = xtx / sigma2;
    for (Eigen::Index j = 0; j < K; ++j)
      prec(j, j) += 1.0 / (lam2 * phi2[j]);
    Eigen::LLT<Matrix> llt(prec);
    Vector mean = llt.solve(xty / sigma2);
    Vector z(K);
    for (Eigen::Index j = 0; j < K; ++j) z[j] = nd(eng);
    llt.matrixU().solveInPlace(z);
    gamma = mean + z;

    for (Eigen::Index j = 0; j < K; ++j)
      phi2[j] = 1.0 / rgamma(1.0, 1.0 / aux_c[j] +
                                      gamma[j] * gamma[j] / (2.0 * lam2));
    double s = 0.0;
    for (Eigen::Index j = 0; j < K; ++j)
      s += gamma[j] * gamma[j] / (2.0 * phi2[j]);
    lam2 = 1.0 / rgamma((K + 1.0) / 2.0, 1.0 / aux_d + s);
    for (Eigen::Index j = 0; j < K; ++j)
      aux_c[j] = 1.0 / rgamma(1.0, 1.0 + 1.0 / phi2[j]);
    aux_d = 1.0 / rgamma(1.0, 1.0 + 1.0 / lam2);

    const Vector resid = d.y - d.X * gamma;
    sigma2 = 1.0 / rgamma(0.01 + T / 2.0, 0.01 + 0.5 * resid.squaredNorm());

    if (it >= burn_ref) ref_draws.push_back(gamma[0]);
  }

  SamplerConfig cfg;
  cfg.n_draws = 5500;
  cfg.n_burn = 500;
  cfg.linear_only = true;
  cfg.sv_enabled = false;
  Rng rng(97);
  const ChainOutput chain = run_chain(d, cfg, rng);
  std::vector<double> draws;
  draws.reserve(chain.states.size());
  for (const auto& st : chain.states) draws.push_back(st.gamma[0]);

  // two-sample Kolmogorov-Smirnov
  std::sort(ref_draws.begin(), ref_draws.end());
  std::sort(draws.begin(), draws.end());
  const double n1 = static_cast<double>(ref_draws.size());
  const double n2 = static_cast<double>(draws.size());
  double ks = 0.0;
  std::size_t i = 0, j = 0;
  while (i < ref_draws.size() && j < draws.size()) {
    if (ref_draws[i] <= draws[j])
      ++i;
    else
      ++j;
    ks = std::max(ks, std::abs(static_cast<double>(i) / n1 -
                               static_cast<double>(j) / n2));
  }
  const double en = std::sqrt(n1 * n2 / (n1 + n2));
  const double lambda = (en + 0.12 + 0.11 / en) * ks;
  double p = 0.0;
  for (int k = 1; k <= 100; ++k)
    p += 2.0 * std::pow(-1.0, k - 1) * std::exp(-2.0 * k * k * lambda * lambda);
  CHECK(p > 0.01);
}

TEST_CASE("chain log density is the Gaussian likelihood") {
  Dataset d = noise_data(10, 2, 98);
  SamplerConfig cfg;
  Rng rng(99);
  NetworkState s = new_network_state(d, 1, cfg, rng);
  s.sv.log_vol.setZero();
  const Vector resid = d.y - conditional_mean(s, d.X);
  const double expect =
      -0.5 * d.T() * std::log(2.0 * M_PI) - 0.5 * resid.squaredNorm();
  CHECK(chain_log_density(s, d) == Catch::Approx(expect));
}
