#include <catch2/catch_amalgamated.hpp>

#include "bnn/sv.hpp"

using namespace bnn;

TEST_CASE("log-chi-squared mixture weights sum to one") {
  double s = 0.0;
  for (double p : LogChiSqMixture::prob) s += p;
  CHECK(s == Catch::Approx(1.0).margin(1e-5));
}

TEST_CASE("FFBS matches the exact Gaussian smoother on a small system") {
  const Eigen::Index T = 8;
  const double mu = -1.0, rho = 0.6, xi2 = 0.3;

  Rng gen(41);
  Vector ystar(T);
  std::vector<int> s(static_cast<std::size_t>(T));
  for (Eigen::Index t = 0; t < T; ++t) {
    ystar[t] = gen.normal(-1.0, 1.5);
    s[static_cast<std::size_t>(t)] = gen.uniform_int(0, 9);
  }

  // exact posterior: nu ~ N(mu 1, Sigma_AR), observed oy_t = nu_t + e_t
  Matrix prior_cov(T, T);
  for (Eigen::Index i = 0; i < T; ++i)
    for (Eigen::Index j = 0; j < T; ++j)
      prior_cov(i, j) = xi2 / (1.0 - rho * rho) *
                        std::pow(rho, std::abs(double(i - j)));
  Matrix prior_prec = prior_cov.inverse();
  Matrix post_prec = prior_prec;
  Vector b = prior_prec * Vector::Constant(T, mu);
  for (Eigen::Index t = 0; t < T; ++t) {
    const int j = s[static_cast<std::size_t>(t)];
    const double w = 1.0 / LogChiSqMixture::var[j];
    post_prec(t, t) += w;
    b[t] += w * (ystar[t] - LogChiSqMixture::mean[j]);
  }
  Matrix post_cov = post_prec.inverse();
  Vector post_mean = post_cov * b;

  const int n = 20000;
  Vector sum = Vector::Zero(T), sum_sq = Vector::Zero(T);
  Rng rng(42);
  for (int i = 0; i < n; ++i) {
    const Vector nu = detail::sv_ffbs(ystar, s, mu, rho, xi2, rng);
    sum += nu;
    sum_sq += nu.cwiseProduct(nu);
  }
  for (Eigen::Index t = 0; t < T; ++t) {
    const double mean = sum[t] / n;
    const double var = sum_sq[t] / n - mean * mean;
    const double se = std::sqrt(post_cov(t, t) / n);
    CHECK(std::abs(mean - post_mean[t]) < 4.0 * se);
    CHECK(var == Catch::Approx(post_cov(t, t)).epsilon(0.10));
  }
}

TEST_CASE("path collapses to mu as the state variance vanishes") {
  const Eigen::Index T = 50;
  const double mu = -2.0;
  Rng gen(43);
  Vector ystar(T);
  std::vector<int> s(static_cast<std::size_t>(T));
  for (Eigen::Index t = 0; t < T; ++t) {
    ystar[t] = gen.normal(-2.0, 2.0);
    s[static_cast<std::size_t>(t)] = gen.uniform_int(0, 9);
  }

  double prev = std::numeric_limits<double>::infinity();
  for (double xi2 : {1e-2, 1e-4, 1e-6}) {
    Rng rng(44);
    const Vector nu = detail::sv_ffbs(ystar, s, mu, 0.0, xi2, rng);
    const double dev = (nu.array() - mu).abs().maxCoeff();
    CHECK(dev < prev);
    prev = dev;
  }
}

TEST_CASE("SV block recovers a homoskedastic variance level") {
  const Eigen::Index T = 200;
  Rng gen(45);
  Vector residuals(T);
  for (Eigen::Index t = 0; t < T; ++t)
    residuals[t] = gen.normal(0.0, std::sqrt(0.1));

  SvState state;
  state.log_vol = Vector::Constant(T, std::log(0.1));
  state.mu = std::log(0.1);
  state.rho = 0.5;
  state.state_var = 0.01;

  Rng rng(46);
  Vector mean_var = Vector::Zero(T);
  int kept = 0;
  for (int sweep = 0; sweep < 2000; ++sweep) {
    state = sv_update(residuals, state, rng);
    if (sweep >= 1000) {
      mean_var += state.variances();
      ++kept;
    }
  }
  mean_var /= static_cast<double>(kept);

  int within = 0;
  for (Eigen::Index t = 0; t < T; ++t)
    if (mean_var[t] > 0.05 && mean_var[t] < 0.2) ++within;
  CHECK(within >= static_cast<int>(0.9 * static_cast<double>(T)));
}

TEST_CASE("fix_rho_zero pins the autoregressive coefficient") {
  const Eigen::Index T = 80;
  Rng gen(47);
  Vector residuals(T);
  for (Eigen::Index t = 0; t < T; ++t) residuals[t] = gen.normal(0.0, 0.5);

  SvState state;
  state.log_vol = Vector::Constant(T, std::log(0.25));
  state.mu = std::log(0.25);
  state.rho = 0.0;
  state.state_var = 0.01;

  SvOptions opt;
  opt.fix_rho_zero = true;
  Rng rng(48);
  for (int sweep = 0; sweep < 50; ++sweep) {
    state = sv_update(residuals, state, rng, opt);
    CHECK(state.rho == 0.0);
  }
}

TEST_CASE("homoskedastic mode reduces to one conjugate variance draw") {
  const Eigen::Index T = 2000;
  Rng gen(49);
  Vector residuals(T);
  for (Eigen::Index t = 0; t < T; ++t)
    residuals[t] = gen.normal(0.0, std::sqrt(0.1));

  SvState state;
  state.log_vol = Vector::Constant(T, 0.0);

  Rng rng(50);
  double acc = 0.0;
  const int n = 500;
  for (int i = 0; i < n; ++i) {
    const SvState out = sv_update_homoskedastic(residuals, state, rng);
    // constant path
    CHECK(out.log_vol.maxCoeff() == Catch::Approx(out.log_vol.minCoeff()));
    acc += std::exp(out.log_vol[0]);
  }
  CHECK(acc / n == Catch::Approx(0.1).epsilon(0.10));
}

TEST_CASE("degenerate forecast equals exp(mu)") {
  SvState state;
  state.log_vol = Vector::Constant(10, -1.0);
  state.mu = -1.0;
  state.rho = 0.0;
  state.state_var = 1e-18;
  Rng rng(51);
  const Vector f = sv_forecast(state, 4, rng);
  for (int h = 0; h < 4; ++h)
    CHECK(f[h] == Catch::Approx(std::exp(-1.0)).margin(1e-6));
}

TEST_CASE("rho = 0 forecasts are lognormal with the analytic mean") {
  SvState state;
  state.log_vol = Vector::Constant(10, 0.3);
  state.mu = -1.5;
  state.rho = 0.0;
  state.state_var = 0.09;
  Rng rng(52);
  double acc = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) acc += sv_forecast(state, 1, rng)[0];
  const double expect = std::exp(state.mu + state.state_var / 2.0);
  CHECK(acc / n == Catch::Approx(expect).epsilon(0.02));
}

TEST_CASE("three-step forecast follows the AR recursion in the mean") {
  SvState state;
  state.log_vol = Vector::Constant(10, 1.0);
  state.mu = -1.0;
  state.rho = 0.9;
  state.state_var = 0.04;
  Rng rng(53);
  double acc = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) acc += std::log(sv_forecast(state, 3, rng)[2]);
  const double expect =
      state.mu + std::pow(0.9, 3) * (state.log_vol[9] - state.mu);
  const double var3 =
      state.state_var * (1.0 + 0.81 + 0.81 * 0.81);
  CHECK(std::abs(acc / n - expect) < 4.0 * std::sqrt(var3 / n));
}

TEST_CASE("sv_update validates dimensions") {
  SvState state;
  state.log_vol = Vector::Constant(10, 0.0);
  Vector residuals = Vector::Zero(5);
  Rng rng(54);
  CHECK_THROWS_AS(sv_update(residuals, state, rng), DimensionError);
}
