#ifndef BNN_SV_HPP
#define BNN_SV_HPP

#include <array>
#include <cmath>

#include "bnn/rng.hpp"
#include "bnn/types.hpp"

namespace bnn {

// 10-component Gaussian mixture approximation to the log-chi^2(1)
// distribution (Omori et al. constants).
struct LogChiSqMixture {
  static constexpr int kComponents = 10;
  static constexpr std::array<double, 10> prob = {
      0.00609, 0.04775, 0.13057, 0.20674, 0.22715,
      0.18842, 0.12047, 0.05591, 0.01575, 0.00115};
  static constexpr std::array<double, 10> mean = {
      1.92677, 1.34744, 0.73504, 0.02266, -0.85173,
      -1.97278, -3.46788, -5.55246, -8.68384, -14.65000};
  static constexpr std::array<double, 10> var = {
      0.11265, 0.17788, 0.26768, 0.40611, 0.62699,
      0.98583, 1.57469, 2.54498, 4.16591, 7.33342};
};

struct SvOptions {
  bool interweave = true;
  bool fix_rho_zero = false;
  double c_off = 1e-8;
  // priors: mu ~ N(0, 10); (rho+1)/2 ~ Beta(25, 5); xi^2 ~ Gamma(1/2, 1/2)
  double mu_prior_var = 10.0;
  double rho_beta_a = 25.0;
  double rho_beta_b = 5.0;
  double xi_sq_prior_rate = 0.5; // equivalently xi ~ N(0, 1)
};

namespace detail {

inline std::vector<int> sv_draw_indicators(const Vector& ystar,
                                           const Vector& nu, Rng& rng) {
  const auto& mix = LogChiSqMixture{};
  (void)mix;
  std::vector<int> s(static_cast<std::size_t>(ystar.size()));
  Vector log_w(LogChiSqMixture::kComponents);
  for (Eigen::Index t = 0; t < ystar.size(); ++t) {
    for (int j = 0; j < LogChiSqMixture::kComponents; ++j) {
      const double resid = ystar[t] - nu[t] - LogChiSqMixture::mean[j];
      log_w[j] = std::log(LogChiSqMixture::prob[j]) -
                 0.5 * std::log(LogChiSqMixture::var[j]) -
                 0.5 * resid * resid / LogChiSqMixture::var[j];
    }
    s[static_cast<std::size_t>(t)] = rng.categorical_log(log_w);
  }
  return s;
}

// Forward-filter backward-sampling for the linear Gaussian system
//   ystar_t = nu_t + m_{s_t} + e_t,  e_t ~ N(0, v_{s_t})
//   nu_t = mu + rho (nu_{t-1} - mu) + w_t,  w_t ~ N(0, xi2)
//   nu_1 ~ N(mu, xi2 / (1 - rho^2))
inline Vector sv_ffbs(const Vector& ystar, const std::vector<int>& s,
                      double mu, double rho, double xi2, Rng& rng) {
  const Eigen::Index T = ystar.size();
  Vector fm(T), fv(T); // filtered mean / variance

  double pred_m = mu;
  double pred_v = xi2 / (1.0 - rho * rho);
  for (Eigen::Index t = 0; t < T; ++t) {
    const int j = s[static_cast<std::size_t>(t)];
    const double oy = ystar[t] - LogChiSqMixture::mean[j];
    const double ov = LogChiSqMixture::var[j];
    const double gain = pred_v / (pred_v + ov);
    fm[t] = pred_m + gain * (oy - pred_m);
    fv[t] = pred_v * (1.0 - gain);
    if (t + 1 < T) {
      pred_m = mu + rho * (fm[t] - mu);
      pred_v = rho * rho * fv[t] + xi2;
    }
  }

  Vector nu(T);
  nu[T - 1] = rng.normal(fm[T - 1], std::sqrt(fv[T - 1]));
  for (Eigen::Index t = T - 2; t >= 0; --t) {
    const double denom = rho * rho * fv[t] + xi2;
    const double gain = fv[t] * rho / denom;
    const double cm = fm[t] + gain * (nu[t + 1] - mu - rho * (fm[t] - mu));
    const double cv = fv[t] - gain * rho * fv[t];
    nu[t] = rng.normal(cm, std::sqrt(std::max(cv, 0.0)));
  }
  return nu;
}

inline double beta_rho_log_prior(double rho, const SvOptions& opt) {
  return (opt.rho_beta_a - 1.0) * std::log((1.0 + rho) / 2.0) +
         (opt.rho_beta_b - 1.0) * std::log((1.0 - rho) / 2.0);
}

// Stationary initial-state contribution to the log likelihood of rho.
inline double rho_init_term(double rho, double z1, double xi2) {
  return 0.5 * std::log(1.0 - rho * rho) -
         (1.0 - rho * rho) * z1 * z1 / (2.0 * xi2);
}

} // namespace detail

// One sweep of the SV block given conditional-mean residuals.
inline SvState sv_update(const Vector& residuals, const SvState& state,
                         Rng& rng, const SvOptions& opt = {}) {
  const Eigen::Index T = residuals.size();
  if (T < 2) throw DimensionError("sv_update: T must be >= 2");
  if (state.T() != T) throw DimensionError("sv_update: path length mismatch");
  state.validate();

  Vector ystar(T);
  for (Eigen::Index t = 0; t < T; ++t)
    ystar[t] = std::log(residuals[t] * residuals[t] + opt.c_off);

  SvState out = state;

  // (a) mixture indicators, then the joint path draw
  auto s = detail::sv_draw_indicators(ystar, out.log_vol, rng);
  out.log_vol =
      detail::sv_ffbs(ystar, s, out.mu, out.rho, out.state_var, rng);

  // (b1) mu | nu, rho, xi2  (Gaussian conjugate)
  {
    const double xi2 = out.state_var;
    const double rho = out.rho;
    double prec = 1.0 / opt.mu_prior_var + (1.0 - rho * rho) / xi2;
    double pm = (1.0 - rho * rho) / xi2 * out.log_vol[0];
    for (Eigen::Index t = 1; t < T; ++t) {
      prec += (1.0 - rho) * (1.0 - rho) / xi2;
      pm += (1.0 - rho) * (out.log_vol[t] - rho * out.log_vol[t - 1]) / xi2;
    }
    out.mu = rng.normal(pm / prec, std::sqrt(1.0 / prec));
  }

  // (b2) rho | nu, mu, xi2: proposal from the conditional of the AR
  // regression, MH correction by the Beta prior and the stationary
  // initial-state term.
  if (!opt.fix_rho_zero) {
    Vector z = out.log_vol.array() - out.mu;
    double sxx = 0.0, sxy = 0.0;
    for (Eigen::Index t = 1; t < T; ++t) {
      sxx += z[t - 1] * z[t - 1];
      sxy += z[t] * z[t - 1];
    }
    if (sxx > 0.0) {
      const double prop_mean = sxy / sxx;
      const double prop_sd = std::sqrt(out.state_var / sxx);
      double cand = 0.0;
      bool ok = false;
      for (int tries = 0; tries < 100; ++tries) {
        cand = rng.normal(prop_mean, prop_sd);
        if (std::abs(cand) < 1.0) {
          ok = true;
          break;
        }
      }
      if (ok) {
        const double log_ratio =
            detail::beta_rho_log_prior(cand, opt) -
            detail::beta_rho_log_prior(out.rho, opt) +
            detail::rho_init_term(cand, z[0], out.state_var) -
            detail::rho_init_term(out.rho, z[0], out.state_var);
        if (std::log(rng.uniform() + 1e-300) < log_ratio) out.rho = cand;
      }
    }
  } else {
    out.rho = 0.0;
  }

  // (b3) xi2 | nu, mu, rho: proposal exactly proportional to the state
  // likelihood (inverse gamma), accepted against the Gamma(1/2, 1/2) prior.
  {
    Vector z = out.log_vol.array() - out.mu;
    double S = (1.0 - out.rho * out.rho) * z[0] * z[0];
    for (Eigen::Index t = 1; t < T; ++t) {
      const double d = z[t] - out.rho * z[t - 1];
      S += d * d;
    }
    const double shape = static_cast<double>(T) / 2.0 - 1.0;
    if (shape > 0.0 && S > 0.0) {
      const double cand = rng.inv_gamma(shape, S / 2.0);
      const double log_ratio =
          0.5 * (std::log(out.state_var) - std::log(cand)) -
          opt.xi_sq_prior_rate * (cand - out.state_var);
      if (std::log(rng.uniform() + 1e-300) < log_ratio &&
          std::isfinite(cand) && cand > 0.0)
        out.state_var = cand;
    }
  }

  // (c) ancillarity-sufficiency interweaving: redraw (mu, xi) in the
  // noncentered parameterization where ystar_t - m_{s_t} = mu + xi nutilde_t
  // + e_t, then map the path back.
  if (opt.interweave) {
    const double xi_old = std::sqrt(out.state_var);
    Vector nutilde = (out.log_vol.array() - out.mu) / xi_old;

    // bivariate Gaussian conjugate regression on (1, nutilde_t)
    double a11 = 1.0 / opt.mu_prior_var, a12 = 0.0;
    double a22 = 2.0 * opt.xi_sq_prior_rate; // xi ~ N(0, 1/(2*rate))
    double b1 = 0.0, b2 = 0.0;
    for (Eigen::Index t = 0; t < T; ++t) {
      const int j = s[static_cast<std::size_t>(t)];
      const double w = 1.0 / LogChiSqMixture::var[j];
      const double oy = ystar[t] - LogChiSqMixture::mean[j];
      a11 += w;
      a12 += w * nutilde[t];
      a22 += w * nutilde[t] * nutilde[t];
      b1 += w * oy;
      b2 += w * oy * nutilde[t];
    }
    const double det = a11 * a22 - a12 * a12;
    if (det > 0.0) {
      const double m1 = (a22 * b1 - a12 * b2) / det;
      const double m2 = (a11 * b2 - a12 * b1) / det;
      // draw from N((m1,m2), A^{-1}) via the Cholesky of A
      const double l11 = std::sqrt(a11);
      const double l21 = a12 / l11;
      const double l22 = std::sqrt(a22 - l21 * l21);
      const double z1 = rng.normal(), z2 = rng.normal();
      // solve L' x = z
      const double x2 = z2 / l22;
      const double x1 = (z1 - l21 * x2) / l11;
      const double mu_new = m1 + x1;
      const double xi_new = m2 + x2;
      const double xi2_new = xi_new * xi_new;
      if (xi2_new > 1e-12 && std::isfinite(mu_new) &&
          std::isfinite(xi2_new)) {
        out.log_vol = mu_new + xi_new * nutilde.array();
        out.mu = mu_new;
        out.state_var = xi2_new;
      }
    }
  }

  out.validate();
  return out;
}

// Constant-variance limit used when SV is disabled: a single conjugate
// inverse-gamma draw of sigma^2 with an InvGamma(0.01, 0.01) prior.
inline SvState sv_update_homoskedastic(const Vector& residuals,
                                       const SvState& state, Rng& rng) {
  const Eigen::Index T = residuals.size();
  if (state.T() != T)
    throw DimensionError("sv_update_homoskedastic: path length mismatch");
  const double shape = 0.01 + static_cast<double>(T) / 2.0;
  const double scale = 0.01 + 0.5 * residuals.squaredNorm();
  const double sigma_sq = rng.inv_gamma(shape, scale);
  SvState out = state;
  out.log_vol = Vector::Constant(T, std::log(sigma_sq));
  out.mu = std::log(sigma_sq);
  out.rho = 0.0;
  out.state_var = 1e-10;
  return out;
}

// Iterates the AR(1) law of motion forward and returns variances
// sigma^2_{T+1..T+h}.
inline Vector sv_forecast(const SvState& state, int horizon, Rng& rng) {
  if (horizon < 1) throw ArgumentError("sv_forecast: horizon must be >= 1");
  Vector out(horizon);
  double nu = state.log_vol[state.T() - 1];
  const double sd = std::sqrt(state.state_var);
  for (int h = 0; h < horizon; ++h) {
    nu = state.mu + state.rho * (nu - state.mu) + rng.normal(0.0, sd);
    out[h] = std::exp(std::min(nu, 700.0));
  }
  return out;
}

} // namespace bnn

#endif // BNN_SV_HPP
