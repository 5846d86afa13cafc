#ifndef BNN_HMC_HPP
#define BNN_HMC_HPP

#include <cmath>
#include <limits>
#include <utility>

#include "bnn/rng.hpp"
#include "bnn/types.hpp"

namespace bnn {

struct NutsConfig {
  double target_accept = 0.8;
  int max_tree_depth = 10;
  int adapt_steps = 1000;
  double init_step_size = 0.1;

  void validate() const {
    if (!(target_accept > 0.0 && target_accept < 1.0))
      throw ArgumentError("NutsConfig: target_accept in (0,1)");
    if (max_tree_depth < 1 || max_tree_depth > 12)
      throw ArgumentError("NutsConfig: max_tree_depth in [1,12]");
    if (adapt_steps < 0) throw ArgumentError("NutsConfig: adapt_steps >= 0");
    if (!(init_step_size > 0.0))
      throw ArgumentError("NutsConfig: init_step_size > 0");
  }
};

// Dual-averaging step-size adaptation (Hoffman--Gelman constants). Adapts
// during the first adapt_steps updates, then freezes at the averaged value.
struct DualAverageState {
  double log_step;
  double log_step_avg;
  double h_bar = 0.0;
  double mu;
  int count = 0;
  bool frozen = false;

  static constexpr double kGamma = 0.05;
  static constexpr double kT0 = 10.0;
  static constexpr double kKappa = 0.75;

  explicit DualAverageState(double init_step = 0.1)
      : log_step(std::log(init_step)),
        log_step_avg(std::log(init_step)),
        mu(std::log(10.0 * init_step)) {}

  double step_size() const {
    return std::exp(frozen ? log_step_avg : log_step);
  }

  void update(double accept_stat, double target) {
    if (frozen) return;
    ++count;
    const double m = static_cast<double>(count);
    const double eta = 1.0 / (m + kT0);
    h_bar = (1.0 - eta) * h_bar + eta * (target - accept_stat);
    log_step = mu - std::sqrt(m) / kGamma * h_bar;
    const double w = std::pow(m, -kKappa);
    log_step_avg = w * log_step + (1.0 - w) * log_step_avg;
  }

  void freeze() { frozen = true; }
};

struct NutsDiagnostics {
  int depth = 0;
  bool divergent = false;
  double accept_stat = 0.0;
  double step_size = 0.0;
  int n_leapfrog = 0;
};

// Half-step momentum / full-step position / half-step momentum, iterated
// n_steps times. Sets *divergent when the trajectory leaves the finite
// range.
template <typename GradFn>
std::pair<Vector, Vector> leapfrog(Vector position, Vector momentum,
                                   double step_size, GradFn&& grad_fn,
                                   int n_steps, bool* divergent = nullptr) {
  if (!(step_size > 0.0)) throw ArgumentError("leapfrog: step_size > 0");
  if (divergent) *divergent = false;
  if (n_steps == 0) return {std::move(position), std::move(momentum)};

  Vector grad = grad_fn(position);
  for (int n = 0; n < n_steps; ++n) {
    momentum += 0.5 * step_size * grad;
    position += step_size * momentum;
    if (!position.allFinite() || !momentum.allFinite()) {
      if (divergent) *divergent = true;
      return {std::move(position), std::move(momentum)};
    }
    grad = grad_fn(position);
    if (!grad.allFinite()) {
      if (divergent) *divergent = true;
      return {std::move(position), std::move(momentum)};
    }
    momentum += 0.5 * step_size * grad;
  }
  return {std::move(position), std::move(momentum)};
}

namespace detail {

constexpr double kMaxEnergyError = 1000.0;

inline double log_sum_exp(double a, double b) {
  const double m = std::max(a, b);
  if (!std::isfinite(m)) return m;
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

// Trajectory builder for the multinomial NUTS variant. Momentum is kept
// un-negated when integrating backward (the step sign carries the
// direction), so the U-turn condition within a span built in direction dir
// is dir * (theta_end - theta_start) . r < 0 at either end.
template <typename LogP, typename GradFn>
struct NutsTree {
  LogP& logp;
  GradFn& grad;
  double step;
  double h0;
  Rng& rng;

  double sum_accept = 0.0;
  int n_leapfrog = 0;
  bool divergent = false;

  NutsTree(LogP& lp, GradFn& g, double step_, double h0_, Rng& rng_)
      : logp(lp), grad(g), step(step_), h0(h0_), rng(rng_) {}

  static bool uturn(const Vector& theta_start, const Vector& theta_end,
                    const Vector& r_start, const Vector& r_end, double dir) {
    const Vector d = dir * (theta_end - theta_start);
    return d.dot(r_start) < 0.0 || d.dot(r_end) < 0.0;
  }

  // One leapfrog step of (theta, r, g) in direction dir; fills the leaf's
  // log weight relative to the initial energy. Returns false on divergence.
  bool single_step(Vector& theta, Vector& r, Vector& g, double dir,
                   double& log_w) {
    const double eps = dir * step;
    r += 0.5 * eps * g;
    theta += eps * r;
    ++n_leapfrog;
    if (!theta.allFinite()) return false;
    g = grad(theta);
    if (!g.allFinite()) return false;
    r += 0.5 * eps * g;
    const double lp = logp(theta);
    if (!std::isfinite(lp)) return false;
    const double h = -lp + 0.5 * r.squaredNorm();
    if (h - h0 > kMaxEnergyError) return false;
    log_w = h0 - h;
    sum_accept += std::min(1.0, std::exp(h0 - h));
    return true;
  }

  // Builds a subtree of 2^depth leapfrog steps in direction dir, advancing
  // (theta, r, g) in place from the span endpoint to the new endpoint.
  // sub_sample / sub_log_w carry the multinomial draw over the subtree.
  // Returns false when the subtree diverges or contains a U-turn.
  bool build(int depth, double dir, Vector& theta, Vector& r, Vector& g,
             Vector& sub_sample, double& sub_log_w) {
    if (depth == 0) {
      double log_w;
      if (!single_step(theta, r, g, dir, log_w)) {
        divergent = true;
        return false;
      }
      sub_sample = theta;
      sub_log_w = log_w;
      return true;
    }

    const Vector theta_start = theta;
    const Vector r_start = r;

    Vector s1;
    double w1;
    if (!build(depth - 1, dir, theta, r, g, s1, w1)) return false;
    Vector s2;
    double w2;
    if (!build(depth - 1, dir, theta, r, g, s2, w2)) return false;

    sub_log_w = log_sum_exp(w1, w2);
    sub_sample = (std::log(rng.uniform() + 1e-300) < w2 - sub_log_w)
                     ? std::move(s2)
                     : std::move(s1);
    return !uturn(theta_start, theta, r_start, r, dir);
  }
};

} // namespace detail

// One NUTS transition (multinomial variant, identity mass matrix). On a
// divergent first evaluation the current point is returned with the
// divergence flagged; the chain never aborts.
template <typename LogP, typename GradFn>
Vector nuts_draw(const Vector& current, LogP&& log_post_fn, GradFn&& grad_fn,
                 const NutsConfig& config, DualAverageState& adapt_state,
                 Rng& rng, NutsDiagnostics* diag = nullptr) {
  config.validate();
  if (!current.allFinite())
    throw ArgumentError("nuts_draw: current point must be finite");

  if (adapt_state.count >= config.adapt_steps && !adapt_state.frozen)
    adapt_state.freeze();
  const double step = adapt_state.step_size();

  NutsDiagnostics local;
  NutsDiagnostics& d = diag ? *diag : local;
  d = NutsDiagnostics{};
  d.step_size = step;

  const double lp0 = log_post_fn(current);
  Vector g0 = grad_fn(current);
  if (!std::isfinite(lp0) || !g0.allFinite()) {
    d.divergent = true;
    adapt_state.update(0.0, config.target_accept);
    return current;
  }

  const Vector r0 = rng.normal_vector(current.size());
  const double h0 = -lp0 + 0.5 * r0.squaredNorm();

  detail::NutsTree<LogP, GradFn> tree(log_post_fn, grad_fn, step, h0, rng);

  Vector theta_minus = current, r_minus = r0, grad_minus = g0;
  Vector theta_plus = current, r_plus = r0, grad_plus = g0;
  Vector sample = current;
  double log_weight = 0.0; // weight of the initial point: h0 - h0

  int depth = 0;
  while (depth < config.max_tree_depth) {
    const double dir = (rng.uniform() < 0.5) ? 1.0 : -1.0;

    Vector sub_sample;
    double sub_log_w;
    bool ok;
    if (dir > 0) {
      ok = tree.build(depth, dir, theta_plus, r_plus, grad_plus, sub_sample,
                      sub_log_w);
    } else {
      ok = tree.build(depth, dir, theta_minus, r_minus, grad_minus,
                      sub_sample, sub_log_w);
    }
    if (!ok) break;

    const double total = detail::log_sum_exp(log_weight, sub_log_w);
    if (std::log(rng.uniform() + 1e-300) < sub_log_w - total)
      sample = std::move(sub_sample);
    log_weight = total;
    ++depth;

    if (detail::NutsTree<LogP, GradFn>::uturn(theta_minus, theta_plus,
                                              r_minus, r_plus, 1.0))
      break;
  }

  d.depth = depth;
  d.divergent = tree.divergent;
  d.n_leapfrog = tree.n_leapfrog;
  d.accept_stat =
      tree.n_leapfrog > 0
          ? tree.sum_accept / static_cast<double>(tree.n_leapfrog)
          : 0.0;
  adapt_state.update(d.accept_stat, config.target_accept);
  return sample;
}

// Plain MH-corrected HMC with fixed (step, n_steps). Fallback kernel kept
// for testing against the NUTS transition.
template <typename LogP, typename GradFn>
Vector hmc_draw(const Vector& current, LogP&& log_post_fn, GradFn&& grad_fn,
                double step_size, int n_steps, Rng& rng,
                bool* accepted = nullptr) {
  const Vector r0 = rng.normal_vector(current.size());
  bool div = false;
  auto [theta, r] = leapfrog(current, r0, step_size, grad_fn, n_steps, &div);
  if (accepted) *accepted = false;
  if (div) return current;
  const double h0 = -log_post_fn(current) + 0.5 * r0.squaredNorm();
  const double h1 = -log_post_fn(theta) + 0.5 * r.squaredNorm();
  if (!std::isfinite(h1)) return current;
  if (std::log(rng.uniform() + 1e-300) < h0 - h1) {
    if (accepted) *accepted = true;
    return theta;
  }
  return current;
}

} // namespace bnn

#endif // BNN_HMC_HPP
