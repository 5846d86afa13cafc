#ifndef BNN_TYPES_HPP
#define BNN_TYPES_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace bnn {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// ---------------------------------------------------------------------- //
// errors
// ---------------------------------------------------------------------- //

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ArgumentError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct StateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InsufficientDrawsError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct DegenerateTestError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Carries a condition-number estimate of the offending system.
struct NumericalError : std::runtime_error {
  double condition_estimate;
  explicit NumericalError(const std::string& msg, double cond = 0.0)
      : std::runtime_error(msg), condition_estimate(cond) {}
};

inline void require_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) throw StateError(std::string(what) + ": non-finite entry");
}

inline void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw StateError(std::string(what) + ": non-finite entry");
}

// ---------------------------------------------------------------------- //
// data
// ---------------------------------------------------------------------- //

struct Dataset {
  Vector y;                            // T responses
  Matrix X;                            // T x K covariates
  std::vector<std::string> timestamps; // optional period labels

  Eigen::Index T() const { return y.size(); }
  Eigen::Index K() const { return X.cols(); }

  void validate() const {
    if (y.size() < 2) throw DimensionError("Dataset: T must be >= 2");
    if (X.rows() != y.size())
      throw DimensionError("Dataset: X row count does not match y");
    if (!timestamps.empty() &&
        static_cast<Eigen::Index>(timestamps.size()) != y.size())
      throw DimensionError("Dataset: timestamp count does not match y");
    require_finite(y, "Dataset.y");
    require_finite(X, "Dataset.X");
  }
};

// Integer codes follow the activation-function table numbering.
enum class ActivationKind : int {
  LeakyRelu = 1,
  Sigmoid = 2,
  Relu = 3,
  Tanh = 4,
};

inline constexpr std::array<ActivationKind, 4> kAllActivations = {
    ActivationKind::LeakyRelu, ActivationKind::Sigmoid, ActivationKind::Relu,
    ActivationKind::Tanh};

inline const char* activation_name(ActivationKind k) {
  switch (k) {
    case ActivationKind::LeakyRelu: return "leakyrelu";
    case ActivationKind::Sigmoid: return "sigmoid";
    case ActivationKind::Relu: return "relu";
    case ActivationKind::Tanh: return "tanh";
  }
  throw ArgumentError("unknown activation kind");
}

inline ActivationKind activation_from_code(int code) {
  if (code < 1 || code > 4) throw ArgumentError("activation code must be 1..4");
  return static_cast<ActivationKind>(code);
}

// ---------------------------------------------------------------------- //
// shrinkage states
// ---------------------------------------------------------------------- //

// Horseshoe block in the auxiliary inverse-gamma representation.
// Prior variance of coefficient j is global_scale_sq * local_scales_sq[j].
struct HorseshoeState {
  double global_scale_sq = 1.0; // lambda^2
  Vector local_scales_sq;       // varphi^2_j
  Vector aux_local;             // c_j
  double aux_global = 1.0;      // d

  static HorseshoeState ones(Eigen::Index n) {
    HorseshoeState s;
    s.local_scales_sq = Vector::Ones(n);
    s.aux_local = Vector::Ones(n);
    return s;
  }

  Eigen::Index size() const { return local_scales_sq.size(); }

  double prior_variance(Eigen::Index j) const {
    return global_scale_sq * local_scales_sq[j];
  }

  void validate() const {
    if (local_scales_sq.size() != aux_local.size())
      throw DimensionError("HorseshoeState: aux size mismatch");
    auto pos = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!pos(global_scale_sq) || !pos(aux_global))
      throw StateError("HorseshoeState: non-positive global scale");
    for (Eigen::Index j = 0; j < size(); ++j)
      if (!pos(local_scales_sq[j]) || !pos(aux_local[j]))
        throw StateError("HorseshoeState: non-positive local scale");
  }
};

// Multiplicative gamma components; per-neuron precisions are the running
// product, recomputed on demand.
struct MgpState {
  Vector components; // varrho_r, r = 1..Q
  double a1 = 2.0;
  double a2 = 3.0;

  static MgpState ones(Eigen::Index q, double a1_ = 2.0, double a2_ = 3.0) {
    MgpState s;
    s.components = Vector::Ones(q);
    s.a1 = a1_;
    s.a2 = a2_;
    return s;
  }

  Eigen::Index size() const { return components.size(); }

  Vector precisions() const {
    Vector phi(components.size());
    double acc = 1.0;
    for (Eigen::Index q = 0; q < components.size(); ++q) {
      acc *= components[q];
      phi[q] = acc;
    }
    return phi;
  }

  void validate() const {
    for (Eigen::Index q = 0; q < components.size(); ++q)
      if (!(std::isfinite(components[q]) && components[q] > 0.0))
        throw StateError("MgpState: non-positive component");
    if (!(a1 > 0.0 && a2 > 0.0)) throw StateError("MgpState: bad a1/a2");
  }
};

// Log-volatility path and AR(1) parameters.
struct SvState {
  Vector log_vol;         // nu_t
  double mu = 0.0;        // mu_nu
  double rho = 0.9;       // rho_nu
  double state_var = 0.01; // xi_nu^2

  Eigen::Index T() const { return log_vol.size(); }

  Vector variances() const { return log_vol.array().exp(); }

  void validate() const {
    require_finite(log_vol, "SvState.log_vol");
    if (!(std::abs(rho) < 1.0)) throw StateError("SvState: |rho| must be < 1");
    if (!(std::isfinite(state_var) && state_var > 0.0))
      throw StateError("SvState: state_var must be > 0");
    if (!std::isfinite(mu)) throw StateError("SvState: mu non-finite");
    if (!log_vol.array().exp().isFinite().all())
      throw StateError("SvState: implied variance overflow");
  }
};

// ---------------------------------------------------------------------- //
// network state
// ---------------------------------------------------------------------- //

struct NetworkState {
  Vector gamma;                      // K linear coefficients
  Vector beta;                       // Q neuron loadings
  Matrix kappa;                      // K x Q weighting coefficients
  Vector zeta;                       // Q biases
  std::vector<ActivationKind> delta; // Q activation indicators
  HorseshoeState hs_gamma;           // size K
  std::vector<HorseshoeState> hs_kappa; // Q blocks, each size K
  MgpState mgp;
  SvState sv;

  Eigen::Index K() const { return gamma.size(); }
  Eigen::Index Q() const { return beta.size(); }

  void validate() const {
    const Eigen::Index k = K(), q = Q();
    if (kappa.rows() != k || kappa.cols() != q)
      throw DimensionError("NetworkState: kappa shape mismatch");
    if (zeta.size() != q || static_cast<Eigen::Index>(delta.size()) != q)
      throw DimensionError("NetworkState: zeta/delta length mismatch");
    if (hs_gamma.size() != k)
      throw DimensionError("NetworkState: hs_gamma size mismatch");
    if (static_cast<Eigen::Index>(hs_kappa.size()) != q)
      throw DimensionError("NetworkState: hs_kappa count mismatch");
    require_finite(gamma, "NetworkState.gamma");
    require_finite(beta, "NetworkState.beta");
    require_finite(kappa, "NetworkState.kappa");
    require_finite(zeta, "NetworkState.zeta");
    hs_gamma.validate();
    for (const auto& hs : hs_kappa) {
      if (hs.size() != k)
        throw DimensionError("NetworkState: hs_kappa block size mismatch");
      hs.validate();
    }
    if (mgp.size() != q) throw DimensionError("NetworkState: mgp size mismatch");
    mgp.validate();
    sv.validate();
  }
};

// ---------------------------------------------------------------------- //
// sampler configuration and output
// ---------------------------------------------------------------------- //

struct SamplerConfig {
  int n_draws = 20000;
  int n_burn = 10000;
  int Q = 0;                     // 0 means Q = K
  double mgp_threshold = 1e-4;   // prior-draw shortcut on phi_beta^{-1}
  double neuron_threshold = 1e-4; // tau_beta for Q* reporting
  bool sv_enabled = true;
  bool sv_fix_rho_zero = false;  // simulation-study setting
  bool linear_only = false;      // horseshoe-SV benchmark
  bool common_activation = false; // BNN (shared h) vs BNN-NS
  double nuts_target_accept = 0.8;
  int nuts_max_depth = 10;
  int thin = 1;
  std::uint64_t seed = 1;

  void validate() const {
    if (n_draws <= 0 || n_burn < 0 || n_burn >= n_draws)
      throw ArgumentError("SamplerConfig: require 0 <= n_burn < n_draws");
    if (Q < 0) throw ArgumentError("SamplerConfig: Q must be >= 0");
    if (!(mgp_threshold > 0.0) || !(neuron_threshold > 0.0))
      throw ArgumentError("SamplerConfig: thresholds must be > 0");
    if (!(nuts_target_accept > 0.0 && nuts_target_accept < 1.0))
      throw ArgumentError("SamplerConfig: nuts_target_accept in (0,1)");
    if (nuts_max_depth < 1 || nuts_max_depth > 12)
      throw ArgumentError("SamplerConfig: nuts_max_depth in [1,12]");
    if (thin < 1) throw ArgumentError("SamplerConfig: thin must be >= 1");
  }
};

struct ChainOutput {
  std::vector<NetworkState> states; // retained draws (after thinning)
  std::vector<double> log_post;     // log conditional density trace per draw
  std::vector<int> qstar;           // effective neurons per retained sweep
  Vector accept_rate;               // mean NUTS acceptance statistic per neuron
  Vector divergence_rate;           // divergent transitions per neuron
  double wall_seconds = 0.0;
  int n_draws = 0;
  int n_burn = 0;
  int thin = 1;

  Eigen::Index size() const {
    return static_cast<Eigen::Index>(states.size());
  }

  // S x Q matrix of retained beta draws.
  Matrix beta_draws() const {
    if (states.empty()) return Matrix(0, 0);
    Matrix out(size(), states.front().Q());
    for (Eigen::Index s = 0; s < size(); ++s)
      out.row(s) = states[static_cast<std::size_t>(s)].beta.transpose();
    return out;
  }
};

struct PredictiveDraw {
  double mean = 0.0;
  double variance = 1.0;
  double draw = 0.0;
};

} // namespace bnn

#endif // BNN_TYPES_HPP
