#ifndef BNN_ACTIVATIONS_HPP
#define BNN_ACTIVATIONS_HPP

#include <cmath>

#include "bnn/types.hpp"

namespace bnn {

// Stable for |z| up to ~700: sigmoid branches on the sign of z so the
// exponential argument is never positive.
inline double act_eval(ActivationKind kind, double z) {
  switch (kind) {
    case ActivationKind::LeakyRelu:
      return z < 0.0 ? 0.01 * z : z;
    case ActivationKind::Sigmoid:
      if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
      {
        const double e = std::exp(z);
        return e / (1.0 + e);
      }
    case ActivationKind::Relu:
      return z < 0.0 ? 0.0 : z;
    case ActivationKind::Tanh:
      return std::tanh(z);
  }
  throw ArgumentError("act_eval: unknown activation kind");
}

// Kink convention at z = 0: right-limit (1 for relu/leakyrelu).
inline double act_grad(ActivationKind kind, double z) {
  switch (kind) {
    case ActivationKind::LeakyRelu:
      return z < 0.0 ? 0.01 : 1.0;
    case ActivationKind::Sigmoid: {
      const double s = act_eval(ActivationKind::Sigmoid, z);
      return s * (1.0 - s);
    }
    case ActivationKind::Relu:
      return z < 0.0 ? 0.0 : 1.0;
    case ActivationKind::Tanh: {
      const double t = std::tanh(z);
      return 1.0 - t * t;
    }
  }
  throw ArgumentError("act_grad: unknown activation kind");
}

inline Vector act_eval(ActivationKind kind, const Vector& z) {
  Vector out(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) out[i] = act_eval(kind, z[i]);
  return out;
}

inline Vector act_grad(ActivationKind kind, const Vector& z) {
  Vector out(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) out[i] = act_grad(kind, z[i]);
  return out;
}

} // namespace bnn

#endif // BNN_ACTIVATIONS_HPP
