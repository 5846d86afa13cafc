#include <catch2/catch_amalgamated.hpp>

#include "bnn/activations.hpp"

using namespace bnn;

TEST_CASE("act_eval matches the activation table") {
  CHECK(act_eval(ActivationKind::Sigmoid, 0.0) == Catch::Approx(0.5));
  CHECK(act_eval(ActivationKind::Relu, -2.0) == 0.0);
  CHECK(act_eval(ActivationKind::LeakyRelu, -2.0) == Catch::Approx(-0.02));
  CHECK(act_eval(ActivationKind::Relu, 3.0) == 3.0);
  CHECK(act_eval(ActivationKind::LeakyRelu, 3.0) == 3.0);
  CHECK(act_eval(ActivationKind::Tanh, 0.0) == 0.0);
}

TEST_CASE("act_eval stays bounded at extreme inputs") {
  for (double z : {-1e6, -700.0, 700.0, 1e6}) {
    const double t = act_eval(ActivationKind::Tanh, z);
    CHECK(t >= -1.0);
    CHECK(t <= 1.0);
    const double s = act_eval(ActivationKind::Sigmoid, z);
    CHECK(s >= 0.0);
    CHECK(s <= 1.0);
    CHECK(std::isfinite(s));
  }
}

TEST_CASE("act_grad closed forms at zero") {
  CHECK(act_grad(ActivationKind::Tanh, 0.0) == Catch::Approx(1.0));
  CHECK(act_grad(ActivationKind::Sigmoid, 0.0) == Catch::Approx(0.25));
  // right-limit convention at the kink
  CHECK(act_grad(ActivationKind::Relu, 0.0) == 1.0);
  CHECK(act_grad(ActivationKind::LeakyRelu, 0.0) == 1.0);
}

TEST_CASE("act_grad matches central finite differences away from kinks") {
  const double h = 1e-6;
  for (ActivationKind kind : kAllActivations) {
    for (double z : {-0.5, 0.5, -1.7, 2.3}) {
      const double fd =
          (act_eval(kind, z + h) - act_eval(kind, z - h)) / (2.0 * h);
      CHECK(act_grad(kind, z) == Catch::Approx(fd).margin(1e-6));
    }
  }
}

TEST_CASE("vector overloads agree with the scalar versions") {
  Vector z(5);
  z << -2.0, -0.3, 0.0, 0.7, 4.0;
  for (ActivationKind kind : kAllActivations) {
    const Vector v = act_eval(kind, z);
    const Vector g = act_grad(kind, z);
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      CHECK(v[i] == act_eval(kind, z[i]));
      CHECK(g[i] == act_grad(kind, z[i]));
    }
  }
}
