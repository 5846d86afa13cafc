#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "bnn/chain_io.hpp"
#include "bnn/csv.hpp"
#include "bnn/sampler.hpp"

using namespace bnn;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("bnn_test_" + std::to_string(std::rand()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

} // namespace

TEST_CASE("csv round trip preserves values") {
  TempDir dir;
  Matrix m(3, 2);
  m << 1.5, -2.0, 0.0, 1e-17, 3.14159265358979, 1e8;
  csv::write_table(dir.file("a.csv"), {"u", "v"}, m);
  const auto t = csv::read_table(dir.file("a.csv"));
  REQUIRE(t.header == std::vector<std::string>{"u", "v"});
  CHECK((t.values - m).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("csv schema violations are reported with position") {
  TempDir dir;
  write_text(dir.file("bad.csv"), "a,b\n1,2\n3\n");
  try {
    csv::read_table(dir.file("bad.csv"));
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("row 3") != std::string::npos);
  }

  write_text(dir.file("nan.csv"), "a,b\n1,two\n");
  try {
    csv::read_table(dir.file("nan.csv"));
    FAIL("expected DataError");
  } catch (const DataError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("column 2") != std::string::npos);
    CHECK(msg.find("two") != std::string::npos);
  }

  write_text(dir.file("empty.csv"), "");
  CHECK_THROWS_AS(csv::read_table(dir.file("empty.csv")), DataError);
  CHECK_THROWS_AS(csv::read_table(dir.file("missing.csv")), DataError);
}

TEST_CASE("dataset schema: response first, covariates after") {
  TempDir dir;
  write_text(dir.file("d.csv"), "y,x1,x2\n1.0,2.0,3.0\n4.0,5.0,6.0\n");
  const Dataset d = csv::read_dataset(dir.file("d.csv"));
  CHECK(d.T() == 2);
  CHECK(d.K() == 2);
  CHECK(d.y[0] == 1.0);
  CHECK(d.X(1, 1) == 6.0);

  write_text(dir.file("narrow.csv"), "y\n1.0\n2.0\n");
  CHECK_THROWS_AS(csv::read_dataset(dir.file("narrow.csv")), DataError);

  Dataset out = d;
  csv::write_dataset(dir.file("rt.csv"), out);
  const Dataset back = csv::read_dataset(dir.file("rt.csv"));
  CHECK(back.y == d.y);
  CHECK(back.X == d.X);
}

TEST_CASE("chain archive round trip") {
  Rng gen(131);
  Dataset d;
  d.X = Matrix(30, 2);
  for (int t = 0; t < 30; ++t)
    for (int j = 0; j < 2; ++j) d.X(t, j) = gen.normal();
  d.y = Vector(30);
  for (int t = 0; t < 30; ++t) d.y[t] = gen.normal();

  SamplerConfig cfg;
  cfg.n_draws = 25;
  cfg.n_burn = 5;
  cfg.Q = 2;
  cfg.seed = 132;
  Rng rng(cfg.seed);
  const ChainOutput chain = run_chain(d, cfg, rng);

  TempDir dir;
  chain_io::save(dir.file("chain"), chain, cfg);
  const auto loaded = chain_io::load(dir.file("chain"));

  REQUIRE(loaded.chain.size() == chain.size());
  CHECK(loaded.config.n_draws == cfg.n_draws);
  CHECK(loaded.config.Q == cfg.Q);
  CHECK(loaded.config.seed == cfg.seed);
  for (Eigen::Index s = 0; s < chain.size(); ++s) {
    const auto& a = chain.states[static_cast<std::size_t>(s)];
    const auto& b = loaded.chain.states[static_cast<std::size_t>(s)];
    CHECK(a.gamma == b.gamma);
    CHECK(a.beta == b.beta);
    CHECK(a.zeta == b.zeta);
    CHECK(a.kappa == b.kappa);
    CHECK(a.delta == b.delta);
    CHECK(a.sv.mu == b.sv.mu);
    CHECK(a.sv.rho == b.sv.rho);
    CHECK(a.sv.state_var == b.sv.state_var);
    CHECK(a.sv.log_vol[a.sv.T() - 1] == b.sv.log_vol[b.sv.T() - 1]);
  }

  // predictions from the loaded archive match the in-memory chain
  Vector x = d.X.row(0).transpose();
  Rng ra(133), rb(133);
  const auto pa = predict(chain, x, 1, ra);
  const auto pb = predict(loaded.chain, x, 1, rb);
  REQUIRE(pa.size() == pb.size());
  for (std::size_t i = 0; i < pa.size(); ++i)
    CHECK(pa[i].mean == Catch::Approx(pb[i].mean).margin(1e-12));
}

TEST_CASE("unknown archive format is rejected") {
  TempDir dir;
  fs::create_directories(dir.file("chain"));
  write_text(dir.file("chain/manifest.json"), "{\"format\": \"other\"}");
  CHECK_THROWS_AS(chain_io::load(dir.file("chain")), DataError);
  CHECK_THROWS_AS(chain_io::load(dir.file("nowhere")), DataError);
}

TEST_CASE("sampler config json round trip") {
  SamplerConfig cfg;
  cfg.n_draws = 123;
  cfg.n_burn = 45;
  cfg.Q = 7;
  cfg.linear_only = true;
  cfg.sv_fix_rho_zero = true;
  cfg.nuts_target_accept = 0.9;
  cfg.thin = 2;
  cfg.seed = 99;
  const SamplerConfig back =
      chain_io::config_from_json(chain_io::config_to_json(cfg));
  CHECK(back.n_draws == cfg.n_draws);
  CHECK(back.n_burn == cfg.n_burn);
  CHECK(back.Q == cfg.Q);
  CHECK(back.linear_only == cfg.linear_only);
  CHECK(back.sv_fix_rho_zero == cfg.sv_fix_rho_zero);
  CHECK(back.nuts_target_accept == cfg.nuts_target_accept);
  CHECK(back.thin == cfg.thin);
  CHECK(back.seed == cfg.seed);
}
