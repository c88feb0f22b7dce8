#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

#include "doctest.h"
#include "polymerlab/config.hpp"

using namespace polymerlab;

namespace {
ExperimentConfig base(const std::string& experiment = "simulate-discrete") {
  ExperimentConfig cfg;
  cfg.experiment = experiment;
  return cfg;
}

bool throws_naming(const ExperimentConfig& cfg, const std::string& needle) {
  try {
    validate_config(cfg);
  } catch (const std::invalid_argument& e) {
    return std::string(e.what()).find(needle) != std::string::npos;
  }
  return false;
}

struct FileGuard {
  std::string path;
  ~FileGuard() { std::remove(path.c_str()); }
};
}  // namespace

TEST_SUITE("config") {

TEST_CASE("defaults validate for every subcommand that needs no extras") {
  for (const char* exp :
       {"simulate-discrete", "truncation-curve", "moments", "verify-appendix"}) {
    ExperimentConfig cfg = base(exp);
    if (std::string(exp) == "truncation-curve") cfg.a_grid = {0.0, 0.2};
    CHECK_NOTHROW(validate_config(cfg));
  }
  // converge and simulate-continuum need a positive cutoff.
  ExperimentConfig cv = base("converge");
  CHECK(throws_naming(cv, "a"));
  cv.a = 0.3;
  CHECK_NOTHROW(validate_config(cv));
  ExperimentConfig sc = base("simulate-continuum");
  sc.a = 0.0;
  CHECK(throws_naming(sc, "a"));
  sc.a = 0.5;
  CHECK_NOTHROW(validate_config(sc));
  // replica-moment needs a finite band ceiling.
  ExperimentConfig rm = base("replica-moment");
  rm.a = 0.1;
  CHECK(throws_naming(rm, "b"));
  rm.b = 4.0;
  CHECK_NOTHROW(validate_config(rm));
}

TEST_CASE("key parsing covers every documented key") {
  ExperimentConfig cfg = base();
  apply_key(cfg, "family", "pareto");
  apply_key(cfg, "alpha", "0.7");
  apply_key(cfg, "x_m", "1.0");
  apply_key(cfg, "theta", "2.5");
  apply_key(cfg, "N", "128");
  apply_key(cfg, "N_grid", "64, 128,256");
  apply_key(cfg, "d", "2");
  apply_key(cfg, "L", "4.5");
  apply_key(cfg, "beta_hat", "0.8");
  apply_key(cfg, "a", "0.25");
  apply_key(cfg, "b", "inf");
  apply_key(cfg, "a_grid", "0.1,0.2");
  apply_key(cfg, "functional", "one@2");
  apply_key(cfg, "psi", "0.5,0.1;0,0.3;0,0.3");
  apply_key(cfg, "replicas", "500");
  apply_key(cfg, "seed", "42");
  apply_key(cfg, "output", "out.csv");
  apply_key(cfg, "slab", "slab.bin");
  apply_key(cfg, "threads", "2");
  CHECK(cfg.family == "pareto");
  CHECK(cfg.alpha == 0.7);
  CHECK(cfg.x_m == 1.0);
  CHECK(cfg.theta == 2.5);
  CHECK(cfg.N == 128);
  REQUIRE(cfg.N_grid.size() == 3);
  CHECK(cfg.N_grid[1] == 128);
  CHECK(cfg.d == 2);
  CHECK(cfg.L == 4.5);
  CHECK(cfg.beta_hat == 0.8);
  CHECK(cfg.a == 0.25);
  CHECK(std::isinf(cfg.b));
  REQUIRE(cfg.a_grid.size() == 2);
  CHECK(cfg.a_grid[1] == 0.2);
  CHECK(cfg.functional == "one@2");
  CHECK(cfg.replicas == 500);
  CHECK(cfg.seed == 42);
  CHECK(cfg.output == "out.csv");
  CHECK(cfg.slab_path == "slab.bin");
  CHECK(cfg.threads == 2);
  CHECK_NOTHROW(validate_config(cfg));

  CHECK_THROWS_AS(apply_key(cfg, "bogus", "1"), std::invalid_argument);
  CHECK_THROWS_AS(apply_key(cfg, "alpha", "fast"), std::invalid_argument);
  CHECK_THROWS_AS(apply_key(cfg, "N", "12.5"), std::invalid_argument);
  CHECK_THROWS_AS(apply_key(cfg, "N_grid", "64,x"), std::invalid_argument);
}

TEST_CASE("validation names the offending field") {
  ExperimentConfig cfg = base();
  cfg.alpha = 2.5;
  CHECK(throws_naming(cfg, "alpha"));
  cfg = base();
  cfg.d = 5;
  CHECK(throws_naming(cfg, "d"));
  cfg = base();
  cfg.beta_hat = 0.0;
  CHECK(throws_naming(cfg, "beta_hat"));
  cfg = base();
  cfg.a = -0.5;
  CHECK(throws_naming(cfg, "a"));
  cfg = base();
  cfg.a = 0.5;
  cfg.b = 0.5;
  CHECK(throws_naming(cfg, "b"));
  cfg = base();
  cfg.replicas = 1;
  CHECK(throws_naming(cfg, "replicas"));
  cfg = base();
  cfg.experiment = "warp-drive";
  CHECK(throws_naming(cfg, "experiment"));
  cfg = base();
  cfg.family = "cauchy";
  CHECK(throws_naming(cfg, "family"));
  cfg = base();
  cfg.functional = "one@-1";
  CHECK(throws_naming(cfg, "functional"));
  cfg = base();
  cfg.psi = "0.5;0.1";
  CHECK(throws_naming(cfg, "psi"));
  cfg = base();
  cfg.psi = "0.5,0.1;0,0.3;0,0.3";  // two space factors but d = 1
  CHECK(throws_naming(cfg, "psi"));
  // The lattice truncation cutoff must stay in [0,1].
  cfg = base();
  cfg.a = 1.2;
  CHECK(throws_naming(cfg, "a"));
  // Continuum-side degeneracy: alpha must be below min(1+2/d, 2).
  cfg = base("simulate-continuum");
  cfg.a = 0.3;
  cfg.d = 3;
  cfg.alpha = 1.8;
  CHECK(throws_naming(cfg, "alpha"));
  // pareto with alpha in (1,2) violates the centering convention.
  cfg = base();
  cfg.family = "pareto";
  cfg.alpha = 1.5;
  CHECK(throws_naming(cfg, "centering"));
}

TEST_CASE("config files parse with comments and reject junk") {
  std::string path = "config_test_tmp.cfg";
  FileGuard guard{path};
  {
    std::ofstream out(path);
    out << "# comment line\n"
        << "\n"
        << "experiment=moments\n"
        << "alpha = 1.5\n"
        << "a=0.2\n"
        << "seed=9\n";
  }
  ExperimentConfig cfg = load_config_file(path);
  CHECK(cfg.experiment == "moments");
  CHECK(cfg.alpha == 1.5);
  CHECK(cfg.a == 0.2);
  CHECK(cfg.seed == 9);

  {
    std::ofstream out(path);
    out << "alpha: 1.5\n";
  }
  CHECK_THROWS_AS((void)load_config_file(path), std::invalid_argument);
  {
    std::ofstream out(path);
    out << "flux_capacitor=1\n";
  }
  CHECK_THROWS_AS((void)load_config_file(path), std::invalid_argument);
  CHECK_THROWS_AS((void)load_config_file("missing_config_file.cfg"),
                  std::invalid_argument);
}

TEST_CASE("canonical form and hash are stable and sensitive") {
  ExperimentConfig a = base();
  ExperimentConfig b = base();
  CHECK(config_canonical(a) == config_canonical(b));
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash_hex(a).size() == 16);
  b.seed = 2;
  CHECK(config_hash(a) != config_hash(b));
  ExperimentConfig c = base();
  c.alpha = 1.4999999;
  CHECK(config_hash(a) != config_hash(c));
}

TEST_CASE("derived objects come out of the config") {
  ExperimentConfig cfg = base();
  cfg.family = "centered_pareto";
  cfg.alpha = 1.5;
  TailLaw law = law_from(cfg);
  CHECK(law.family() == TailFamily::centered_pareto);
  CHECK(law.alpha() == 1.5);

  cfg.functional = "one@3";
  PathFunctional f = functional_from(cfg);
  CHECK(f.has_cutoff());
  CHECK(f.cutoff_A() == 3.0);
  cfg.functional = "one";
  CHECK_FALSE(functional_from(cfg).has_cutoff());

  cfg.psi = "none";
  CHECK(psi_from(cfg) == nullptr);
  cfg.psi = "0.5,0.1;0.0,0.4";
  auto psi = psi_from(cfg);
  REQUIRE(psi != nullptr);
  CHECK(psi->d() == 1);
  double x[1] = {0.0};
  CHECK(psi->operator()(0.5, x) == 1.0);

  cfg.N = 64;
  cfg.N_grid = {};
  CHECK(n_grid_from(cfg) == std::vector<int64_t>{64});
  cfg.N_grid = {32, 64};
  CHECK(n_grid_from(cfg) == (std::vector<int64_t>{32, 64}));
}

}  // TEST_SUITE
