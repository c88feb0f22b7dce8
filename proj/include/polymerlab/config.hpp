#pragma once
// Experiment configuration: a flat key=value file plus command-line
// overrides (flags win).  Every field is validated before any computation
// starts, and an invalid field names itself in the error message.

#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "polymerlab/bump.hpp"
#include "polymerlab/functionals.hpp"
#include "polymerlab/tail_law.hpp"

namespace polymerlab {

struct ExperimentConfig {
  std::string experiment;  // subcommand name

  // disorder law
  std::string family = "centered_pareto";
  double alpha = 1.5;
  double x_m = 0.0;  // 0 = family default
  double theta = 1.0;

  // geometry
  std::int64_t N = 256;
  std::vector<std::int64_t> N_grid;
  int d = 1;
  double L = 6.0;

  // disorder strength / truncation
  double beta_hat = 1.0;
  double a = 0.0;
  double b = std::numeric_limits<double>::infinity();
  std::vector<double> a_grid;

  // functional: "one" or "one@A" (support cutoff at |path|_sup <= A)
  std::string functional = "one";
  // test function: "none" or "tc,tw;c1,w1[;c2,w2...]" (time bump, then one
  // space bump per dimension)
  std::string psi = "none";

  std::int64_t replicas = 1000;
  std::uint64_t seed = 1;
  std::string output;       // CSV path ("" = in-memory only / stdout summary)
  std::string slab_path;    // optional slab container to write or load
  int threads = 0;          // 0 = POLYMERLAB_THREADS or hardware
};

// Parse a key=value file ('#' comments, blank lines ignored).  Unknown keys
// are rejected by name.
ExperimentConfig load_config_file(const std::string& path);

// Apply one key=value pair (shared by file parsing and flag overrides).
void apply_key(ExperimentConfig& cfg, const std::string& key,
               const std::string& value);

// Full validation; throws std::invalid_argument naming the offending field.
void validate_config(const ExperimentConfig& cfg);

// Canonical one-line rendering (stable field order) and its FNV-1a hash.
std::string config_canonical(const ExperimentConfig& cfg);
std::uint64_t config_hash(const ExperimentConfig& cfg);
std::string config_hash_hex(const ExperimentConfig& cfg);

TailLaw law_from(const ExperimentConfig& cfg);
PathFunctional functional_from(const ExperimentConfig& cfg);
// nullptr when psi == "none".
std::unique_ptr<SeparableBump> psi_from(const ExperimentConfig& cfg);

// The N grid to sweep: N_grid when given, else {N}.
std::vector<std::int64_t> n_grid_from(const ExperimentConfig& cfg);

// JSON run manifest (config, hash, tool version, wall time).
void write_manifest(const std::string& path, const ExperimentConfig& cfg,
                    double wall_seconds);

inline constexpr const char* kToolVersion = "1.0.0";

}  // namespace polymerlab
