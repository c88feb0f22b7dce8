#pragma once
// On-disk formats: a versioned binary container for disorder slabs
// (header, sorted site triples, FNV-1a checksum footer) and the stable CSV
// schemas for partition, cloud, convergence and comparison results.  All
// floating-point text uses %.17g, so identical runs write identical bytes.

#include <cstdint>
#include <string>
#include <vector>

#include "polymerlab/cloud.hpp"
#include "polymerlab/env_slab.hpp"

namespace polymerlab {

struct SlabFileInfo {
  std::int64_t N = 0;
  int d = 1;
  TailFamily family = TailFamily::pareto;
  double alpha = 0.0;
  double x_m = 0.0;
  double theta = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t replica = 0;
  std::int64_t radius = -1;
  std::uint64_t count = 0;
};

// Materializes the window |x|_inf <= min(n, radius) and writes it; the
// returned info mirrors the header.
SlabFileInfo save_slab(const EnvSlab& env, std::int64_t radius,
                       const std::string& path);

// Loads a dense slab (sites absent from the file carry eta = 0).  Magic,
// version and checksum mismatches are rejected.
EnvSlab load_slab(const std::string& path, SlabFileInfo* info = nullptr);

// Shortest %.17g rendering (deterministic across runs).
std::string format_double(double v);

struct PartitionRow {
  std::string experiment_id;
  std::int64_t N = 0;
  int d = 1;
  double alpha = 0.0;
  double a = 0.0;
  double b = 0.0;
  double beta_hat = 0.0;
  std::string functional;
  double value = 0.0;
  double normalization = 1.0;
  std::uint64_t seed = 0;
};
void write_partition_csv(const std::string& path,
                         const std::vector<PartitionRow>& rows);

void write_cloud_csv(const std::string& path, const PoissonCloud& cloud,
                     std::uint64_t seed);

struct ConvergenceRow {
  std::string experiment_id;
  std::string side;     // "discrete" or "continuum" (or a sweep label)
  double N_or_a = 0.0;
  std::string statistic;
  double value = 0.0;
  double se = 0.0;
  std::uint64_t seed = 0;
};
void write_convergence_csv(const std::string& path,
                           const std::vector<ConvergenceRow>& rows);

struct AppendixRow {
  std::string check;
  int k = 1;
  std::string params;  // free-form key=value list (carries hash and seed)
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
};
void write_appendix_csv(const std::string& path,
                        const std::vector<AppendixRow>& rows);

}  // namespace polymerlab
