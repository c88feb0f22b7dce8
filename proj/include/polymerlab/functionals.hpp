#pragma once
// Path functionals f evaluated on diffusively rescaled walk paths
//     S^(N)_t = sqrt(d/N) ((1-w) S_{floor(Nt)} + w S_{floor(Nt)+1}),
// and on continuum paths in the same coordinates. Three classes:
//
//   * constant_one  -- f == 1.
//   * cylinder      -- product of axis-aligned box indicators at fixed times
//                      t_1 < ... < t_k in [0,1]; factorizes over the Markov
//                      structure (dynamic programming stays exact).
//   * custom        -- arbitrary bounded g(path); path-average estimators
//                      only (brute force / Monte Carlo), never DP.
//
// Any of these can be wrapped multiplicatively with a spatial support cutoff
// h_A: on the lattice h_A is the sharp box indicator
//     1{ max_n |S_n|_inf <= R*(A) },  R*(A) = floor((A + 1/2) sqrt(N/d)),
// which equals the base functional when the rescaled sup-norm is <= A and
// vanishes when it is >= A+1 (for N >= 4d), and factorizes layer by layer.

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "polymerlab/env_slab.hpp"

namespace polymerlab {

// A nearest-neighbor walk path S_0 = 0, S_1, ..., S_N on Z^d.
struct WalkPath {
  int64_t N = 0;
  int d = 1;
  std::vector<std::array<int32_t, kMaxDim>> pos;  // size N+1, pos[0] = 0
};

// S^(N)_t into out[0..d); t in [0,1].
void rescaled_point(const WalkPath& path, double t, double* out);
// sup_t |S^(N)_t|_inf (attained at a lattice vertex).
double rescaled_supnorm(const WalkPath& path);

// Axis-aligned box indicator at one time, in rescaled coordinates.
struct CylinderBox {
  double t = 0.5;
  double lo[kMaxDim] = {0, 0, 0, 0};
  double hi[kMaxDim] = {0, 0, 0, 0};
  bool contains(const double* y, int d) const;
};

class PathFunctional {
 public:
  enum class Kind { constant_one, cylinder, custom };

  static PathFunctional constant_one();
  // Box times need not be distinct from each other or from lattice times.
  static PathFunctional cylinder(std::vector<CylinderBox> boxes);
  static PathFunctional custom(std::function<double(const WalkPath&)> g,
                               double bound);
  // Multiplicative spatial cutoff h_A; A >= 0.
  PathFunctional with_support_cutoff(double A) const;

  Kind kind() const { return kind_; }
  bool factorizes() const { return kind_ != Kind::custom; }
  bool has_cutoff() const { return cutoff_A_ >= 0.0; }
  double cutoff_A() const { return cutoff_A_; }
  const std::vector<CylinderBox>& boxes() const { return boxes_; }
  double bound() const { return bound_; }

  // Full discrete semantics (cutoff, boxes at interpolated times, custom g).
  double evaluate(const WalkPath& path) const;

  // Lattice cutoff radius R*(A) for a given (N, d).
  static int64_t cutoff_lattice_radius(double A, int64_t N, int d);

  // Short tag for result rows, e.g. "one", "cyl2", "one|A=3".
  std::string describe() const;

 private:
  PathFunctional() = default;
  Kind kind_ = Kind::constant_one;
  std::vector<CylinderBox> boxes_;
  std::function<double(const WalkPath&)> g_;
  double bound_ = 1.0;
  double cutoff_A_ = -1.0;
};

}  // namespace polymerlab
