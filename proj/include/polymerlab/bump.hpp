#pragma once
// Separable test functions psi(t,x) = b_0(t) prod_j b_j(x_j) built from
// Gaussian bumps b(u) = exp(-(u-c)^2/(2w^2)) truncated to |u-c| <= 6.5 w,
// so psi is compactly supported (the value at the truncation edge is below
// 7e-10 of the peak). Used to pair the rescaled disorder fields and the
// Poisson noise against smooth compactly supported functions.

#include <cstdint>
#include <functional>
#include <vector>

namespace polymerlab {

struct BumpFactor {
  double center = 0.5;
  double width = 0.1;
};

class SeparableBump {
 public:
  SeparableBump(BumpFactor time, std::vector<BumpFactor> space);

  int d() const { return static_cast<int>(space_.size()); }
  double operator()(double t, const double* x) const;

  // Support intervals (time support clipped to [0,1]).
  double t_lo() const { return t_lo_; }
  double t_hi() const { return t_hi_; }
  double x_lo(int j) const;
  double x_hi(int j) const;

  // integral of psi^power over [0,1] x R^d; power in {1,2}.
  double integral(int power = 1) const;

  // Lattice sum of psi^power over reachable sites (n,x), psi evaluated at
  // (n/N, x sqrt(d/N)); power in {1,2}.
  double lattice_sum(int64_t N, int power) const;

  // Visit every reachable lattice site in the support with its psi value.
  void for_each_lattice_site(
      int64_t N,
      const std::function<void(int64_t, const int32_t*, double)>& fn) const;

  // True when the rescaled support stays inside the reachable cone
  // |x| <= n and, if box_radius > 0, inside |x|_inf <= box_radius.
  bool fits_lattice(int64_t N) const;
  bool fits_window(double L) const;  // spatial support inside [-L,L]^d

  static double edge_sigmas() { return 6.5; }

 private:
  double factor(double u, const BumpFactor& b) const;
  BumpFactor time_;
  std::vector<BumpFactor> space_;
  double t_lo_ = 0.0, t_hi_ = 1.0;
};

}  // namespace polymerlab
