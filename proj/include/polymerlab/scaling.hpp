#pragma once
// Intermediate-disorder scaling constants for a given (law, N, d, beta_hat).
//
// V_N is defined as the exact solution of
//     P(1 + eta > V_N) = 2 d^{d/2} N^{-(1+d/2)},
// i.e. the tail quantile at the inverse of the diffusive-box site count.
// For constant-phi families this is the closed form
//     V_N = x_m (2 d^{d/2})^{-1/alpha} N^{(1/alpha)(1+d/2)}
// exactly; for the log family it is the exact inverse of the exact tail.
// beta_N = beta_hat (N/d)^{d/2} / (2 V_N), so beta_N * V_N is exactly
// beta_hat (N/d)^{d/2} / 2.

#include <cmath>
#include <cstdint>
#include <limits>

#include "polymerlab/tail_law.hpp"

namespace polymerlab {

double alpha_critical(int d);  // min(1 + 2/d, 2)

class ScalingPlan {
 public:
  static ScalingPlan make(const TailLaw& law, int64_t N, int d,
                          double beta_hat);

  const TailLaw& law() const { return law_; }
  int64_t N() const { return N_; }
  int d() const { return d_; }
  double beta_hat() const { return beta_hat_; }
  double V_N() const { return V_N_; }
  double beta_N() const { return beta_N_; }

  // alpha=1 normalization constant; throws for alpha != 1.
  double gamma_N() const;
  // Exponential normalization e^{-beta_hat * gamma_N * 1{alpha=1}}.
  double gamma_factor() const;

  // Discrete centering -E[eta | 1+eta < a V_N] for alpha in [1,2); 0 for
  // alpha in (0,1). Throws if the conditioning event is empty.
  double kappa_N_a(double a) const;
  // Continuum centering constant for this law's alpha.
  double kappa(double a) const { return kappa_a(law_.alpha(), a); }

 private:
  TailLaw law_ = TailLaw::make(TailFamily::pareto, 0.5);
  int64_t N_ = 0;
  int d_ = 1;
  double beta_hat_ = 0.0;
  double V_N_ = 0.0;
  double beta_N_ = 0.0;
};

// Band truncation of the disorder: eta is replaced by -kappa_N_a below
// a V_N, kept on [a V_N, b V_N), zeroed at and above b V_N. a=0, b=inf is
// the identity.
struct TruncationSpec {
  double a = 0.0;                 // lower cutoff in [0,1]
  double b = std::numeric_limits<double>::infinity();  // upper cutoff, > 1
  double kappa_N_a = 0.0;         // replacement constant below the band
  double V_N = 0.0;               // disorder scale the cutoffs multiply

  static TruncationSpec none() { return {}; }
  static TruncationSpec make(const ScalingPlan& plan, double a, double b);
  bool is_identity() const { return a == 0.0 && !std::isfinite(b); }
};

double truncate_eta(double eta, const TruncationSpec& spec);

}  // namespace polymerlab
