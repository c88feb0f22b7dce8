#pragma once
// Heavy-tailed disorder laws. A TailLaw describes the distribution of the
// positive variable X = 1 + eta through its upper tail
//     P(X > z) = phi(z) * z^(-alpha),   alpha in (0,2),
// where phi is slowly varying. Two families have constant phi (pareto,
// centered_pareto, exact closed forms everywhere) and one has a logarithmic
// perturbation (log_pareto, used as a stress test; moments fall back to
// quadrature).
//
// Model assumption: eta > -1 almost surely and E[eta] is either 0 (centered
// families) or +infinity (alpha <= 1). An uncentered law with finite nonzero
// mean is refused unless explicitly flagged as diagnostics-only.

#include <cstdint>
#include <string>

namespace polymerlab {

enum class TailFamily { pareto, centered_pareto, log_pareto };

std::string family_name(TailFamily f);
TailFamily family_from_name(const std::string& name);

struct TruncatedMoment {
  double exact = 0.0;       // E[eta^p 1{1+eta < u}]
  double asymptotic = 0.0;  // leading term alpha/(p-alpha) u^(p-alpha) phi(u)
  bool degenerate = false;  // u <= x_m: empty truncation event
};

class TailLaw {
 public:
  // x_m <= 0 selects the family default (pareto: 1, centered_pareto:
  // (alpha-1)/alpha, log_pareto: 1 for alpha <= 1, mean-one solution for
  // alpha in (1,2)). theta is the log-damping exponent (log_pareto only).
  static TailLaw make(TailFamily family, double alpha, double x_m = 0.0,
                      double theta = 1.0, bool allow_uncentered = false);

  TailFamily family() const { return family_; }
  double alpha() const { return alpha_; }
  double x_m() const { return x_m_; }
  double theta() const { return theta_; }
  bool allow_uncentered() const { return allow_uncentered_; }

  // P(1 + eta > z); equals 1 for z <= x_m.
  double tail_prob(double z) const;
  // Slowly varying part phi(z) = z^alpha * tail_prob(z) for z >= x_m.
  double phi(double z) const;
  // Exact inverse of tail_prob on (0,1): returns z with P(X > z) = u.
  double tail_inverse(double u) const;
  // Inverse-transform sample of eta from a uniform in (0,1).
  double sample_eta(double uniform) const;

  // E[eta^p 1{1+eta < u}] for p in {1,2}, exact (closed form, or quadrature
  // at relative tolerance 1e-10 for log_pareto), plus the asymptotic
  // leading term for ratio diagnostics.
  TruncatedMoment truncated_moment(int p, double u) const;
  // E[eta | 1+eta < u]; requires u > x_m.
  double mean_below(double u) const;
  // P(1 + eta < u).
  double cdf(double u) const { return 1.0 - tail_prob(u); }

 private:
  TailLaw() = default;
  double log_tail_integral(int k, double lo, double hi) const;  // log family
  TailFamily family_ = TailFamily::pareto;
  double alpha_ = 0.5;
  double x_m_ = 1.0;
  double theta_ = 1.0;
  bool allow_uncentered_ = false;
};

// Continuum centering constant: 0 for alpha<1, log(1/a) at alpha=1,
// (alpha/(alpha-1)) a^(1-alpha) for alpha in (1,2).
double kappa_a(double alpha, double a);
// Alternate centering (alpha/(alpha-1))(a^(1-alpha) - 1) for alpha in (1,2);
// differs from kappa_a by the constant alpha/(alpha-1). Exposed so the exact
// relation between the two normalizations can be cross-checked.
double kappa_a_shifted(double alpha, double a);

}  // namespace polymerlab
