#include "polymerlab/scaling.hpp"

#include <stdexcept>
#include <string>

namespace polymerlab {

double alpha_critical(int d) {
  if (d < 1) throw std::invalid_argument("d: must be >= 1");
  return std::min(1.0 + 2.0 / static_cast<double>(d), 2.0);
}

ScalingPlan ScalingPlan::make(const TailLaw& law, int64_t N, int d,
                              double beta_hat) {
  if (N < 1) throw std::invalid_argument("N: must be >= 1");
  if (d < 1) throw std::invalid_argument("d: must be >= 1");
  if (!(beta_hat > 0.0)) throw std::invalid_argument("beta_hat: must be > 0");
  if (!(law.alpha() < alpha_critical(d)))
    throw std::invalid_argument(
        "law.alpha: must satisfy alpha < alpha_c(d) = min(1+2/d, 2); got "
        "alpha = " + std::to_string(law.alpha()) + " at d = " +
        std::to_string(d));
  ScalingPlan plan;
  plan.law_ = law;
  plan.N_ = N;
  plan.d_ = d;
  plan.beta_hat_ = beta_hat;
  double dd = static_cast<double>(d);
  double quantile =
      2.0 * std::pow(dd, dd / 2.0) * std::pow(static_cast<double>(N), -(1.0 + dd / 2.0));
  if (!(quantile < 1.0))
    throw std::invalid_argument(
        "N: too small for the disorder scale (need N^(1+d/2) > 2 d^(d/2))");
  plan.V_N_ = law.tail_inverse(quantile);
  plan.beta_N_ =
      0.5 * beta_hat * std::pow(static_cast<double>(N) / dd, dd / 2.0) / plan.V_N_;
  if (!(plan.beta_N_ > 0.0) || !(plan.beta_N_ < 1.0))
    throw std::runtime_error(
        "beta_N: fell outside (0,1); the discrete Gibbs weights would not "
        "stay positive (beta_N = " + std::to_string(plan.beta_N_) + ")");
  return plan;
}

double ScalingPlan::gamma_N() const {
  if (law_.alpha() != 1.0)
    throw std::invalid_argument("gamma_N: only defined at alpha = 1");
  double dd = static_cast<double>(d_);
  double pre = std::pow(static_cast<double>(N_), 1.0 + dd / 2.0) /
               (2.0 * std::pow(dd, dd / 2.0)) / V_N_;
  return pre * law_.truncated_moment(1, V_N_).exact;
}

double ScalingPlan::gamma_factor() const {
  if (law_.alpha() != 1.0) return 1.0;
  return std::exp(-beta_hat_ * gamma_N());
}

double ScalingPlan::kappa_N_a(double a) const {
  if (!(a > 0.0)) throw std::invalid_argument("kappa_N_a: a must be > 0");
  if (law_.alpha() < 1.0) return 0.0;
  double u = a * V_N_;
  if (u <= law_.x_m())
    throw std::invalid_argument(
        "kappa_N_a: empty truncation band (a V_N <= x_m)");
  return -law_.mean_below(u);
}

TruncationSpec TruncationSpec::make(const ScalingPlan& plan, double a,
                                    double b) {
  if (a < 0.0 || a > 1.0)
    throw std::invalid_argument("truncation.a: must lie in [0,1]");
  if (!(b > 1.0)) throw std::invalid_argument("truncation.b: must be > 1");
  if (!(a < b)) throw std::invalid_argument("truncation: requires a < b");
  TruncationSpec spec;
  spec.a = a;
  spec.b = b;
  spec.kappa_N_a = a > 0.0 ? plan.kappa_N_a(a) : 0.0;
  spec.V_N = plan.V_N();
  return spec;
}

double truncate_eta(double eta, const TruncationSpec& spec) {
  if (spec.is_identity()) return eta;
  double x = 1.0 + eta;
  if (x < spec.a * spec.V_N) return -spec.kappa_N_a;
  if (std::isfinite(spec.b) && x >= spec.b * spec.V_N) return 0.0;
  return eta;
}

}  // namespace polymerlab
