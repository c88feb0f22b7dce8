#include "polymerlab/tail_law.hpp"

#include <cmath>
#include <stdexcept>

#include "polymerlab/numeric.hpp"

namespace polymerlab {

std::string family_name(TailFamily f) {
  switch (f) {
    case TailFamily::pareto: return "pareto";
    case TailFamily::centered_pareto: return "centered_pareto";
    case TailFamily::log_pareto: return "log_pareto";
  }
  return "?";
}

TailFamily family_from_name(const std::string& name) {
  if (name == "pareto") return TailFamily::pareto;
  if (name == "centered_pareto") return TailFamily::centered_pareto;
  if (name == "log_pareto") return TailFamily::log_pareto;
  throw std::invalid_argument("law.family: unknown family '" + name + "'");
}

namespace {
// E[Y] for the log_pareto law normalized to x_m = 1 (finite iff alpha > 1).
double log_family_unit_mean(double alpha, double theta) {
  auto tail = [&](double y) {
    return std::pow(y, -alpha) * std::pow(1.0 + std::log(y), -theta);
  };
  return 1.0 + integrate_semi_inf(tail, 1.0, 1e-13);
}
}  // namespace

TailLaw TailLaw::make(TailFamily family, double alpha, double x_m,
                      double theta, bool allow_uncentered) {
  if (!(alpha > 0.0) || !(alpha < 2.0))
    throw std::invalid_argument("law.alpha: must lie in (0,2)");
  TailLaw law;
  law.family_ = family;
  law.alpha_ = alpha;
  law.theta_ = theta;
  law.allow_uncentered_ = allow_uncentered;
  switch (family) {
    case TailFamily::pareto: {
      law.x_m_ = x_m > 0.0 ? x_m : 1.0;
      if (alpha > 1.0 && !allow_uncentered)
        throw std::invalid_argument(
            "law: pareto with alpha in (1,2) has finite nonzero mean, "
            "violating the centering assumption (E[eta] must be 0 or "
            "infinite); set law.allow_uncentered for diagnostics-only use");
      break;
    }
    case TailFamily::centered_pareto: {
      if (!(alpha > 1.0))
        throw std::invalid_argument(
            "law: centered_pareto requires alpha in (1,2)");
      double want = (alpha - 1.0) / alpha;
      if (x_m > 0.0 && std::abs(x_m - want) > 1e-12 * want)
        throw std::invalid_argument(
            "law.x_m: centered_pareto fixes x_m = (alpha-1)/alpha");
      law.x_m_ = want;
      break;
    }
    case TailFamily::log_pareto: {
      if (!(theta > 0.0))
        throw std::invalid_argument("law.theta: must be > 0 for log_pareto");
      if (alpha > 1.0) {
        double unit_mean = log_family_unit_mean(alpha, theta);
        double centered_xm = 1.0 / unit_mean;
        if (x_m > 0.0) {
          law.x_m_ = x_m;
          if (std::abs(x_m * unit_mean - 1.0) > 1e-9 && !allow_uncentered)
            throw std::invalid_argument(
                "law.x_m: log_pareto with alpha in (1,2) requires the "
                "mean-one scale (or law.allow_uncentered for diagnostics)");
        } else {
          law.x_m_ = centered_xm;
        }
      } else {
        law.x_m_ = x_m > 0.0 ? x_m : 1.0;
      }
      break;
    }
  }
  if (!(law.x_m_ > 0.0))
    throw std::invalid_argument("law.x_m: must be > 0 (eta > -1 a.s.)");
  return law;
}

double TailLaw::tail_prob(double z) const {
  if (z < 0.0) return 1.0;
  if (z <= x_m_) return 1.0;
  double base = std::pow(x_m_ / z, alpha_);
  if (family_ == TailFamily::log_pareto)
    base *= std::pow(1.0 + std::log(z / x_m_), -theta_);
  return base;
}

double TailLaw::phi(double z) const {
  if (z <= x_m_) return std::pow(z, alpha_);
  return tail_prob(z) * std::pow(z, alpha_);
}

double TailLaw::tail_inverse(double u) const {
  if (!(u > 0.0) || !(u < 1.0))
    throw std::invalid_argument("tail_inverse: uniform must lie in (0,1)");
  if (family_ != TailFamily::log_pareto) return x_m_ * std::pow(u, -1.0 / alpha_);
  // Solve alpha*L + theta*log(1+L) = -log(u) for L = log(z/x_m) >= 0.
  double target = -std::log(u);
  double L = std::max(0.0, target / alpha_);
  for (int iter = 0; iter < 64; ++iter) {
    double g = alpha_ * L + theta_ * std::log1p(L) - target;
    double gp = alpha_ + theta_ / (1.0 + L);
    double step = g / gp;
    L -= step;
    if (L < 0.0) L = 0.0;
    if (std::abs(step) < 1e-15 * (1.0 + L)) break;
  }
  return x_m_ * std::exp(L);
}

double TailLaw::sample_eta(double uniform) const {
  return tail_inverse(uniform) - 1.0;
}

double TailLaw::log_tail_integral(int k, double lo, double hi) const {
  // E[X^k 1{lo <= X < hi}] for the log family, via x = x_m e^s.
  double S0 = std::log(std::max(lo, x_m_) / x_m_);
  double S1 = std::log(hi / x_m_);
  if (!(S1 > S0)) return 0.0;
  double a = alpha_, th = theta_, xm = x_m_;
  auto g = [=](double s) {
    return std::exp((k - a) * s) * std::pow(1.0 + s, -th) *
           (a + th / (1.0 + s));
  };
  return std::pow(xm, k) * integrate_finite(g, S0, S1, 1e-11);
}

TruncatedMoment TailLaw::truncated_moment(int p, double u) const {
  if (p != 1 && p != 2)
    throw std::invalid_argument("truncated_moment: p must be 1 or 2");
  TruncatedMoment out;
  if (u <= x_m_) {
    out.degenerate = true;
    return out;
  }
  double P, T1, T2 = 0.0;
  if (family_ == TailFamily::log_pareto) {
    P = log_tail_integral(0, x_m_, u);
    T1 = log_tail_integral(1, x_m_, u);
    if (p == 2) T2 = log_tail_integral(2, x_m_, u);
  } else {
    P = 1.0 - std::pow(x_m_ / u, alpha_);
    if (alpha_ == 1.0) {
      T1 = x_m_ * std::log(u / x_m_);
    } else {
      T1 = alpha_ * std::pow(x_m_, alpha_) / (alpha_ - 1.0) *
           (std::pow(x_m_, 1.0 - alpha_) - std::pow(u, 1.0 - alpha_));
    }
    if (p == 2)
      T2 = alpha_ * std::pow(x_m_, alpha_) / (2.0 - alpha_) *
           (std::pow(u, 2.0 - alpha_) - std::pow(x_m_, 2.0 - alpha_));
  }
  if (p == 1) {
    out.exact = T1 - P;
    if (alpha_ == 1.0)
      out.asymptotic = phi(u) * std::log(u / x_m_);
    else
      out.asymptotic = alpha_ / (1.0 - alpha_) * std::pow(u, 1.0 - alpha_) * phi(u);
  } else {
    out.exact = T2 - 2.0 * T1 + P;
    out.asymptotic = alpha_ / (2.0 - alpha_) * std::pow(u, 2.0 - alpha_) * phi(u);
  }
  return out;
}

double TailLaw::mean_below(double u) const {
  if (u <= x_m_)
    throw std::invalid_argument("mean_below: empty truncation band (u <= x_m)");
  double p_below = cdf(u);
  return truncated_moment(1, u).exact / p_below;
}

double kappa_a(double alpha, double a) {
  if (!(a > 0.0)) throw std::invalid_argument("kappa_a: a must be > 0");
  if (alpha < 1.0) return 0.0;
  if (alpha == 1.0) return std::log(1.0 / a);
  return alpha / (alpha - 1.0) * std::pow(a, 1.0 - alpha);
}

double kappa_a_shifted(double alpha, double a) {
  if (!(a > 0.0)) throw std::invalid_argument("kappa_a_shifted: a must be > 0");
  if (!(alpha > 1.0))
    throw std::invalid_argument("kappa_a_shifted: defined for alpha in (1,2)");
  return alpha / (alpha - 1.0) * (std::pow(a, 1.0 - alpha) - 1.0);
}

}  // namespace polymerlab
