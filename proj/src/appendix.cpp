#include "polymerlab/appendix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "polymerlab/rng.hpp"

namespace polymerlab {

namespace {

void check_spec(const DirichletSpec& spec) {
  if (spec.k < 1)
    throw std::invalid_argument("dirichlet: chain length k must be >= 1");
  if (spec.zetas.size() != static_cast<std::size_t>(spec.k) + 1)
    throw std::invalid_argument("dirichlet: need exactly k+1 exponents");
  for (double z : spec.zetas)
    if (!(z > 0.0))
      throw std::invalid_argument("dirichlet: exponents must be positive");
  if (!(spec.t > 0.0))
    throw std::invalid_argument("dirichlet: horizon t must be positive");
}

// int_0^1 v^{p-1} (1-v)^{q-1} dv by a tanh-sinh rule written directly in
// terms of the node's distance to the nearer endpoint, m = 1 - tanh(z)
// evaluated as 2/(1+e^{2z}).  Mapping the generic (-1,1) abscissa to [0,1]
// would compute that distance by subtraction and lose it to cancellation,
// which caps the accuracy near 1e-5 when p or q drops below 1; this form
// holds relative error near machine precision for exponents down to ~0.1.
double beta_numeric(double p, double q) {
  const double half_pi = std::numbers::pi / 2.0;
  const double tmax = 5.2;
  const int max_level = 12;
  // One symmetric node pair per k >= 1: v = m/2 and v = 1 - m/2.
  auto pair_term = [p, q](double m, double w) {
    const double lo = 0.5 * m, hi = 1.0 - 0.5 * m;
    return w * (std::pow(lo, p - 1.0) * std::pow(hi, q - 1.0) +
                std::pow(hi, p - 1.0) * std::pow(lo, q - 1.0));
  };
  double sum = 0.0, prev = 0.0;
  for (int level = 0; level <= max_level; ++level) {
    const double h = std::ldexp(1.0, -level);
    const std::int64_t kmax = static_cast<std::int64_t>(tmax / h);
    double add = 0.0;
    // Level 0 takes every node; later levels add only the new midpoints
    // (odd multiples of the halved step).
    for (std::int64_t k = level == 0 ? 0 : 1; k <= kmax;
         k += level == 0 ? 1 : 2) {
      const double t = static_cast<double>(k) * h;
      const double z = half_pi * std::sinh(t);
      const double w =
          half_pi * std::cosh(t) / std::pow(std::cosh(z), 2);
      if (w < 1e-300) break;
      const double m = 2.0 / (1.0 + std::exp(2.0 * z));
      const double term = pair_term(m, w);
      add += k == 0 ? 0.5 * term : term;
    }
    sum = level == 0 ? add * h : 0.5 * sum + add * h;
    if (level >= 2 && std::abs(sum - prev) <=
                          1e-14 * std::max(std::abs(sum), 1e-300))
      break;
    prev = sum;
  }
  // `sum` approximates the integral over the (-1,1) parameterization;
  // v = (1+x)/2 contributes the map derivative 1/2.
  return 0.5 * sum;
}

// Slowly varying factor extended below the support edge by freezing it at
// phi(x_m); for the constant-phi families this is the constant everywhere.
double phi_frozen(const TailLaw& law, double u) {
  return law.phi(std::max(u, law.x_m()));
}

// E[X 1{X < u}] for X = 1 + eta.
double first_moment_below(const TailLaw& law, double u) {
  if (u <= law.x_m()) return 0.0;
  return law.truncated_moment(1, u).exact + law.cdf(u);
}

// E[ramp(X) 1{X < B}] in closed form via truncated moments.
double ramp_lhs_factor(const TailLaw& law, const RampSpec& ramp, double B) {
  if (ramp.cap == 0.0 || ramp.shift >= B) return 0.0;
  const double v = std::min(ramp.shift + ramp.cap, B);
  const double rising =
      first_moment_below(law, v) - first_moment_below(law, ramp.shift) -
      ramp.shift * (law.cdf(v) - law.cdf(ramp.shift));
  const double flat = ramp.shift + ramp.cap < B
                          ? ramp.cap * (law.cdf(B) - law.cdf(ramp.shift + ramp.cap))
                          : 0.0;
  return rising + flat;
}

// int_0^{2B} ramp(u) u^{-(1+alpha)} phi(u) du; +inf when the unshifted
// ramp meets alpha >= 1.
double ramp_rhs_factor(const TailLaw& law, const RampSpec& ramp, double B) {
  if (ramp.cap == 0.0 || ramp.shift >= 2.0 * B) return 0.0;
  const double alpha = law.alpha();
  if (ramp.shift == 0.0 && alpha >= 1.0)
    return std::numeric_limits<double>::infinity();
  const double mid = std::min(ramp.shift + ramp.cap, 2.0 * B);
  double total = integrate_finite(
      [&](double u) {
        if (!(u > 0.0)) return 0.0;
        return (u - ramp.shift) * std::pow(u, -1.0 - alpha) *
               phi_frozen(law, u);
      },
      ramp.shift, mid, 1e-12);
  if (mid < 2.0 * B)
    total += ramp.cap * integrate_finite(
                            [&](double u) {
                              return std::pow(u, -1.0 - alpha) *
                                     phi_frozen(law, u);
                            },
                            mid, 2.0 * B, 1e-12);
  return total;
}

// E[X^2 1{X < T}] = cdf + 2 T1 + T2.
double step_lhs_factor(const TailLaw& law, double T) {
  if (T <= law.x_m()) return 0.0;
  return law.cdf(T) + 2.0 * law.truncated_moment(1, T).exact +
         law.truncated_moment(2, T).exact;
}

// int_0^T u^{1-alpha} phi(u) du.
double step_rhs_factor(const TailLaw& law, double T) {
  const double alpha = law.alpha();
  if (law.family() != TailFamily::log_pareto) {
    const double phi = law.phi(law.x_m() + 1.0);  // constant for these laws
    return phi * std::pow(T, 2.0 - alpha) / (2.0 - alpha);
  }
  return integrate_finite(
      [&](double u) {
        if (!(u > 0.0)) return 0.0;
        return std::pow(u, 1.0 - alpha) * phi_frozen(law, u);
      },
      0.0, T, 1e-12);
}

}  // namespace

double dirichlet_gamma_formula(const DirichletSpec& spec) {
  check_spec(spec);
  double total = 0.0;
  double log_num = 0.0;
  for (double z : spec.zetas) {
    total += z;
    log_num += std::lgamma(z);
  }
  return std::pow(spec.t, total - 1.0) *
         std::exp(log_num - std::lgamma(total));
}

DirichletResult dirichlet_identity(const DirichletSpec& spec) {
  check_spec(spec);
  if (spec.k > 6)
    throw std::invalid_argument(
        "dirichlet: direct quadrature limited to k <= 6; use the Monte-Carlo "
        "variant");
  // Peel gaps from the right: each scaling substitution leaves one
  // one-dimensional Beta-type integral with the accumulated exponent.
  double prefix = spec.zetas[0];
  double product = 1.0;
  for (int j = 1; j <= spec.k; ++j) {
    product *= beta_numeric(prefix, spec.zetas[static_cast<std::size_t>(j)]);
    prefix += spec.zetas[static_cast<std::size_t>(j)];
  }
  DirichletResult out;
  out.numeric = std::pow(spec.t, prefix - 1.0) * product;
  out.formula = dirichlet_gamma_formula(spec);
  return out;
}

McEstimate dirichlet_identity_mc(const DirichletSpec& spec,
                                 std::int64_t samples, std::uint64_t seed) {
  check_spec(spec);
  if (spec.k > 8)
    throw std::invalid_argument("dirichlet: Monte Carlo limited to k <= 8");
  if (samples < 2)
    throw std::invalid_argument("dirichlet: need at least two samples");
  for (double z : spec.zetas)
    if (!(z > 0.5))
      throw std::invalid_argument(
          "dirichlet: Monte Carlo needs every exponent > 1/2, otherwise the "
          "estimator has infinite variance");

  RngStream rs(seed, stream_id(stream_purpose::kResample, 0));
  double volume = 1.0;  // t^k / k!
  for (int j = 1; j <= spec.k; ++j) volume *= spec.t / j;

  std::vector<double> s(static_cast<std::size_t>(spec.k));
  std::vector<double> vals;
  vals.reserve(static_cast<std::size_t>(samples));
  for (std::int64_t i = 0; i < samples; ++i) {
    for (double& sj : s) sj = spec.t * rs.u01();
    std::sort(s.begin(), s.end());
    double w = 1.0;
    double prev = 0.0;
    for (int j = 0; j < spec.k; ++j) {
      w *= std::pow(s[static_cast<std::size_t>(j)] - prev,
                    spec.zetas[static_cast<std::size_t>(j)] - 1.0);
      prev = s[static_cast<std::size_t>(j)];
    }
    w *= std::pow(spec.t - prev, spec.zetas.back() - 1.0);
    vals.push_back(w);
  }
  const auto [mean, se] = jackknife_mean(vals);
  return McEstimate{volume * mean, volume * se};
}

ComparisonReport increasing_comparison_check(const TailLaw& law,
                                             const std::vector<RampSpec>& ramps,
                                             double B, std::int64_t samples,
                                             std::uint64_t seed,
                                             double constant) {
  if (ramps.empty())
    throw std::invalid_argument("comparison: need at least one ramp factor");
  if (!(B > 0.0)) throw std::invalid_argument("comparison: B must be positive");
  if (!(constant > 0.0))
    throw std::invalid_argument("comparison: constant must be positive");
  for (const RampSpec& r : ramps)
    if (!(r.shift >= 0.0) || !(r.cap >= 0.0))
      throw std::invalid_argument(
          "comparison: ramps need shift >= 0 and cap >= 0");
  if (samples < 2)
    throw std::invalid_argument("comparison: need at least two samples");

  ComparisonReport rep;
  rep.k = static_cast<int>(ramps.size());
  rep.constant = constant;

  rep.lhs = 1.0;
  rep.rhs_raw = 1.0;
  for (const RampSpec& r : ramps) {
    rep.lhs *= ramp_lhs_factor(law, r, B);
    rep.rhs_raw *= ramp_rhs_factor(law, r, B);
  }
  if (std::isinf(rep.rhs_raw)) rep.trivially_true = true;
  rep.rhs = std::pow(constant, rep.k) * rep.rhs_raw;

  RngStream rs(seed, stream_id(stream_purpose::kResample, 0));
  std::vector<double> vals;
  vals.reserve(static_cast<std::size_t>(samples));
  for (std::int64_t i = 0; i < samples; ++i) {
    double prod = 1.0;
    for (const RampSpec& r : ramps) {
      const double x = 1.0 + law.sample_eta(rs.u01());
      if (!(x < B)) {
        prod = 0.0;
        break;
      }
      prod *= std::min(std::max(x - r.shift, 0.0), r.cap);
    }
    vals.push_back(prod);
  }
  const auto [mean, se] = jackknife_mean(vals);
  rep.lhs_mc = mean;
  rep.lhs_mc_se = se;

  rep.holds = rep.trivially_true || rep.lhs <= rep.rhs;
  return rep;
}

ComparisonReport decreasing_comparison_check(const TailLaw& law,
                                             const std::vector<StepSpec>& steps,
                                             std::int64_t samples,
                                             std::uint64_t seed,
                                             double constant) {
  if (steps.empty())
    throw std::invalid_argument("comparison: need at least one step factor");
  if (!(constant > 0.0))
    throw std::invalid_argument("comparison: constant must be positive");
  for (const StepSpec& s : steps)
    if (!(s.threshold > 0.0))
      throw std::invalid_argument("comparison: step thresholds must be positive");

  ComparisonReport rep;
  rep.k = static_cast<int>(steps.size());
  rep.constant = constant;
  rep.lhs = 1.0;
  rep.rhs_raw = 1.0;
  for (const StepSpec& s : steps) {
    if (s.threshold <= law.x_m()) rep.degenerate = true;
    rep.lhs *= step_lhs_factor(law, s.threshold);
    rep.rhs_raw *= step_rhs_factor(law, s.threshold);
  }
  rep.rhs = std::pow(constant, rep.k) * rep.rhs_raw;

  if (samples >= 2) {
    RngStream rs(seed, stream_id(stream_purpose::kResample, 0));
    std::vector<double> vals;
    vals.reserve(static_cast<std::size_t>(samples));
    for (std::int64_t i = 0; i < samples; ++i) {
      double prod = 1.0;
      for (const StepSpec& s : steps) {
        const double x = 1.0 + law.sample_eta(rs.u01());
        if (!(x < s.threshold)) {
          prod = 0.0;
          break;
        }
        prod *= x * x;
      }
      vals.push_back(prod);
    }
    const auto [mean, se] = jackknife_mean(vals);
    rep.lhs_mc = mean;
    rep.lhs_mc_se = se;
  }

  rep.holds = rep.lhs <= rep.rhs;
  return rep;
}

double calibrate_increasing_constant(const TailLaw& law, double B) {
  if (!(B > 0.0)) throw std::invalid_argument("calibration: B must be positive");
  const double xm = law.x_m();
  std::vector<double> shifts = {0.5 * xm, xm, 2.0 * xm, 0.25 * B, 0.5 * B};
  if (law.alpha() < 1.0) shifts.insert(shifts.begin(), 0.0);
  const double caps[] = {0.125 * B, 0.25 * B, 0.5 * B, B};
  double worst = 0.0;
  for (double s : shifts) {
    if (s >= B) continue;
    for (double c : caps) {
      const RampSpec ramp{s, c};
      const double lhs = ramp_lhs_factor(law, ramp, B);
      const double rhs = ramp_rhs_factor(law, ramp, B);
      if (lhs > 0.0 && rhs > 0.0 && std::isfinite(rhs))
        worst = std::max(worst, lhs / rhs);
    }
  }
  return worst > 0.0 ? 1.05 * worst : 1.0;
}

double calibrate_decreasing_constant(const TailLaw& law) {
  const double xm = law.x_m();
  double worst = 0.0;
  for (double mult : {1.5, 2.0, 5.0, 10.0, 100.0, 1000.0}) {
    const double T = mult * xm;
    const double lhs = step_lhs_factor(law, T);
    const double rhs = step_rhs_factor(law, T);
    if (lhs > 0.0 && rhs > 0.0) worst = std::max(worst, lhs / rhs);
  }
  return worst > 0.0 ? 1.05 * worst : 1.0;
}

}  // namespace polymerlab
