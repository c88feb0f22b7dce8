#include "polymerlab/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "polymerlab/lattice_partition.hpp"
#include "polymerlab/rng.hpp"

namespace polymerlab {

namespace {

void check_psi_on_lattice(const SeparableBump& psi, std::int64_t N, int d) {
  if (psi.d() != d)
    throw std::invalid_argument("pairing: test-function dimension must match the slab");
  if (!psi.fits_lattice(N))
    throw std::invalid_argument(
        "pairing: test-function support leaves the reachable lattice cone; "
        "raise N or shrink the support");
}

double alpha_one_center(const ScalingPlan& plan) {
  if (plan.law().alpha() != 1.0) return 0.0;
  // E[eta 1{eta <= V_N}] = E[eta 1{1 + eta < V_N + 1}] (atomless laws)
  return plan.law().truncated_moment(1, plan.V_N() + 1.0).exact;
}

double rescaled_psi(const SeparableBump& psi, std::int64_t N, int d,
                    std::int64_t n, const std::int32_t* x) {
  const double scale = std::sqrt(static_cast<double>(d) /
                                 static_cast<double>(N));
  double xr[kMaxDim] = {0.0, 0.0, 0.0, 0.0};
  for (int j = 0; j < d; ++j) xr[j] = x[j] * scale;
  return psi(static_cast<double>(n) / static_cast<double>(N), xr);
}

std::vector<double> resample(const std::vector<double>& v, RngStream& rs) {
  std::vector<double> out(v.size());
  for (double& o : out) {
    const auto idx = static_cast<std::size_t>(rs.u01() * v.size());
    o = v[std::min(idx, v.size() - 1)];
  }
  return out;
}

}  // namespace

double xi_discrete_pair(const EnvSlab& env, const SeparableBump& psi,
                        const ScalingPlan& plan, double a) {
  check_psi_on_lattice(psi, env.N(), env.d());
  if (a < 0.0) throw std::invalid_argument("pairing: cutoff a must be >= 0");
  const double center = alpha_one_center(plan);
  const TruncationSpec spec =
      a > 0.0 ? TruncationSpec::make(plan, a,
                                     std::numeric_limits<double>::infinity())
              : TruncationSpec::none();
  double sum = 0.0;
  psi.for_each_lattice_site(
      env.N(), [&](std::int64_t n, const std::int32_t* x, double psiv) {
        sum += (truncate_eta(env.eta(n, x), spec) - center) * psiv;
      });
  return sum / plan.V_N();
}

double xi_discrete_pair_sparse(const std::vector<LatticeSite>& exceedances,
                               const SeparableBump& psi,
                               const ScalingPlan& plan, double a) {
  check_psi_on_lattice(psi, plan.N(), plan.d());
  if (!(a > 0.0))
    throw std::invalid_argument("sparse pairing: needs a cutoff a > 0");
  const double kappa = plan.kappa_N_a(a);
  const double center = alpha_one_center(plan);
  const double threshold = a * plan.V_N();
  double sum = 0.0;
  for (const LatticeSite& s : exceedances) {
    if (!(1.0 + s.eta >= threshold))
      throw std::invalid_argument(
          "sparse pairing: list holds a site below the exceedance threshold");
    sum += (s.eta + kappa) * rescaled_psi(psi, plan.N(), plan.d(), s.n, s.x);
  }
  sum -= (kappa + center) * psi.lattice_sum(plan.N(), 1);
  return sum / plan.V_N();
}

double xi_truncation_diff(const EnvSlab& env, const SeparableBump& psi,
                          const ScalingPlan& plan, double a) {
  check_psi_on_lattice(psi, env.N(), env.d());
  if (!(a > 0.0))
    throw std::invalid_argument("truncation difference: needs a > 0");
  const double threshold = a * plan.V_N();
  const double below_mean =
      plan.law().cdf(threshold) > 0.0 ? plan.law().mean_below(threshold) : 0.0;
  double sum = 0.0;
  psi.for_each_lattice_site(
      env.N(), [&](std::int64_t n, const std::int32_t* x, double psiv) {
        const double eta = env.eta(n, x);
        if (1.0 + eta < threshold) sum += (eta - below_mean) * psiv;
      });
  return sum / plan.V_N();
}

double xi_truncation_variance_cap(const ScalingPlan& plan, double a,
                                  const SeparableBump& psi) {
  if (!(a > 0.0)) throw std::invalid_argument("variance cap: needs a > 0");
  const double alpha = plan.law().alpha();
  const int d = plan.d();
  const double eps = 2.0 * std::pow(static_cast<double>(d), 0.5 * d) *
                     (alpha / (2.0 - alpha)) * std::pow(a, 2.0 - alpha);
  return eps *
         std::pow(static_cast<double>(plan.N()), -(0.5 * d + 1.0)) *
         psi.lattice_sum(plan.N(), 2);
}

DistanceReport empirical_distance(const std::vector<double>& sample_a,
                                  const std::vector<double>& sample_b,
                                  DistanceStatistic statistic) {
  if (sample_a.empty() || sample_b.empty())
    throw std::invalid_argument("distance: both samples must be non-empty");
  DistanceReport rep;
  rep.statistic = statistic;
  rep.n_a = sample_a.size();
  rep.n_b = sample_b.size();
  rep.value = statistic == DistanceStatistic::ks
                  ? ks_statistic(sample_a, sample_b)
                  : wasserstein1(sample_a, sample_b);
  return rep;
}

double ks_bootstrap_sd(const std::vector<double>& sample_a,
                       const std::vector<double>& sample_b, int resamples,
                       std::uint64_t seed) {
  if (resamples < 2)
    throw std::invalid_argument("bootstrap: needs at least 2 resamples");
  RngStream rs(seed, stream_id(stream_purpose::kBootstrap, 0));
  std::vector<double> stats;
  stats.reserve(static_cast<std::size_t>(resamples));
  for (int i = 0; i < resamples; ++i)
    stats.push_back(ks_statistic(resample(sample_a, rs), resample(sample_b, rs)));
  double mean = 0.0;
  for (double s : stats) mean += s;
  mean /= stats.size();
  double var = 0.0;
  for (double s : stats) var += (s - mean) * (s - mean);
  return std::sqrt(var / (stats.size() - 1.0));
}

MarginalExperiment marginal_convergence_experiment(
    const TailLaw& law, double beta_hat, const SeparableBump* psi,
    const PathFunctional& f, const std::vector<std::int64_t>& N_grid,
    double a, int d, double L, std::int64_t replicas, std::uint64_t seed) {
  if (law.alpha() >= alpha_critical(d))
    throw std::invalid_argument(
        "marginal experiment: alpha >= min(1+2/d, 2); the limiting "
        "partition function is degenerate in that regime");
  if (!(a > 0.0))
    throw std::invalid_argument("marginal experiment: needs a cutoff a > 0");
  if (N_grid.empty())
    throw std::invalid_argument("marginal experiment: N grid must be non-empty");
  if (replicas < 2)
    throw std::invalid_argument("marginal experiment: needs at least 2 replicas");
  if (d > 2)
    throw std::invalid_argument(
        "marginal experiment: exceedance windows are indexed for d <= 2");
  if (psi != nullptr) {
    if (psi->d() != d)
      throw std::invalid_argument("marginal experiment: psi dimension mismatch");
    if (!psi->fits_window(L))
      throw std::invalid_argument(
          "marginal experiment: window too small; psi support must sit "
          "inside [-L,L]^d");
    if (!psi->fits_window(kWindowSigmas))
      throw std::invalid_argument(
          "marginal experiment: psi support exceeds the discrete exceedance "
          "window");
  }

  MarginalExperiment out;
  out.N_grid = N_grid;
  out.discrete.resize(N_grid.size());

  for (std::size_t ni = 0; ni < N_grid.size(); ++ni) {
    const std::int64_t N = N_grid[ni];
    const ScalingPlan plan = ScalingPlan::make(law, N, d, beta_hat);
    if (psi != nullptr) check_psi_on_lattice(*psi, N, d);
    const TruncationSpec trunc = TruncationSpec::make(
        plan, a, std::numeric_limits<double>::infinity());
    const double threshold = a * plan.V_N();
    const auto radius = static_cast<std::int64_t>(
        std::ceil(kWindowSigmas * std::sqrt(static_cast<double>(N) / d)));
    const WindowIndex window(N, d, radius);
    const double gamma = plan.gamma_factor();

    auto& block = out.discrete[ni];
    block.reserve(static_cast<std::size_t>(replicas));
    for (std::int64_t r = 0; r < replicas; ++r) {
      const std::uint64_t rep =
          static_cast<std::uint64_t>(ni) * static_cast<std::uint64_t>(replicas) +
          static_cast<std::uint64_t>(r);
      std::vector<LatticeSite> exc =
          sample_exceedances(law, window, threshold, seed, rep);
      MarginalSample ms;
      ms.pairing =
          psi != nullptr ? xi_discrete_pair_sparse(exc, *psi, plan, a) : 0.0;
      ms.partition =
          gamma * sparse_partition(std::move(exc), plan, trunc, f).z;
      block.push_back(ms);
    }
  }

  out.continuum.reserve(static_cast<std::size_t>(replicas));
  for (std::int64_t r = 0; r < replicas; ++r) {
    const PoissonCloud cloud = sample_cloud(law.alpha(), a, L, d, seed,
                                            static_cast<std::uint64_t>(r));
    MarginalSample ms;
    ms.pairing = psi != nullptr ? pair_noise(cloud, *psi, law.alpha(), a) : 0.0;
    ms.partition = continuum_partition(cloud, beta_hat, f).value;
    out.continuum.push_back(ms);
  }

  std::vector<double> cont_pairing, cont_partition;
  for (const MarginalSample& ms : out.continuum) {
    cont_pairing.push_back(ms.pairing);
    cont_partition.push_back(ms.partition);
  }
  for (std::size_t ni = 0; ni < N_grid.size(); ++ni) {
    std::vector<double> disc_pairing, disc_partition;
    for (const MarginalSample& ms : out.discrete[ni]) {
      disc_pairing.push_back(ms.pairing);
      disc_partition.push_back(ms.partition);
    }
    const struct {
      const std::vector<double>* disc;
      const std::vector<double>* cont;
      const char* name;
    } components[2] = {{&disc_partition, &cont_partition, "partition"},
                       {&disc_pairing, &cont_pairing, "pairing"}};
    for (const auto& comp : components) {
      for (DistanceStatistic stat :
           {DistanceStatistic::ks, DistanceStatistic::wasserstein1}) {
        DistanceReport rep = empirical_distance(*comp.disc, *comp.cont, stat);
        rep.component = comp.name;
        rep.grid_value = static_cast<double>(N_grid[ni]);
        if (stat == DistanceStatistic::ks)
          rep.se = ks_bootstrap_sd(*comp.disc, *comp.cont, 200,
                                   seed + 17u * ni);
        out.reports.push_back(rep);
      }
    }
  }
  return out;
}

TruncationCurve truncation_error_curve(const TailLaw& law, double beta_hat,
                                       int d,
                                       const std::vector<std::int64_t>& N_grid,
                                       const std::vector<double>& a_grid,
                                       std::int64_t replicas,
                                       std::uint64_t seed) {
  if (N_grid.empty() || a_grid.empty())
    throw std::invalid_argument("truncation curve: grids must be non-empty");
  if (replicas < 2)
    throw std::invalid_argument("truncation curve: needs at least 2 replicas");
  TruncationCurve out;
  out.N_grid = N_grid;
  out.a_grid = a_grid;
  out.estimate.assign(N_grid.size(), std::vector<double>(a_grid.size(), 0.0));
  out.std_error.assign(N_grid.size(), std::vector<double>(a_grid.size(), 0.0));

  const PathFunctional one = PathFunctional::constant_one();
  for (std::size_t ni = 0; ni < N_grid.size(); ++ni) {
    const std::int64_t N = N_grid[ni];
    const ScalingPlan plan = ScalingPlan::make(law, N, d, beta_hat);
    const double gamma = plan.gamma_factor();
    std::vector<std::vector<double>> samples(a_grid.size());
    for (std::int64_t r = 0; r < replicas; ++r) {
      const std::uint64_t rep =
          static_cast<std::uint64_t>(ni) * static_cast<std::uint64_t>(replicas) +
          static_cast<std::uint64_t>(r);
      const EnvSlab env = EnvSlab::keyed(law, N, d, seed, rep);
      const double z0 =
          partition_dp(env, plan.beta_N(), TruncationSpec::none(), one).value;
      for (std::size_t ai = 0; ai < a_grid.size(); ++ai) {
        if (a_grid[ai] == 0.0) {
          samples[ai].push_back(0.0);
          continue;
        }
        const TruncationSpec trunc = TruncationSpec::make(
            plan, a_grid[ai], std::numeric_limits<double>::infinity());
        const double za = partition_dp(env, plan.beta_N(), trunc, one).value;
        samples[ai].push_back(std::min(1.0, gamma * std::abs(za - z0)));
      }
    }
    for (std::size_t ai = 0; ai < a_grid.size(); ++ai) {
      const auto [mean, se] = jackknife_mean(samples[ai]);
      out.estimate[ni][ai] = mean;
      out.std_error[ni][ai] = se;
    }
  }

  out.sup_estimate.assign(a_grid.size(), 0.0);
  out.sup_std_error.assign(a_grid.size(), 0.0);
  for (std::size_t ai = 0; ai < a_grid.size(); ++ai) {
    std::size_t arg = 0;
    for (std::size_t ni = 1; ni < N_grid.size(); ++ni)
      if (out.estimate[ni][ai] > out.estimate[arg][ai]) arg = ni;
    out.sup_estimate[ai] = out.estimate[arg][ai];
    out.sup_std_error[ai] = out.std_error[arg][ai];
  }
  return out;
}

SlopeExperiment xi_truncation_slope(const TailLaw& law, int d,
                                    std::int64_t N, const SeparableBump& psi,
                                    const std::vector<double>& a_grid,
                                    std::int64_t replicas,
                                    std::uint64_t seed) {
  if (a_grid.size() < 3)
    throw std::invalid_argument(
        "truncation slope: needs at least 3 cutoff grid points");
  if (replicas < 2)
    throw std::invalid_argument("truncation slope: needs at least 2 replicas");
  for (double a : a_grid)
    if (!(a > 0.0))
      throw std::invalid_argument("truncation slope: cutoffs must be > 0");
  check_psi_on_lattice(psi, N, d);
  const ScalingPlan plan = ScalingPlan::make(law, N, d, 1.0);
  const double V = plan.V_N();

  SlopeExperiment out;
  out.a_grid = a_grid;
  out.second_moment.assign(a_grid.size(), 0.0);
  out.std_error.assign(a_grid.size(), 0.0);
  out.cap.resize(a_grid.size());
  for (std::size_t j = 0; j < a_grid.size(); ++j)
    out.cap[j] = xi_truncation_variance_cap(plan, a_grid[j], psi);

  std::vector<double> psis;
  psi.for_each_lattice_site(
      N, [&](std::int64_t, const std::int32_t*, double v) {
        psis.push_back(v);
      });
  if (psis.empty() || psi.lattice_sum(N, 2) == 0.0) {
    out.flagged_zero = true;  // slope undefined on an all-zero pairing
    return out;
  }

  std::vector<double> thresholds(a_grid.size()), below_mean(a_grid.size());
  for (std::size_t j = 0; j < a_grid.size(); ++j) {
    thresholds[j] = a_grid[j] * V;
    below_mean[j] =
        law.cdf(thresholds[j]) > 0.0 ? law.mean_below(thresholds[j]) : 0.0;
  }

  // One disorder draw per site per replica, accumulated at every cutoff.
  std::vector<std::vector<double>> squares(
      a_grid.size(), std::vector<double>());
  std::vector<double> diff(a_grid.size());
  for (std::int64_t r = 0; r < replicas; ++r) {
    RngStream rs(seed, stream_id(stream_purpose::kResample,
                                 static_cast<std::uint64_t>(r)));
    std::fill(diff.begin(), diff.end(), 0.0);
    for (double psiv : psis) {
      const double eta = law.sample_eta(rs.u01());
      const double one_plus = 1.0 + eta;
      for (std::size_t j = 0; j < a_grid.size(); ++j)
        if (one_plus < thresholds[j])
          diff[j] += (eta - below_mean[j]) * psiv;
    }
    for (std::size_t j = 0; j < a_grid.size(); ++j) {
      const double v = diff[j] / V;
      squares[j].push_back(v * v);
    }
  }

  std::vector<double> log_a, log_m2;
  for (std::size_t j = 0; j < a_grid.size(); ++j) {
    const auto [mean, se] = jackknife_mean(squares[j]);
    out.second_moment[j] = mean;
    out.std_error[j] = se;
    if (mean > 0.0) {
      log_a.push_back(std::log(a_grid[j]));
      log_m2.push_back(std::log(mean));
    }
  }
  if (log_a.size() < 3)
    throw std::invalid_argument(
        "truncation slope: fewer than 3 grid points carry positive variance");
  const auto [slope, intercept] = fit_line(log_a, log_m2);
  out.slope = slope;
  out.intercept = intercept;
  return out;
}

}  // namespace polymerlab
