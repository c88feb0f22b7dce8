#include "polymerlab/lattice_partition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "polymerlab/numeric.hpp"
#include "polymerlab/rng.hpp"

namespace polymerlab {

double walk_kernel(int64_t n, const int32_t* x, int d) {
  if (d <= 2) return srw_kernel(n, x, d);
  return srw_kernel_dp(n, x, d);
}

namespace {

constexpr int64_t kMaxLayerCells = 30'000'000;

// Functional masks resolved onto the lattice: a hard cutoff radius plus box
// indicators attached to layers (node) and to transitions (edge, with the
// interpolation weight of the box time inside the step).
struct Masks {
  int64_t Rcap = std::numeric_limits<int64_t>::max();
  double scale = 1.0;  // sqrt(d/N)
  bool boxes = false;
  std::vector<std::vector<CylinderBox>> node;                     // [0..N]
  std::vector<std::vector<std::pair<CylinderBox, double>>> edge;  // [0..N-1]

  double node_factor(int64_t n, const int32_t* y, int d) const {
    if (!boxes) return 1.0;
    for (const auto& b : node[static_cast<size_t>(n)]) {
      for (int j = 0; j < d; ++j) {
        double p = scale * y[j];
        if (p < b.lo[j] || p > b.hi[j]) return 0.0;
      }
    }
    return 1.0;
  }
  double edge_factor(int64_t n, const int32_t* x, const int32_t* y,
                     int d) const {
    if (!boxes) return 1.0;
    for (const auto& bw : edge[static_cast<size_t>(n)]) {
      const CylinderBox& b = bw.first;
      double w = bw.second;
      for (int j = 0; j < d; ++j) {
        double p = scale * ((1.0 - w) * x[j] + w * y[j]);
        if (p < b.lo[j] || p > b.hi[j]) return 0.0;
      }
    }
    return 1.0;
  }
};

Masks build_masks(const PathFunctional& f, int64_t N, int d, int64_t radius) {
  Masks m;
  m.scale = std::sqrt(static_cast<double>(d) / static_cast<double>(N));
  if (f.has_cutoff())
    m.Rcap = PathFunctional::cutoff_lattice_radius(f.cutoff_A(), N, d);
  if (radius >= 0) m.Rcap = std::min(m.Rcap, radius);
  if (!f.boxes().empty()) {
    m.boxes = true;
    m.node.resize(static_cast<size_t>(N) + 1);
    m.edge.resize(static_cast<size_t>(N));
    for (const auto& b : f.boxes()) {
      double nt = b.t * static_cast<double>(N);
      auto k = static_cast<int64_t>(std::llround(nt));
      if (std::abs(nt - static_cast<double>(k)) <=
          1e-9 * static_cast<double>(N)) {
        m.node[static_cast<size_t>(k)].push_back(b);
      } else {
        auto n = static_cast<int64_t>(std::floor(nt));
        m.edge[static_cast<size_t>(n)].push_back(
            {b, nt - static_cast<double>(n)});
      }
    }
  }
  return m;
}

// Iterate the cells of one layer: y in [-R,R]^d with coordinate-sum parity
// `par`. The last coordinate steps by 2 so only valid cells are touched.
template <typename F>
void for_layer(int d, int64_t R, int par, F&& fn) {
  int32_t y[kMaxDim] = {0, 0, 0, 0};
  if (R < 0) return;
  for (int j = 0; j + 1 < d; ++j) y[j] = static_cast<int32_t>(-R);
  for (;;) {
    int64_t s = 0;
    for (int j = 0; j + 1 < d; ++j) s += y[j];
    int64_t v0 = -R;
    if ((((v0 + s) % 2) + 2) % 2 != par) ++v0;
    for (int64_t v = v0; v <= R; v += 2) {
      y[d - 1] = static_cast<int32_t>(v);
      fn(y);
    }
    int j = d - 2;
    while (j >= 0 && y[j] == R) {
      y[j] = static_cast<int32_t>(-R);
      --j;
    }
    if (j < 0) break;
    ++y[j];
  }
}

int64_t layer_cells(int64_t R, int d) {
  int64_t c = 1;
  for (int j = 0; j < d; ++j) c *= 2 * R + 1;
  return c;
}

size_t cell_index(const int32_t* y, int64_t R, int d) {
  size_t idx = 0;
  size_t stride = 1;
  for (int j = 0; j < d; ++j) {
    idx += static_cast<size_t>(y[j] + R) * stride;
    stride *= static_cast<size_t>(2 * R + 1);
  }
  return idx;
}

// Forward transfer-matrix sweep from (n1,x1) to layer n2. Returns the layer
// vector at n2; the caller reads one pinned cell or sums everything.
std::vector<double> dp_sweep(const EnvSlab& env, double beta,
                             const TruncationSpec& trunc, const Masks& masks,
                             int64_t n1, const int32_t* x1, int64_t n2,
                             int64_t* R_out) {
  int d = env.d();
  int64_t reach0 = 0;
  for (int j = 0; j < d; ++j)
    reach0 = std::max<int64_t>(reach0, std::llabs(x1[j]));
  auto layer_R = [&](int64_t n) {
    return std::min({n, reach0 + (n - n1), masks.Rcap});
  };
  if (layer_cells(layer_R(n2), d) > kMaxLayerCells)
    throw std::length_error(
        "partition_dp: layer storage exceeds the resource guard; reduce N, "
        "d, or the window radius");

  int64_t Rcur = layer_R(n1);
  std::vector<double> cur(static_cast<size_t>(layer_cells(Rcur, d)), 0.0);
  double start = masks.node_factor(n1, x1, d);
  cur[cell_index(x1, Rcur, d)] = start;
  std::vector<double> nxt;
  const double step_prob = 1.0 / (2.0 * d);

  for (int64_t n = n1; n < n2; ++n) {
    int64_t Rn = Rcur, Rn1 = layer_R(n + 1);
    nxt.assign(static_cast<size_t>(layer_cells(Rn1, d)), 0.0);
    int par = static_cast<int>((n + 1) & 1);
    for_layer(d, Rn1, par, [&](const int32_t* y) {
      double s = 0.0;
      int32_t x[kMaxDim];
      for (int j = 0; j < d; ++j) x[j] = y[j];
      for (int j = 0; j < d; ++j) {
        for (int sgn = -1; sgn <= 1; sgn += 2) {
          x[j] = static_cast<int32_t>(y[j] + sgn);
          if (x[j] < -Rn || x[j] > Rn) continue;
          double uv = cur[cell_index(x, Rn, d)];
          if (uv == 0.0) continue;
          s += masks.boxes ? uv * masks.edge_factor(n, x, y, d) : uv;
        }
        x[j] = y[j];
      }
      if (s == 0.0) return;
      double nodef = masks.node_factor(n + 1, y, d);
      if (nodef == 0.0) return;
      double w = 1.0 + beta * truncate_eta(env.eta(n + 1, y), trunc);
      nxt[cell_index(y, Rn1, d)] = s * step_prob * w * nodef;
    });
    cur.swap(nxt);
    Rcur = Rn1;
  }
  *R_out = Rcur;
  return cur;
}

PartitionResult make_result(const EnvSlab& env, double beta,
                            const TruncationSpec& trunc,
                            const PathFunctional& f, double value) {
  PartitionResult r;
  r.value = value;
  r.normalization = 1.0;
  r.N = env.N();
  r.d = env.d();
  r.beta = beta;
  r.trunc = trunc;
  r.functional = f.describe();
  return r;
}

void check_beta(double beta) {
  if (!(beta > 0.0) || !(beta < 1.0))
    throw std::invalid_argument(
        "beta: must lie in (0,1) so every Gibbs weight 1+beta*eta stays "
        "positive");
}

}  // namespace

PartitionResult partition_dp(const EnvSlab& env, double beta,
                             const TruncationSpec& trunc,
                             const PathFunctional& f, int64_t radius) {
  check_beta(beta);
  if (!f.factorizes())
    throw std::invalid_argument(
        "partition_dp: functional does not factor over the Markov "
        "transitions; use partition_mc or partition_bruteforce");
  Masks masks = build_masks(f, env.N(), env.d(), radius);
  int32_t origin[kMaxDim] = {0, 0, 0, 0};
  int64_t R = 0;
  std::vector<double> last =
      dp_sweep(env, beta, trunc, masks, 0, origin, env.N(), &R);
  double total = 0.0;
  for_layer(env.d(), R, static_cast<int>(env.N() & 1),
            [&](const int32_t* y) { total += last[cell_index(y, R, env.d())]; });
  return make_result(env, beta, trunc, f, total);
}

PartitionResult partition_bruteforce(const EnvSlab& env, double beta,
                                     const TruncationSpec& trunc,
                                     const PathFunctional& f) {
  check_beta(beta);
  int64_t N = env.N();
  int d = env.d();
  double npaths = std::pow(2.0 * d, static_cast<double>(N));
  if (npaths > 1e7)
    throw std::length_error(
        "partition_bruteforce: needs (2d)^N <= 1e7; use partition_dp or "
        "partition_mc");
  WalkPath path;
  path.N = N;
  path.d = d;
  path.pos.assign(static_cast<size_t>(N) + 1, {});
  double total = 0.0;
  // Depth-first over all (2d)^N nearest-neighbor paths.
  std::function<void(int64_t, double)> visit = [&](int64_t n, double weight) {
    if (n == N) {
      total += weight * f.evaluate(path);
      return;
    }
    auto& cur = path.pos[static_cast<size_t>(n)];
    auto& nxt = path.pos[static_cast<size_t>(n) + 1];
    for (int j = 0; j < d; ++j) {
      for (int sgn = -1; sgn <= 1; sgn += 2) {
        nxt = cur;
        nxt[static_cast<size_t>(j)] =
            static_cast<int32_t>(cur[static_cast<size_t>(j)] + sgn);
        double w =
            1.0 + beta * truncate_eta(env.eta(n + 1, nxt.data()), trunc);
        visit(n + 1, weight * w);
      }
    }
  };
  visit(0, 1.0);
  return make_result(env, beta, trunc, f, total / npaths);
}

McEstimate partition_mc(const EnvSlab& env, double beta,
                        const TruncationSpec& trunc, const PathFunctional& f,
                        int64_t replicas, uint64_t seed) {
  check_beta(beta);
  if (replicas < 2)
    throw std::invalid_argument("partition_mc: needs replicas >= 2");
  int64_t N = env.N();
  int d = env.d();
  std::vector<double> vals(static_cast<size_t>(replicas));
  WalkPath path;
  path.N = N;
  path.d = d;
  for (int64_t r = 0; r < replicas; ++r) {
    RngStream rs(seed, stream_id(stream_purpose::kMcPaths,
                                 static_cast<uint64_t>(r)));
    path.pos.assign(static_cast<size_t>(N) + 1, {});
    double weight = 1.0;
    for (int64_t n = 0; n < N; ++n) {
      auto dir = static_cast<int>(rs.u01() * (2.0 * d));
      if (dir >= 2 * d) dir = 2 * d - 1;
      auto& nxt = path.pos[static_cast<size_t>(n) + 1];
      nxt = path.pos[static_cast<size_t>(n)];
      int j = dir / 2;
      int sgn = (dir % 2 == 0) ? 1 : -1;
      nxt[static_cast<size_t>(j)] =
          static_cast<int32_t>(nxt[static_cast<size_t>(j)] + sgn);
      weight *= 1.0 + beta * truncate_eta(env.eta(n + 1, nxt.data()), trunc);
    }
    vals[static_cast<size_t>(r)] = weight * f.evaluate(path);
  }
  auto [mean, se] = jackknife_mean(vals);
  return {mean, se};
}

PointToPointResult point_to_point_partition(const EnvSlab& env, double beta,
                                            const TruncationSpec& trunc,
                                            int64_t n1, const int32_t* x1,
                                            int64_t n2, const int32_t* x2,
                                            const ScalingPlan* plan) {
  check_beta(beta);
  int d = env.d();
  if (n1 < 0 || n2 > env.N() || n1 > n2)
    throw std::invalid_argument(
        "point-to-point: needs 0 <= n1 <= n2 <= slab N");
  int64_t l1 = 0, span = 0;
  for (int j = 0; j < d; ++j) {
    l1 += std::llabs(static_cast<int64_t>(x2[j]) - x1[j]);
    span = std::max<int64_t>(span, std::llabs(x1[j]));
  }
  if (((l1 - (n2 - n1)) % 2 + 2) % 2 != 0)
    throw std::invalid_argument(
        "point-to-point: endpoint parity violates the walk's sublattice "
        "(need |x2-x1|_1 = n2-n1 mod 2)");
  if (span > n1)
    throw std::invalid_argument(
        "point-to-point: start site outside the reachable lattice");
  int64_t par1 = 0;
  for (int j = 0; j < d; ++j) par1 += x1[j];
  if (((par1 - n1) % 2 + 2) % 2 != 0)
    throw std::invalid_argument(
        "point-to-point: start site off the walk's parity sublattice");
  PointToPointResult out;
  if (n1 == n2) {
    bool same = true;
    for (int j = 0; j < d; ++j) same = same && x1[j] == x2[j];
    out.value = same ? 1.0 : 0.0;
  } else {
    Masks masks;  // no functional
    int64_t R = 0;
    std::vector<double> last =
        dp_sweep(env, beta, trunc, masks, n1, x1, n2, &R);
    bool inside = true;
    for (int j = 0; j < d; ++j) inside = inside && std::llabs(x2[j]) <= R;
    out.value = inside ? last[cell_index(x2, R, d)] : 0.0;
  }
  if (plan != nullptr) {
    double dd = d;
    out.normalized = 0.5 *
                     std::pow(static_cast<double>(plan->N()) / dd, dd / 2.0) *
                     plan->gamma_factor() * out.value;
  } else {
    out.normalized = out.value;
  }
  return out;
}

WalkPath sample_polymer_path(const EnvSlab& env, double beta,
                             const TruncationSpec& trunc, uint64_t seed,
                             uint64_t replica) {
  check_beta(beta);
  int64_t N = env.N();
  int d = env.d();
  int64_t total_cells = 0;
  for (int64_t n = 0; n <= N; ++n) total_cells += layer_cells(n, d);
  if (total_cells > kMaxLayerCells)
    throw std::length_error(
        "sample_polymer_path: backward table exceeds the resource guard; "
        "reduce N or d");

  // Backward partial partition values h_n(x) = E[prod_{m>n} (1+beta eta) |
  // S_n = x], stored for every layer.
  std::vector<std::vector<double>> h(static_cast<size_t>(N) + 1);
  h[static_cast<size_t>(N)].assign(
      static_cast<size_t>(layer_cells(N, d)), 1.0);
  const double step_prob = 1.0 / (2.0 * d);
  for (int64_t n = N - 1; n >= 0; --n) {
    int64_t Rn = n, Rn1 = n + 1;
    auto& hn = h[static_cast<size_t>(n)];
    hn.assign(static_cast<size_t>(layer_cells(Rn, d)), 0.0);
    const auto& hn1 = h[static_cast<size_t>(n) + 1];
    for_layer(d, Rn, static_cast<int>(n & 1), [&](const int32_t* x) {
      double s = 0.0;
      int32_t y[kMaxDim];
      for (int j = 0; j < d; ++j) y[j] = x[j];
      for (int j = 0; j < d; ++j) {
        for (int sgn = -1; sgn <= 1; sgn += 2) {
          y[j] = static_cast<int32_t>(x[j] + sgn);
          double w =
              1.0 + beta * truncate_eta(env.eta(n + 1, y), trunc);
          s += w * hn1[cell_index(y, Rn1, d)];
        }
        y[j] = x[j];
      }
      hn[cell_index(x, Rn, d)] = step_prob * s;
    });
  }

  WalkPath path;
  path.N = N;
  path.d = d;
  path.pos.assign(static_cast<size_t>(N) + 1, {});
  RngStream rs(seed, stream_id(stream_purpose::kGibbs, replica));
  for (int64_t n = 0; n < N; ++n) {
    const auto& cur = path.pos[static_cast<size_t>(n)];
    const auto& hn1 = h[static_cast<size_t>(n) + 1];
    double weights[2 * kMaxDim];
    double total = 0.0;
    int32_t y[kMaxDim];
    for (int j = 0; j < d; ++j) y[j] = cur[static_cast<size_t>(j)];
    for (int k = 0; k < 2 * d; ++k) {
      int j = k / 2;
      int sgn = (k % 2 == 0) ? 1 : -1;
      y[j] = static_cast<int32_t>(cur[static_cast<size_t>(j)] + sgn);
      double w = 1.0 + beta * truncate_eta(env.eta(n + 1, y), trunc);
      weights[k] = w * hn1[cell_index(y, n + 1, d)];
      total += weights[k];
      y[j] = cur[static_cast<size_t>(j)];
    }
    if (!(total > 0.0))
      throw std::runtime_error(
          "sample_polymer_path: all transition weights vanished (numerical "
          "degeneracy)");
    double u = rs.u01() * total;
    int pick = 0;
    double acc = 0.0;
    for (int k = 0; k < 2 * d; ++k) {
      acc += weights[k];
      pick = k;
      if (u <= acc) break;
    }
    auto& nxt = path.pos[static_cast<size_t>(n) + 1];
    nxt = cur;
    int j = pick / 2;
    int sgn = (pick % 2 == 0) ? 1 : -1;
    nxt[static_cast<size_t>(j)] =
        static_cast<int32_t>(nxt[static_cast<size_t>(j)] + sgn);
  }
  return path;
}

}  // namespace polymerlab
