#include "polymerlab/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "polymerlab/numeric.hpp"
#include "polymerlab/scaling.hpp"
#include "polymerlab/serialize.hpp"

namespace polymerlab {

namespace {

const std::set<std::string>& known_experiments() {
  static const std::set<std::string> e = {
      "simulate-discrete", "simulate-continuum", "converge",
      "truncation-curve",  "moments",            "verify-appendix",
      "replica-moment"};
  return e;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_field(const std::string& key, const std::string& why) {
  throw std::invalid_argument("config field '" + key + "': " + why);
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) bad_field(key, "trailing characters in '" + v + "'");
    return x;
  } catch (const std::invalid_argument&) {
    bad_field(key, "not a number: '" + v + "'");
  } catch (const std::out_of_range&) {
    bad_field(key, "out of range: '" + v + "'");
  }
}

std::int64_t parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (pos != v.size()) bad_field(key, "trailing characters in '" + v + "'");
    return x;
  } catch (const std::invalid_argument&) {
    bad_field(key, "not an integer: '" + v + "'");
  } catch (const std::out_of_range&) {
    bad_field(key, "out of range: '" + v + "'");
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      parts.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(trim(cur));
  return parts;
}

}  // namespace

void apply_key(ExperimentConfig& cfg, const std::string& key,
               const std::string& value) {
  if (key == "experiment") {
    cfg.experiment = value;
  } else if (key == "family") {
    cfg.family = value;
  } else if (key == "alpha") {
    cfg.alpha = parse_double(key, value);
  } else if (key == "x_m") {
    cfg.x_m = parse_double(key, value);
  } else if (key == "theta") {
    cfg.theta = parse_double(key, value);
  } else if (key == "N") {
    cfg.N = parse_int(key, value);
  } else if (key == "N_grid") {
    cfg.N_grid.clear();
    for (const std::string& p : split(value, ','))
      if (!p.empty()) cfg.N_grid.push_back(parse_int(key, p));
  } else if (key == "d") {
    cfg.d = static_cast<int>(parse_int(key, value));
  } else if (key == "L") {
    cfg.L = parse_double(key, value);
  } else if (key == "beta_hat") {
    cfg.beta_hat = parse_double(key, value);
  } else if (key == "a") {
    cfg.a = parse_double(key, value);
  } else if (key == "b") {
    cfg.b = value == "inf" ? std::numeric_limits<double>::infinity()
                           : parse_double(key, value);
  } else if (key == "a_grid") {
    cfg.a_grid.clear();
    for (const std::string& p : split(value, ','))
      if (!p.empty()) cfg.a_grid.push_back(parse_double(key, p));
  } else if (key == "functional") {
    cfg.functional = value;
  } else if (key == "psi") {
    cfg.psi = value;
  } else if (key == "replicas") {
    cfg.replicas = parse_int(key, value);
  } else if (key == "seed") {
    cfg.seed = static_cast<std::uint64_t>(parse_int(key, value));
  } else if (key == "output") {
    cfg.output = value;
  } else if (key == "slab") {
    cfg.slab_path = value;
  } else if (key == "threads") {
    cfg.threads = static_cast<int>(parse_int(key, value));
  } else {
    throw std::invalid_argument("config: unknown key '" + key + "'");
  }
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw std::invalid_argument("config: cannot open file '" + path + "'");
  ExperimentConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string stripped = trim(line.substr(0, line.find('#')));
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                  " is not key=value");
    apply_key(cfg, trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)));
  }
  return cfg;
}

TailLaw law_from(const ExperimentConfig& cfg) {
  TailFamily family;
  try {
    family = family_from_name(cfg.family);
  } catch (const std::invalid_argument& e) {
    bad_field("family", e.what());
  }
  try {
    return TailLaw::make(family, cfg.alpha, cfg.x_m, cfg.theta);
  } catch (const std::invalid_argument& e) {
    bad_field("alpha/x_m/theta", e.what());
  }
}

PathFunctional functional_from(const ExperimentConfig& cfg) {
  const std::string& spec = cfg.functional;
  if (spec == "one") return PathFunctional::constant_one();
  const std::string prefix = "one@";
  if (spec.rfind(prefix, 0) == 0) {
    const double A = parse_double("functional", spec.substr(prefix.size()));
    if (!(A > 0.0)) bad_field("functional", "cutoff radius must be positive");
    return PathFunctional::constant_one().with_support_cutoff(A);
  }
  bad_field("functional", "expected 'one' or 'one@A', got '" + spec + "'");
}

std::unique_ptr<SeparableBump> psi_from(const ExperimentConfig& cfg) {
  if (cfg.psi == "none") return nullptr;
  const std::vector<std::string> parts = split(cfg.psi, ';');
  if (parts.size() < 2)
    bad_field("psi", "expected 'tc,tw;c1,w1[;...]' (time bump, then one "
                     "space bump per dimension)");
  std::vector<BumpFactor> factors;
  for (const std::string& p : parts) {
    const std::vector<std::string> cw = split(p, ',');
    if (cw.size() != 2) bad_field("psi", "factor '" + p + "' is not 'center,width'");
    factors.push_back(BumpFactor{parse_double("psi", cw[0]),
                                 parse_double("psi", cw[1])});
  }
  if (static_cast<int>(factors.size()) - 1 != cfg.d)
    bad_field("psi", "needs exactly d=" + std::to_string(cfg.d) +
                         " space factors after the time factor");
  try {
    return std::make_unique<SeparableBump>(
        factors[0], std::vector<BumpFactor>(factors.begin() + 1, factors.end()));
  } catch (const std::invalid_argument& e) {
    bad_field("psi", e.what());
  }
}

std::vector<std::int64_t> n_grid_from(const ExperimentConfig& cfg) {
  if (!cfg.N_grid.empty()) return cfg.N_grid;
  return {cfg.N};
}

void validate_config(const ExperimentConfig& cfg) {
  if (known_experiments().count(cfg.experiment) == 0)
    bad_field("experiment", "unknown experiment '" + cfg.experiment + "'");
  if (!(cfg.alpha > 0.0 && cfg.alpha < 2.0))
    bad_field("alpha", "tail exponent must lie in (0,2)");
  if (cfg.d < 1 || cfg.d > 4) bad_field("d", "dimension must be in 1..4");
  if (!(cfg.L > 0.0)) bad_field("L", "window half-width must be positive");
  if (!(cfg.beta_hat > 0.0)) bad_field("beta_hat", "must be positive");
  if (!(cfg.a >= 0.0)) bad_field("a", "lower cutoff must be >= 0");
  if (!(cfg.b > cfg.a))
    bad_field("b", "upper cutoff must exceed the lower cutoff");
  if (std::isfinite(cfg.b) && !(cfg.b > 1.0))
    bad_field("b", "finite upper cutoffs must exceed 1");
  for (double a : cfg.a_grid)
    if (!(a >= 0.0)) bad_field("a_grid", "cutoffs must be >= 0");
  if (cfg.N < 1) bad_field("N", "system length must be >= 1");
  for (std::int64_t n : cfg.N_grid)
    if (n < 1) bad_field("N_grid", "system lengths must be >= 1");
  if (cfg.replicas < 2) bad_field("replicas", "need at least 2 replicas");
  if (cfg.threads < 0) bad_field("threads", "must be >= 0");

  const TailLaw law = law_from(cfg);
  const PathFunctional f = functional_from(cfg);
  (void)f;
  const std::unique_ptr<SeparableBump> psi = psi_from(cfg);
  if (psi != nullptr && psi->d() != cfg.d)
    bad_field("psi", "space factor count must equal d");

  const bool lattice_side = cfg.experiment == "simulate-discrete" ||
                            cfg.experiment == "converge" ||
                            cfg.experiment == "truncation-curve" ||
                            cfg.experiment == "moments" ||
                            cfg.experiment == "replica-moment";
  const bool continuum_side = cfg.experiment == "simulate-continuum" ||
                              cfg.experiment == "converge";
  if (continuum_side && !(cfg.alpha < alpha_critical(cfg.d)))
    bad_field("alpha",
              "must be below the critical exponent min(1+2/d, 2) = " +
                  format_double(alpha_critical(cfg.d)) +
                  "; the limiting partition function is degenerate at or "
                  "above it");
  if (lattice_side) {
    for (std::int64_t n : n_grid_from(cfg)) {
      try {
        const ScalingPlan plan = ScalingPlan::make(law, n, cfg.d, cfg.beta_hat);
        (void)plan;
      } catch (const std::invalid_argument& e) {
        bad_field("beta_hat/N", std::string(e.what()) + " (at N = " +
                                    std::to_string(n) + ")");
      }
    }
  }
  if (continuum_side && psi != nullptr && !psi->fits_window(cfg.L))
    bad_field("psi/L", "window too small: the test-function support must "
                       "sit inside [-L,L]^d");
  if (cfg.experiment == "converge" && !(cfg.a > 0.0))
    bad_field("a", "the convergence experiment needs a cutoff a > 0");
  if (cfg.experiment == "simulate-continuum" && !(cfg.a > 0.0))
    bad_field("a", "the noise cloud needs a cutoff a > 0 (the mark "
                   "intensity is infinite near 0)");
  if (cfg.experiment == "replica-moment" && !std::isfinite(cfg.b))
    bad_field("b", "the replica moment needs a finite upper cutoff");
  const bool lattice_truncation =
      cfg.experiment == "converge" || cfg.experiment == "replica-moment" ||
      (cfg.experiment == "simulate-discrete" &&
       (cfg.a > 0.0 || std::isfinite(cfg.b)));
  if (lattice_truncation && cfg.a > 1.0)
    bad_field("a", "lattice cutoffs are fractions of the scale V_N, so a "
                   "must lie in [0,1]");
  if (cfg.experiment == "truncation-curve") {
    if (cfg.a_grid.empty())
      bad_field("a_grid", "the truncation curve needs a cutoff grid");
    for (double a : cfg.a_grid)
      if (a > 1.0)
        bad_field("a_grid", "lattice cutoffs are fractions of the scale "
                            "V_N, so entries must lie in [0,1]");
  }
}

std::string config_canonical(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "experiment=" << cfg.experiment << ";family=" << cfg.family
     << ";alpha=" << format_double(cfg.alpha) << ";x_m="
     << format_double(cfg.x_m) << ";theta=" << format_double(cfg.theta)
     << ";N=" << cfg.N << ";N_grid=";
  for (std::size_t i = 0; i < cfg.N_grid.size(); ++i)
    os << (i ? "," : "") << cfg.N_grid[i];
  os << ";d=" << cfg.d << ";L=" << format_double(cfg.L)
     << ";beta_hat=" << format_double(cfg.beta_hat)
     << ";a=" << format_double(cfg.a) << ";b=" << format_double(cfg.b)
     << ";a_grid=";
  for (std::size_t i = 0; i < cfg.a_grid.size(); ++i)
    os << (i ? "," : "") << format_double(cfg.a_grid[i]);
  os << ";functional=" << cfg.functional << ";psi=" << cfg.psi
     << ";replicas=" << cfg.replicas << ";seed=" << cfg.seed;
  return os.str();
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  return fnv1a64(config_canonical(cfg));
}

std::string config_hash_hex(const ExperimentConfig& cfg) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(config_hash(cfg)));
  return buf;
}

void write_manifest(const std::string& path, const ExperimentConfig& cfg,
                    double wall_seconds) {
  nlohmann::json j;
  j["tool_version"] = kToolVersion;
  j["config_hash"] = config_hash_hex(cfg);
  j["config"] = config_canonical(cfg);
  j["seed"] = cfg.seed;
  j["wall_time_s"] = wall_seconds;
  j["csv_schema_version"] = 1;
  std::ofstream out(path, std::ios::trunc);
  if (!out)
    throw std::invalid_argument("manifest: cannot open '" + path + "'");
  out << j.dump(2) << "\n";
}

}  // namespace polymerlab
