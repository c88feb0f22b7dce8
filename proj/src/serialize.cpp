#include "polymerlab/serialize.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "polymerlab/numeric.hpp"

namespace polymerlab {

namespace {

constexpr char kMagic[4] = {'P', 'L', 'S', 'B'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::string& buf, T v) {
  char raw[sizeof(T)];
  std::memcpy(raw, &v, sizeof(T));
  buf.append(raw, sizeof(T));
}

template <typename T>
T take(const std::string& buf, std::size_t& at) {
  if (at + sizeof(T) > buf.size())
    throw std::invalid_argument("slab file: truncated before the checksum");
  T v;
  std::memcpy(&v, buf.data() + at, sizeof(T));
  at += sizeof(T);
  return v;
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::invalid_argument("cannot open for writing: " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::invalid_argument("short write: " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open for reading: " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  return bytes;
}

void append_csv_field(std::string& line, const std::string& v) {
  if (!line.empty()) line.push_back(',');
  line += v;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

SlabFileInfo save_slab(const EnvSlab& env, std::int64_t radius,
                       const std::string& path) {
  const std::vector<LatticeSite> sites = env.materialize(radius);
  SlabFileInfo info;
  info.N = env.N();
  info.d = env.d();
  info.family = env.law().family();
  info.alpha = env.law().alpha();
  info.x_m = env.law().x_m();
  info.theta = env.law().theta();
  info.seed = env.seed();
  info.replica = env.replica();
  info.radius = radius;
  info.count = sites.size();

  std::string buf;
  buf.append(kMagic, sizeof kMagic);
  put(buf, kVersion);
  put(buf, info.N);
  put(buf, static_cast<std::int32_t>(info.d));
  put(buf, static_cast<std::int32_t>(info.family));
  put(buf, info.alpha);
  put(buf, info.x_m);
  put(buf, info.theta);
  put(buf, static_cast<std::uint8_t>(env.law().allow_uncentered() ? 1 : 0));
  put(buf, info.seed);
  put(buf, info.replica);
  put(buf, info.radius);
  put(buf, info.count);
  for (const LatticeSite& s : sites) {
    put(buf, s.n);
    for (int j = 0; j < info.d; ++j) put(buf, s.x[j]);
    put(buf, s.eta);
  }
  put(buf, fnv1a64(buf));
  write_file(path, buf);
  return info;
}

EnvSlab load_slab(const std::string& path, SlabFileInfo* info_out) {
  const std::string buf = read_file(path);
  if (buf.size() < sizeof kMagic + sizeof kVersion + sizeof(std::uint64_t))
    throw std::invalid_argument("slab file: too short to be valid");
  if (std::memcmp(buf.data(), kMagic, sizeof kMagic) != 0)
    throw std::invalid_argument("slab file: bad magic bytes");

  std::uint64_t stored_hash;
  std::memcpy(&stored_hash, buf.data() + buf.size() - sizeof stored_hash,
              sizeof stored_hash);
  const std::string_view body(buf.data(), buf.size() - sizeof stored_hash);
  if (fnv1a64(body) != stored_hash)
    throw std::invalid_argument("slab file: checksum mismatch, refusing to load");

  std::size_t at = sizeof kMagic;
  const auto version = take<std::uint32_t>(buf, at);
  if (version != kVersion)
    throw std::invalid_argument("slab file: unsupported container version");

  SlabFileInfo info;
  info.N = take<std::int64_t>(buf, at);
  info.d = take<std::int32_t>(buf, at);
  info.family = static_cast<TailFamily>(take<std::int32_t>(buf, at));
  info.alpha = take<double>(buf, at);
  info.x_m = take<double>(buf, at);
  info.theta = take<double>(buf, at);
  const bool allow_uncentered = take<std::uint8_t>(buf, at) != 0;
  info.seed = take<std::uint64_t>(buf, at);
  info.replica = take<std::uint64_t>(buf, at);
  info.radius = take<std::int64_t>(buf, at);
  info.count = take<std::uint64_t>(buf, at);

  std::vector<LatticeSite> sites;
  sites.reserve(info.count);
  for (std::uint64_t i = 0; i < info.count; ++i) {
    LatticeSite s;
    s.n = take<std::int64_t>(buf, at);
    for (int j = 0; j < info.d; ++j) s.x[j] = take<std::int32_t>(buf, at);
    s.eta = take<double>(buf, at);
    sites.push_back(s);
  }
  if (at != buf.size() - sizeof stored_hash)
    throw std::invalid_argument("slab file: trailing bytes after the site table");

  const TailLaw law = TailLaw::make(info.family, info.alpha, info.x_m,
                                    info.theta, allow_uncentered);
  if (info_out != nullptr) *info_out = info;
  return EnvSlab::from_values(law, info.N, info.d, std::move(sites), 0.0,
                              info.seed, info.replica);
}

void write_partition_csv(const std::string& path,
                         const std::vector<PartitionRow>& rows) {
  std::string out =
      "experiment_id,N,d,alpha,a,b,beta_hat,functional,value,normalization,"
      "seed\n";
  for (const PartitionRow& r : rows) {
    std::string line;
    append_csv_field(line, r.experiment_id);
    append_csv_field(line, std::to_string(r.N));
    append_csv_field(line, std::to_string(r.d));
    append_csv_field(line, format_double(r.alpha));
    append_csv_field(line, format_double(r.a));
    append_csv_field(line, format_double(r.b));
    append_csv_field(line, format_double(r.beta_hat));
    append_csv_field(line, r.functional);
    append_csv_field(line, format_double(r.value));
    append_csv_field(line, format_double(r.normalization));
    append_csv_field(line, std::to_string(r.seed));
    out += line;
    out.push_back('\n');
  }
  write_file(path, out);
}

void write_cloud_csv(const std::string& path, const PoissonCloud& cloud,
                     std::uint64_t seed) {
  std::string out = "alpha,a,L,d,seed\n";
  {
    std::string line;
    append_csv_field(line, format_double(cloud.alpha));
    append_csv_field(line, format_double(cloud.a));
    append_csv_field(line, format_double(cloud.L));
    append_csv_field(line, std::to_string(cloud.d));
    append_csv_field(line, std::to_string(seed));
    out += line;
    out.push_back('\n');
  }
  out += "t";
  for (int j = 1; j <= cloud.d; ++j) out += ",x" + std::to_string(j);
  out += ",v\n";
  for (const CloudPoint& p : cloud.points) {
    std::string line;
    append_csv_field(line, format_double(p.t));
    for (int j = 0; j < cloud.d; ++j)
      append_csv_field(line, format_double(p.x[j]));
    append_csv_field(line, format_double(p.v));
    out += line;
    out.push_back('\n');
  }
  write_file(path, out);
}

void write_convergence_csv(const std::string& path,
                           const std::vector<ConvergenceRow>& rows) {
  std::string out = "experiment_id,side,N_or_a,statistic,value,se,seed\n";
  for (const ConvergenceRow& r : rows) {
    std::string line;
    append_csv_field(line, r.experiment_id);
    append_csv_field(line, r.side);
    append_csv_field(line, format_double(r.N_or_a));
    append_csv_field(line, r.statistic);
    append_csv_field(line, format_double(r.value));
    append_csv_field(line, format_double(r.se));
    append_csv_field(line, std::to_string(r.seed));
    out += line;
    out.push_back('\n');
  }
  write_file(path, out);
}

void write_appendix_csv(const std::string& path,
                        const std::vector<AppendixRow>& rows) {
  std::string out = "check,k,params,lhs,rhs,pass\n";
  for (const AppendixRow& r : rows) {
    std::string line;
    append_csv_field(line, r.check);
    append_csv_field(line, std::to_string(r.k));
    append_csv_field(line, r.params);
    append_csv_field(line, format_double(r.lhs));
    append_csv_field(line, format_double(r.rhs));
    append_csv_field(line, r.pass ? "1" : "0");
    out += line;
    out.push_back('\n');
  }
  write_file(path, out);
}

}  // namespace polymerlab
