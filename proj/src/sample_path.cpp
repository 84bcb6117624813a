#include "sdemle/sample_path.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "sdemle/errors.hpp"

namespace sdemle {

namespace {

constexpr char kMagic[4] = {'S', 'D', 'E', 'P'};
constexpr std::uint32_t kVersion = 1;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename T>
void put(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
void get(std::ifstream& in, T& v) {
  in.read(reinterpret_cast<char*>(&v), sizeof v);
}

}  // namespace

void SamplePath::validate() const {
  if (values.empty()) throw ConfigError("sample path has no values");
  if (!(h > 0.0)) throw ConfigError("sample path step must be positive");
  for (double v : values)
    if (!std::isfinite(v)) throw ConfigError("sample path contains non-finite values");
}

void write_path_csv(const SamplePath& path, const std::string& file) {
  std::ofstream out(file);
  if (!out) throw ConfigError("cannot open " + file + " for writing");
  out << "# h=" << fmt17(path.h) << " seed=" << path.seed << " t0=" << fmt17(path.t0);
  if (path.theta_true) {
    out << " theta=";
    for (int i = 0; i < path.theta_true->size(); ++i)
      out << (i ? "," : "") << fmt17((*path.theta_true)[i]);
  }
  out << "\n";
  out << "t,x\n";
  for (std::size_t j = 0; j < path.values.size(); ++j)
    out << fmt17(path.time_at(j)) << "," << fmt17(path.values[j]) << "\n";
  if (!out) throw ConfigError("write failed for " + file);
}

SamplePath read_path_csv(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open " + file);
  SamplePath path;
  std::string line;
  bool header_seen = false;
  double t0 = 0.0, t1 = 0.0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      // recover metadata from the comment line
      if (auto p = line.find("seed="); p != std::string::npos)
        path.seed = std::strtoull(line.c_str() + p + 5, nullptr, 10);
      if (auto p = line.find("theta="); p != std::string::npos) {
        ParamVec th;
        const char* s = line.c_str() + p + 6;
        char* end = nullptr;
        while (th.size() < 2) {
          const double v = std::strtod(s, &end);
          if (end == s) break;
          th.a[th.n++] = v;
          s = (*end == ',') ? end + 1 : end;
          if (*end != ',') break;
        }
        if (th.size() > 0) path.theta_true = th;
      }
      continue;
    }
    if (!header_seen) {
      header_seen = true;  // "t,x"
      continue;
    }
    const char* s = line.c_str();
    char* end = nullptr;
    const double t = std::strtod(s, &end);
    if (end == s || *end != ',') throw ConfigError("malformed CSV row in " + file);
    const double x = std::strtod(end + 1, nullptr);
    if (path.values.empty())
      t0 = t;
    else if (path.values.size() == 1)
      t1 = t;
    path.values.push_back(x);
  }
  if (path.values.size() < 2) throw ConfigError("path CSV has fewer than two rows: " + file);
  path.t0 = t0;
  path.h = t1 - t0;
  path.validate();
  return path;
}

void write_path_binary(const SamplePath& path, const std::string& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw ConfigError("cannot open " + file + " for writing");
  out.write(kMagic, 4);
  put(out, kVersion);
  put(out, path.t0);
  put(out, path.h);
  const std::uint64_t n = path.n_steps();
  put(out, n);
  put(out, path.seed);
  const std::uint32_t d = path.theta_true ? static_cast<std::uint32_t>(path.theta_true->size()) : 0;
  put(out, d);
  for (std::uint32_t i = 0; i < d; ++i) put(out, (*path.theta_true)[static_cast<int>(i)]);
  out.write(reinterpret_cast<const char*>(path.values.data()),
            static_cast<std::streamsize>(path.values.size() * sizeof(double)));
  if (!out) throw ConfigError("write failed for " + file);
}

SamplePath read_path_binary(const std::string& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + file);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw ConfigError(file + " is not a path record");
  std::uint32_t version = 0;
  get(in, version);
  if (version != kVersion) throw ConfigError("unsupported path record version");
  SamplePath path;
  std::uint64_t n = 0;
  std::uint32_t d = 0;
  get(in, path.t0);
  get(in, path.h);
  get(in, n);
  get(in, path.seed);
  get(in, d);
  if (d > 2) throw ConfigError("corrupt path record: parameter dimension " + std::to_string(d));
  if (d > 0) {
    ParamVec th(static_cast<int>(d));
    for (std::uint32_t i = 0; i < d; ++i) get(in, th[static_cast<int>(i)]);
    path.theta_true = th;
  }
  path.values.resize(n + 1);
  in.read(reinterpret_cast<char*>(path.values.data()),
          static_cast<std::streamsize>(path.values.size() * sizeof(double)));
  if (!in) throw ConfigError("truncated path record: " + file);
  path.validate();
  return path;
}

}  // namespace sdemle
