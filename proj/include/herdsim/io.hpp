#pragma once

// Artifact serialization: deterministic full-precision CSV plus JSON sidecar
// metadata, and the content hash used by run manifests.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "herdsim/errors.hpp"
#include "herdsim/params.hpp"
#include "herdsim/sde.hpp"
#include "herdsim/series.hpp"
#include "herdsim/stats.hpp"

namespace herdsim {

// Shortest round-trip-exact decimal formatting (17 significant digits).
inline std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::uint64_t fnv1a64(const void* data, std::size_t size) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (std::size_t i = 0; i < size; ++i) {
    hash ^= bytes[i];
    hash *= 0x100000001b3ull;
  }
  return hash;
}

inline std::string hash_hex(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

inline std::string file_content_hash(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("cli", "manifest", "cannot read " + path.string());
  }
  std::uint64_t hash = 0xcbf29ce484222325ull;
  char buf[1 << 16];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    const auto n = static_cast<std::size_t>(in.gcount());
    for (std::size_t i = 0; i < n; ++i) {
      hash ^= static_cast<unsigned char>(buf[i]);
      hash *= 0x100000001b3ull;
    }
  }
  return hash_hex(hash);
}

inline nlohmann::json to_json(const ModelParams& p) {
  return {{"eps_cf", p.eps_cf}, {"eps_fc", p.eps_fc}, {"eps_cc", p.eps_cc},
          {"H", p.H},           {"h", p.h},           {"a", p.a},
          {"b", p.b},           {"alpha", p.alpha},   {"lambda", p.lambda},
          {"kappa", p.kappa},   {"delta", p.delta}};
}

inline std::uint64_t params_hash(const ModelParams& p) {
  const std::string dump = to_json(p).dump();
  return fnv1a64(dump.data(), dump.size());
}

namespace detail {

inline std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);  // binary: no CRLF translation
  if (!out) {
    throw Error("cli", "write_artifact", "cannot open " + path.string());
  }
  return out;
}

}  // namespace detail

inline void write_price_path_csv(const std::filesystem::path& path,
                                 const PricePath& p) {
  auto out = detail::open_out(path);
  out << "t_min,n_f,xi,p\n";
  for (std::size_t i = 0; i < p.samples.size(); ++i) {
    const auto& s = p.samples[i];
    out << i << ',' << format_full(s.n_f) << ',' << format_full(s.xi) << ','
        << format_full(s.p) << '\n';
  }
}

inline void write_return_series_csv(const std::filesystem::path& path,
                                    const ReturnSeries& s,
                                    const ModelParams* params = nullptr) {
  auto out = detail::open_out(path);
  out << "idx,r\n";
  for (std::size_t i = 0; i < s.values.size(); ++i) {
    out << i << ',' << format_full(s.values[i]) << '\n';
  }
  nlohmann::json meta{{"window_T", s.window_T},
                      {"normalized", s.normalized},
                      {"norm_factor", s.norm_factor},
                      {"seed", s.seed},
                      {"source", s.source == SeriesSource::Model ? "model"
                                                                 : "empirical"},
                      {"n_values", s.values.size()}};
  if (!s.symbol.empty()) meta["symbol"] = s.symbol;
  if (!s.session_starts.empty()) meta["session_starts"] = s.session_starts;
  if (params) meta["params_fnv1a64"] = hash_hex(params_hash(*params));
  auto side = detail::open_out(path.string() + ".meta.json");
  side << meta.dump(2) << '\n';
}

inline ReturnSeries read_return_series_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error("cli", "read_artifact", "cannot read " + path.string());
  }
  ReturnSeries s;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    if (comma == std::string::npos) continue;
    s.values.push_back(std::strtod(line.c_str() + comma + 1, nullptr));
  }
  std::ifstream meta_in(path.string() + ".meta.json");
  if (meta_in) {
    nlohmann::json meta = nlohmann::json::parse(meta_in);
    s.window_T = meta.value("window_T", 1.0);
    s.normalized = meta.value("normalized", false);
    s.norm_factor = meta.value("norm_factor", 1.0);
    s.seed = meta.value("seed", std::uint64_t{0});
    s.source = meta.value("source", "model") == std::string("empirical")
                   ? SeriesSource::Empirical
                   : SeriesSource::Model;
    s.symbol = meta.value("symbol", "");
    if (meta.contains("session_starts")) {
      s.session_starts =
          meta["session_starts"].get<std::vector<std::size_t>>();
    }
  }
  return s;
}

inline void write_density_csv(const std::filesystem::path& path,
                              const DensityEstimate& d,
                              const ModelParams* params = nullptr,
                              const std::vector<std::string>& realizations = {}) {
  auto out = detail::open_out(path);
  out << "bin_center,density,count\n";
  for (std::size_t j = 0; j < d.density.size(); ++j) {
    out << format_full(d.bin_center(j)) << ',' << format_full(d.density[j])
        << ',' << d.counts[j] << '\n';
  }
  nlohmann::json meta{{"n_samples", d.n_samples},
                      {"n_realizations", d.n_realizations},
                      {"bin_edges", d.bin_edges}};
  if (params) meta["params_fnv1a64"] = hash_hex(params_hash(*params));
  if (!realizations.empty()) meta["realizations"] = realizations;
  auto side = detail::open_out(path.string() + ".meta.json");
  side << meta.dump(2) << '\n';
}

struct DensityTable {
  std::vector<double> bin_center;
  std::vector<double> density;
  std::vector<std::int64_t> counts;
};

inline DensityTable read_density_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error("cli", "read_artifact", "cannot read " + path.string());
  }
  DensityTable t;
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    double c, d;
    long long n;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lld", &c, &d, &n) == 3) {
      t.bin_center.push_back(c);
      t.density.push_back(d);
      t.counts.push_back(n);
    }
  }
  return t;
}

inline void write_spectrum_csv(const std::filesystem::path& path,
                               const SpectrumEstimate& s,
                               const ModelParams* params = nullptr,
                               const std::vector<std::string>& realizations = {}) {
  auto out = detail::open_out(path);
  out << "freq_per_min,power\n";
  for (std::size_t k = 0; k < s.freqs.size(); ++k) {
    out << format_full(s.freqs[k]) << ',' << format_full(s.power[k]) << '\n';
  }
  nlohmann::json meta{{"n_windows", s.n_windows},
                      {"n_realizations", s.n_realizations},
                      {"window_T", s.window_T}};
  if (params) meta["params_fnv1a64"] = hash_hex(params_hash(*params));
  if (!realizations.empty()) meta["realizations"] = realizations;
  auto side = detail::open_out(path.string() + ".meta.json");
  side << meta.dump(2) << '\n';
}

struct SpectrumTable {
  std::vector<double> freqs;
  std::vector<double> power;
};

inline SpectrumTable read_spectrum_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error("cli", "read_artifact", "cannot read " + path.string());
  }
  SpectrumTable t;
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    double f, p;
    if (std::sscanf(line.c_str(), "%lf,%lf", &f, &p) == 2) {
      t.freqs.push_back(f);
      t.power.push_back(p);
    }
  }
  return t;
}

}  // namespace herdsim
