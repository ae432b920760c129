#pragma once

// Batch campaigns: seeded parallel simulation runs, empirical ingestion, and
// model-vs-empirical comparison reports. File writes happen on the calling
// thread only; workers hand back value objects.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "herdsim/errors.hpp"
#include "herdsim/ingest.hpp"
#include "herdsim/io.hpp"
#include "herdsim/noise.hpp"
#include "herdsim/params.hpp"
#include "herdsim/sde.hpp"
#include "herdsim/series.hpp"
#include "herdsim/stats.hpp"

namespace herdsim {

struct RunConfig {
  ModelParams model;
  NoiseSpec noise;
  SeasonalityProfile seasonality;
  int realizations = 4;
  std::int64_t duration_min = 262144;
  std::int64_t burn_in_min = 10000;
  std::vector<int> windows = {1, 3, 10, 30};
  std::uint64_t seed = 1;
  std::string output_dir = "herdsim-out";
  std::size_t psd_window_len = 8192;
  LogBinSpec pdf_bins;
  int jobs = 0;  // 0 = hardware concurrency
  bool write_paths = true;
};

inline void validate(const RunConfig& c) {
  validate(c.model);
  validate(c.noise);
  validate(c.seasonality);
  auto fail = [](const std::string& msg) {
    throw ValidationError("cli", "validate_config", msg);
  };
  if (c.realizations < 1) fail("realizations must be >= 1");
  if (c.windows.empty()) fail("need at least one aggregation window");
  std::int64_t max_window = 0;
  for (int w : c.windows) {
    if (w < 1) fail("aggregation windows must be >= 1");
    max_window = std::max<std::int64_t>(max_window, w);
  }
  if (!is_power_of_two(c.psd_window_len)) {
    fail("psd_window_len must be a power of two");
  }
  if (c.duration_min <= max_window * static_cast<std::int64_t>(c.psd_window_len)) {
    fail("duration must exceed max(windows) * psd_window_len minutes");
  }
  if (c.burn_in_min < 0) fail("burn_in must be >= 0");
}

namespace detail {

// Runs fn(i) for i in [0, n) on a small worker pool; first exception wins.
template <typename Fn>
void parallel_for(int n, int jobs, Fn&& fn) {
  if (jobs <= 0) {
    jobs = static_cast<int>(std::thread::hardware_concurrency());
    if (jobs <= 0) jobs = 1;
  }
  jobs = std::min(jobs, n);
  if (jobs <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      if (failed.load()) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        failed.store(true);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(jobs));
  for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace detail

// Per-path RNG streams: stream 2i drives the SDE, stream 2i+1 the noise.
inline std::uint64_t path_stream(int realization) {
  return 2ull * static_cast<std::uint64_t>(realization);
}
inline std::uint64_t noise_stream(int realization) {
  return 2ull * static_cast<std::uint64_t>(realization) + 1ull;
}

struct RealizationResult {
  PricePath path;
  ReturnSeries returns_1min;  // normalized
};

inline RealizationResult run_realization(const RunConfig& c, int index) {
  RealizationResult r;
  r.path = simulate_path(c.model, c.duration_min, c.burn_in_min, c.seed,
                         path_stream(index));
  NoiseSpec spec = c.noise;
  spec.T = 1.0;
  SeasonalityProfile profile = c.seasonality;
  if (profile.mode == SeasonalityMode::Constant) profile.b = c.model.b;
  r.returns_1min = normalize_unit_variance(
      build_returns(r.path, spec, c.model.a, profile, c.seed,
                    noise_stream(index)));
  return r;
}

struct WindowEstimates {
  int window = 1;
  DensityEstimate pdf;
  SpectrumEstimate psd;
};

struct SimulateResult {
  std::vector<WindowEstimates> estimates;  // one per configured window
  std::vector<std::filesystem::path> files;
  std::filesystem::path manifest_path;
};

// In-memory campaign: realizations in parallel, estimators merged in index
// order so results are independent of scheduling.
inline std::vector<RealizationResult> run_realizations(const RunConfig& c) {
  std::vector<RealizationResult> results(
      static_cast<std::size_t>(c.realizations));
  detail::parallel_for(c.realizations, c.jobs, [&](int i) {
    results[static_cast<std::size_t>(i)] = run_realization(c, i);
  });
  return results;
}

inline std::vector<WindowEstimates> estimate_windows(
    const RunConfig& c, const std::vector<RealizationResult>& results) {
  std::vector<WindowEstimates> out;
  for (int w : c.windows) {
    std::vector<ReturnSeries> agg;
    agg.reserve(results.size());
    for (const auto& r : results) agg.push_back(aggregate(r.returns_1min, w));
    WindowEstimates est;
    est.window = w;
    est.pdf = abs_return_pdf(agg, c.pdf_bins);
    est.psd = power_spectrum(agg, c.psd_window_len);
    out.push_back(std::move(est));
  }
  return out;
}

inline SimulateResult cmd_simulate(const RunConfig& c) {
  validate(c);
  namespace fs = std::filesystem;
  const fs::path dir(c.output_dir);
  fs::create_directories(dir);

  auto results = run_realizations(c);
  auto estimates = estimate_windows(c, results);

  SimulateResult out;
  out.estimates = estimates;
  auto emit = [&](const fs::path& p) { out.files.push_back(p); };

  std::vector<std::string> realization_names;
  for (int i = 0; i < c.realizations; ++i) {
    realization_names.push_back("r" + std::to_string(i));
  }
  for (int i = 0; i < c.realizations; ++i) {
    const auto& r = results[static_cast<std::size_t>(i)];
    if (c.write_paths) {
      const fs::path p = dir / ("path_r" + std::to_string(i) + ".csv");
      write_price_path_csv(p, r.path);
      emit(p);
    }
    const fs::path p = dir / ("returns_T1_r" + std::to_string(i) + ".csv");
    write_return_series_csv(p, r.returns_1min, &c.model);
    emit(p);
    emit(p.string() + ".meta.json");
  }
  for (const auto& est : estimates) {
    const fs::path pd =
        dir / ("density_T" + std::to_string(est.window) + ".csv");
    write_density_csv(pd, est.pdf, &c.model, realization_names);
    emit(pd);
    emit(pd.string() + ".meta.json");
    const fs::path ps =
        dir / ("spectrum_T" + std::to_string(est.window) + ".csv");
    write_spectrum_csv(ps, est.psd, &c.model, realization_names);
    emit(ps);
    emit(ps.string() + ".meta.json");
    const fs::path psm =
        dir / ("spectrum_T" + std::to_string(est.window) + "_logbin.csv");
    write_spectrum_csv(psm, log_bin_spectrum(est.psd), &c.model,
                       realization_names);
    emit(psm);
    emit(psm.string() + ".meta.json");
  }

  nlohmann::json manifest;
  manifest["tool"] = "herdsim";
  manifest["config"] = {
      {"model", to_json(c.model)},
      {"noise",
       {{"kind", c.noise.kind == NoiseKind::Gaussian ? "gaussian" : "qgaussian"},
        {"lambda", c.noise.lambda}}},
      {"seasonality",
       {{"mode", c.seasonality.mode == SeasonalityMode::Constant
                     ? "constant"
                     : "intraday_bump"},
        {"b", c.seasonality.b},
        {"w", c.seasonality.w},
        {"base", c.seasonality.base},
        {"peak_offset", c.seasonality.peak_offset},
        {"session_length", c.seasonality.session_length}}},
      {"realizations", c.realizations},
      {"duration_min", c.duration_min},
      {"burn_in_min", c.burn_in_min},
      {"windows", c.windows},
      {"seed", c.seed},
      {"psd_window_len", c.psd_window_len}};
  auto& files = manifest["files"] = nlohmann::json::array();
  for (const auto& f : out.files) {
    files.push_back({{"path", fs::path(f).filename().string()},
                     {"fnv1a64", file_content_hash(f)}});
  }
  out.manifest_path = dir / "manifest.json";
  {
    auto m = detail::open_out(out.manifest_path);
    m << manifest.dump(2) << '\n';
  }
  return out;
}

struct IngestOptions {
  TickFormat format;
  SessionCalendar calendar;
  std::vector<int> windows;        // empty = series only
  std::size_t psd_window_len = 0;  // 0 = no spectra
  LogBinSpec pdf_bins;
  std::string output_dir = "herdsim-ingest";
};

struct SymbolSummary {
  std::string symbol;
  std::size_t n_values = 0;
  std::size_t n_sessions = 0;
  double zero_fraction = 0.0;
};

struct IngestResult {
  std::vector<SymbolSummary> symbols;
  std::vector<ReturnSeries> series;  // normalized, one per symbol
  std::vector<std::filesystem::path> files;
};

inline IngestResult cmd_ingest(const std::vector<std::string>& input_files,
                               const IngestOptions& opt) {
  namespace fs = std::filesystem;
  validate(opt.calendar);
  if (input_files.empty()) {
    throw IngestError("cmd_ingest", "no input files");
  }
  const fs::path dir(opt.output_dir);
  fs::create_directories(dir);

  std::map<std::string, std::vector<TickRecord>> by_symbol;
  for (const auto& file : input_files) {
    std::ifstream in(file, std::ios::binary);
    if (!in) {
      throw IngestError("cmd_ingest", "cannot open input file " + file);
    }
    TickParseResult parsed;
    try {
      parsed = parse_ticks(in, opt.format);
    } catch (const IngestError& e) {
      throw IngestError("cmd_ingest", std::string(e.what()) + " in " + file);
    }
    if (parsed.ticks.empty()) {
      throw IngestError("cmd_ingest", "no valid ticks in " + file);
    }
    for (auto& t : parsed.ticks) {
      by_symbol[t.symbol.empty() ? fs::path(file).stem().string() : t.symbol]
          .push_back(std::move(t));
    }
  }

  IngestResult out;
  for (auto& [symbol, ticks] : by_symbol) {
    for (auto& t : ticks) t.symbol = symbol;
    ReturnSeries raw = minute_returns(ticks, opt.calendar);
    raw.symbol = symbol;
    ReturnSeries norm = normalize_unit_variance(raw);

    SymbolSummary summary;
    summary.symbol = symbol;
    summary.n_values = norm.values.size();
    summary.n_sessions = norm.session_starts.size();
    summary.zero_fraction = zero_return_fraction(norm);
    out.symbols.push_back(summary);

    const fs::path p = dir / ("returns_T1_" + symbol + ".csv");
    write_return_series_csv(p, norm);
    out.files.push_back(p);
    out.series.push_back(std::move(norm));
  }

  {
    const fs::path p = dir / "summary.csv";
    auto s = detail::open_out(p);
    s << "symbol,n_values,n_sessions,zero_fraction\n";
    for (const auto& sym : out.symbols) {
      s << sym.symbol << ',' << sym.n_values << ',' << sym.n_sessions << ','
        << format_full(sym.zero_fraction) << '\n';
    }
    out.files.push_back(p);
  }

  for (int w : opt.windows) {
    std::vector<ReturnSeries> agg;
    for (const auto& s : out.series) agg.push_back(aggregate(s, w));
    auto group = pool_by_group(std::move(agg));
    const auto pdf = abs_return_pdf(group, opt.pdf_bins);
    const fs::path pd = dir / ("density_T" + std::to_string(w) + ".csv");
    write_density_csv(pd, pdf);
    out.files.push_back(pd);
    if (opt.psd_window_len > 0) {
      const auto psd = power_spectrum(group, opt.psd_window_len);
      const fs::path ps = dir / ("spectrum_T" + std::to_string(w) + ".csv");
      write_spectrum_csv(ps, psd);
      out.files.push_back(ps);
    }
  }
  return out;
}

struct WindowComparison {
  int window = 1;
  int pdf_overlap_bins = 0;
  double pdf_rmse_log10 = 0.0;  // over overlapping bins
  int psd_overlap_bins = 0;
  double psd_offset_log10 = 0.0;  // fitted vertical shift, model - empirical
  double psd_rmse_log10 = 0.0;    // after offset alignment
};

struct CompareResult {
  std::vector<WindowComparison> windows;
  std::vector<std::filesystem::path> files;
};

// Shape-level comparison: PDFs on their common bin grid, PSDs aligned up to
// a fitted vertical log-offset. Degenerate overlaps are flagged, not NaN.
inline CompareResult cmd_compare(const std::string& model_dir,
                                 const std::string& empirical_dir,
                                 const std::vector<int>& windows,
                                 const std::string& output_dir) {
  namespace fs = std::filesystem;
  const fs::path dir(output_dir);
  fs::create_directories(dir);

  CompareResult out;
  nlohmann::json report = nlohmann::json::array();
  for (int w : windows) {
    const std::string density_name = "density_T" + std::to_string(w) + ".csv";
    const std::string spectrum_name =
        "spectrum_T" + std::to_string(w) + ".csv";
    const fs::path mp = fs::path(model_dir) / density_name;
    const fs::path ep = fs::path(empirical_dir) / density_name;
    const fs::path ms = fs::path(model_dir) / spectrum_name;
    const fs::path es = fs::path(empirical_dir) / spectrum_name;
    for (const auto& p : {mp, ep, ms, es}) {
      if (!fs::exists(p)) {
        throw Error("cli", "cmd_compare",
                    "missing estimate for window T=" + std::to_string(w) +
                        ": " + p.string());
      }
    }
    const auto md = read_density_csv(mp);
    const auto ed = read_density_csv(ep);
    if (md.bin_center.size() != ed.bin_center.size()) {
      throw Error("cli", "cmd_compare",
                  "PDF grids differ for window T=" + std::to_string(w));
    }
    WindowComparison cmp;
    cmp.window = w;
    double pdf_sq = 0.0;
    for (std::size_t j = 0; j < md.bin_center.size(); ++j) {
      if (std::fabs(md.bin_center[j] - ed.bin_center[j]) >
          1e-9 * md.bin_center[j]) {
        throw Error("cli", "cmd_compare",
                    "PDF grids differ for window T=" + std::to_string(w));
      }
      if (md.density[j] > 0.0 && ed.density[j] > 0.0) {
        const double diff = std::log10(md.density[j] / ed.density[j]);
        pdf_sq += diff * diff;
        ++cmp.pdf_overlap_bins;
      }
    }
    cmp.pdf_rmse_log10 =
        cmp.pdf_overlap_bins > 0 ? std::sqrt(pdf_sq / cmp.pdf_overlap_bins)
                                 : 0.0;

    const auto msp = read_spectrum_csv(ms);
    const auto esp = read_spectrum_csv(es);
    if (msp.freqs.size() != esp.freqs.size()) {
      throw Error("cli", "cmd_compare",
                  "PSD grids differ for window T=" + std::to_string(w));
    }
    double offset_sum = 0.0;
    for (std::size_t k = 0; k < msp.freqs.size(); ++k) {
      if (msp.power[k] > 0.0 && esp.power[k] > 0.0) {
        offset_sum += std::log10(msp.power[k] / esp.power[k]);
        ++cmp.psd_overlap_bins;
      }
    }
    if (cmp.psd_overlap_bins > 0) {
      cmp.psd_offset_log10 = offset_sum / cmp.psd_overlap_bins;
      double sq = 0.0;
      for (std::size_t k = 0; k < msp.freqs.size(); ++k) {
        if (msp.power[k] > 0.0 && esp.power[k] > 0.0) {
          const double diff = std::log10(msp.power[k] / esp.power[k]) -
                              cmp.psd_offset_log10;
          sq += diff * diff;
        }
      }
      cmp.psd_rmse_log10 = std::sqrt(sq / cmp.psd_overlap_bins);
    }

    {
      const fs::path p =
          dir / ("comparison_T" + std::to_string(w) + "_pdf.csv");
      auto f = detail::open_out(p);
      f << "bin_center,model_density,empirical_density\n";
      for (std::size_t j = 0; j < md.bin_center.size(); ++j) {
        f << format_full(md.bin_center[j]) << ',' << format_full(md.density[j])
          << ',' << format_full(ed.density[j]) << '\n';
      }
      out.files.push_back(p);
    }
    {
      const fs::path p =
          dir / ("comparison_T" + std::to_string(w) + "_psd.csv");
      auto f = detail::open_out(p);
      f << "freq_per_min,model_power,empirical_power\n";
      for (std::size_t k = 0; k < msp.freqs.size(); ++k) {
        f << format_full(msp.freqs[k]) << ',' << format_full(msp.power[k])
          << ',' << format_full(esp.power[k]) << '\n';
      }
      out.files.push_back(p);
    }

    report.push_back({{"window", w},
                      {"pdf_overlap_bins", cmp.pdf_overlap_bins},
                      {"pdf_rmse_log10", cmp.pdf_rmse_log10},
                      {"pdf_zero_overlap", cmp.pdf_overlap_bins == 0},
                      {"psd_overlap_bins", cmp.psd_overlap_bins},
                      {"psd_offset_log10", cmp.psd_offset_log10},
                      {"psd_rmse_log10", cmp.psd_rmse_log10}});
    out.windows.push_back(cmp);
  }

  const fs::path summary = dir / "comparison_summary.json";
  {
    auto f = detail::open_out(summary);
    f << report.dump(2) << '\n';
  }
  out.files.push_back(summary);
  return out;
}

}  // namespace herdsim
