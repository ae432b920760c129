// herdsim command-line front end: simulate / ingest / compare.

#include <cstdio>
#include <exception>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "herdsim/herdsim.hpp"

namespace {

using namespace herdsim;

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

// Reads a sectioned key = value config file and turns it into option tokens:
// [model] eps_cf = 0.1 becomes --model.eps_cf 0.1. Keys in [run] or outside
// any section map to top-level flags. Options already given on the command
// line win over the file. Multi-valued entries split on spaces or commas.
std::vector<std::string> config_file_args(
    const std::string& path, const std::vector<std::string>& given) {
  std::ifstream in(path);
  if (!in) {
    throw Error("cli", "config", "cannot open config file " + path);
  }
  std::vector<std::string> args;
  std::string line, section;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line.erase(comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') {
      section = trim(line.substr(1, line.size() - 2));
      if (section == "run") section.clear();
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error("cli", "config",
                  path + ":" + std::to_string(line_no) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw Error("cli", "config",
                  path + ":" + std::to_string(line_no) + ": empty key or value");
    }
    if (section.empty()) {
      for (char& c : key) {
        if (c == '_') c = '-';  // burn_in and burn-in both name --burn-in
      }
    }
    const std::string opt = "--" + (section.empty() ? key : section + "." + key);
    bool overridden = false;
    for (const auto& a : given) {
      if (a == opt || a.rfind(opt + "=", 0) == 0) {
        overridden = true;
        break;
      }
    }
    if (overridden) continue;
    args.push_back(opt);
    std::string token;
    for (char c : value) {
      if (c == ' ' || c == '\t' || c == ',') {
        if (!token.empty()) {
          args.push_back(token);
          token.clear();
        }
      } else {
        token.push_back(c);
      }
    }
    if (!token.empty()) args.push_back(token);
  }
  return args;
}

// Expands --config FILE in place (tokens inserted where the flag stood).
std::vector<std::string> expand_config(const std::vector<std::string>& argv) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < argv.size(); ++i) {
    std::string path;
    if (argv[i] == "--config" && i + 1 < argv.size()) {
      path = argv[++i];
    } else if (argv[i].rfind("--config=", 0) == 0) {
      path = argv[i].substr(9);
    } else {
      out.push_back(argv[i]);
      continue;
    }
    for (auto& arg : config_file_args(path, argv)) {
      out.push_back(std::move(arg));
    }
  }
  return out;
}

void add_model_options(CLI::App* cmd, ModelParams& m) {
  cmd->add_option("--model.eps_cf", m.eps_cf, "herding rate ratio sigma_cf/h")
      ->capture_default_str();
  cmd->add_option("--model.eps_fc", m.eps_fc, "herding rate ratio sigma_fc/h")
      ->capture_default_str();
  cmd->add_option("--model.eps_cc", m.eps_cc,
                  "herding rate ratio sigma_cc/(H h)")
      ->capture_default_str();
  cmd->add_option("--model.H", m.H, "chartist-chartist speed ratio")
      ->capture_default_str();
  cmd->add_option("--model.h", m.h, "herding rate, 1/s")
      ->capture_default_str();
  cmd->add_option("--model.a", m.a, "endogenous-noise weight")
      ->capture_default_str();
  cmd->add_option("--model.b", m.b, "exogenous-noise scale")
      ->capture_default_str();
  cmd->add_option("--model.alpha", m.alpha, "activity feedback exponent")
      ->capture_default_str();
  cmd->add_option("--model.lambda", m.lambda,
                  "q-Gaussian tail exponent (lambda > 2)")
      ->capture_default_str();
  cmd->add_option("--model.kappa", m.kappa, "integrator precision factor")
      ->capture_default_str();
  cmd->add_option("--model.delta", m.delta, "boundary margin")
      ->capture_default_str();
}

int run_simulate_cmd(const RunConfig& config) {
  for (const auto& warning : validate(config.model)) {
    std::fprintf(stderr, "warning: %s\n", warning.c_str());
  }
  const auto result = cmd_simulate(config);
  std::printf("wrote %zu files to %s (manifest: %s)\n", result.files.size(),
              config.output_dir.c_str(),
              result.manifest_path.string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace herdsim;

  CLI::App app{"Three-state herding market model: simulation and statistics"};
  app.require_subcommand(1);

  std::string config_path;  // consumed by expand_config; kept for --help

  // --- simulate ---
  RunConfig config;
  std::string noise_kind = "qgaussian";
  std::string seasonality_mode = "constant";
  auto* sim = app.add_subcommand(
      "simulate", "run seeded realizations and write return statistics");
  sim->add_option("--config", config_path,
                  "sectioned key = value config file; command-line flags win");
  add_model_options(sim, config.model);
  sim->add_option("--noise.kind", noise_kind, "gaussian | qgaussian")
      ->check(CLI::IsMember({"gaussian", "qgaussian"}))
      ->capture_default_str();
  sim->add_option("--seasonality.mode", seasonality_mode, "constant | bump")
      ->check(CLI::IsMember({"constant", "bump"}))
      ->capture_default_str();
  sim->add_option("--seasonality.w", config.seasonality.w,
                  "bump width, minutes")
      ->capture_default_str();
  sim->add_option("--seasonality.base", config.seasonality.base, "bump floor")
      ->capture_default_str();
  sim->add_option("--seasonality.peak_offset", config.seasonality.peak_offset,
                  "bump peak, minutes into session")
      ->capture_default_str();
  sim->add_option("--seasonality.session_length",
                  config.seasonality.session_length, "session length, minutes")
      ->capture_default_str();
  sim->add_option("--seed", config.seed, "base RNG seed")
      ->capture_default_str();
  sim->add_option("--realizations", config.realizations,
                  "number of independent paths")
      ->capture_default_str();
  sim->add_option("--duration", config.duration_min,
                  "recorded duration per path, minutes")
      ->capture_default_str();
  sim->add_option("--burn-in", config.burn_in_min,
                  "discarded transient, minutes")
      ->capture_default_str();
  sim->add_option("--windows", config.windows,
                  "aggregation windows T in minutes")
      ->capture_default_str();
  sim->add_option("--psd-window", config.psd_window_len,
                  "PSD window length in samples (power of two)")
      ->capture_default_str();
  sim->add_option("--pdf-bins", config.pdf_bins.n_bins,
                  "log-spaced |r| bins")
      ->capture_default_str();
  sim->add_option("--pdf-range", config.pdf_bins.lo,
                  "lower edge of the |r| bin range")
      ->capture_default_str();
  sim->add_option("--jobs", config.jobs,
                  "worker threads (0 = hardware concurrency)")
      ->capture_default_str();
  sim->add_option("--out", config.output_dir, "output directory")
      ->envname("HERDSIM_OUT")
      ->capture_default_str();
  sim->add_flag("--no-paths", "skip writing price-path CSVs");

  // --- ingest ---
  std::vector<std::string> ingest_files;
  IngestOptions ingest_opt;
  std::string ts_kind = "auto";
  std::string delimiter;
  auto* ing = app.add_subcommand(
      "ingest", "build per-symbol 1-minute return series from tick data");
  ing->add_option("--config", config_path,
                  "sectioned key = value config file; command-line flags win");
  ing->add_option("files", ingest_files, "delimited tick files")
      ->required()
      ->check(CLI::ExistingFile);
  ing->add_option("--format.timestamp", ingest_opt.format.timestamp_column,
                  "timestamp column name or index")
      ->capture_default_str();
  ing->add_option("--format.price", ingest_opt.format.price_column,
                  "price column name or index")
      ->capture_default_str();
  ing->add_option("--format.symbol", ingest_opt.format.symbol_column,
                  "symbol column name or index (empty = one symbol per file)")
      ->capture_default_str();
  ing->add_option("--format.delimiter", delimiter,
                  "field delimiter (auto-detected when omitted)");
  ing->add_option("--format.timestamps", ts_kind, "auto | epoch | iso8601")
      ->check(CLI::IsMember({"auto", "epoch", "iso8601"}))
      ->capture_default_str();
  ing->add_option("--format.max_error_rate", ingest_opt.format.max_error_rate,
                  "tolerated fraction of malformed rows")
      ->capture_default_str();
  ing->add_option("--calendar.open", ingest_opt.calendar.session_open_minute,
                  "session open, minute of day")
      ->capture_default_str();
  ing->add_option("--calendar.length", ingest_opt.calendar.session_length_min,
                  "session length, minutes")
      ->capture_default_str();
  ing->add_option("--windows", ingest_opt.windows,
                  "also write pooled PDF estimates at these windows");
  ing->add_option("--psd-window", ingest_opt.psd_window_len,
                  "also write pooled PSD estimates (power-of-two length)");
  ing->add_option("--out", ingest_opt.output_dir, "output directory")
      ->envname("HERDSIM_OUT")
      ->capture_default_str();

  // --- compare ---
  std::string model_dir, empirical_dir, compare_out = "herdsim-compare";
  std::vector<int> compare_windows = {1, 3, 10, 30};
  auto* cmp = app.add_subcommand(
      "compare", "pair model and empirical PDF/PSD estimates per window");
  cmp->add_option("--model", model_dir, "directory with model estimates")
      ->required();
  cmp->add_option("--empirical", empirical_dir,
                  "directory with empirical estimates")
      ->required();
  cmp->add_option("--windows", compare_windows, "windows T to compare")
      ->capture_default_str();
  cmp->add_option("--out", compare_out, "output directory")
      ->envname("HERDSIM_OUT")
      ->capture_default_str();

  std::vector<std::string> raw(argv + 1, argv + argc);
  std::vector<std::string> expanded;
  try {
    expanded = expand_config(raw);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  std::vector<const char*> cargv;
  cargv.push_back(argv[0]);
  for (const auto& a : expanded) cargv.push_back(a.c_str());

  CLI11_PARSE(app, static_cast<int>(cargv.size()), cargv.data());

  try {
    if (sim->parsed()) {
      config.noise.kind = noise_kind == "gaussian" ? NoiseKind::Gaussian
                                                   : NoiseKind::QGaussian;
      config.noise.lambda = config.model.lambda;
      config.seasonality.mode = seasonality_mode == "bump"
                                    ? SeasonalityMode::IntradayGaussianBump
                                    : SeasonalityMode::Constant;
      config.seasonality.b = config.model.b;
      config.write_paths = sim->count("--no-paths") == 0;
      return run_simulate_cmd(config);
    }
    if (ing->parsed()) {
      if (!delimiter.empty()) ingest_opt.format.delimiter = delimiter[0];
      ingest_opt.format.ts_kind = ts_kind == "epoch"
                                      ? TimestampKind::EpochSeconds
                                  : ts_kind == "iso8601"
                                      ? TimestampKind::Iso8601
                                      : TimestampKind::AutoDetect;
      const auto result = cmd_ingest(ingest_files, ingest_opt);
      std::printf("symbol,n_values,n_sessions,zero_fraction\n");
      for (const auto& s : result.symbols) {
        std::printf("%s,%zu,%zu,%.6f\n", s.symbol.c_str(), s.n_values,
                    s.n_sessions, s.zero_fraction);
      }
      return 0;
    }
    if (cmp->parsed()) {
      const auto result =
          cmd_compare(model_dir, empirical_dir, compare_windows, compare_out);
      for (const auto& w : result.windows) {
        std::printf(
            "T=%d: pdf_rmse_log10=%.6g over %d bins; psd_rmse_log10=%.6g "
            "(offset %.6g) over %d bins\n",
            w.window, w.pdf_rmse_log10, w.pdf_overlap_bins, w.psd_rmse_log10,
            w.psd_offset_log10, w.psd_overlap_bins);
      }
      return 0;
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
