#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <vector>

#include "herdsim/io.hpp"
#include "herdsim/run.hpp"

using namespace herdsim;
namespace fs = std::filesystem;

namespace {

RunConfig small_config(const std::string& dir) {
  RunConfig c;
  c.model.h = 0.001;  // fast clock so short runs decorrelate
  c.model.H = 2.0;
  c.model.eps_cc = 1.0;
  c.realizations = 2;
  c.duration_min = 600;
  c.burn_in_min = 20;
  c.windows = {1, 3};
  c.psd_window_len = 128;
  c.seed = 11;
  c.output_dir = dir;
  c.jobs = 2;
  return c;
}

fs::path temp_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "herdsim_tests" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("config validation rejects inconsistent durations") {
  RunConfig c = small_config("unused");
  c.duration_min = 128 * 3;  // not strictly greater
  CHECK_THROWS_AS(validate(c), ValidationError);
  c.duration_min = 128 * 3 + 1;
  CHECK_NOTHROW(validate(c));
  c.realizations = 0;
  CHECK_THROWS_AS(validate(c), ValidationError);
  c = small_config("unused");
  c.windows = {1, 0};
  CHECK_THROWS_AS(validate(c), ValidationError);
  c = small_config("unused");
  c.psd_window_len = 100;
  CHECK_THROWS_AS(validate(c), ValidationError);
}

TEST_CASE("cmd_simulate writes the expected artifact set") {
  const auto dir = temp_dir("sim1");
  auto c = small_config(dir.string());
  const auto result = cmd_simulate(c);

  for (const char* name :
       {"path_r0.csv", "path_r1.csv", "returns_T1_r0.csv", "returns_T1_r1.csv",
        "density_T1.csv", "density_T3.csv", "spectrum_T1.csv",
        "spectrum_T3.csv", "spectrum_T1_logbin.csv", "spectrum_T3_logbin.csv",
        "manifest.json"}) {
    CAPTURE(name);
    CHECK(fs::exists(dir / name));
  }
  CHECK(result.estimates.size() == 2);
  CHECK(result.estimates[0].pdf.n_realizations == 2);

  // every listed file's hash verifies
  std::ifstream min(dir / "manifest.json");
  const auto manifest = nlohmann::json::parse(min);
  REQUIRE(manifest.contains("files"));
  for (const auto& f : manifest["files"]) {
    const auto path = dir / f["path"].get<std::string>();
    CHECK(file_content_hash(path) == f["fnv1a64"].get<std::string>());
  }
}

TEST_CASE("cmd_simulate reruns are byte-identical, seeds change output") {
  const auto dir1 = temp_dir("sim_a");
  const auto dir2 = temp_dir("sim_b");
  const auto dir3 = temp_dir("sim_c");
  auto c1 = small_config(dir1.string());
  auto c2 = small_config(dir2.string());
  auto c3 = small_config(dir3.string());
  c2.jobs = 1;  // scheduling must not affect results
  c3.seed = 12;
  cmd_simulate(c1);
  cmd_simulate(c2);
  cmd_simulate(c3);

  for (const char* name : {"returns_T1_r0.csv", "density_T1.csv",
                           "spectrum_T3.csv", "path_r1.csv"}) {
    CAPTURE(name);
    CHECK(slurp(dir1 / name) == slurp(dir2 / name));
  }
  CHECK(slurp(dir1 / "returns_T1_r0.csv") != slurp(dir3 / "returns_T1_r0.csv"));

  // manifests identical apart from nothing (hash-verified content)
  CHECK(slurp(dir1 / "manifest.json") == slurp(dir2 / "manifest.json"));
}

TEST_CASE("return series CSV round trip") {
  const auto dir = temp_dir("io");
  ReturnSeries s;
  s.window_T = 3.0;
  s.values = {0.25, -1.5, 3.25e-5, 7.0};
  s.normalized = true;
  s.norm_factor = 2.25;
  s.seed = 99;
  s.session_starts = {0, 2};
  write_return_series_csv(dir / "r.csv", s);
  const auto back = read_return_series_csv(dir / "r.csv");
  CHECK(back.values == s.values);
  CHECK(back.window_T == 3.0);
  CHECK(back.normalized);
  CHECK(back.norm_factor == 2.25);
  CHECK(back.session_starts == s.session_starts);
}

TEST_CASE("cmd_ingest produces per-symbol artifacts and pooled estimates") {
  const auto dir = temp_dir("ingest_out");
  const auto data = temp_dir("ingest_in");
  {
    std::ofstream f(data / "ticks.csv");
    f << "timestamp,price,symbol\n";
    Rng rng(5, 0);
    for (const char* sym : {"AAA", "BBB"}) {
      double price = 100.0;
      for (int day = 1; day <= 2; ++day) {
        for (int m = 0; m < 390; ++m) {
          price *= std::exp(0.002 * rng.next_normal());
          f << (day * 86400 + 570 * 60 + m * 60 + 30) << ',' << price << ','
            << sym << '\n';
        }
      }
    }
  }
  IngestOptions opt;
  opt.output_dir = dir.string();
  opt.windows = {1, 3};
  opt.psd_window_len = 64;
  const auto result = cmd_ingest({(data / "ticks.csv").string()}, opt);
  REQUIRE(result.symbols.size() == 2);
  CHECK(result.symbols[0].symbol == "AAA");
  CHECK(result.symbols[0].n_sessions == 2);
  CHECK(result.symbols[0].zero_fraction == 0.0);
  CHECK(fs::exists(dir / "returns_T1_AAA.csv"));
  CHECK(fs::exists(dir / "returns_T1_BBB.csv"));
  CHECK(fs::exists(dir / "summary.csv"));
  CHECK(fs::exists(dir / "density_T1.csv"));
  CHECK(fs::exists(dir / "density_T3.csv"));
  CHECK(fs::exists(dir / "spectrum_T1.csv"));
  // normalized per symbol
  for (const auto& s : result.series) {
    CHECK(detail::population_variance(s.values) ==
          doctest::Approx(1.0).epsilon(1e-6));
  }

  CHECK_THROWS_AS(cmd_ingest({}, opt), IngestError);
  CHECK_THROWS_AS(cmd_ingest({(data / "missing.csv").string()}, opt),
                  IngestError);

  // empty file: the error names the file
  {
    std::ofstream(data / "empty.csv").close();
    try {
      cmd_ingest({(data / "empty.csv").string()}, opt);
      FAIL("expected IngestError");
    } catch (const IngestError& e) {
      CHECK(std::string(e.what()).find("empty.csv") != std::string::npos);
    }
  }
}

TEST_CASE("cmd_compare model against itself and against a scaled copy") {
  const auto dir = temp_dir("cmp_model");
  auto c = small_config(dir.string());
  c.write_paths = false;
  cmd_simulate(c);

  const auto self_out = temp_dir("cmp_self");
  const auto result =
      cmd_compare(dir.string(), dir.string(), {1, 3}, self_out.string());
  REQUIRE(result.windows.size() == 2);
  for (const auto& w : result.windows) {
    CHECK(w.pdf_rmse_log10 == 0.0);
    CHECK(w.psd_rmse_log10 == 0.0);
    CHECK(w.pdf_overlap_bins > 0);
  }

  // scaled PSD (x10) must align to zero RMSE with offset 1
  const auto scaled = temp_dir("cmp_scaled");
  for (int w : {1, 3}) {
    const auto dname = "density_T" + std::to_string(w) + ".csv";
    fs::copy_file(dir / dname, scaled / dname);
    const auto sname = "spectrum_T" + std::to_string(w) + ".csv";
    auto spec = read_spectrum_csv(dir / sname);
    SpectrumEstimate est;
    est.freqs = spec.freqs;
    est.power = spec.power;
    for (auto& p : est.power) p *= 10.0;
    write_spectrum_csv(scaled / sname, est);
  }
  const auto scaled_out = temp_dir("cmp_scaled_out");
  const auto r2 =
      cmd_compare(dir.string(), scaled.string(), {1, 3}, scaled_out.string());
  for (const auto& w : r2.windows) {
    CHECK(w.psd_offset_log10 == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(w.psd_rmse_log10 == doctest::Approx(0.0).epsilon(1e-9));
  }

  // missing window errors
  CHECK_THROWS_AS(
      cmd_compare(dir.string(), dir.string(), {10}, self_out.string()), Error);
}

TEST_CASE("cmd_compare flags disjoint PDF supports instead of NaN") {
  const auto lo_dir = temp_dir("cmp_lo");
  const auto hi_dir = temp_dir("cmp_hi");

  DensityEstimate lo, hi;
  for (int j = 0; j <= 10; ++j) {
    const double edge = 0.01 * std::pow(10.0, j * 0.3);
    lo.bin_edges.push_back(edge);
    hi.bin_edges.push_back(edge);
  }
  lo.density.assign(10, 0.0);
  hi.density.assign(10, 0.0);
  lo.counts.assign(10, 0);
  hi.counts.assign(10, 0);
  for (int j = 0; j < 5; ++j) lo.density[(std::size_t)j] = 1.0;
  for (int j = 5; j < 10; ++j) hi.density[(std::size_t)j] = 1.0;
  lo.n_samples = hi.n_samples = 100;

  SpectrumEstimate spec;
  for (int k = 1; k <= 8; ++k) {
    spec.freqs.push_back(k / 16.0);
    spec.power.push_back(1.0);
  }
  for (const auto& dir : {lo_dir, hi_dir}) {
    write_density_csv(dir / "density_T1.csv", dir == lo_dir ? lo : hi);
    write_spectrum_csv(dir / "spectrum_T1.csv", spec);
  }
  const auto out = temp_dir("cmp_disjoint_out");
  const auto result =
      cmd_compare(lo_dir.string(), hi_dir.string(), {1}, out.string());
  REQUIRE(result.windows.size() == 1);
  CHECK(result.windows[0].pdf_overlap_bins == 0);
  CHECK(result.windows[0].pdf_rmse_log10 == 0.0);  // flagged, not NaN
  const auto summary = nlohmann::json::parse(slurp(out / "comparison_summary.json"));
  CHECK(summary[0]["pdf_zero_overlap"].get<bool>());
}

TEST_CASE("price path CSV format") {
  const auto dir = temp_dir("pathcsv");
  ModelParams mp;
  mp.h = 0.001;
  const auto path = simulate_path(mp, 5, 0, 42);
  write_price_path_csv(dir / "p.csv", path);
  const auto text = slurp(dir / "p.csv");
  CHECK(text.rfind("t_min,n_f,xi,p\n", 0) == 0);
  // one row per minute plus header
  CHECK(std::count(text.begin(), text.end(), '\n') == 6);
  // full-precision round trip of the first n_f value
  const auto line_start = text.find('\n') + 1;
  const auto first_comma = text.find(',', line_start);
  const double parsed = std::strtod(text.c_str() + first_comma + 1, nullptr);
  CHECK(parsed == path.samples[0].n_f);
}
