#pragma once

// Target statistics: log-binned PDF of absolute returns and averaged power
// spectral density of absolute returns, plus tail-exponent and
// distribution-distance utilities used by the test suites.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "herdsim/errors.hpp"
#include "herdsim/fft.hpp"
#include "herdsim/series.hpp"

namespace herdsim {

struct LogBinSpec {
  double lo = 1e-2;
  double hi = 1e3;
  int n_bins = 50;
};

struct DensityEstimate {
  std::vector<double> bin_edges;  // n_bins + 1, log-spaced
  std::vector<double> density;    // per-bin probability density of |r|
  std::vector<std::int64_t> counts;
  std::int64_t n_samples = 0;     // includes zeros and out-of-range values
  int n_realizations = 0;

  double bin_center(std::size_t j) const {
    return std::sqrt(bin_edges[j] * bin_edges[j + 1]);
  }
};

struct SpectrumEstimate {
  std::vector<double> freqs;  // cycles per minute, k/(window_len * T)
  std::vector<double> power;
  std::int64_t n_windows = 0;
  int n_realizations = 0;
  double window_T = 1.0;
};

// Pools |r| over all series with equal weight per sample and bins them on a
// log grid. Zeros and out-of-range values stay in n_samples but not in any
// bin, so tail densities remain comparable across zero-dominated series.
inline DensityEstimate abs_return_pdf(std::span<const ReturnSeries> series_list,
                                      const LogBinSpec& bins = {}) {
  if (series_list.empty()) {
    throw ValidationError("stats", "abs_return_pdf", "no input series");
  }
  if (!(bins.lo > 0.0) || !(bins.hi > bins.lo) || bins.n_bins < 1) {
    throw ValidationError("stats", "abs_return_pdf", "bad bin spec");
  }
  const double T = series_list.front().window_T;
  for (const auto& s : series_list) {
    if (s.window_T != T) {
      throw ValidationError("stats", "abs_return_pdf",
                            "series have mixed window_T");
    }
  }

  DensityEstimate est;
  est.n_realizations = static_cast<int>(series_list.size());
  est.bin_edges.resize(static_cast<std::size_t>(bins.n_bins) + 1);
  const double log_lo = std::log(bins.lo);
  const double log_ratio = std::log(bins.hi / bins.lo);
  for (int j = 0; j <= bins.n_bins; ++j) {
    est.bin_edges[static_cast<std::size_t>(j)] =
        std::exp(log_lo + log_ratio * j / bins.n_bins);
  }
  est.counts.assign(static_cast<std::size_t>(bins.n_bins), 0);

  const double inv_width = bins.n_bins / log_ratio;
  for (const auto& s : series_list) {
    for (double r : s.values) {
      ++est.n_samples;
      const double x = std::fabs(r);
      if (!(x >= bins.lo) || x >= bins.hi) continue;
      auto j = static_cast<std::size_t>(std::log(x / bins.lo) * inv_width);
      if (j >= est.counts.size()) j = est.counts.size() - 1;
      ++est.counts[j];
    }
  }

  est.density.resize(est.counts.size());
  for (std::size_t j = 0; j < est.counts.size(); ++j) {
    const double width = est.bin_edges[j + 1] - est.bin_edges[j];
    est.density[j] = static_cast<double>(est.counts[j]) /
                     (static_cast<double>(est.n_samples) * width);
  }
  return est;
}

// Averaged periodogram of |r|: each series is split into non-overlapping
// windows of window_len samples, each window's own mean is removed when
// detrend is set, periodograms are averaged over windows and then with equal
// weight over series. One-sided; power convention S_k = 2 T |X_k|^2 / W so
// that sum(S_k) * df recovers the variance.
inline SpectrumEstimate power_spectrum(std::span<const ReturnSeries> series_list,
                                       std::size_t window_len,
                                       bool detrend = true) {
  if (series_list.empty()) {
    throw ValidationError("stats", "power_spectrum", "no input series");
  }
  if (!is_power_of_two(window_len) || window_len < 4) {
    throw ValidationError("stats", "power_spectrum",
                          "window_len must be a power of two >= 4");
  }
  const double T = series_list.front().window_T;
  for (const auto& s : series_list) {
    if (s.window_T != T) {
      throw ValidationError("stats", "power_spectrum",
                            "series have mixed window_T");
    }
    if (s.values.size() < window_len) {
      throw ValidationError("stats", "power_spectrum",
                            "series shorter than one window");
    }
  }

  const std::size_t half = window_len / 2;
  SpectrumEstimate est;
  est.window_T = T;
  est.n_realizations = static_cast<int>(series_list.size());
  est.freqs.resize(half);
  for (std::size_t k = 0; k < half; ++k) {
    est.freqs[k] = static_cast<double>(k + 1) /
                   (static_cast<double>(window_len) * T);
  }
  est.power.assign(half, 0.0);

  std::vector<std::complex<double>> buf(window_len);
  std::vector<double> series_acc(half);
  for (const auto& s : series_list) {
    const std::size_t n_windows = s.values.size() / window_len;
    std::fill(series_acc.begin(), series_acc.end(), 0.0);
    for (std::size_t w = 0; w < n_windows; ++w) {
      const double* seg = s.values.data() + w * window_len;
      double mean = 0.0;
      if (detrend) {
        for (std::size_t i = 0; i < window_len; ++i) mean += std::fabs(seg[i]);
        mean /= static_cast<double>(window_len);
      }
      for (std::size_t i = 0; i < window_len; ++i) {
        buf[i] = std::complex<double>(std::fabs(seg[i]) - mean, 0.0);
      }
      fft_inplace(buf);
      for (std::size_t k = 0; k < half; ++k) {
        series_acc[k] += std::norm(buf[k + 1]);
      }
    }
    const double scale = 2.0 * T /
                         (static_cast<double>(window_len) *
                          static_cast<double>(n_windows));
    for (std::size_t k = 0; k < half; ++k) {
      est.power[k] += series_acc[k] * scale;
    }
    est.n_windows += static_cast<std::int64_t>(n_windows);
  }
  for (double& p : est.power) p /= static_cast<double>(series_list.size());
  return est;
}

// Arithmetic-mean smoothing of a spectrum onto log-spaced frequency bins
// (geometric bin centers); used for plots and slope fits.
inline SpectrumEstimate log_bin_spectrum(const SpectrumEstimate& est,
                                         int bins_per_decade = 20) {
  if (est.freqs.empty() || bins_per_decade < 1) {
    throw ValidationError("stats", "log_bin_spectrum", "bad input");
  }
  SpectrumEstimate out;
  out.n_windows = est.n_windows;
  out.n_realizations = est.n_realizations;
  out.window_T = est.window_T;

  const double f_lo = est.freqs.front();
  const double step = std::pow(10.0, 1.0 / bins_per_decade);
  double lo = f_lo;
  std::size_t i = 0;
  while (i < est.freqs.size()) {
    const double hi = lo * step;
    double sum = 0.0, fsum = 0.0;
    std::size_t n = 0;
    while (i < est.freqs.size() && est.freqs[i] < hi) {
      sum += est.power[i];
      fsum += std::log(est.freqs[i]);
      ++n;
      ++i;
    }
    if (n > 0) {
      out.freqs.push_back(std::exp(fsum / static_cast<double>(n)));
      out.power.push_back(sum / static_cast<double>(n));
    }
    lo = hi;
  }
  return out;
}

struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  int n_points = 0;
};

// Ordinary least squares on (log10 x, log10 y) restricted to [x_lo, x_hi];
// points with y <= 0 are skipped. Fit ranges are always declared by the
// caller, never auto-selected.
inline LogLogFit fit_loglog_slope(std::span<const double> x,
                                  std::span<const double> y, double x_lo,
                                  double x_hi) {
  if (x.size() != y.size()) {
    throw ValidationError("stats", "fit_loglog_slope", "size mismatch");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < x_lo || x[i] > x_hi || !(y[i] > 0.0)) continue;
    const double lx = std::log10(x[i]);
    const double ly = std::log10(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 3) {
    throw ValidationError("stats", "fit_loglog_slope",
                          "fewer than 3 points in fit range");
  }
  LogLogFit fit;
  const double denom = n * sxx - sx * sx;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  fit.n_points = n;
  return fit;
}

// Hill estimator on the top order statistics of |r|. Returns the implied
// density tail exponent (Hill alpha + 1).
inline double hill_tail_exponent(const ReturnSeries& series,
                                 double top_fraction) {
  if (!(top_fraction > 0.0 && top_fraction < 1.0)) {
    throw ValidationError("stats", "hill_tail_exponent",
                          "top_fraction must be in (0, 1)");
  }
  std::vector<double> abs_vals;
  abs_vals.reserve(series.values.size());
  for (double r : series.values) {
    const double x = std::fabs(r);
    if (x > 0.0) abs_vals.push_back(x);
  }
  const auto k = static_cast<std::size_t>(
      top_fraction * static_cast<double>(series.values.size()));
  if (k < 100 || abs_vals.size() < k + 1) {
    throw ValidationError("stats", "hill_tail_exponent",
                          "insufficient tail samples (need top_fraction*n >= "
                          "100 positive values)");
  }
  std::nth_element(abs_vals.begin(), abs_vals.begin() + k, abs_vals.end(),
                   std::greater<double>());
  const double threshold = abs_vals[k];
  double sum_log = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    sum_log += std::log(abs_vals[i] / threshold);
  }
  return static_cast<double>(k) / sum_log + 1.0;
}

// One-sample Kolmogorov-Smirnov distance against a reference CDF.
inline double ks_distance(std::vector<double> samples,
                          const std::function<double(double)>& reference_cdf) {
  if (samples.empty()) {
    throw ValidationError("stats", "ks_distance", "no samples");
  }
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = reference_cdf(samples[i]);
    d = std::max(d, std::fabs(static_cast<double>(i + 1) / n - f));
    d = std::max(d, std::fabs(static_cast<double>(i) / n - f));
  }
  return d;
}

// Two-sample variant, tie-aware.
inline double ks_distance_two_sample(std::vector<double> a,
                                     std::vector<double> b) {
  if (a.empty() || b.empty()) {
    throw ValidationError("stats", "ks_distance", "no samples");
  }
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na -
                              static_cast<double>(j) / nb));
  }
  return d;
}

}  // namespace herdsim
