#pragma once

// Return-series pipeline: noise application per minute, unit-variance
// normalization, and block aggregation to longer windows.

#include <cstdint>
#include <cstddef>
#include <cmath>
#include <string>
#include <vector>

#include "herdsim/errors.hpp"
#include "herdsim/noise.hpp"
#include "herdsim/sde.hpp"

namespace herdsim {

enum class SeriesSource { Model, Empirical };

struct ReturnSeries {
  double window_T = 1.0;  // minutes between consecutive values
  std::vector<double> values;
  bool normalized = false;
  SeriesSource source = SeriesSource::Model;
  std::string symbol;               // empirical series only
  std::vector<std::size_t> session_starts;  // offsets; empty = one stream
  double norm_factor = 1.0;         // std the series was divided by
  std::uint64_t seed = 0;
};

namespace detail {

inline double population_variance(const std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  return var / static_cast<double>(v.size());
}

}  // namespace detail

// Applies exogenous noise to each one-minute log-price sample. Model minutes
// are treated as a continuous stream of trading sessions for the seasonality
// clock. Output is un-normalized; deterministic given the seed.
inline ReturnSeries build_returns(const PricePath& path, const NoiseSpec& spec,
                                  double a, const SeasonalityProfile& profile,
                                  std::uint64_t seed,
                                  std::uint64_t stream = 0) {
  validate(spec);
  validate(profile);
  if (path.samples.empty()) {
    throw ValidationError("series_pipeline", "build_returns",
                          "price path is empty");
  }
  const double session =
      profile.mode == SeasonalityMode::Constant ? 0.0 : profile.session_length;

  Rng rng(seed, stream);
  ReturnSeries out;
  out.window_T = spec.T;
  out.source = SeriesSource::Model;
  out.seed = seed;
  out.values.reserve(path.samples.size());
  for (std::size_t i = 0; i < path.samples.size(); ++i) {
    const double minute = static_cast<double>(i);
    const double b_t =
        session > 0.0 ? seasonal_b(std::fmod(minute, session), profile)
                      : profile.b;
    out.values.push_back(
        return_increment(path.samples[i].p, spec, a, b_t, rng));
  }
  return out;
}

// Divides by the standard deviation (population convention) of the entire
// series. Idempotent; the normalization factor is recorded for provenance.
inline ReturnSeries normalize_unit_variance(const ReturnSeries& series) {
  if (series.values.size() < 2) {
    throw ValidationError("series_pipeline", "normalize_unit_variance",
                          "need at least 2 values");
  }
  const double var = detail::population_variance(series.values);
  if (!(var > 0.0)) {
    throw ValidationError("series_pipeline", "normalize_unit_variance",
                          "series has zero variance");
  }
  const double sd = std::sqrt(var);
  ReturnSeries out = series;
  for (double& x : out.values) x /= sd;
  out.normalized = true;
  out.norm_factor = series.norm_factor * sd;
  return out;
}

// Sums successive disjoint blocks of m values; a trailing partial block is
// dropped. When the series carries session boundaries, blocks restart at
// each session so no block straddles two sessions. No renormalization.
inline ReturnSeries aggregate(const ReturnSeries& series, std::int64_t m) {
  if (m < 1) {
    throw ValidationError("series_pipeline", "aggregate", "m must be >= 1");
  }
  const std::size_t block = static_cast<std::size_t>(m);
  if (block > series.values.size()) {
    throw ValidationError("series_pipeline", "aggregate",
                          "m exceeds series length");
  }
  if (m == 1) return series;

  ReturnSeries out;
  out.window_T = series.window_T * static_cast<double>(m);
  out.normalized = series.normalized;
  out.source = series.source;
  out.symbol = series.symbol;
  out.norm_factor = series.norm_factor;
  out.seed = series.seed;

  std::vector<std::size_t> bounds = series.session_starts;
  if (bounds.empty()) bounds.push_back(0);
  bounds.push_back(series.values.size());

  for (std::size_t s = 0; s + 1 < bounds.size(); ++s) {
    const std::size_t begin = bounds[s];
    const std::size_t end = bounds[s + 1];
    if (!series.session_starts.empty()) {
      out.session_starts.push_back(out.values.size());
    }
    for (std::size_t i = begin; i + block <= end; i += block) {
      double sum = 0.0;
      for (std::size_t j = i; j < i + block; ++j) sum += series.values[j];
      out.values.push_back(sum);
    }
  }
  return out;
}

}  // namespace herdsim
