#pragma once

// Empirical-data path: streaming tick parser, previous-tick minute bars per
// exchange session, and grouping of per-symbol series for pooled statistics.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "herdsim/errors.hpp"
#include "herdsim/series.hpp"

namespace herdsim {

struct TickRecord {
  double timestamp = 0.0;  // seconds since epoch
  double price = 0.0;
  std::string symbol;
};

enum class TimestampKind { AutoDetect, EpochSeconds, Iso8601 };

// Column mapping: names matched against the header, or 0-based indices when
// the selector is numeric. Delimiter 0 means autodetect among , ; tab.
struct TickFormat {
  char delimiter = 0;
  std::string timestamp_column = "timestamp";
  std::string price_column = "price";
  std::string symbol_column = "symbol";
  TimestampKind ts_kind = TimestampKind::AutoDetect;
  double max_error_rate = 0.001;
};

struct RowError {
  std::size_t line = 0;  // 1-based, header is line 1
  std::string message;
};

struct TickParseResult {
  std::vector<TickRecord> ticks;
  std::vector<RowError> row_errors;
  std::size_t n_rows = 0;  // data rows seen (valid + rejected)
};

class IngestError : public Error {
 public:
  IngestError(const std::string& op, const std::string& message,
              std::size_t line = 0)
      : Error("ingest", op,
              line ? message + " (line " + std::to_string(line) + ")"
                   : message),
        line(line) {}
  std::size_t line;
};

namespace detail {

inline std::vector<std::string> split_line(const std::string& line,
                                           char delim) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == delim) {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

inline char detect_delimiter(const std::string& header) {
  for (char candidate : {',', ';', '\t'}) {
    if (header.find(candidate) != std::string::npos) return candidate;
  }
  return ',';
}

// Howard Hinnant's civil-date algorithm.
inline std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy =
      (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
      static_cast<unsigned>(d) - 1u;
  const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

inline bool parse_iso8601(const std::string& s, double& out) {
  // YYYY-MM-DD[T ]HH:MM:SS[.frac]
  if (s.size() < 19 || s[4] != '-' || s[7] != '-' ||
      (s[10] != 'T' && s[10] != ' ') || s[13] != ':' || s[16] != ':') {
    return false;
  }
  auto num = [&](std::size_t pos, std::size_t len, int& v) {
    v = 0;
    for (std::size_t i = pos; i < pos + len; ++i) {
      if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
      v = v * 10 + (s[i] - '0');
    }
    return true;
  };
  int y, mo, d, hh, mi, ss;
  if (!num(0, 4, y) || !num(5, 2, mo) || !num(8, 2, d) || !num(11, 2, hh) ||
      !num(14, 2, mi) || !num(17, 2, ss)) {
    return false;
  }
  if (mo < 1 || mo > 12 || d < 1 || d > 31 || hh > 23 || mi > 59 || ss > 60) {
    return false;
  }
  double frac = 0.0;
  if (s.size() > 19) {
    if (s[19] != '.') return false;
    double scale = 0.1;
    for (std::size_t i = 20; i < s.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
      frac += (s[i] - '0') * scale;
      scale *= 0.1;
    }
  }
  out = static_cast<double>(days_from_civil(y, mo, d)) * 86400.0 +
        hh * 3600.0 + mi * 60.0 + ss + frac;
  return true;
}

inline bool parse_number(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && std::isfinite(out);
}

inline std::size_t resolve_column(const std::vector<std::string>& header,
                                  const std::string& spec,
                                  const std::string& what) {
  if (!spec.empty() &&
      spec.find_first_not_of("0123456789") == std::string::npos) {
    const std::size_t idx = std::stoul(spec);
    if (idx >= header.size()) {
      throw IngestError("parse_ticks", what + " column index " + spec +
                                           " out of range for header",
                        1);
    }
    return idx;
  }
  for (std::size_t i = 0; i < header.size(); ++i) {
    std::string h = header[i];
    while (!h.empty() && std::isspace(static_cast<unsigned char>(h.back()))) {
      h.pop_back();
    }
    std::size_t start = 0;
    while (start < h.size() &&
           std::isspace(static_cast<unsigned char>(h[start]))) {
      ++start;
    }
    if (h.substr(start) == spec) return i;
  }
  throw IngestError("parse_ticks",
                    what + " column '" + spec + "' not found in header", 1);
}

}  // namespace detail

// Streaming parse of delimited tick data. Malformed rows are collected with
// their line numbers and the parse fails only if the error rate exceeds the
// configured threshold. Out-of-order timestamps within a symbol are fatal.
inline TickParseResult parse_ticks(std::istream& input,
                                   const TickFormat& format) {
  std::string line;
  if (!std::getline(input, line)) {
    throw IngestError("parse_ticks", "input is empty, expected a header", 1);
  }
  const char delim =
      format.delimiter ? format.delimiter : detail::detect_delimiter(line);
  const auto header = detail::split_line(line, delim);
  if (header.size() < 2) {
    throw IngestError("parse_ticks", "unparseable header", 1);
  }
  const std::size_t ts_col =
      detail::resolve_column(header, format.timestamp_column, "timestamp");
  const std::size_t price_col =
      detail::resolve_column(header, format.price_column, "price");
  const bool has_symbol = !format.symbol_column.empty();
  std::size_t sym_col = 0;
  if (has_symbol) {
    sym_col = detail::resolve_column(header, format.symbol_column, "symbol");
  }

  TickParseResult result;
  std::map<std::string, double> last_ts;
  TimestampKind kind = format.ts_kind;
  std::size_t line_no = 1;
  while (std::getline(input, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    ++result.n_rows;
    const auto fields = detail::split_line(line, delim);
    const std::size_t needed =
        std::max(std::max(ts_col, price_col),
                 has_symbol ? sym_col : std::size_t{0});
    if (fields.size() <= needed) {
      result.row_errors.push_back({line_no, "too few columns"});
      continue;
    }

    TickRecord rec;
    rec.symbol = has_symbol ? fields[sym_col] : "";

    const std::string& ts_text = fields[ts_col];
    if (kind == TimestampKind::AutoDetect) {
      double tmp;
      kind = detail::parse_iso8601(ts_text, tmp) ? TimestampKind::Iso8601
                                                 : TimestampKind::EpochSeconds;
    }
    bool ts_ok = kind == TimestampKind::Iso8601
                     ? detail::parse_iso8601(ts_text, rec.timestamp)
                     : detail::parse_number(ts_text, rec.timestamp);
    if (!ts_ok) {
      result.row_errors.push_back({line_no, "bad timestamp '" + ts_text + "'"});
      continue;
    }
    if (!detail::parse_number(fields[price_col], rec.price)) {
      result.row_errors.push_back(
          {line_no, "bad price '" + fields[price_col] + "'"});
      continue;
    }
    if (!(rec.price > 0.0)) {
      result.row_errors.push_back({line_no, "non-positive price"});
      continue;
    }

    auto [it, inserted] = last_ts.try_emplace(rec.symbol, rec.timestamp);
    if (!inserted) {
      if (rec.timestamp < it->second) {
        throw IngestError("parse_ticks",
                          "out-of-order timestamp for symbol '" + rec.symbol +
                              "'",
                          line_no);
      }
      it->second = rec.timestamp;
    }
    result.ticks.push_back(std::move(rec));
  }

  if (!result.row_errors.empty() && result.n_rows > 0) {
    const double rate = static_cast<double>(result.row_errors.size()) /
                        static_cast<double>(result.n_rows);
    if (rate > format.max_error_rate) {
      const auto& first = result.row_errors.front();
      throw IngestError("parse_ticks",
                        std::to_string(result.row_errors.size()) + " of " +
                            std::to_string(result.n_rows) +
                            " rows malformed (threshold exceeded); first: " +
                            first.message,
                        first.line);
    }
  }
  return result;
}

struct SessionCalendar {
  int session_open_minute = 570;   // minute of day, e.g. 570 = 09:30
  int session_length_min = 390;
};

inline void validate(const SessionCalendar& cal) {
  if (cal.session_length_min < 1 ||
      cal.session_open_minute < 0 || cal.session_open_minute >= 1440 ||
      cal.session_open_minute + cal.session_length_min > 1440) {
    throw ValidationError("ingest", "validate_calendar",
                          "sessions must fit within one day");
  }
}

// Previous-tick minute bars: the minute price is the last trade at or before
// the minute end; minutes with no trade repeat the last price (r = 0);
// minutes before the first trade of a session are dropped; no return is
// emitted across the overnight gap. Trading days are the days with at least
// one in-session trade.
inline ReturnSeries minute_returns(std::span<const TickRecord> ticks,
                                   const SessionCalendar& calendar) {
  validate(calendar);
  const std::string symbol = ticks.empty() ? "" : ticks.front().symbol;
  const int L = calendar.session_length_min;
  const double open_s = calendar.session_open_minute * 60.0;

  // session day -> last price per minute
  std::map<std::int64_t, std::vector<std::optional<double>>> sessions;
  for (const auto& tick : ticks) {
    if (tick.symbol != symbol) {
      throw IngestError("minute_returns",
                        "ticks of multiple symbols in one call");
    }
    const auto day = static_cast<std::int64_t>(
        std::floor(tick.timestamp / 86400.0));
    const double offset = tick.timestamp - day * 86400.0 - open_s;
    if (offset < 0.0 || offset > L * 60.0) continue;  // outside the session
    int minute = offset == 0.0
                     ? 0
                     : static_cast<int>(std::ceil(offset / 60.0)) - 1;
    if (minute >= L) minute = L - 1;
    auto& grid = sessions[day];
    if (grid.empty()) grid.resize(static_cast<std::size_t>(L));
    grid[static_cast<std::size_t>(minute)] = tick.price;  // last one wins
  }

  ReturnSeries out;
  out.window_T = 1.0;
  out.source = SeriesSource::Empirical;
  out.symbol = symbol;

  std::size_t traded_minutes = 0;
  for (auto& [day, grid] : sessions) {
    int first = -1;
    for (int m = 0; m < L; ++m) {
      if (grid[static_cast<std::size_t>(m)].has_value()) {
        if (first < 0) first = m;
        ++traded_minutes;
      }
    }
    if (first < 0) continue;
    out.session_starts.push_back(out.values.size());
    double prev = *grid[static_cast<std::size_t>(first)];
    for (int m = first + 1; m < L; ++m) {
      const double price =
          grid[static_cast<std::size_t>(m)].value_or(prev);  // carry forward
      out.values.push_back(std::log(price / prev));
      prev = price;
    }
  }
  if (traded_minutes < 2) {
    throw IngestError("minute_returns",
                      "symbol '" + symbol + "' has fewer than 2 priced minutes");
  }
  return out;
}

// Tags per-symbol series as one realization group for the estimators;
// enforces a common aggregation window.
inline std::vector<ReturnSeries> pool_by_group(
    std::vector<ReturnSeries> series_list) {
  if (series_list.empty()) {
    throw IngestError("pool_by_group", "no series to pool");
  }
  const double T = series_list.front().window_T;
  for (const auto& s : series_list) {
    if (s.window_T != T) {
      throw IngestError("pool_by_group", "series have mixed window_T");
    }
  }
  return series_list;
}

inline double zero_return_fraction(const ReturnSeries& series) {
  if (series.values.empty()) return 0.0;
  std::size_t zeros = 0;
  for (double r : series.values) {
    if (r == 0.0) ++zeros;
  }
  return static_cast<double>(zeros) / static_cast<double>(series.values.size());
}

}  // namespace herdsim
