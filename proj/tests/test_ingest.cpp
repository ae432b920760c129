#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "herdsim/ingest.hpp"
#include "herdsim/stats.hpp"

using namespace herdsim;

namespace {

// 2001-09-09T01:46:40Z
constexpr double kEpoch1e9 = 1.0e9;

double session_ts(int day, int minute, double into_minute,
                  const SessionCalendar& cal) {
  return day * 86400.0 + cal.session_open_minute * 60.0 + minute * 60.0 +
         into_minute;
}

}  // namespace

TEST_CASE("parse_ticks happy path keeps input order") {
  std::istringstream in(
      "timestamp,price,symbol\n"
      "1000,10.5,AAA\n"
      "1001,10.6,AAA\n"
      "1002,10.4,AAA\n");
  const auto result = parse_ticks(in, TickFormat{});
  REQUIRE(result.ticks.size() == 3);
  CHECK(result.row_errors.empty());
  CHECK(result.ticks[0].price == 10.5);
  CHECK(result.ticks[2].timestamp == 1002.0);
}

TEST_CASE("parse_ticks rejects non-positive prices row-wise") {
  std::istringstream in(
      "timestamp,price,symbol\n"
      "1000,10.5,AAA\n"
      "1001,0,AAA\n"
      "1002,10.4,AAA\n");
  TickFormat fmt;
  fmt.max_error_rate = 0.5;
  const auto result = parse_ticks(in, fmt);
  CHECK(result.ticks.size() == 2);
  REQUIRE(result.row_errors.size() == 1);
  CHECK(result.row_errors[0].line == 3);

  // default threshold (0.1%): the same input is fatal
  std::istringstream again(
      "timestamp,price,symbol\n"
      "1000,10.5,AAA\n"
      "1001,0,AAA\n"
      "1002,10.4,AAA\n");
  CHECK_THROWS_AS(parse_ticks(again, TickFormat{}), IngestError);
}

TEST_CASE("parse_ticks fatal ordering error names the row") {
  std::istringstream in(
      "timestamp,price,symbol\n"
      "1000,10.5,AAA\n"
      "999,10.6,AAA\n");
  try {
    parse_ticks(in, TickFormat{});
    FAIL("expected IngestError");
  } catch (const IngestError& e) {
    CHECK(e.line == 3);
    CHECK(std::string(e.what()).find("AAA") != std::string::npos);
  }
  // interleaved symbols order independently
  std::istringstream ok(
      "timestamp,price,symbol\n"
      "1000,10.5,AAA\n"
      "500,3.2,BBB\n"
      "1001,10.6,AAA\n");
  CHECK(parse_ticks(ok, TickFormat{}).ticks.size() == 3);
}

TEST_CASE("parse_ticks header and format handling") {
  std::istringstream bad("just_one_column\n");
  CHECK_THROWS_AS(parse_ticks(bad, TickFormat{}), IngestError);

  // semicolon autodetect, columns by index
  std::istringstream semi(
      "a;b;c\n"
      "AAA;1000;10.5\n");
  TickFormat fmt;
  fmt.symbol_column = "0";
  fmt.timestamp_column = "1";
  fmt.price_column = "2";
  const auto r = parse_ticks(semi, fmt);
  REQUIRE(r.ticks.size() == 1);
  CHECK(r.ticks[0].symbol == "AAA");
  CHECK(r.ticks[0].price == 10.5);

  std::istringstream tabbed("ts\tpx\nnoise\t1\n");
  TickFormat tf;
  tf.timestamp_column = "ts";
  tf.price_column = "px";
  tf.symbol_column = "";
  tf.max_error_rate = 1.0;
  const auto rt = parse_ticks(tabbed, tf);
  CHECK(rt.n_rows == 1);
  CHECK(rt.row_errors.size() == 1);  // "noise" is not a timestamp

  std::istringstream missing("timestamp,price\n1,2\n");
  TickFormat mf;
  mf.symbol_column = "symbol";
  CHECK_THROWS_AS(parse_ticks(missing, mf), IngestError);
}

TEST_CASE("parse_ticks ISO-8601 timestamps agree with epoch seconds") {
  std::istringstream iso(
      "timestamp,price,symbol\n"
      "2001-09-09T01:46:40,10.0,AAA\n"
      "2001-09-09 01:46:41.25,10.1,AAA\n");
  const auto r = parse_ticks(iso, TickFormat{});
  REQUIRE(r.ticks.size() == 2);
  CHECK(r.ticks[0].timestamp == doctest::Approx(kEpoch1e9).epsilon(1e-12));
  CHECK(r.ticks[1].timestamp ==
        doctest::Approx(kEpoch1e9 + 1.25).epsilon(1e-12));
}

TEST_CASE("minute_returns log-return definition and zero fill") {
  SessionCalendar cal;  // 09:30, 390 minutes
  std::vector<TickRecord> ticks;
  const double e = std::exp(1.0);
  // minute 0: price 100; minute 1: price 100e; minutes 2,3: no trades;
  // minute 4: price 100e again
  ticks.push_back({session_ts(10, 0, 30.0, cal), 100.0, "AAA"});
  ticks.push_back({session_ts(10, 1, 30.0, cal), 100.0 * e, "AAA"});
  ticks.push_back({session_ts(10, 4, 30.0, cal), 100.0 * e, "AAA"});
  const auto s = minute_returns(ticks, cal);
  REQUIRE(s.values.size() == 389);  // 390 minutes -> 389 returns
  CHECK(s.values[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.values[1] == 0.0);  // carried-forward price
  CHECK(s.values[2] == 0.0);
  CHECK(s.values[3] == 0.0);  // same price again
  CHECK(s.values[388] == 0.0);
  CHECK(zero_return_fraction(s) ==
        doctest::Approx(388.0 / 389.0).epsilon(1e-12));
}

TEST_CASE("minute_returns drops pre-first-trade minutes and overnight gaps") {
  SessionCalendar cal;
  std::vector<TickRecord> ticks;
  // day 10: first trade at minute 385 -> only 4 returns that day
  ticks.push_back({session_ts(10, 385, 10.0, cal), 50.0, "AAA"});
  ticks.push_back({session_ts(10, 387, 10.0, cal), 55.0, "AAA"});
  // day 11: opens at a gapped price; no return across the gap
  ticks.push_back({session_ts(11, 0, 10.0, cal), 80.0, "AAA"});
  ticks.push_back({session_ts(11, 1, 10.0, cal), 81.0, "AAA"});
  const auto s = minute_returns(ticks, cal);
  REQUIRE(s.session_starts.size() == 2);
  CHECK(s.session_starts[0] == 0);
  CHECK(s.session_starts[1] == 4);  // 389 - 385 = 4 returns on day 10
  // no ln(80/55) anywhere
  bool has_gap_return = false;
  for (double r : s.values) {
    if (std::fabs(r - std::log(80.0 / 55.0)) < 1e-12) has_gap_return = true;
  }
  CHECK(!has_gap_return);
  CHECK(s.values[4] == doctest::Approx(std::log(81.0 / 80.0)).epsilon(1e-12));
}

TEST_CASE("minute_returns duplicate timestamps: last one wins") {
  SessionCalendar cal;
  std::vector<TickRecord> ticks;
  ticks.push_back({session_ts(10, 0, 30.0, cal), 100.0, "AAA"});
  ticks.push_back({session_ts(10, 1, 30.0, cal), 105.0, "AAA"});
  ticks.push_back({session_ts(10, 1, 30.0, cal), 110.0, "AAA"});
  const auto s = minute_returns(ticks, cal);
  CHECK(s.values[0] == doctest::Approx(std::log(110.0 / 100.0)).epsilon(1e-12));
}

TEST_CASE("minute_returns round-trips a synthetic minute-price path") {
  SessionCalendar cal;
  Rng rng(77, 0);
  std::vector<double> prices(390);
  double p = 100.0;
  for (auto& v : prices) {
    p *= std::exp(0.01 * rng.next_normal());
    v = p;
  }
  std::vector<TickRecord> ticks;
  for (int m = 0; m < 390; ++m) {
    ticks.push_back({session_ts(5, m, 15.0, cal), prices[(std::size_t)m], "S"});
  }
  const auto s = minute_returns(ticks, cal);
  REQUIRE(s.values.size() == 389);
  bool exact = true;
  for (int m = 1; m < 390; ++m) {
    exact = exact && s.values[(std::size_t)m - 1] ==
                         std::log(prices[(std::size_t)m] /
                                  prices[(std::size_t)m - 1]);
  }
  CHECK(exact);
  CHECK(zero_return_fraction(s) == 0.0);
}

TEST_CASE("minute_returns requires two priced minutes") {
  SessionCalendar cal;
  std::vector<TickRecord> one = {{session_ts(3, 5, 1.0, cal), 10.0, "X"}};
  CHECK_THROWS_AS(minute_returns(one, cal), IngestError);
  std::vector<TickRecord> none;
  CHECK_THROWS_AS(minute_returns(none, cal), IngestError);
}

TEST_CASE("pool_by_group validates shared windows") {
  ReturnSeries a, b, c;
  a.window_T = b.window_T = 1.0;
  c.window_T = 3.0;
  a.values = {1, 2};
  b.values = {3, 4};
  c.values = {5, 6};
  CHECK(pool_by_group({a, b}).size() == 2);
  CHECK(pool_by_group({a}).size() == 1);
  CHECK_THROWS_AS(pool_by_group({a, c}), IngestError);
  CHECK_THROWS_AS(pool_by_group({}), IngestError);
}

TEST_CASE("pooled identical copies estimate like a single series") {
  Rng rng(78, 0);
  ReturnSeries s;
  s.window_T = 1.0;
  s.values.resize(5000);
  for (auto& v : s.values) v = rng.next_normal();
  const ReturnSeries one[] = {s};
  const ReturnSeries four[] = {s, s, s, s};
  const auto p1 = abs_return_pdf(one);
  const auto p4 = abs_return_pdf(four);
  CHECK(p4.n_realizations == 4);
  for (std::size_t j = 0; j < p1.density.size(); ++j) {
    CHECK(p4.density[j] == doctest::Approx(p1.density[j]).epsilon(1e-12));
  }
}
