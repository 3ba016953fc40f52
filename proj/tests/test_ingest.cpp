#include <doctest.h>

#include <stdexcept>

#include <sstream>

#include "vri/ingest.hpp"
#include "vri/io.hpp"

using namespace vri;

namespace {

constexpr std::int64_t kOpen = 1009890000000;  // arbitrary session open

TradingCalendar one_day_calendar() {
  TradingCalendar cal;
  cal.days.push_back({"2002-01-02", kOpen});
  return cal;
}

TickRecord tick(std::int64_t offset_s, double price) {
  return TickRecord{"GE", kOpen + offset_s * 1000, price, 100};
}

}  // namespace

TEST_CASE("parse_ticks maps fields and sorts") {
  std::istringstream in(
      "symbol,timestamp,price,size\n"
      "GE,1009890000000,40.10,500\n"
      "AA,1009890000000,10,1\n"
      "GE,1009889999000,40.00,200\n");
  const ParsedTicks parsed = parse_ticks(in);
  REQUIRE(parsed.ticks.size() == 3);
  CHECK(parsed.malformed_rows == 0);
  CHECK(parsed.ticks[0].symbol == "AA");
  CHECK(parsed.ticks[1].symbol == "GE");
  CHECK(parsed.ticks[1].timestamp_ms == 1009889999000);  // sorted within symbol
  CHECK(parsed.ticks[2].price == doctest::Approx(40.10));
  CHECK(parsed.ticks[2].size == 500);
}

TEST_CASE("parse_ticks of an empty stream is empty") {
  std::istringstream in("");
  const ParsedTicks parsed = parse_ticks(in);
  CHECK(parsed.ticks.empty());
  CHECK(parsed.malformed_rows == 0);
}

TEST_CASE("parse_ticks counts malformed rows and excludes them") {
  std::ostringstream src;
  src << "symbol,timestamp,price,size\n";
  for (int i = 0; i < 200; ++i) src << "GE," << 1000 + i << ",10.0,1\n";
  src << "GE,2000,-1,5\n";  // negative price: malformed
  std::istringstream in(src.str());
  const ParsedTicks parsed = parse_ticks(in);
  CHECK(parsed.malformed_rows == 1);
  CHECK(parsed.ticks.size() == 200);
}

TEST_CASE("parse_ticks hard-fails above 1% malformed or on a bad header") {
  std::istringstream bad_header("sym,ts,px,sz\nGE,1,2,3\n");
  CHECK_THROWS_AS(parse_ticks(bad_header), FormatError);

  std::ostringstream src;
  src << "symbol,timestamp,price,size\n";
  for (int i = 0; i < 50; ++i) src << "GE," << 1000 + i << ",10.0,1\n";
  src << "GE,x,10.0,1\n";  // 1 of 51 > 1%
  std::istringstream in(src.str());
  CHECK_THROWS_AS(parse_ticks(in), FormatError);
}

TEST_CASE("build_minute_series nearest-mark rule on the toy day") {
  // Two ticks: open+2s at $10, open+100s at $11. The first minute mark
  // (open+60s) has no tick within +-30s and takes the last tick at or
  // before it; the second mark (open+120s) takes the +100s tick.
  const std::vector<TickRecord> ticks = {tick(2, 10.0), tick(100, 11.0)};
  const MinuteSeries s = build_minute_series(ticks, one_day_calendar());
  REQUIRE(s.n_days() == 1);
  REQUIRE(s.prices.size() == kSlotsPerDay);
  CHECK(s.day(0)[0] == 10.0);
  CHECK(s.day(0)[1] == 11.0);
  CHECK(s.day(0)[2] == 11.0);  // carry-forward
  CHECK(s.day(0)[389] == 11.0);
  CHECK(s.trades_per_day[0] == 2);
}

TEST_CASE("build_minute_series single tick fills the whole day") {
  const std::vector<TickRecord> ticks = {tick(123, 42.5)};
  const MinuteSeries s = build_minute_series(ticks, one_day_calendar());
  REQUIRE(s.n_days() == 1);
  for (int j = 0; j < kSlotsPerDay; ++j) CHECK(s.day(0)[j] == 42.5);
}

TEST_CASE("build_minute_series equidistant ticks resolve to the earlier one") {
  // Marks sit at open+60s: ticks at +50s and +70s are both 10s away.
  const std::vector<TickRecord> ticks = {tick(50, 1.0), tick(70, 2.0)};
  const MinuteSeries s = build_minute_series(ticks, one_day_calendar());
  CHECK(s.day(0)[0] == 1.0);
}

TEST_CASE("build_minute_series drops days without ticks") {
  TradingCalendar cal;
  cal.days.push_back({"2002-01-02", kOpen});
  cal.days.push_back({"2002-01-03", kOpen + 86400000});
  const std::vector<TickRecord> ticks = {tick(2, 10.0)};
  std::vector<std::string> dropped;
  const MinuteSeries s = build_minute_series(ticks, cal, &dropped);
  CHECK(s.n_days() == 1);
  REQUIRE(dropped.size() == 1);
  CHECK(dropped[0] == "2002-01-03");
}

TEST_CASE("build_minute_series is idempotent on one-tick-per-mark input") {
  const std::vector<TickRecord> ticks = {tick(2, 10.0), tick(100, 11.0),
                                         tick(250, 12.5)};
  const TradingCalendar cal = one_day_calendar();
  const MinuteSeries first = build_minute_series(ticks, cal);

  std::vector<TickRecord> degenerate;
  for (int j = 0; j < kSlotsPerDay; ++j) {
    degenerate.push_back(
        TickRecord{"GE", kOpen + (j + 1) * kMsPerMinute, first.day(0)[j], 1});
  }
  const MinuteSeries second = build_minute_series(degenerate, cal);
  CHECK(second.prices == first.prices);
}

TEST_CASE("filter_active_stocks thresholds on the minimum day") {
  const auto make = [](const char* sym, std::vector<std::int64_t> trades) {
    MinuteSeries s;
    s.symbol = sym;
    for (std::size_t d = 0; d < trades.size(); ++d) {
      s.dates.push_back("2002-01-0" + std::to_string(d + 2));
      s.prices.insert(s.prices.end(), kSlotsPerDay, 10.0);
    }
    s.trades_per_day = std::move(trades);
    return s;
  };
  std::vector<MinuteSeries> all;
  all.push_back(make("OK", {501, 700}));
  all.push_back(make("EDGE", {500, 500}));
  all.push_back(make("LOW", {499, 10000}));

  const auto kept = filter_active_stocks(all, 500);
  REQUIRE(kept.size() == 2);
  CHECK(kept[0].symbol == "OK");
  CHECK(kept[1].symbol == "EDGE");

  const auto kept_all = filter_active_stocks(all, 0);
  CHECK(kept_all.size() == 3);

  // retained count is non-increasing in the threshold
  std::size_t prev = all.size();
  for (const std::int64_t t : {1, 100, 500, 501, 1000000}) {
    const std::size_t now = filter_active_stocks(all, t).size();
    CHECK(now <= prev);
    prev = now;
  }
}

TEST_CASE("minute CSV round-trips bit-exactly") {
  const std::vector<TickRecord> ticks = {tick(2, 40.10), tick(100, 40.07),
                                         tick(170, 40.123456789)};
  std::vector<MinuteSeries> series = {
      build_minute_series(ticks, one_day_calendar())};

  std::ostringstream out;
  write_minute_csv(out, series);
  std::istringstream in(out.str());
  const auto back = read_minute_csv(in);
  REQUIRE(back.size() == 1);
  CHECK(back[0].symbol == series[0].symbol);
  CHECK(back[0].dates == series[0].dates);
  CHECK(back[0].prices == series[0].prices);  // bit-exact decimals

  std::ostringstream out2;
  write_minute_csv(out2, back);
  CHECK(out2.str() == out.str());
}

TEST_CASE("calendar parse and inference") {
  std::istringstream in(
      "date,open_timestamp\n"
      "2002-01-03,1010000000000\n"
      "2002-01-02,1009890000000\n");
  const TradingCalendar cal = TradingCalendar::parse(in);
  REQUIRE(cal.days.size() == 2);
  CHECK(cal.days[0].date == "2002-01-02");  // sorted by open

  const std::vector<TickRecord> ticks = {
      TickRecord{"GE", 86400000 * 2 + 34567000, 10.0, 1},
      TickRecord{"GE", 86400000 * 2 + 35000000, 10.5, 1}};
  const TradingCalendar inferred = TradingCalendar::infer_from_ticks(ticks);
  REQUIRE(inferred.days.size() == 1);
  CHECK(inferred.days[0].date == "1970-01-03");
  CHECK(inferred.days[0].open_ms == 86400000 * 2 + 34560000);  // minute floor
}

TEST_CASE("format_double round-trips") {
  for (const double v : {40.10, 1.0 / 3.0, 1e-17, 123456.789}) {
    CHECK(*io::parse_double(io::format_double(v)) == v);
  }
}
