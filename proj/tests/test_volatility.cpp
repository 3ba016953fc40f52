#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <sstream>

#include "vri/rng.hpp"
#include "vri/volatility.hpp"

using namespace vri;

namespace {

MinuteSeries series_from_days(std::vector<std::vector<double>> days) {
  MinuteSeries s;
  s.symbol = "TST";
  for (std::size_t d = 0; d < days.size(); ++d) {
    REQUIRE(days[d].size() == static_cast<std::size_t>(kSlotsPerDay));
    s.dates.push_back("2002-01-0" + std::to_string(d + 2));
    s.prices.insert(s.prices.end(), days[d].begin(), days[d].end());
    s.trades_per_day.push_back(kSlotsPerDay);
  }
  return s;
}

std::vector<double> day_filled(double first, double second, double rest) {
  std::vector<double> day(kSlotsPerDay, rest);
  day[0] = first;
  day[1] = second;
  return day;
}

}  // namespace

TEST_CASE("log_returns stays inside days") {
  const double e = std::exp(1.0);
  // day 1 prices 1, e, e, ...; day 2 all 4s: r = [1, 0, ...], [0, ...]
  const MinuteSeries s =
      series_from_days({day_filled(1.0, e, e), day_filled(4.0, 4.0, 4.0)});
  const PerDayReturns r = log_returns(s);
  REQUIRE(r.n_days == 2);
  CHECK(r.day(0)[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(r.day(0)[1] == 0.0);
  CHECK(r.day(0)[388] == 0.0);
  for (int t = 0; t < kReturnsPerDay; ++t) CHECK(r.day(1)[t] == 0.0);
  // no overnight return ln(4/e) anywhere
}

TEST_CASE("log_returns of constant prices is zero") {
  const MinuteSeries s = series_from_days({day_filled(7.0, 7.0, 7.0)});
  const PerDayReturns r = log_returns(s);
  for (int t = 0; t < kReturnsPerDay; ++t) CHECK(r.day(0)[t] == 0.0);
}

TEST_CASE("intraday_pattern averages absolute returns per slot") {
  const MinuteSeries one = series_from_days({day_filled(1.0, 2.0, 2.0)});
  const IntradayPattern p1 = intraday_pattern(log_returns(one));
  CHECK(p1.slot_means[0] == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(p1.slot_means[1] == 0.0);

  // two days with opposite returns at slot 0 average to |x|
  const MinuteSeries two =
      series_from_days({day_filled(1.0, 2.0, 2.0), day_filled(2.0, 1.0, 1.0)});
  const IntradayPattern p2 = intraday_pattern(log_returns(two));
  CHECK(p2.slot_means[0] == doctest::Approx(std::log(2.0)).epsilon(1e-12));

  const MinuteSeries flat = series_from_days({day_filled(3.0, 3.0, 3.0)});
  for (const double m : intraday_pattern(log_returns(flat)).slot_means) {
    CHECK(m == 0.0);
  }
}

TEST_CASE("normalize_volatility has unit sample standard deviation") {
  Xoshiro256pp rng(42);
  std::vector<std::vector<double>> days;
  for (int d = 0; d < 5; ++d) {
    std::vector<double> prices(kSlotsPerDay);
    double p = 100.0;
    for (auto& v : prices) {
      p *= std::exp(0.01 * (rng.uniform01() - 0.5));
      v = p;
    }
    days.push_back(prices);
  }
  const MinuteSeries s = series_from_days(days);
  const PerDayReturns r = log_returns(s);
  const VolatilitySeries vol = normalize_volatility(r, intraday_pattern(r));

  REQUIRE(vol.values.size() == 5 * static_cast<std::size_t>(kReturnsPerDay));
  double mean = 0.0;
  for (const double v : vol.values) {
    CHECK(v >= 0.0);
    mean += v;
  }
  mean /= static_cast<double>(vol.values.size());
  double acc = 0.0;
  for (const double v : vol.values) acc += (v - mean) * (v - mean);
  const double sd = std::sqrt(acc / static_cast<double>(vol.values.size() - 1));
  CHECK(sd == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("normalize_volatility matches a direct recomputation") {
  // flat pattern: every slot mean equals |x|, so v_raw is |r|/pattern
  // recomputed here with plain loops
  Xoshiro256pp rng(7);
  std::vector<std::vector<double>> days;
  for (int d = 0; d < 3; ++d) {
    std::vector<double> prices(kSlotsPerDay);
    double p = 50.0;
    for (auto& v : prices) {
      p *= std::exp(0.02 * (rng.uniform01() - 0.5));
      v = p;
    }
    days.push_back(prices);
  }
  const MinuteSeries s = series_from_days(days);
  const PerDayReturns r = log_returns(s);
  const IntradayPattern pattern = intraday_pattern(r);
  const VolatilitySeries vol = normalize_volatility(r, pattern);

  std::vector<double> expect;
  for (std::size_t d = 0; d < r.n_days; ++d) {
    for (int t = 0; t < kReturnsPerDay; ++t) {
      const double m = pattern.slot_means[t];
      expect.push_back(m > 0.0 ? std::fabs(r.day(d)[t]) / m : 0.0);
    }
  }
  double mean = 0.0;
  for (const double v : expect) mean += v;
  mean /= static_cast<double>(expect.size());
  double acc = 0.0;
  for (const double v : expect) acc += (v - mean) * (v - mean);
  const double sd = std::sqrt(acc / static_cast<double>(expect.size() - 1));
  REQUIRE(vol.values.size() == expect.size());
  for (std::size_t i = 0; i < expect.size(); ++i) {
    CHECK(vol.values[i] == doctest::Approx(expect[i] / sd).epsilon(1e-12));
  }
}

TEST_CASE("normalize_volatility is scale-free in prices and returns") {
  Xoshiro256pp rng(11);
  std::vector<std::vector<double>> days;
  for (int d = 0; d < 3; ++d) {
    std::vector<double> prices(kSlotsPerDay);
    double p = 10.0;
    for (auto& v : prices) {
      p *= std::exp(0.03 * (rng.uniform01() - 0.5));
      v = p;
    }
    days.push_back(prices);
  }
  const MinuteSeries base = series_from_days(days);

  // multiply all prices by a constant
  std::vector<std::vector<double>> scaled = days;
  for (auto& day : scaled) {
    for (auto& v : day) v *= 3.7;
  }
  // square all prices: doubles every log return
  std::vector<std::vector<double>> doubled = days;
  for (auto& day : doubled) {
    for (auto& v : day) v *= v;
  }

  const auto vol = [](const MinuteSeries& s) {
    const PerDayReturns r = log_returns(s);
    return normalize_volatility(r, intraday_pattern(r));
  };
  const VolatilitySeries v0 = vol(base);
  const VolatilitySeries v1 = vol(series_from_days(scaled));
  const VolatilitySeries v2 = vol(series_from_days(doubled));
  for (std::size_t i = 0; i < v0.values.size(); ++i) {
    CHECK(v1.values[i] == doctest::Approx(v0.values[i]).epsilon(1e-9));
    CHECK(v2.values[i] == doctest::Approx(v0.values[i]).epsilon(1e-9));
  }
}

TEST_CASE("normalize_volatility rejects an all-zero series") {
  const MinuteSeries s = series_from_days({day_filled(5.0, 5.0, 5.0)});
  const PerDayReturns r = log_returns(s);
  CHECK_THROWS_AS(normalize_volatility(r, intraday_pattern(r)),
                  DegenerateSeriesError);
}

TEST_CASE("identical days normalize to equal values on active slots") {
  const auto day = day_filled(1.0, 2.0, 3.0);
  const MinuteSeries s = series_from_days({day, day, day});
  const PerDayReturns r = log_returns(s);
  const VolatilitySeries vol = normalize_volatility(r, intraday_pattern(r));
  // slots 0 and 1 moved; every day's value at those slots is identical
  CHECK(vol.values[0] > 0.0);
  CHECK(vol.values[0] == doctest::Approx(vol.values[kReturnsPerDay]).epsilon(1e-12));
  CHECK(vol.values[1] == doctest::Approx(vol.values[kReturnsPerDay + 1]).epsilon(1e-12));
}

TEST_CASE("daily_series uses final slots and skips nothing") {
  const MinuteSeries s = series_from_days({day_filled(1.0, 1.0, 100.0),
                                           day_filled(1.0, 1.0, 100.0),
                                           day_filled(1.0, 1.0, 100.0)});
  const DailySeries d = daily_series(s);
  REQUIRE(d.daily_returns.size() == 2);
  CHECK(d.daily_returns[0] == 0.0);
  CHECK(d.daily_returns[1] == 0.0);

  const double e = std::exp(1.0);
  const MinuteSeries s2 = series_from_days({day_filled(1.0, 1.0, 1.0),
                                            day_filled(1.0, 1.0, e),
                                            day_filled(1.0, 1.0, 1.0)});
  const DailySeries d2 = daily_series(s2);
  CHECK(d2.daily_returns[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(d2.daily_returns[1] == doctest::Approx(-1.0).epsilon(1e-14));

  const MinuteSeries s3 = series_from_days(
      {day_filled(1.0, 1.0, 100.0), day_filled(1.0, 1.0, 101.0)});
  CHECK(daily_series(s3).daily_returns[0] ==
        doctest::Approx(std::log(1.01)).epsilon(1e-14));
}

TEST_CASE("volatility CSV round-trips") {
  VolatilitySeries v;
  v.symbol = "TST";
  v.values = {0.5, 1.25, 0.0, 3.0};
  v.day_boundaries = {0};
  std::ostringstream out;
  write_volatility_csv(out, std::vector<VolatilitySeries>{v});
  std::istringstream in(out.str());
  const auto back = read_volatility_csv(in);
  REQUIRE(back.size() == 1);
  CHECK(back[0].symbol == "TST");
  CHECK(back[0].values == v.values);
}
