#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace vri {

struct TickRecord {
  std::string symbol;
  std::int64_t timestamp_ms = 0;  // milliseconds since epoch, UTC
  double price = 0.0;
  std::int64_t size = 0;
};

struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParsedTicks {
  std::vector<TickRecord> ticks;  // sorted by (symbol, timestamp)
  std::size_t malformed_rows = 0;
  std::size_t total_rows = 0;
};

// Parses `symbol,timestamp,price,size` CSV. Malformed rows (bad field
// count, unparseable numbers, price <= 0, size < 0) are counted and
// excluded; more than 1% malformed is a hard FormatError, as is a wrong
// header. A fully empty stream parses to an empty result.
ParsedTicks parse_ticks(std::istream& in);

struct TradingCalendar {
  struct Day {
    std::string date;          // YYYY-MM-DD
    std::int64_t open_ms = 0;  // session open, ms since epoch
  };
  std::vector<Day> days;  // strictly increasing by open_ms

  // `date,open_timestamp` CSV with a header.
  static TradingCalendar parse(std::istream& in);

  // One session per UTC date present in the ticks; open at the first
  // tick's minute. Used when no calendar file is supplied.
  static TradingCalendar infer_from_ticks(std::span<const TickRecord> ticks);
};

constexpr int kSlotsPerDay = 390;
constexpr std::int64_t kMsPerMinute = 60000;

struct MinuteSeries {
  std::string symbol;
  std::vector<std::string> dates;
  std::vector<double> prices;  // dates.size() x kSlotsPerDay, row-major
  std::vector<std::int64_t> trades_per_day;

  std::size_t n_days() const { return dates.size(); }
  const double* day(std::size_t d) const {
    return prices.data() + d * kSlotsPerDay;
  }
};

// Resamples one symbol's sorted ticks onto the calendar's minute marks.
// Mark j of a session is open + (j+1) minutes; a mark takes the nearest
// tick within +-30 s (ties to the earlier tick), marks with no tick in
// the window carry the previous slot forward, and a leading gap takes
// the last tick at or before the mark, else the day's first tick. Days
// with no ticks are dropped (their dates reported in dropped_days).
MinuteSeries build_minute_series(std::span<const TickRecord> ticks,
                                 const TradingCalendar& calendar,
                                 std::vector<std::string>* dropped_days = nullptr);

// Keeps symbols whose minimum daily tick count is >= min_daily_trades.
std::vector<MinuteSeries> filter_active_stocks(std::vector<MinuteSeries> all,
                                               std::int64_t min_daily_trades = 500);

// Canonical minute-bar CSV `symbol,date,minute_index,price`.
void write_minute_csv(std::ostream& out, std::span<const MinuteSeries> series);
std::vector<MinuteSeries> read_minute_csv(std::istream& in);

}  // namespace vri
