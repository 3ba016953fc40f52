#include "vri/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <map>

#include "vri/io.hpp"

namespace vri {
namespace {

constexpr std::int64_t kHalfWindowMs = 30000;
constexpr std::int64_t kSessionMs =
    static_cast<std::int64_t>(kSlotsPerDay) * kMsPerMinute;

// Howard Hinnant's civil-from-days; timestamps are UTC.
std::string utc_date(std::int64_t ms) {
  std::int64_t z = ms / 86400000;
  if (ms < 0 && ms % 86400000 != 0) --z;
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const std::int64_t doe = z - era * 146097;
  const std::int64_t yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = yoe + era * 400;
  const std::int64_t doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const std::int64_t mp = (5 * doy + 2) / 153;
  const std::int64_t d = doy - (153 * mp + 2) / 5 + 1;
  const std::int64_t m = mp < 10 ? mp + 3 : mp - 9;
  const std::int64_t year = m <= 2 ? y + 1 : y;
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%04lld-%02lld-%02lld",
                static_cast<long long>(year), static_cast<long long>(m),
                static_cast<long long>(d));
  return buf;
}

}  // namespace

ParsedTicks parse_ticks(std::istream& in) {
  ParsedTicks out;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    if (!have_header) {
      const auto fields = io::split_csv(line);
      if (fields.size() != 4 || fields[0] != "symbol" ||
          fields[1] != "timestamp" || fields[2] != "price" ||
          fields[3] != "size") {
        throw FormatError("tick CSV: bad header, expected symbol,timestamp,price,size");
      }
      have_header = true;
      continue;
    }
    ++out.total_rows;
    const auto fields = io::split_csv(line);
    if (fields.size() != 4) {
      ++out.malformed_rows;
      continue;
    }
    const auto ts = io::parse_int(fields[1]);
    const auto price = io::parse_double(fields[2]);
    const auto size = io::parse_int(fields[3]);
    if (!ts || !price || !size || fields[0].empty() || *price <= 0.0 ||
        *size < 0 || !std::isfinite(*price)) {
      ++out.malformed_rows;
      continue;
    }
    out.ticks.push_back(TickRecord{std::string(fields[0]), *ts, *price, *size});
  }
  if (out.total_rows > 0 &&
      static_cast<double>(out.malformed_rows) >
          0.01 * static_cast<double>(out.total_rows)) {
    throw FormatError("tick CSV: more than 1% malformed rows (" +
                      std::to_string(out.malformed_rows) + " of " +
                      std::to_string(out.total_rows) + ")");
  }
  std::stable_sort(out.ticks.begin(), out.ticks.end(),
                   [](const TickRecord& a, const TickRecord& b) {
                     if (a.symbol != b.symbol) return a.symbol < b.symbol;
                     return a.timestamp_ms < b.timestamp_ms;
                   });
  return out;
}

TradingCalendar TradingCalendar::parse(std::istream& in) {
  TradingCalendar cal;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto fields = io::split_csv(line);
    if (!have_header) {
      if (fields.size() != 2 || fields[0] != "date" ||
          fields[1] != "open_timestamp") {
        throw FormatError("calendar CSV: bad header, expected date,open_timestamp");
      }
      have_header = true;
      continue;
    }
    if (fields.size() != 2) throw FormatError("calendar CSV: bad row: " + line);
    const auto open = io::parse_int(fields[1]);
    if (!open) throw FormatError("calendar CSV: bad open_timestamp: " + line);
    cal.days.push_back(Day{std::string(fields[0]), *open});
  }
  std::sort(cal.days.begin(), cal.days.end(),
            [](const Day& a, const Day& b) { return a.open_ms < b.open_ms; });
  return cal;
}

TradingCalendar TradingCalendar::infer_from_ticks(
    std::span<const TickRecord> ticks) {
  std::map<std::string, std::int64_t> first_by_date;
  for (const TickRecord& t : ticks) {
    const std::string date = utc_date(t.timestamp_ms);
    auto [it, inserted] = first_by_date.emplace(date, t.timestamp_ms);
    if (!inserted && t.timestamp_ms < it->second) it->second = t.timestamp_ms;
  }
  TradingCalendar cal;
  for (const auto& [date, first_ms] : first_by_date) {
    cal.days.push_back(
        TradingCalendar::Day{date, first_ms / kMsPerMinute * kMsPerMinute});
  }
  return cal;
}

MinuteSeries build_minute_series(std::span<const TickRecord> ticks,
                                 const TradingCalendar& calendar,
                                 std::vector<std::string>* dropped_days) {
  MinuteSeries series;
  if (!ticks.empty()) series.symbol = ticks.front().symbol;

  const auto ts_less = [](const TickRecord& t, std::int64_t v) {
    return t.timestamp_ms < v;
  };

  for (const TradingCalendar::Day& day : calendar.days) {
    const std::int64_t open = day.open_ms;
    const auto begin = std::lower_bound(ticks.begin(), ticks.end(), open, ts_less);
    const auto end = std::lower_bound(ticks.begin(), ticks.end(),
                                      open + kSessionMs + kHalfWindowMs, ts_less);
    if (begin == end) {
      if (dropped_days) dropped_days->push_back(day.date);
      continue;
    }

    series.dates.push_back(day.date);
    series.trades_per_day.push_back(end - begin);
    const std::size_t base = series.prices.size();
    series.prices.resize(base + kSlotsPerDay);

    double prev = 0.0;
    for (int j = 0; j < kSlotsPerDay; ++j) {
      const std::int64_t mark = open + static_cast<std::int64_t>(j + 1) * kMsPerMinute;
      const auto wa = std::lower_bound(begin, end, mark - kHalfWindowMs, ts_less);
      const auto wb = std::lower_bound(begin, end, mark + kHalfWindowMs, ts_less);

      double price;
      if (wa != wb) {
        // Nearest tick to the mark; strict < keeps the earlier tick on ties.
        auto best = wa;
        std::int64_t best_d = std::llabs(wa->timestamp_ms - mark);
        for (auto it = wa + 1; it != wb; ++it) {
          const std::int64_t d = std::llabs(it->timestamp_ms - mark);
          if (d < best_d) {
            best = it;
            best_d = d;
          }
        }
        price = best->price;
      } else if (j == 0) {
        // Leading gap: last tick at or before the mark, else the first
        // tick of the day.
        const auto after = std::upper_bound(begin, end, mark,
                                            [](std::int64_t v, const TickRecord& t) {
                                              return v < t.timestamp_ms;
                                            });
        price = after == begin ? begin->price : (after - 1)->price;
      } else {
        price = prev;  // carry-forward
      }
      series.prices[base + j] = price;
      prev = price;
    }
  }
  return series;
}

std::vector<MinuteSeries> filter_active_stocks(std::vector<MinuteSeries> all,
                                               std::int64_t min_daily_trades) {
  std::vector<MinuteSeries> kept;
  for (auto& s : all) {
    std::int64_t min_trades = std::numeric_limits<std::int64_t>::max();
    for (const std::int64_t t : s.trades_per_day) {
      min_trades = std::min(min_trades, t);
    }
    if (s.trades_per_day.empty() || min_trades >= min_daily_trades) {
      kept.push_back(std::move(s));
    }
  }
  return kept;
}

void write_minute_csv(std::ostream& out, std::span<const MinuteSeries> series) {
  out << "symbol,date,minute_index,price\n";
  for (const MinuteSeries& s : series) {
    for (std::size_t d = 0; d < s.n_days(); ++d) {
      for (int j = 0; j < kSlotsPerDay; ++j) {
        out << s.symbol << ',' << s.dates[d] << ',' << j << ','
            << io::format_double(s.day(d)[j]) << '\n';
      }
    }
  }
}

std::vector<MinuteSeries> read_minute_csv(std::istream& in) {
  std::string line;
  bool have_header = false;
  // symbol -> date -> (slot prices, seen-count)
  std::map<std::string, std::map<std::string, std::vector<double>>> data;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto fields = io::split_csv(line);
    if (!have_header) {
      if (fields.size() != 4 || fields[0] != "symbol" || fields[1] != "date" ||
          fields[2] != "minute_index" || fields[3] != "price") {
        throw FormatError("minute CSV: bad header, expected symbol,date,minute_index,price");
      }
      have_header = true;
      continue;
    }
    if (fields.size() != 4) throw FormatError("minute CSV: bad row: " + line);
    const auto idx = io::parse_int(fields[2]);
    const auto price = io::parse_double(fields[3]);
    if (!idx || !price || *idx < 0 || *idx >= kSlotsPerDay || *price <= 0.0) {
      throw FormatError("minute CSV: bad row: " + line);
    }
    auto& day = data[std::string(fields[0])][std::string(fields[1])];
    if (day.empty()) day.assign(kSlotsPerDay, 0.0);
    day[static_cast<std::size_t>(*idx)] = *price;
  }

  std::vector<MinuteSeries> out;
  for (auto& [symbol, days] : data) {
    MinuteSeries s;
    s.symbol = symbol;
    for (auto& [date, slots] : days) {
      for (const double p : slots) {
        if (p <= 0.0) {
          throw FormatError("minute CSV: missing slots for " + symbol + " " + date);
        }
      }
      s.dates.push_back(date);
      s.prices.insert(s.prices.end(), slots.begin(), slots.end());
      s.trades_per_day.push_back(kSlotsPerDay);
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace vri
