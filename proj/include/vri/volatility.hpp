#pragma once

#include <istream>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "vri/ingest.hpp"

namespace vri {

constexpr int kReturnsPerDay = kSlotsPerDay - 1;  // slot 0 has no return

// Per-day log returns r_t = ln(p_t / p_{t-1}); never spans the
// overnight gap.
struct PerDayReturns {
  std::size_t n_days = 0;
  std::vector<double> values;  // n_days x kReturnsPerDay, row-major

  const double* day(std::size_t d) const {
    return values.data() + d * kReturnsPerDay;
  }
};

PerDayReturns log_returns(const MinuteSeries& series);

// Mean absolute return per minute-of-day slot, over all days.
struct IntradayPattern {
  std::vector<double> slot_means;  // kReturnsPerDay entries
};

IntradayPattern intraday_pattern(const PerDayReturns& returns);

struct DegenerateSeriesError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Absolute returns divided by the intraday pattern (slots with zero
// pattern map to 0), concatenated across days, then the whole sequence
// divided by its own sample standard deviation.
struct VolatilitySeries {
  std::string symbol;
  std::vector<double> values;
  std::vector<std::size_t> day_boundaries;  // start index of each day
};

VolatilitySeries normalize_volatility(const PerDayReturns& returns,
                                      const IntradayPattern& pattern);

struct DailySeries {
  std::string symbol;
  std::vector<double> daily_returns;  // n_days - 1 entries
};

// Close-to-close log returns using each day's final minute slot.
DailySeries daily_series(const MinuteSeries& series);

// `symbol,global_minute_index,volatility` CSV.
void write_volatility_csv(std::ostream& out,
                          std::span<const VolatilitySeries> series);
std::vector<VolatilitySeries> read_volatility_csv(std::istream& in);

}  // namespace vri
