#include "vri/volatility.hpp"

#include <cmath>
#include <map>

#include "vri/io.hpp"
#include "vri/kernels.hpp"

namespace vri {

PerDayReturns log_returns(const MinuteSeries& series) {
  PerDayReturns out;
  out.n_days = series.n_days();
  out.values.resize(out.n_days * kReturnsPerDay);
  for (std::size_t d = 0; d < out.n_days; ++d) {
    const double* prices = series.day(d);
    double* r = out.values.data() + d * kReturnsPerDay;
    for (int t = 1; t < kSlotsPerDay; ++t) {
      r[t - 1] = std::log(prices[t] / prices[t - 1]);
    }
  }
  return out;
}

IntradayPattern intraday_pattern(const PerDayReturns& returns) {
  if (returns.n_days == 0) {
    throw std::invalid_argument("intraday_pattern: no days");
  }
  IntradayPattern pattern;
  pattern.slot_means.assign(kReturnsPerDay, 0.0);
  for (std::size_t d = 0; d < returns.n_days; ++d) {
    const double* r = returns.day(d);
    for (int s = 0; s < kReturnsPerDay; ++s) {
      pattern.slot_means[s] += std::fabs(r[s]);
    }
  }
  for (auto& m : pattern.slot_means) {
    m /= static_cast<double>(returns.n_days);
  }
  return pattern;
}

VolatilitySeries normalize_volatility(const PerDayReturns& returns,
                                      const IntradayPattern& pattern) {
  const auto& k = kernels::active();
  VolatilitySeries vol;
  vol.values.resize(returns.n_days * kReturnsPerDay);
  vol.day_boundaries.resize(returns.n_days);
  for (std::size_t d = 0; d < returns.n_days; ++d) {
    vol.day_boundaries[d] = d * kReturnsPerDay;
    k.abs_div(returns.day(d), pattern.slot_means.data(),
              vol.values.data() + d * kReturnsPerDay, kReturnsPerDay);
  }

  const std::size_t n = vol.values.size();
  if (n < 2) {
    throw DegenerateSeriesError("normalize_volatility: series too short");
  }
  const double mean = k.sum(vol.values.data(), n) / static_cast<double>(n);
  double acc = 0.0;
  for (const double v : vol.values) {
    const double d = v - mean;
    acc += d * d;
  }
  const double sd = std::sqrt(acc / static_cast<double>(n - 1));
  if (!(sd > 0.0)) {
    throw DegenerateSeriesError(
        "normalize_volatility: zero variance, cannot normalize");
  }
  k.scale(vol.values.data(), n, 1.0 / sd);
  return vol;
}

DailySeries daily_series(const MinuteSeries& series) {
  if (series.n_days() < 2) {
    throw std::invalid_argument("daily_series: need at least 2 days");
  }
  DailySeries out;
  out.symbol = series.symbol;
  out.daily_returns.resize(series.n_days() - 1);
  for (std::size_t d = 0; d + 1 < series.n_days(); ++d) {
    const double close0 = series.day(d)[kSlotsPerDay - 1];
    const double close1 = series.day(d + 1)[kSlotsPerDay - 1];
    out.daily_returns[d] = std::log(close1 / close0);
  }
  return out;
}

void write_volatility_csv(std::ostream& out,
                          std::span<const VolatilitySeries> series) {
  out << "symbol,global_minute_index,volatility\n";
  for (const VolatilitySeries& s : series) {
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      out << s.symbol << ',' << i << ',' << io::format_double(s.values[i])
          << '\n';
    }
  }
}

std::vector<VolatilitySeries> read_volatility_csv(std::istream& in) {
  std::string line;
  bool have_header = false;
  std::map<std::string, std::vector<double>> data;
  std::vector<std::string> order;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto fields = io::split_csv(line);
    if (!have_header) {
      if (fields.size() != 3 || fields[0] != "symbol" ||
          fields[1] != "global_minute_index" || fields[2] != "volatility") {
        throw FormatError(
            "volatility CSV: bad header, expected symbol,global_minute_index,volatility");
      }
      have_header = true;
      continue;
    }
    if (fields.size() != 3) throw FormatError("volatility CSV: bad row: " + line);
    const auto idx = io::parse_int(fields[1]);
    const auto v = io::parse_double(fields[2]);
    if (!idx || !v || !std::isfinite(*v)) {
      throw FormatError("volatility CSV: bad row: " + line);
    }
    auto it = data.find(std::string(fields[0]));
    if (it == data.end()) {
      it = data.emplace(std::string(fields[0]), std::vector<double>{}).first;
      order.push_back(it->first);
    }
    if (*idx != static_cast<long long>(it->second.size())) {
      throw FormatError("volatility CSV: non-contiguous index for " +
                        it->first);
    }
    it->second.push_back(*v);
  }
  std::vector<VolatilitySeries> out;
  for (const std::string& symbol : order) {
    VolatilitySeries s;
    s.symbol = symbol;
    s.values = std::move(data[symbol]);
    s.day_boundaries = {0};
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace vri
