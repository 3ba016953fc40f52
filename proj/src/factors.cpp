#include "vri/factors.hpp"

#include <algorithm>
#include <cmath>

#include "vri/intervals.hpp"
#include "vri/io.hpp"
#include "vri/numeric.hpp"

namespace vri {

std::vector<StockMeta> read_meta_csv(std::istream& in) {
  std::vector<StockMeta> out;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto fields = io::split_csv(line);
    if (!have_header) {
      if (fields.size() != 4 || fields[0] != "symbol" ||
          fields[1] != "shares_outstanding" || fields[2] != "ref_price" ||
          fields[3] != "ref_date") {
        throw FormatError(
            "meta CSV: bad header, expected symbol,shares_outstanding,ref_price,ref_date");
      }
      have_header = true;
      continue;
    }
    if (fields.size() != 4) throw FormatError("meta CSV: bad row: " + line);
    const auto shares = io::parse_double(fields[1]);
    const auto price = io::parse_double(fields[2]);
    if (!shares || !price || *shares <= 0.0 || *price <= 0.0) {
      throw FormatError("meta CSV: bad row: " + line);
    }
    out.push_back(StockMeta{std::string(fields[0]), *shares, *price,
                            std::string(fields[3])});
  }
  return out;
}

StockFactors compute_factors(const DailySeries& daily,
                             const MinuteSeries& minute,
                             const std::optional<StockMeta>& meta) {
  StockFactors f;
  f.symbol = daily.symbol;
  const std::size_t n = daily.daily_returns.size();
  if (n < 1) {
    throw std::invalid_argument("compute_factors: need at least 2 trading days");
  }
  double sum = 0.0;
  for (const double r : daily.daily_returns) sum += r;
  f.mean_return = sum / static_cast<double>(n);
  double acc = 0.0;
  for (const double r : daily.daily_returns) {
    const double d = r - f.mean_return;
    acc += d * d;
  }
  f.risk = std::sqrt(acc / static_cast<double>(n));

  double trades = 0.0;
  for (const auto t : minute.trades_per_day) {
    trades += static_cast<double>(t);
  }
  f.trades_per_day = minute.trades_per_day.empty()
                         ? 0.0
                         : trades / static_cast<double>(minute.trades_per_day.size());

  if (meta) {
    f.capitalization = meta->ref_price * meta->shares_outstanding;
  }
  return f;
}

const char* factor_name(FactorKind f) {
  switch (f) {
    case FactorKind::Capitalization:
      return "capitalization";
    case FactorKind::Risk:
      return "risk";
    case FactorKind::TradesPerDay:
      return "trades_per_day";
    case FactorKind::MeanReturn:
      return "mean_return";
  }
  return "unknown";
}

FactorCurve bin_and_aggregate(
    std::span<const std::pair<double, double>> factor_exponent,
    FactorKind kind, const BinningOptions& opt) {
  const bool log_binned = kind != FactorKind::MeanReturn;

  std::vector<std::pair<double, double>> pts;
  for (const auto& [factor, exponent] : factor_exponent) {
    if (!std::isfinite(factor) || !std::isfinite(exponent)) continue;
    if (log_binned && factor <= 0.0) continue;
    pts.emplace_back(log_binned ? std::log(factor) : factor, exponent);
  }
  if (pts.empty()) {
    throw InsufficientDataError("bin_and_aggregate: no usable stocks", 0);
  }

  double lo = pts.front().first, hi = pts.front().first;
  for (const auto& [x, y] : pts) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  const int n_bins = log_binned ? opt.log_bins : opt.linear_bins;
  if (hi <= lo) hi = lo + 1.0;  // all stocks share one factor value
  const double width = (hi - lo) / n_bins;

  std::vector<double> sum(n_bins, 0.0), sum_sq(n_bins, 0.0);
  std::vector<std::size_t> count(n_bins, 0);
  for (const auto& [x, y] : pts) {
    int b = static_cast<int>((x - lo) / width);
    b = std::clamp(b, 0, n_bins - 1);
    sum[b] += y;
    sum_sq[b] += y * y;
    ++count[b];
  }

  FactorCurve curve;
  curve.factor = factor_name(kind);
  curve.trend = log_binned ? TrendKind::Logarithmic : TrendKind::Linear;
  curve.n_stocks = pts.size();

  std::vector<double> fit_x, fit_y;
  for (int b = 0; b < n_bins; ++b) {
    if (count[b] == 0) continue;
    const double cnt = static_cast<double>(count[b]);
    const double mean = sum[b] / cnt;
    const double var = std::max(0.0, sum_sq[b] / cnt - mean * mean);
    const double mid = lo + (b + 0.5) * width;
    FactorBin bin;
    bin.center = log_binned ? std::exp(mid) : mid;
    bin.mean = mean;
    bin.stddev = std::sqrt(var);
    bin.count = count[b];
    curve.bins.push_back(bin);
    if (count[b] >= opt.min_occupancy) {
      fit_x.push_back(mid);  // ln(factor) for log bins, factor otherwise
      fit_y.push_back(mean);
    }
  }
  if (fit_x.empty()) {
    throw InsufficientDataError("bin_and_aggregate: all bins below minimum occupancy",
                                curve.bins.size());
  }
  if (fit_x.size() == 1) {
    curve.slope = 0.0;
    curve.intercept = fit_y.front();
  } else {
    const num::LineFit line = num::fit_line(fit_x, fit_y);
    curve.slope = line.slope;
    curve.intercept = line.intercept;
  }
  return curve;
}

DeltaGammaRegression regress_delta_gamma(
    std::span<const std::pair<double, double>> gamma_delta, double q,
    double m) {
  if (gamma_delta.size() < 10) {
    throw InsufficientDataError("regress_delta_gamma: fewer than 10 valid pairs",
                                gamma_delta.size());
  }
  std::vector<double> gx(gamma_delta.size()), dy(gamma_delta.size());
  for (std::size_t i = 0; i < gamma_delta.size(); ++i) {
    gx[i] = gamma_delta[i].first;
    dy[i] = gamma_delta[i].second;
  }
  num::LineFit line;
  try {
    line = num::fit_line(gx, dy);
  } catch (const std::invalid_argument&) {
    throw InsufficientDataError("regress_delta_gamma: degenerate regressor (constant gamma)",
                                gamma_delta.size());
  }
  DeltaGammaRegression reg;
  reg.q = q;
  reg.m = m;
  reg.slope = line.slope;
  reg.intercept = line.intercept;
  reg.n_points = gamma_delta.size();
  double acc = 0.0;
  for (std::size_t i = 0; i < gx.size(); ++i) {
    const double r = dy[i] - (line.intercept + line.slope * gx[i]);
    acc += r * r;
  }
  reg.residual_rms = std::sqrt(acc / static_cast<double>(gx.size()));
  return reg;
}

}  // namespace vri
