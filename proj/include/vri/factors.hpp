#pragma once

#include <istream>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vri/volatility.hpp"

namespace vri {

struct StockMeta {
  std::string symbol;
  double shares_outstanding = 0.0;
  double ref_price = 0.0;
  std::string ref_date;
};

// `symbol,shares_outstanding,ref_price,ref_date` CSV.
std::vector<StockMeta> read_meta_csv(std::istream& in);

struct StockFactors {
  std::string symbol;
  std::optional<double> capitalization;  // absent without metadata
  double risk = 0.0;                     // std of daily log returns
  double mean_return = 0.0;              // mean daily log return
  double trades_per_day = 0.0;
};

// Missing meta only excludes the symbol from capitalization curves; the
// other factors are still computed.
StockFactors compute_factors(const DailySeries& daily,
                             const MinuteSeries& minute,
                             const std::optional<StockMeta>& meta);

enum class FactorKind { Capitalization, Risk, TradesPerDay, MeanReturn };

const char* factor_name(FactorKind f);

enum class TrendKind { Logarithmic, Linear };

struct FactorBin {
  double center = 0.0;
  double mean = 0.0;
  double stddev = 0.0;
  std::size_t count = 0;
};

struct FactorCurve {
  std::string factor;
  std::vector<FactorBin> bins;
  TrendKind trend = TrendKind::Logarithmic;
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t n_stocks = 0;
};

struct BinningOptions {
  int log_bins = 12;           // capitalization, risk, trades_per_day
  int linear_bins = 10;        // mean_return
  std::size_t min_occupancy = 5;  // bins below this are excluded from fit
};

// Bins (factor value, exponent) pairs, reports per-bin mean/std/count of
// the exponent, and fits a trend to the occupied bin means: exponent =
// slope*ln(factor) + b for log-binned factors, linear in the factor for
// MeanReturn. Throws InsufficientDataError when no bin reaches the
// minimum occupancy.
FactorCurve bin_and_aggregate(
    std::span<const std::pair<double, double>> factor_exponent,
    FactorKind kind, const BinningOptions& opt = {});

struct DeltaGammaRegression {
  double q = 0.0;
  double m = 0.0;
  double slope = 0.0;
  double intercept = 0.0;
  double residual_rms = 0.0;
  std::size_t n_points = 0;
};

// OLS of delta against gamma over dually valid pairs. Throws
// InsufficientDataError for fewer than 10 pairs or a constant regressor.
DeltaGammaRegression regress_delta_gamma(
    std::span<const std::pair<double, double>> gamma_delta, double q, double m);

}  // namespace vri
