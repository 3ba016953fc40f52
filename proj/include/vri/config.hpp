#pragma once

#include <cstdint>
#include <istream>
#include <string>
#include <vector>

#include <json.hpp>

namespace vri {

inline constexpr const char* kCodeVersion = "vri 0.1.0";
inline constexpr int kReportSchemaVersion = 1;

// Every knob of the pipeline, loadable from a `key = value` file with
// `#` comments and overridable one key at a time. The full snapshot is
// echoed into the report so runs are self-describing.
struct Config {
  // input
  std::string input;               // CSV path or directory of CSVs
  std::string input_kind = "auto"; // auto|ticks|minute|volatility|synth
  std::string calendar;            // optional calendar CSV
  std::string meta;                // optional metadata CSV
  std::int64_t min_daily_trades = 500;

  // synthetic input (input_kind = synth)
  std::string synth_kind = "correlated";  // correlated|white
  double synth_alpha = 0.85;
  std::uint64_t synth_length = 1ull << 20;
  std::uint64_t synth_count = 8;
  std::uint64_t seed = 1;

  // interval extraction and SE fitting
  std::vector<double> q_grid;  // empty -> 1.00..6.00 step 0.25
  double x_min = 0.1;
  int bins_per_decade = 20;
  std::uint64_t min_intervals = 50;
  double se_rms_max = 0.10;
  std::uint64_t se_fit_min_count = 20;
  double gamma_lo = 0.05;
  double gamma_hi = 2.0;

  // moment multiscaling
  std::vector<double> m_set = {2.0, 4.0, 8.0, 16.0};
  double delta_rms_max = 0.22;
  double delta_range_low = 10.0;
  double delta_range_high = 100.0;

  // DFA
  bool dfa = false;
  int dfa_order = 2;
  std::uint64_t dfa_fit_min_scale = 0;  // 0 = full scale grid
  std::uint64_t dfa_fit_max_scale = 0;

  // factor aggregation
  int factor_log_bins = 12;
  int factor_linear_bins = 10;
  std::uint64_t factor_min_occupancy = 5;
  std::vector<double> regression_q = {2.0, 3.0, 4.0, 5.0};
  std::vector<double> regression_m = {2.0};

  // execution
  int workers = 1;
  std::string simd = "auto";        // auto|scalar|avx2
  std::string store_pdfs = "first"; // first|all|none

  // optional side exports (empty = off)
  std::string export_volatility;
  std::string export_intervals;

  std::string out = "report.json";

  // Parses `key = value` lines; unknown keys throw.
  static Config load(std::istream& in);
  void set(const std::string& key, const std::string& value);

  std::vector<double> effective_q_grid() const;
  nlohmann::json snapshot() const;
};

}  // namespace vri
