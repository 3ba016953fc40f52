#include "vri/config.hpp"

#include <sstream>
#include <stdexcept>

#include "vri/io.hpp"
#include "vri/scaling.hpp"

namespace vri {
namespace {

std::vector<double> parse_list(const std::string& value) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto v = io::parse_double(item);
    if (!v) throw std::invalid_argument("config: bad number in list: " + item);
    out.push_back(*v);
  }
  return out;
}

double parse_num(const std::string& key, const std::string& value) {
  const auto v = io::parse_double(value);
  if (!v) throw std::invalid_argument("config: bad number for " + key + ": " + value);
  return *v;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "on" || value == "1") return true;
  if (value == "false" || value == "off" || value == "0") return false;
  throw std::invalid_argument("config: bad bool for " + key + ": " + value);
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

Config Config::load(std::istream& in) {
  Config cfg;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config: expected key = value, got: " + line);
    }
    cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

void Config::set(const std::string& key, const std::string& value) {
  if (key == "input") input = value;
  else if (key == "input_kind") input_kind = value;
  else if (key == "calendar") calendar = value;
  else if (key == "meta") meta = value;
  else if (key == "min_daily_trades") min_daily_trades = static_cast<std::int64_t>(parse_num(key, value));
  else if (key == "synth_kind") synth_kind = value;
  else if (key == "synth_alpha") synth_alpha = parse_num(key, value);
  else if (key == "synth_length") synth_length = static_cast<std::uint64_t>(parse_num(key, value));
  else if (key == "synth_count") synth_count = static_cast<std::uint64_t>(parse_num(key, value));
  else if (key == "seed") seed = static_cast<std::uint64_t>(parse_num(key, value));
  else if (key == "q_grid") q_grid = parse_list(value);
  else if (key == "x_min") x_min = parse_num(key, value);
  else if (key == "bins_per_decade") bins_per_decade = static_cast<int>(parse_num(key, value));
  else if (key == "min_intervals") min_intervals = static_cast<std::uint64_t>(parse_num(key, value));
  else if (key == "se_rms_max") se_rms_max = parse_num(key, value);
  else if (key == "se_fit_min_count") se_fit_min_count = static_cast<std::uint64_t>(parse_num(key, value));
  else if (key == "gamma_lo") gamma_lo = parse_num(key, value);
  else if (key == "gamma_hi") gamma_hi = parse_num(key, value);
  else if (key == "m_set") m_set = parse_list(value);
  else if (key == "delta_rms_max") delta_rms_max = parse_num(key, value);
  else if (key == "delta_range_low") delta_range_low = parse_num(key, value);
  else if (key == "delta_range_high") delta_range_high = parse_num(key, value);
  else if (key == "dfa") dfa = parse_bool(key, value);
  else if (key == "dfa_order") dfa_order = static_cast<int>(parse_num(key, value));
  else if (key == "dfa_fit_min_scale") dfa_fit_min_scale = static_cast<std::uint64_t>(parse_num(key, value));
  else if (key == "dfa_fit_max_scale") dfa_fit_max_scale = static_cast<std::uint64_t>(parse_num(key, value));
  else if (key == "factor_log_bins") factor_log_bins = static_cast<int>(parse_num(key, value));
  else if (key == "factor_linear_bins") factor_linear_bins = static_cast<int>(parse_num(key, value));
  else if (key == "factor_min_occupancy") factor_min_occupancy = static_cast<std::uint64_t>(parse_num(key, value));
  else if (key == "regression_q") regression_q = parse_list(value);
  else if (key == "regression_m") regression_m = parse_list(value);
  else if (key == "workers") workers = static_cast<int>(parse_num(key, value));
  else if (key == "simd") simd = value;
  else if (key == "store_pdfs") store_pdfs = value;
  else if (key == "export_volatility") export_volatility = value;
  else if (key == "export_intervals") export_intervals = value;
  else if (key == "out") out = value;
  else throw std::invalid_argument("config: unknown key: " + key);
}

std::vector<double> Config::effective_q_grid() const {
  return q_grid.empty() ? default_q_grid() : q_grid;
}

nlohmann::json Config::snapshot() const {
  nlohmann::json j;
  j["input"] = input;
  j["input_kind"] = input_kind;
  j["calendar"] = calendar;
  j["meta"] = meta;
  j["min_daily_trades"] = min_daily_trades;
  j["synth_kind"] = synth_kind;
  j["synth_alpha"] = synth_alpha;
  j["synth_length"] = synth_length;
  j["synth_count"] = synth_count;
  j["seed"] = seed;
  j["q_grid"] = effective_q_grid();
  j["x_min"] = x_min;
  j["bins_per_decade"] = bins_per_decade;
  j["min_intervals"] = min_intervals;
  j["se_rms_max"] = se_rms_max;
  j["se_fit_min_count"] = se_fit_min_count;
  j["gamma_lo"] = gamma_lo;
  j["gamma_hi"] = gamma_hi;
  j["m_set"] = m_set;
  j["delta_rms_max"] = delta_rms_max;
  j["delta_range_low"] = delta_range_low;
  j["delta_range_high"] = delta_range_high;
  j["dfa"] = dfa;
  j["dfa_order"] = dfa_order;
  j["dfa_fit_min_scale"] = dfa_fit_min_scale;
  j["dfa_fit_max_scale"] = dfa_fit_max_scale;
  j["factor_log_bins"] = factor_log_bins;
  j["factor_linear_bins"] = factor_linear_bins;
  j["factor_min_occupancy"] = factor_min_occupancy;
  j["regression_q"] = regression_q;
  j["regression_m"] = regression_m;
  j["simd"] = simd;
  j["store_pdfs"] = store_pdfs;
  j["export_volatility"] = export_volatility;
  j["export_intervals"] = export_intervals;
  j["normalization_order"] = "pattern_then_global_std";
  return j;
}

}  // namespace vri
