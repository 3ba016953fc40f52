#include "vri/pipeline.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

#include "vri/dfa.hpp"
#include "vri/factors.hpp"
#include "vri/ingest.hpp"
#include "vri/intervals.hpp"
#include "vri/io.hpp"
#include "vri/kernels.hpp"
#include "vri/scaling.hpp"
#include "vri/synth.hpp"
#include "vri/volatility.hpp"

namespace vri {
namespace {

using nlohmann::json;

struct SymbolInput {
  std::string symbol;
  std::vector<double> volatility;
  std::optional<MinuteSeries> minute;  // present for tick/minute input
  std::optional<StockMeta> meta;
  bool degenerate = false;
  bool store_pdf = false;
};

struct StockResult {
  std::string symbol;
  std::optional<StockFactors> factors;
  std::vector<SeFitResult> gamma_by_q;
  std::vector<MomentScalingResult> delta_by_m;
  std::vector<std::pair<double, ScaledPdf>> pdfs;
  std::optional<DfaResult> dfa_result;
};

[[noreturn]] void stage_fail(const std::string& stage, const std::string& what) {
  throw std::runtime_error("stage " + stage + ": " + what);
}

std::vector<std::string> input_files(const std::string& input) {
  namespace fs = std::filesystem;
  if (!fs::exists(input)) stage_fail("ingest", "input not found: " + input);
  if (fs::is_directory(input)) {
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(input)) {
      if (entry.is_regular_file() && entry.path().extension() == ".csv") {
        files.push_back(entry.path().string());
      }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) stage_fail("ingest", "no .csv files in " + input);
    return files;
  }
  return {input};
}

std::string detect_kind(const std::string& path) {
  std::ifstream in(path);
  std::string header;
  while (std::getline(in, header)) {
    if (!header.empty() && header != "\r") break;
  }
  const auto fields = io::split_csv(header);
  if (fields.size() == 4 && fields[0] == "symbol" && fields[1] == "timestamp") {
    return "ticks";
  }
  if (fields.size() == 4 && fields[0] == "symbol" && fields[1] == "date") {
    return "minute";
  }
  if (fields.size() == 3 && fields[0] == "symbol" &&
      fields[1] == "global_minute_index") {
    return "volatility";
  }
  stage_fail("ingest", "cannot detect input kind from header of " + path);
}

std::map<std::string, StockMeta> load_meta(const Config& cfg) {
  std::map<std::string, StockMeta> meta;
  if (cfg.meta.empty()) return meta;
  std::ifstream in(cfg.meta);
  if (!in) stage_fail("factors", "cannot open metadata: " + cfg.meta);
  for (auto& m : read_meta_csv(in)) {
    meta[m.symbol] = std::move(m);
  }
  return meta;
}

std::vector<SymbolInput> minute_inputs(std::vector<MinuteSeries> series,
                                       const std::map<std::string, StockMeta>& meta) {
  std::vector<SymbolInput> inputs;
  for (auto& s : series) {
    SymbolInput in;
    in.symbol = s.symbol;
    if (const auto it = meta.find(s.symbol); it != meta.end()) {
      in.meta = it->second;
    }
    try {
      const PerDayReturns returns = log_returns(s);
      const IntradayPattern pattern = intraday_pattern(returns);
      VolatilitySeries vol = normalize_volatility(returns, pattern);
      in.volatility = std::move(vol.values);
    } catch (const DegenerateSeriesError&) {
      in.degenerate = true;
    } catch (const std::invalid_argument&) {
      in.degenerate = true;
    }
    in.minute = std::move(s);
    inputs.push_back(std::move(in));
  }
  return inputs;
}

std::vector<SymbolInput> load_inputs(const Config& cfg) {
  const std::map<std::string, StockMeta> meta = load_meta(cfg);

  std::string kind = cfg.input_kind;
  if (kind == "auto") {
    kind = cfg.input.empty() ? "synth" : detect_kind(input_files(cfg.input).front());
  }

  if (kind == "synth") {
    if (cfg.synth_count == 0) stage_fail("synth", "synth_count must be >= 1");
    std::vector<SymbolInput> inputs;
    for (std::uint64_t i = 0; i < cfg.synth_count; ++i) {
      SymbolInput in;
      char name[32];
      std::snprintf(name, sizeof(name), "SYN%03llu",
                    static_cast<unsigned long long>(i));
      in.symbol = name;
      SynthSpec spec;
      spec.length = cfg.synth_length;
      spec.alpha_target = cfg.synth_alpha;
      spec.seed = cfg.seed + i;
      spec.kind = cfg.synth_kind == "white" ? SynthKind::WhiteNoise
                                            : SynthKind::CorrelatedGaussian;
      try {
        in.volatility = generate_correlated(spec);
      } catch (const std::exception& e) {
        stage_fail("synth", e.what());
      }
      inputs.push_back(std::move(in));
    }
    return inputs;
  }

  const std::vector<std::string> files = input_files(cfg.input);
  if (kind == "volatility") {
    std::vector<SymbolInput> inputs;
    for (const std::string& path : files) {
      std::ifstream in(path);
      try {
        for (auto& vol : read_volatility_csv(in)) {
          SymbolInput si;
          si.symbol = vol.symbol;
          si.volatility = std::move(vol.values);
          inputs.push_back(std::move(si));
        }
      } catch (const std::exception& e) {
        stage_fail("ingest", std::string(e.what()) + " in " + path);
      }
    }
    return inputs;
  }

  if (kind == "minute") {
    std::vector<MinuteSeries> series;
    for (const std::string& path : files) {
      std::ifstream in(path);
      try {
        for (auto& s : read_minute_csv(in)) series.push_back(std::move(s));
      } catch (const std::exception& e) {
        stage_fail("ingest", std::string(e.what()) + " in " + path);
      }
    }
    return minute_inputs(std::move(series), meta);
  }

  if (kind == "ticks") {
    std::vector<TickRecord> ticks;
    for (const std::string& path : files) {
      std::ifstream in(path);
      try {
        ParsedTicks parsed = parse_ticks(in);
        if (parsed.malformed_rows > 0) {
          std::fprintf(stderr, "ingest: %zu of %zu rows malformed in %s\n",
                       parsed.malformed_rows, parsed.total_rows, path.c_str());
        }
        ticks.insert(ticks.end(), parsed.ticks.begin(), parsed.ticks.end());
      } catch (const std::exception& e) {
        stage_fail("ingest", std::string(e.what()) + " in " + path);
      }
    }
    std::stable_sort(ticks.begin(), ticks.end(),
                     [](const TickRecord& a, const TickRecord& b) {
                       if (a.symbol != b.symbol) return a.symbol < b.symbol;
                       return a.timestamp_ms < b.timestamp_ms;
                     });
    TradingCalendar calendar;
    if (!cfg.calendar.empty()) {
      std::ifstream in(cfg.calendar);
      if (!in) stage_fail("ingest", "cannot open calendar: " + cfg.calendar);
      calendar = TradingCalendar::parse(in);
    } else {
      calendar = TradingCalendar::infer_from_ticks(ticks);
    }

    std::vector<MinuteSeries> series;
    for (std::size_t i = 0; i < ticks.size();) {
      std::size_t j = i;
      while (j < ticks.size() && ticks[j].symbol == ticks[i].symbol) ++j;
      MinuteSeries s = build_minute_series(
          std::span<const TickRecord>(ticks.data() + i, j - i), calendar);
      if (s.n_days() > 0) series.push_back(std::move(s));
      i = j;
    }
    series = filter_active_stocks(std::move(series), cfg.min_daily_trades);
    return minute_inputs(std::move(series), meta);
  }

  stage_fail("ingest", "unknown input_kind: " + kind);
}

GammaCurveOptions curve_options(const Config& cfg) {
  GammaCurveOptions opt;
  opt.q_grid = cfg.effective_q_grid();
  opt.fit.x_min = cfg.x_min;
  opt.fit.gamma_lo = cfg.gamma_lo;
  opt.fit.gamma_hi = cfg.gamma_hi;
  opt.fit.rms_max = cfg.se_rms_max;
  opt.fit.min_count = cfg.se_fit_min_count;
  opt.bins_per_decade = cfg.bins_per_decade;
  opt.min_intervals = cfg.min_intervals;
  return opt;
}

StockResult process_symbol(const SymbolInput& in, const Config& cfg) {
  StockResult r;
  r.symbol = in.symbol;
  const GammaCurveOptions copt = curve_options(cfg);
  const std::vector<double>& grid = copt.q_grid;

  if (in.minute && in.minute->n_days() >= 2) {
    r.factors = compute_factors(daily_series(*in.minute), *in.minute, in.meta);
  }

  if (in.degenerate || in.volatility.empty()) {
    for (const double q : grid) {
      SeFitResult res;
      res.symbol = in.symbol;
      res.q = q;
      r.gamma_by_q.push_back(res);
    }
    for (const double m : cfg.m_set) {
      MomentScalingResult ms;
      ms.symbol = in.symbol;
      ms.m = m;
      r.delta_by_m.push_back(ms);
    }
    return r;
  }

  std::vector<std::vector<MomentPoint>> points_by_m(cfg.m_set.size());
  for (const double q : grid) {
    IntervalSet iset = extract_intervals(in.volatility, q);
    iset.symbol = in.symbol;
    r.gamma_by_q.push_back(se_fit_for_intervals(iset, copt));
    if (!iset.intervals.empty()) {
      for (std::size_t mi = 0; mi < cfg.m_set.size(); ++mi) {
        points_by_m[mi].push_back(
            MomentPoint{q, iset.mean_interval,
                        interval_moment(iset, cfg.m_set[mi])});
      }
    }
    if (in.store_pdf && iset.sufficient &&
        iset.intervals.size() >= cfg.min_intervals) {
      r.pdfs.emplace_back(q, scaled_pdf(iset, cfg.bins_per_decade,
                                        cfg.min_intervals));
    }
  }

  DeltaFitOptions dopt;
  dopt.range_low = cfg.delta_range_low;
  dopt.range_high = cfg.delta_range_high;
  dopt.rms_max = cfg.delta_rms_max;
  for (std::size_t mi = 0; mi < cfg.m_set.size(); ++mi) {
    try {
      MomentScalingResult ms =
          fit_delta(points_by_m[mi], cfg.m_set[mi], dopt);
      ms.symbol = in.symbol;
      r.delta_by_m.push_back(std::move(ms));
    } catch (const InsufficientDataError& e) {
      MomentScalingResult ms;
      ms.symbol = in.symbol;
      ms.m = cfg.m_set[mi];
      ms.points = points_by_m[mi];
      ms.n_admitted = e.count;
      r.delta_by_m.push_back(std::move(ms));
    }
  }

  if (cfg.dfa) {
    try {
      const auto scales = default_scales(in.volatility.size());
      r.dfa_result = dfa(in.volatility, scales, cfg.dfa_order,
                         cfg.dfa_fit_min_scale, cfg.dfa_fit_max_scale);
    } catch (const std::invalid_argument&) {
      // series too short for the default scale grid; reported as null
    }
  }
  return r;
}

json fit_to_json(const SeFitResult& f) {
  json j;
  j["q"] = f.q;
  j["status"] = to_string(f.status);
  j["mean_interval"] = f.mean_interval;
  j["n_intervals"] = f.n_intervals;
  if (f.status == FitStatus::Insufficient) {
    j["gamma"] = nullptr;
    j["a"] = nullptr;
    j["c"] = nullptr;
    j["rms"] = nullptr;
  } else {
    j["gamma"] = f.gamma;
    j["a"] = f.a;
    j["c"] = f.c;
    j["rms"] = f.rms_error;
  }
  return j;
}

json delta_to_json(const MomentScalingResult& d) {
  json j;
  j["m"] = d.m;
  j["status"] = to_string(d.status);
  j["n_admitted"] = d.n_admitted;
  if (d.status == FitStatus::Insufficient) {
    j["delta"] = nullptr;
    j["rms"] = nullptr;
  } else {
    j["delta"] = d.delta;
    j["rms"] = d.rms_error;
  }
  return j;
}

json stock_to_json(const StockResult& r) {
  json j;
  j["symbol"] = r.symbol;
  if (r.factors) {
    json f;
    f["capitalization"] = r.factors->capitalization
                              ? json(*r.factors->capitalization)
                              : json(nullptr);
    f["risk"] = r.factors->risk;
    f["mean_return"] = r.factors->mean_return;
    f["trades_per_day"] = r.factors->trades_per_day;
    j["factors"] = f;
  } else {
    j["factors"] = nullptr;
  }
  j["gamma_by_q"] = json::array();
  for (const auto& f : r.gamma_by_q) j["gamma_by_q"].push_back(fit_to_json(f));
  j["delta_by_m"] = json::array();
  for (const auto& d : r.delta_by_m) j["delta_by_m"].push_back(delta_to_json(d));

  j["moment_points"] = json::array();
  for (const auto& d : r.delta_by_m) {
    json mp;
    mp["m"] = d.m;
    json pts = json::array();
    for (const MomentPoint& p : d.points) {
      pts.push_back({p.q, p.mean_interval, p.mu});
    }
    mp["points"] = pts;
    j["moment_points"].push_back(mp);
  }

  if (r.dfa_result) {
    json d;
    d["alpha"] = r.dfa_result->alpha;
    d["order"] = r.dfa_result->detrend_order;
    d["fit_min_scale"] = r.dfa_result->fit_min_scale;
    d["fit_max_scale"] = r.dfa_result->fit_max_scale;
    d["scales"] = r.dfa_result->scales;
    d["fluctuations"] = r.dfa_result->fluctuations;
    d["gamma_from_alpha"] = gamma_from_alpha(r.dfa_result->alpha);
    j["dfa"] = d;
  } else {
    j["dfa"] = nullptr;
  }

  j["pdfs"] = json::array();
  for (const auto& [q, pdf] : r.pdfs) {
    json p;
    p["q"] = q;
    p["x"] = pdf.bin_centers;
    p["density"] = pdf.densities;
    p["width"] = pdf.widths;
    p["count"] = pdf.bin_counts;
    j["pdfs"].push_back(p);
  }
  return j;
}

struct TallyCounter {
  std::size_t attempted = 0, valid = 0, outlier = 0, insufficient = 0;

  void add(FitStatus s) {
    ++attempted;
    switch (s) {
      case FitStatus::Valid: ++valid; break;
      case FitStatus::Outlier: ++outlier; break;
      case FitStatus::Insufficient: ++insufficient; break;
    }
  }

  json to_json() const {
    json j;
    j["attempted"] = attempted;
    j["valid"] = valid;
    j["outlier"] = outlier;
    j["insufficient"] = insufficient;
    const double n = attempted > 0 ? static_cast<double>(attempted) : 1.0;
    j["outlier_fraction"] = static_cast<double>(outlier) / n;
    j["insufficient_fraction"] = static_cast<double>(insufficient) / n;
    return j;
  }
};

json aggregate_gamma_vs_q(const std::vector<StockResult>& stocks,
                          const std::vector<double>& grid) {
  json rows = json::array();
  for (std::size_t qi = 0; qi < grid.size(); ++qi) {
    double sum = 0.0, sum_sq = 0.0, sum_fitted = 0.0;
    std::size_t count = 0, count_fitted = 0;
    for (const StockResult& s : stocks) {
      const SeFitResult& f = s.gamma_by_q[qi];
      if (f.status == FitStatus::Valid) {
        sum += f.gamma;
        sum_sq += f.gamma * f.gamma;
        ++count;
      }
      if (f.status != FitStatus::Insufficient) {
        sum_fitted += f.gamma;
        ++count_fitted;
      }
    }
    json row;
    row["q"] = grid[qi];
    row["count"] = count;
    if (count > 0) {
      const double mean = sum / static_cast<double>(count);
      row["mean"] = mean;
      row["std"] = std::sqrt(
          std::max(0.0, sum_sq / static_cast<double>(count) - mean * mean));
    } else {
      row["mean"] = nullptr;
      row["std"] = nullptr;
    }
    // every converged fit, outliers included; useful when the 10% rule
    // flags most of a small synthetic batch
    row["count_fitted"] = count_fitted;
    row["mean_fitted"] = count_fitted > 0
                             ? json(sum_fitted / static_cast<double>(count_fitted))
                             : json(nullptr);
    rows.push_back(row);
  }
  return rows;
}

double factor_value(const StockFactors& f, FactorKind kind, bool& ok) {
  ok = true;
  switch (kind) {
    case FactorKind::Capitalization:
      if (!f.capitalization) {
        ok = false;
        return 0.0;
      }
      return *f.capitalization;
    case FactorKind::Risk:
      return f.risk;
    case FactorKind::TradesPerDay:
      return f.trades_per_day;
    case FactorKind::MeanReturn:
      return f.mean_return;
  }
  ok = false;
  return 0.0;
}

json curve_to_json(const FactorCurve& curve) {
  json j;
  j["factor"] = curve.factor;
  j["trend"] = curve.trend == TrendKind::Logarithmic ? "logarithmic" : "linear";
  j["slope"] = curve.slope;
  j["intercept"] = curve.intercept;
  j["n_stocks"] = curve.n_stocks;
  j["bins"] = json::array();
  for (const FactorBin& b : curve.bins) {
    json bin;
    bin["center"] = b.center;
    bin["mean"] = b.mean;
    bin["std"] = b.stddev;
    bin["count"] = b.count;
    j["bins"].push_back(bin);
  }
  return j;
}

}  // namespace

AnalysisOutcome run_pipeline(const Config& cfg) {
  try {
    kernels::force(cfg.simd);
  } catch (const std::invalid_argument& e) {
    stage_fail("setup", e.what());
  }

  std::vector<SymbolInput> inputs = load_inputs(cfg);
  if (inputs.empty()) stage_fail("ingest", "no symbols in input");
  if (cfg.store_pdfs == "all") {
    for (auto& in : inputs) in.store_pdf = true;
  } else if (cfg.store_pdfs == "first") {
    inputs.front().store_pdf = true;
  } else if (cfg.store_pdfs != "none") {
    stage_fail("setup", "store_pdfs must be first, all or none");
  }

  if (!cfg.export_volatility.empty()) {
    std::ostringstream ss;
    ss << "symbol,global_minute_index,volatility\n";
    for (const SymbolInput& in : inputs) {
      for (std::size_t i = 0; i < in.volatility.size(); ++i) {
        ss << in.symbol << ',' << i << ','
           << io::format_double(in.volatility[i]) << '\n';
      }
    }
    io::write_file_atomic(cfg.export_volatility, ss.str());
  }
  if (!cfg.export_intervals.empty()) {
    std::ostringstream ss;
    ss << "symbol,q,tau\n";
    for (const SymbolInput& in : inputs) {
      if (in.degenerate) continue;
      for (const double q : cfg.effective_q_grid()) {
        const IntervalSet iset = extract_intervals(in.volatility, q);
        for (const double tau : iset.intervals) {
          ss << in.symbol << ',' << io::format_double(q) << ','
             << io::format_double(tau) << '\n';
        }
      }
    }
    io::write_file_atomic(cfg.export_intervals, ss.str());
  }

  // Per-symbol fan-out; results land in input order so the report does
  // not depend on scheduling.
  std::vector<StockResult> stocks(inputs.size());
  {
    int workers = cfg.workers > 0
                      ? cfg.workers
                      : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::max(1, std::min<int>(workers, static_cast<int>(inputs.size())));
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    const auto work = [&] {
      for (std::size_t i; (i = next.fetch_add(1)) < inputs.size();) {
        try {
          stocks[i] = process_symbol(inputs[i], cfg);
        } catch (...) {
          const std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    };
    if (workers == 1) {
      work();
    } else {
      std::vector<std::thread> pool;
      for (int w = 0; w < workers; ++w) pool.emplace_back(work);
      for (auto& t : pool) t.join();
    }
    if (error) std::rethrow_exception(error);
  }

  const std::vector<double> grid = cfg.effective_q_grid();

  TallyCounter se_tally, delta_tally;
  for (const StockResult& s : stocks) {
    for (const auto& f : s.gamma_by_q) se_tally.add(f.status);
    for (const auto& d : s.delta_by_m) delta_tally.add(d.status);
  }

  json aggregates;
  aggregates["gamma_vs_q"] = aggregate_gamma_vs_q(stocks, grid);

  const bool have_factors = std::any_of(
      stocks.begin(), stocks.end(),
      [](const StockResult& s) { return s.factors.has_value(); });
  const std::array<FactorKind, 4> kinds = {
      FactorKind::Capitalization, FactorKind::Risk, FactorKind::TradesPerDay,
      FactorKind::MeanReturn};
  BinningOptions bopt;
  bopt.log_bins = cfg.factor_log_bins;
  bopt.linear_bins = cfg.factor_linear_bins;
  bopt.min_occupancy = cfg.factor_min_occupancy;

  aggregates["factor_curves_gamma"] = json::array();
  aggregates["factor_curves_delta"] = json::array();
  if (have_factors) {
    for (const double q : cfg.regression_q) {
      const auto qi = std::find(grid.begin(), grid.end(), q);
      if (qi == grid.end()) continue;
      const std::size_t q_index = qi - grid.begin();
      for (const FactorKind kind : kinds) {
        std::vector<std::pair<double, double>> pairs;
        for (const StockResult& s : stocks) {
          if (!s.factors) continue;
          const SeFitResult& f = s.gamma_by_q[q_index];
          if (f.status != FitStatus::Valid) continue;
          bool ok = false;
          const double v = factor_value(*s.factors, kind, ok);
          if (ok) pairs.emplace_back(v, f.gamma);
        }
        try {
          json curve = curve_to_json(bin_and_aggregate(pairs, kind, bopt));
          curve["q"] = q;
          aggregates["factor_curves_gamma"].push_back(curve);
        } catch (const InsufficientDataError&) {
        }
      }
    }
    for (std::size_t mi = 0; mi < cfg.m_set.size(); ++mi) {
      for (const FactorKind kind : kinds) {
        std::vector<std::pair<double, double>> pairs;
        for (const StockResult& s : stocks) {
          if (!s.factors) continue;
          const MomentScalingResult& d = s.delta_by_m[mi];
          if (d.status != FitStatus::Valid) continue;
          bool ok = false;
          const double v = factor_value(*s.factors, kind, ok);
          if (ok) pairs.emplace_back(v, d.delta);
        }
        try {
          json curve = curve_to_json(bin_and_aggregate(pairs, kind, bopt));
          curve["m"] = cfg.m_set[mi];
          aggregates["factor_curves_delta"].push_back(curve);
        } catch (const InsufficientDataError&) {
        }
      }
    }
  }

  aggregates["delta_gamma"] = json::array();
  for (const double q : cfg.regression_q) {
    const auto qi = std::find(grid.begin(), grid.end(), q);
    if (qi == grid.end()) continue;
    const std::size_t q_index = qi - grid.begin();
    for (const double m : cfg.regression_m) {
      const auto mi = std::find(cfg.m_set.begin(), cfg.m_set.end(), m);
      if (mi == cfg.m_set.end()) continue;
      const std::size_t m_index = mi - cfg.m_set.begin();
      std::vector<std::pair<double, double>> pairs;
      for (const StockResult& s : stocks) {
        const SeFitResult& f = s.gamma_by_q[q_index];
        const MomentScalingResult& d = s.delta_by_m[m_index];
        if (f.status == FitStatus::Valid && d.status == FitStatus::Valid) {
          pairs.emplace_back(f.gamma, d.delta);
        }
      }
      try {
        const DeltaGammaRegression reg = regress_delta_gamma(pairs, q, m);
        json r;
        r["q"] = reg.q;
        r["m"] = reg.m;
        r["slope"] = reg.slope;
        r["intercept"] = reg.intercept;
        r["residual_rms"] = reg.residual_rms;
        r["n_points"] = reg.n_points;
        aggregates["delta_gamma"].push_back(r);
      } catch (const InsufficientDataError&) {
      }
    }
  }

  json meta;
  meta["code_version"] = kCodeVersion;
  meta["rng"] = "xoshiro256++ / Box-Muller";
  meta["simd"] = kernels::active().name;
  meta["config"] = cfg.snapshot();
  {
    json anchors;
    anchors["gamma_vs_q"] = {{"q1", 0.49}, {"q3", 0.28}, {"plateau_q3_to_q6", 0.26}};
    anchors["delta_gamma_slope_m2"] = {
        {"q2", -0.63}, {"q3", -0.75}, {"q4", -0.74}, {"q5", -0.62}};
    anchors["se_outlier_fraction"] = 0.038;
    anchors["delta_outlier_fraction"] = 0.047;
    meta["reference_anchors"] = anchors;
  }

  json report;
  report["schema_version"] = kReportSchemaVersion;
  report["meta"] = meta;
  report["stocks"] = json::array();
  for (const StockResult& s : stocks) {
    report["stocks"].push_back(stock_to_json(s));
  }
  report["aggregates"] = aggregates;
  json tallies;
  tallies["se"] = se_tally.to_json();
  tallies["delta"] = delta_tally.to_json();
  report["tallies"] = tallies;

  AnalysisOutcome outcome;
  outcome.report = std::move(report);
  outcome.soft_failures = se_tally.outlier + se_tally.insufficient +
                          delta_tally.outlier + delta_tally.insufficient;
  return outcome;
}

std::string serialize_report(const nlohmann::json& report) {
  return report.dump(2) + "\n";
}

namespace {

void require_keys(const json& obj, const std::set<std::string>& allowed,
                  const std::string& where) {
  if (!obj.is_object()) {
    throw std::runtime_error("report: " + where + " is not an object");
  }
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) {
      throw std::runtime_error("report: unknown field '" + key + "' in " + where);
    }
  }
}

}  // namespace

void validate_report(const nlohmann::json& report) {
  require_keys(report, {"schema_version", "meta", "stocks", "aggregates", "tallies"},
               "top level");
  if (!report.contains("schema_version") ||
      report["schema_version"] != kReportSchemaVersion) {
    throw std::runtime_error("report: unsupported schema_version");
  }
  require_keys(report.at("meta"),
               {"code_version", "config", "rng", "simd", "reference_anchors"},
               "meta");
  for (const json& s : report.at("stocks")) {
    require_keys(s, {"symbol", "factors", "gamma_by_q", "delta_by_m",
                     "moment_points", "dfa", "pdfs"},
                 "stock record");
    for (const json& f : s.at("gamma_by_q")) {
      require_keys(f, {"q", "status", "gamma", "a", "c", "rms",
                       "mean_interval", "n_intervals"},
                   "gamma record");
    }
    for (const json& d : s.at("delta_by_m")) {
      require_keys(d, {"m", "status", "delta", "rms", "n_admitted"},
                   "delta record");
    }
  }
  require_keys(report.at("aggregates"),
               {"gamma_vs_q", "factor_curves_gamma", "factor_curves_delta",
                "delta_gamma"},
               "aggregates");
  require_keys(report.at("tallies"), {"se", "delta"}, "tallies");
  for (const char* kind : {"se", "delta"}) {
    require_keys(report.at("tallies").at(kind),
                 {"attempted", "valid", "outlier", "insufficient",
                  "outlier_fraction", "insufficient_fraction"},
                 std::string("tallies.") + kind);
  }
}

namespace {

std::string csv_num(const json& v) {
  if (v.is_null()) return "";
  if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
  return io::format_double(v.get<double>());
}

void emit_fig1(const json& report, std::ostream& out) {
  bool any = false;
  out << "symbol,q,x,density,count\n";
  for (const json& s : report.at("stocks")) {
    for (const json& pdf : s.at("pdfs")) {
      const auto& xs = pdf.at("x");
      const auto& ds = pdf.at("density");
      const auto& cs = pdf.at("count");
      for (std::size_t i = 0; i < xs.size(); ++i) {
        out << s.at("symbol").get<std::string>() << ','
            << csv_num(pdf.at("q")) << ',' << csv_num(xs[i]) << ','
            << csv_num(ds[i]) << ',' << cs[i].get<std::uint64_t>() << '\n';
        any = true;
      }
    }
  }
  if (!any) {
    throw std::runtime_error(
        "figure 1: report has no stored pdfs (rerun analyze with store_pdfs=first or all)");
  }
}

void emit_fig2(const json& report, std::ostream& out) {
  out << "q,mean_gamma,std_gamma,count\n";
  for (const json& row : report.at("aggregates").at("gamma_vs_q")) {
    out << csv_num(row.at("q")) << ',' << csv_num(row.at("mean")) << ','
        << csv_num(row.at("std")) << ',' << row.at("count").get<std::uint64_t>()
        << '\n';
  }
}

void emit_factor_curves(const json& report, const char* section,
                        const char* group_key, std::ostream& out) {
  const json& curves = report.at("aggregates").at(section);
  if (curves.empty()) {
    throw std::runtime_error(std::string("figure: report has no ") + section +
                             " (input had no factor metadata)");
  }
  out << "factor," << group_key << ",trend,slope,intercept,bin_center,mean,std,count\n";
  for (const json& curve : curves) {
    for (const json& bin : curve.at("bins")) {
      out << curve.at("factor").get<std::string>() << ','
          << csv_num(curve.at(group_key)) << ','
          << curve.at("trend").get<std::string>() << ','
          << csv_num(curve.at("slope")) << ',' << csv_num(curve.at("intercept"))
          << ',' << csv_num(bin.at("center")) << ',' << csv_num(bin.at("mean"))
          << ',' << csv_num(bin.at("std")) << ','
          << bin.at("count").get<std::uint64_t>() << '\n';
    }
  }
}

void emit_fig4(const json& report, std::ostream& out) {
  out << "symbol,m,q,mean_interval,mu\n";
  for (const json& s : report.at("stocks")) {
    for (const json& mp : s.at("moment_points")) {
      for (const json& p : mp.at("points")) {
        out << s.at("symbol").get<std::string>() << ',' << csv_num(mp.at("m"))
            << ',' << csv_num(p[0]) << ',' << csv_num(p[1]) << ','
            << csv_num(p[2]) << '\n';
      }
    }
  }
}

void emit_fig6(const json& report, std::ostream& out) {
  const json& regs = report.at("aggregates").at("delta_gamma");
  out << "q,m,symbol,gamma,delta,fit_slope,fit_intercept\n";
  const json& config = report.at("meta").at("config");
  const std::vector<double> grid = config.at("q_grid").get<std::vector<double>>();
  const std::vector<double> m_set = config.at("m_set").get<std::vector<double>>();
  for (const double q : config.at("regression_q").get<std::vector<double>>()) {
    const auto qit = std::find(grid.begin(), grid.end(), q);
    if (qit == grid.end()) continue;
    const std::size_t qi = qit - grid.begin();
    for (const double m : config.at("regression_m").get<std::vector<double>>()) {
      const auto mit = std::find(m_set.begin(), m_set.end(), m);
      if (mit == m_set.end()) continue;
      const std::size_t mi = mit - m_set.begin();
      std::string slope, intercept;
      for (const json& reg : regs) {
        if (reg.at("q") == q && reg.at("m") == m) {
          slope = csv_num(reg.at("slope"));
          intercept = csv_num(reg.at("intercept"));
        }
      }
      for (const json& s : report.at("stocks")) {
        const json& f = s.at("gamma_by_q")[qi];
        const json& d = s.at("delta_by_m")[mi];
        if (f.at("status") == "valid" && d.at("status") == "valid") {
          out << csv_num(json(q)) << ',' << csv_num(json(m)) << ','
              << s.at("symbol").get<std::string>() << ','
              << csv_num(f.at("gamma")) << ',' << csv_num(d.at("delta")) << ','
              << slope << ',' << intercept << '\n';
        }
      }
    }
  }
}

}  // namespace

void emit_figure_table(const nlohmann::json& report, int fig,
                       std::ostream& out) {
  validate_report(report);
  switch (fig) {
    case 1: emit_fig1(report, out); return;
    case 2: emit_fig2(report, out); return;
    case 3: emit_factor_curves(report, "factor_curves_gamma", "q", out); return;
    case 4: emit_fig4(report, out); return;
    case 5: emit_factor_curves(report, "factor_curves_delta", "m", out); return;
    case 6: emit_fig6(report, out); return;
    default:
      throw std::runtime_error("figure id must be 1..6");
  }
}

}  // namespace vri
