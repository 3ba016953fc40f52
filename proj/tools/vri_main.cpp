// Command-line frontend: ingest, synth, analyze, dfa, aggregate, figures.
// Exit codes: 0 success, 1 hard error, 2 success with soft failures
// (nonzero outlier/insufficient tallies).

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "vri/config.hpp"
#include "vri/dfa.hpp"
#include "vri/factors.hpp"
#include "vri/ingest.hpp"
#include "vri/io.hpp"
#include "vri/pipeline.hpp"
#include "vri/synth.hpp"
#include "vri/volatility.hpp"

namespace {

using nlohmann::json;

int cmd_ingest(const std::string& ticks_path, const std::string& minute_path,
               const std::string& calendar_path, long long min_daily_trades,
               const std::string& out_path) {
  std::vector<vri::MinuteSeries> series;
  if (!ticks_path.empty()) {
    std::ifstream in(ticks_path);
    if (!in) throw std::runtime_error("cannot open: " + ticks_path);
    vri::ParsedTicks parsed = vri::parse_ticks(in);
    if (parsed.malformed_rows > 0) {
      std::cerr << "ingest: " << parsed.malformed_rows << " of "
                << parsed.total_rows << " rows malformed, excluded\n";
    }
    vri::TradingCalendar calendar;
    if (!calendar_path.empty()) {
      std::ifstream cal_in(calendar_path);
      if (!cal_in) throw std::runtime_error("cannot open: " + calendar_path);
      calendar = vri::TradingCalendar::parse(cal_in);
    } else {
      calendar = vri::TradingCalendar::infer_from_ticks(parsed.ticks);
    }
    for (std::size_t i = 0; i < parsed.ticks.size();) {
      std::size_t j = i;
      while (j < parsed.ticks.size() &&
             parsed.ticks[j].symbol == parsed.ticks[i].symbol) {
        ++j;
      }
      std::vector<std::string> dropped;
      vri::MinuteSeries s = vri::build_minute_series(
          std::span<const vri::TickRecord>(parsed.ticks.data() + i, j - i),
          calendar, &dropped);
      for (const std::string& d : dropped) {
        std::cerr << "ingest: " << s.symbol << ": day " << d
                  << " has no ticks, dropped\n";
      }
      if (s.n_days() > 0) series.push_back(std::move(s));
      i = j;
    }
    series = vri::filter_active_stocks(std::move(series), min_daily_trades);
  } else {
    std::ifstream in(minute_path);
    if (!in) throw std::runtime_error("cannot open: " + minute_path);
    series = vri::read_minute_csv(in);
  }

  std::ostringstream ss;
  vri::write_minute_csv(ss, series);
  vri::io::write_file_atomic(out_path, ss.str());
  std::cout << "wrote " << series.size() << " symbols to " << out_path << "\n";
  return 0;
}

int cmd_synth(const std::string& kind, double alpha, double gamma,
              std::uint64_t length, std::uint64_t seed, std::uint64_t count,
              const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  for (std::uint64_t i = 0; i < count; ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "SYN%03llu",
                  static_cast<unsigned long long>(i));
    const std::string path =
        (std::filesystem::path(out_dir) / (std::string(name) + ".csv")).string();
    std::ostringstream ss;
    if (kind == "se") {
      const auto taus = vri::sample_se_intervals(gamma, length, seed + i);
      ss << "symbol,q,tau\n";
      for (const double tau : taus) {
        ss << name << ",0," << vri::io::format_double(tau) << '\n';
      }
    } else {
      vri::SynthSpec spec;
      spec.length = length;
      spec.alpha_target = alpha;
      spec.seed = seed + i;
      spec.kind = kind == "white" ? vri::SynthKind::WhiteNoise
                                  : vri::SynthKind::CorrelatedGaussian;
      vri::VolatilitySeries vol;
      vol.symbol = name;
      vol.values = vri::generate_correlated(spec);
      ss << "symbol,global_minute_index,volatility\n";
      for (std::size_t t = 0; t < vol.values.size(); ++t) {
        ss << name << ',' << t << ',' << vri::io::format_double(vol.values[t])
           << '\n';
      }
    }
    vri::io::write_file_atomic(path, ss.str());
  }
  std::cout << "wrote " << count << " series to " << out_dir << "\n";
  return 0;
}

int cmd_analyze(vri::Config cfg) {
  const vri::AnalysisOutcome outcome = vri::run_pipeline(cfg);
  vri::io::write_file_atomic(cfg.out, vri::serialize_report(outcome.report));
  const auto& tallies = outcome.report.at("tallies");
  std::cout << "report written to " << cfg.out << "\n"
            << "se points: " << tallies.at("se").at("valid") << " valid, "
            << tallies.at("se").at("outlier") << " outlier, "
            << tallies.at("se").at("insufficient") << " insufficient\n"
            << "delta points: " << tallies.at("delta").at("valid")
            << " valid, " << tallies.at("delta").at("outlier") << " outlier, "
            << tallies.at("delta").at("insufficient") << " insufficient\n";
  return outcome.soft_failures > 0 ? 2 : 0;
}

int cmd_dfa(const std::string& input, int order, std::size_t fit_min,
            std::size_t fit_max, const std::string& out_path) {
  std::ifstream in(input);
  if (!in) throw std::runtime_error("cannot open: " + input);
  const auto series = vri::read_volatility_csv(in);
  if (series.empty()) throw std::runtime_error("no series in " + input);
  for (const auto& s : series) {
    const auto scales = vri::default_scales(s.values.size());
    const vri::DfaResult res = vri::dfa(s.values, scales, order, fit_min, fit_max);
    const double gamma = vri::gamma_from_alpha(res.alpha);
    std::cout << s.symbol << " alpha=" << res.alpha
              << " gamma_from_alpha=" << gamma;
    if (!vri::alpha_in_correlated_range(res.alpha)) {
      std::cout << " (warning: alpha outside (0.5,1), relation not asserted)";
    }
    std::cout << "\n";
    if (!out_path.empty()) {
      std::string path = out_path;
      if (series.size() > 1) {
        const auto dot = path.rfind('.');
        path = dot == std::string::npos
                   ? path + "." + s.symbol
                   : path.substr(0, dot) + "." + s.symbol + path.substr(dot);
      }
      std::ostringstream ss;
      ss << "scale,F\n";
      for (std::size_t i = 0; i < res.scales.size(); ++i) {
        ss << res.scales[i] << ','
           << vri::io::format_double(res.fluctuations[i]) << '\n';
      }
      vri::io::write_file_atomic(path, ss.str());
    }
  }
  return 0;
}

std::string num_or_empty(const json& v) {
  if (v.is_null()) return "";
  if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
  return vri::io::format_double(v.get<double>());
}

int cmd_aggregate(const std::string& report_path, const std::string& out_dir) {
  const json report = json::parse(vri::io::read_file(report_path));
  vri::validate_report(report);
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);

  {
    std::ostringstream ss;
    ss << "symbol,q,gamma,a,c,rms,valid\n";
    for (const json& s : report.at("stocks")) {
      for (const json& f : s.at("gamma_by_q")) {
        ss << s.at("symbol").get<std::string>() << ','
           << num_or_empty(f.at("q")) << ',' << num_or_empty(f.at("gamma"))
           << ',' << num_or_empty(f.at("a")) << ',' << num_or_empty(f.at("c"))
           << ',' << num_or_empty(f.at("rms")) << ','
           << (f.at("status") == "valid" ? "1" : "0") << '\n';
      }
    }
    vri::io::write_file_atomic((dir / "gamma_fits.csv").string(), ss.str());
  }
  {
    std::ostringstream ss;
    ss << "symbol,m,delta,rms,valid\n";
    for (const json& s : report.at("stocks")) {
      for (const json& d : s.at("delta_by_m")) {
        ss << s.at("symbol").get<std::string>() << ','
           << num_or_empty(d.at("m")) << ',' << num_or_empty(d.at("delta"))
           << ',' << num_or_empty(d.at("rms")) << ','
           << (d.at("status") == "valid" ? "1" : "0") << '\n';
      }
    }
    vri::io::write_file_atomic((dir / "delta_fits.csv").string(), ss.str());
  }

  const auto write_curves = [&](const char* section, const char* tag,
                                const char* group_key) {
    for (const json& curve : report.at("aggregates").at(section)) {
      std::ostringstream ss;
      ss << "bin_center,mean,std,count\n";
      for (const json& bin : curve.at("bins")) {
        ss << num_or_empty(bin.at("center")) << ','
           << num_or_empty(bin.at("mean")) << ',' << num_or_empty(bin.at("std"))
           << ',' << bin.at("count").get<std::uint64_t>() << '\n';
      }
      std::ostringstream name;
      name << tag << '_' << curve.at("factor").get<std::string>() << '_'
           << group_key << num_or_empty(curve.at(group_key)) << ".csv";
      vri::io::write_file_atomic((dir / name.str()).string(), ss.str());
    }
  };
  write_curves("factor_curves_gamma", "gamma", "q");
  write_curves("factor_curves_delta", "delta", "m");

  json regs;
  regs["delta_gamma"] = report.at("aggregates").at("delta_gamma");
  regs["reference_anchors"] = report.at("meta").at("reference_anchors");
  vri::io::write_file_atomic((dir / "regressions.json").string(),
                             regs.dump(2) + "\n");
  std::cout << "aggregate tables written to " << out_dir << "\n";
  return 0;
}

int cmd_figures(const std::string& report_path, int fig,
                const std::string& out_path) {
  const json report = json::parse(vri::io::read_file(report_path));
  std::ostringstream ss;
  vri::emit_figure_table(report, fig, ss);
  vri::io::write_file_atomic(out_path, ss.str());
  std::cout << "figure " << fig << " table written to " << out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"volatility return-interval multiscaling toolkit"};
  app.require_subcommand(1);

  // ingest
  auto* ingest = app.add_subcommand("ingest", "resample ticks to minute bars");
  std::string ticks_path, minute_path, calendar_path;
  long long min_daily_trades = 500;
  std::string ingest_out = "minute.csv";
  ingest->add_option("--ticks", ticks_path, "tick CSV (symbol,timestamp,price,size)");
  ingest->add_option("--minute", minute_path, "minute CSV to re-canonicalize");
  ingest->add_option("--calendar", calendar_path, "calendar CSV (date,open_timestamp)");
  ingest->add_option("--min-daily-trades", min_daily_trades,
                     "drop symbols with any day below this tick count");
  ingest->add_option("--out", ingest_out, "output minute CSV");

  // synth
  auto* synth = app.add_subcommand("synth", "generate synthetic series");
  std::string synth_kind = "correlated";
  double synth_alpha = 0.85, synth_gamma = 1.0;
  std::uint64_t synth_length = 1ull << 20, synth_seed = 1, synth_count = 1;
  std::string synth_out = "synth";
  synth->add_option("--kind", synth_kind, "correlated|white|se");
  synth->add_option("--alpha", synth_alpha, "target DFA exponent");
  synth->add_option("--gamma", synth_gamma, "SE exponent for --kind se");
  synth->add_option("--length", synth_length, "series length (power of two)");
  synth->add_option("--seed", synth_seed, "base seed");
  synth->add_option("--count", synth_count, "number of series");
  synth->add_option("--out", synth_out, "output directory");

  // analyze
  auto* analyze = app.add_subcommand("analyze", "run the full pipeline");
  std::string config_path;
  std::vector<std::string> overrides;
  std::string an_input, an_kind, an_calendar, an_meta, an_out;
  int an_workers = 0;
  analyze->add_option("--config", config_path, "key = value config file");
  analyze->add_option("--set", overrides, "override config key=value")
      ->take_all();
  analyze->add_option("--input", an_input, "input CSV file or directory");
  analyze->add_option("--input-kind", an_kind, "ticks|minute|volatility|synth");
  analyze->add_option("--calendar", an_calendar, "calendar CSV");
  analyze->add_option("--meta", an_meta, "stock metadata CSV");
  analyze->add_option("--workers", an_workers, "worker threads (0 = hardware)");
  analyze->add_option("--out", an_out, "report path");

  // dfa
  auto* dfa_cmd = app.add_subcommand("dfa", "detrended fluctuation analysis");
  std::string dfa_input, dfa_out;
  int dfa_order = 2;
  std::size_t dfa_fit_min = 0, dfa_fit_max = 0;
  dfa_cmd->add_option("--input", dfa_input, "volatility CSV")->required();
  dfa_cmd->add_option("--order", dfa_order, "detrend order (1 or 2)");
  dfa_cmd->add_option("--fit-min", dfa_fit_min, "fit range lower scale (0 = full grid)");
  dfa_cmd->add_option("--fit-max", dfa_fit_max, "fit range upper scale (0 = full grid)");
  dfa_cmd->add_option("--out", dfa_out, "scale,F output CSV");

  // aggregate
  auto* aggregate = app.add_subcommand("aggregate", "export aggregate tables");
  std::string agg_report, agg_out = "aggregate";
  aggregate->add_option("--report", agg_report, "report JSON")->required();
  aggregate->add_option("--out", agg_out, "output directory");

  // figures
  auto* figures = app.add_subcommand("figures", "emit plot-ready figure tables");
  std::string fig_report, fig_out = "figure.csv";
  int fig_id = 0;
  figures->add_option("--report", fig_report, "report JSON")->required();
  figures->add_option("--fig", fig_id, "figure id 1..6")->required();
  figures->add_option("--out", fig_out, "output CSV");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest) {
      if (ticks_path.empty() == minute_path.empty()) {
        std::cerr << "ingest: exactly one of --ticks or --minute is required\n";
        return 1;
      }
      return cmd_ingest(ticks_path, minute_path, calendar_path,
                        min_daily_trades, ingest_out);
    }
    if (*synth) {
      return cmd_synth(synth_kind, synth_alpha, synth_gamma, synth_length,
                       synth_seed, synth_count, synth_out);
    }
    if (*analyze) {
      vri::Config cfg;
      if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw std::runtime_error("cannot open config: " + config_path);
        cfg = vri::Config::load(in);
      }
      for (const std::string& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
          throw std::runtime_error("--set expects key=value, got: " + kv);
        }
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
      }
      if (!an_input.empty()) cfg.input = an_input;
      if (!an_kind.empty()) cfg.input_kind = an_kind;
      if (!an_calendar.empty()) cfg.calendar = an_calendar;
      if (!an_meta.empty()) cfg.meta = an_meta;
      if (analyze->count("--workers") > 0) cfg.workers = an_workers;
      if (!an_out.empty()) cfg.out = an_out;
      return cmd_analyze(std::move(cfg));
    }
    if (*dfa_cmd) {
      return cmd_dfa(dfa_input, dfa_order, dfa_fit_min, dfa_fit_max, dfa_out);
    }
    if (*aggregate) return cmd_aggregate(agg_report, agg_out);
    if (*figures) return cmd_figures(fig_report, fig_id, fig_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
