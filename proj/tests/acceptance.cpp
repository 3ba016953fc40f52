// Acceptance suite: one pass/fail line per criterion, nonzero exit if
// any fails. Every tolerance is fixed here, not computed.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "vri/config.hpp"
#include "vri/dfa.hpp"
#include "vri/factors.hpp"
#include "vri/intervals.hpp"
#include "vri/pipeline.hpp"
#include "vri/rng.hpp"
#include "vri/scaling.hpp"
#include "vri/synth.hpp"

using namespace vri;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
  void note(const std::string& what) {
    if (!detail.empty()) detail += "; ";
    detail += what;
  }
};

int g_failures = 0;

void run_criterion(int id, const std::string& name, double limit_s,
                   const std::function<void(Outcome&)>& body) {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(out);
  } catch (const std::exception& e) {
    out.require(false, std::string("exception: ") + e.what());
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  if (secs > limit_s) {
    out.require(false, "runtime " + std::to_string(secs) + "s over limit");
  }
  std::printf("[%s] criterion %2d: %s (%.1fs)%s%s\n",
              out.pass ? "PASS" : "FAIL", id, name.c_str(), secs,
              out.detail.empty() ? "" : " -- ", out.detail.c_str());
  std::fflush(stdout);
  if (!out.pass) ++g_failures;
}

double fit_gamma_of_series(const std::vector<double>& s, double q) {
  return fit_se(scaled_pdf(extract_intervals(s, q), 20, 50)).gamma;
}

}  // namespace

int main() {
  // 1. SE constraint identity by quadrature
  run_criterion(1, "SE constraint identity: norm = mean = 1 +- 1e-6", 1.0,
                [](Outcome& out) {
    for (const double gamma : {0.2, 0.3, 0.5, 0.7, 1.0, 1.5, 2.0}) {
      const SeParams p = se_params(gamma);
      const auto f = [&](double x) {
        return p.c * std::exp(-std::pow(p.a * x, gamma));
      };
      const double x_hi = std::pow(80.0, 1.0 / gamma) / p.a;
      const double x_lo = 1e-14 / p.a;
      const double norm = oracles::integrate_log_simpson(f, x_lo, x_hi);
      const double mean = oracles::integrate_log_simpson(
          [&](double x) { return x * f(x); }, x_lo, x_hi);
      out.require(std::fabs(norm - 1.0) <= 1e-6,
                  "norm off at gamma=" + std::to_string(gamma));
      out.require(std::fabs(mean - 1.0) <= 1e-6,
                  "mean off at gamma=" + std::to_string(gamma));
    }
  });

  // 2. Exponential limit for uncorrelated series
  run_criterion(2, "exponential limit: gamma = 1.00 +- 0.05 at q in {1.0, 1.5}",
                30.0, [](Outcome& out) {
    std::vector<std::vector<double>> series;
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
      series.push_back(white_noise(1 << 20, seed));
      SynthSpec spec;
      spec.length = 1 << 20;
      spec.alpha_target = 0.85;
      spec.seed = seed;
      auto s = generate_correlated(spec);
      shuffle(std::span<double>(s.data(), s.size()), seed + 100);
      series.push_back(std::move(s));
    }
    for (const double q : {1.0, 1.5}) {
      double sum = 0.0;
      for (const auto& s : series) sum += fit_gamma_of_series(s, q);
      const double mean = sum / static_cast<double>(series.size());
      char buf[160];
      std::snprintf(buf, sizeof(buf), "mean gamma(q=%.1f) = %.4f", q, mean);
      out.note(buf);
      out.require(std::fabs(mean - 1.0) <= 0.05, "outside 1.00 +- 0.05");
      if (q == 1.0 && std::fabs(mean - 1.0) > 0.05) {
        out.note(
            "known limitation: at q=1 the exceedance probability is 0.159, "
            "mean interval ~6.3 minutes, and the scaled integer intervals are "
            "geometric, not exponential; the noise-free best fit of that "
            "distribution is gamma ~ 1.08-1.11, outside the stated tolerance");
      }
    }
  });

  // 3. SE round trip through sampling, binning and fitting
  run_criterion(3, "SE round trip recovers gamma0 +- 0.03 (n = 1e5)", 30.0,
                [](Outcome& out) {
    for (const double gamma0 : {0.3, 0.5, 0.7, 1.0}) {
      const auto taus = sample_se_intervals(gamma0, 100000, 2024);
      const SeFitResult fit =
          fit_se(scaled_pdf(intervals_from_samples(taus), 20, 50));
      char buf[80];
      std::snprintf(buf, sizeof(buf), "gamma0=%.1f -> %.4f", gamma0, fit.gamma);
      out.note(buf);
      out.require(std::fabs(fit.gamma - gamma0) <= 0.03, "outside +- 0.03");
    }
  });

  // 4. correlation <-> interval relation
  run_criterion(
      4, "correlated alpha=0.85 gives mean gamma in 0.30 +- 0.10 over q in [1,2]",
      180.0, [](Outcome& out) {
    double sum = 0.0;
    int n = 0;
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
      SynthSpec spec;
      spec.length = 1 << 20;
      spec.alpha_target = 0.85;
      spec.seed = seed;
      const auto s = generate_correlated(spec);
      for (const double q : {1.0, 1.25, 1.5, 1.75, 2.0}) {
        sum += fit_gamma_of_series(s, q);
        ++n;
      }
    }
    const double mean = sum / n;
    out.note("mean gamma = " + std::to_string(mean));
    out.require(std::fabs(mean - 0.30) <= 0.10, "outside 0.30 +- 0.10");

    // same oracle through the full pipeline report
    Config cfg;
    cfg.input_kind = "synth";
    cfg.synth_alpha = 0.85;
    cfg.synth_length = 1 << 20;
    cfg.synth_count = 8;
    cfg.seed = 1;
    cfg.q_grid = {1.0, 1.25, 1.5, 1.75, 2.0};
    cfg.workers = 2;
    const json report = run_pipeline(cfg).report;
    for (const json& row : report.at("aggregates").at("gamma_vs_q")) {
      if (row.at("q") == 1.5) {
        const double m15 = row.at("mean_fitted").get<double>();
        out.note("report mean gamma(q=1.5) = " + std::to_string(m15));
        out.require(m15 >= 0.20 && m15 <= 0.40,
                    "report mean gamma(q=1.5) outside [0.20, 0.40]");
      }
    }
  });

  // 5. DFA closure
  run_criterion(5, "DFA closure: generated alpha recovered +- 0.05", 120.0,
                [](Outcome& out) {
    for (const double alpha : {0.6, 0.7, 0.8, 0.9}) {
      SynthSpec spec;
      spec.length = 1 << 20;
      spec.alpha_target = alpha;
      spec.seed = 11;
      const double got = dfa(generate_correlated(spec), 2).alpha;
      char buf[80];
      std::snprintf(buf, sizeof(buf), "%.1f->%.3f", alpha, got);
      out.note(buf);
      out.require(std::fabs(got - alpha) <= 0.05, "alpha miss");
    }
    const auto w = white_noise(1 << 20, 5);
    const double aw = dfa(w, 2).alpha;
    out.require(std::fabs(aw - 0.5) <= 0.03,
                "white noise alpha " + std::to_string(aw));
    std::vector<double> walk(w.size());
    std::partial_sum(w.begin(), w.end(), walk.begin());
    const double ai = dfa(walk, 2).alpha;
    out.require(std::fabs(ai - 1.5) <= 0.05,
                "integrated alpha " + std::to_string(ai));
  });

  // 6. uniscaling null for delta
  run_criterion(6, "uniscaling null: |delta(m=2)| <= 0.02 on uncorrelated data",
                60.0, [](Outcome& out) {
    for (const std::uint64_t seed : {1, 2, 3}) {
      const auto w = white_noise(1 << 22, seed);
      std::vector<MomentPoint> points;
      for (const double q : default_q_grid()) {
        const IntervalSet iset = extract_intervals(w, q);
        if (!iset.intervals.empty()) {
          points.push_back(
              MomentPoint{q, iset.mean_interval, interval_moment(iset, 2.0)});
        }
      }
      const MomentScalingResult res = fit_delta(points, 2.0);
      char buf[80];
      std::snprintf(buf, sizeof(buf), "seed %llu: delta=%.4f",
                    static_cast<unsigned long long>(seed), res.delta);
      out.note(buf);
      out.require(std::fabs(res.delta) <= 0.02, "delta above 0.02");
    }
  });

  // 7. moment identities, exact
  run_criterion(7, "moment values match hand arithmetic exactly", 1.0,
                [](Outcome& out) {
    IntervalSet two;
    two.intervals = {1.0, 3.0};
    two.mean_interval = 2.0;
    two.sufficient = true;
    out.require(interval_moment(two, 2.0) == std::sqrt(1.25),
                "mu_2 of {1,3} is not sqrt(1.25)");
    out.require(interval_moment(two, 1.0) == 1.0, "mu_1 must be 1");
    IntervalSet equal;
    equal.intervals.assign(16, 4.0);
    equal.mean_interval = 4.0;
    equal.sufficient = true;
    for (const double m : {1.0, 2.0, 4.0, 8.0, 16.0}) {
      out.require(interval_moment(equal, m) == 1.0,
                  "degenerate set mu_m must be 1");
    }
  });

  // 8. outlier bookkeeping on a mixed batch
  run_criterion(8, "tallies: valid + outlier + insufficient = attempted; "
                   "flags excluded from aggregates", 60.0, [](Outcome& out) {
    namespace fs = std::filesystem;
    const fs::path dir =
        fs::temp_directory_path() / "vri_acceptance_mixed_batch";
    fs::create_directories(dir);
    const std::string input = (dir / "mixed.csv").string();
    {
      std::ofstream f(input);
      f << "symbol,global_minute_index,volatility\n";
      const auto emit = [&f](const std::string& sym,
                             const std::vector<double>& v) {
        for (std::size_t i = 0; i < v.size(); ++i) {
          f << sym << ',' << i << ',' << v[i] << '\n';
        }
      };
      for (std::uint64_t seed = 1; seed <= 2; ++seed) {
        SynthSpec spec;
        spec.length = 1 << 19;
        spec.alpha_target = 0.85;
        spec.seed = seed;
        emit("GOOD" + std::to_string(seed), generate_correlated(spec));
      }
      emit("ZERO", std::vector<double>(5000, 0.0));  // degenerate
      for (std::uint64_t seed = 5; seed <= 6; ++seed) {
        emit("TINY" + std::to_string(seed), white_noise(1 << 13, seed));
      }
    }

    Config cfg;
    cfg.input = input;
    cfg.workers = 2;
    const AnalysisOutcome outcome = run_pipeline(cfg);
    const json& report = outcome.report;
    validate_report(report);

    for (const char* kind : {"se", "delta"}) {
      const json& t = report.at("tallies").at(kind);
      const auto attempted = t.at("attempted").get<std::size_t>();
      const auto valid = t.at("valid").get<std::size_t>();
      const auto outlier = t.at("outlier").get<std::size_t>();
      const auto insufficient = t.at("insufficient").get<std::size_t>();
      out.require(valid + outlier + insufficient == attempted,
                  std::string(kind) + " tallies do not add up");
      char buf[120];
      std::snprintf(buf, sizeof(buf), "%s: %zu/%zu/%zu of %zu", kind, valid,
                    outlier, insufficient, attempted);
      out.note(buf);
    }
    const json& se = report.at("tallies").at("se");
    out.require(se.at("outlier").get<std::size_t>() > 0,
                "expected some outliers in the mixed batch");
    out.require(se.at("insufficient").get<std::size_t>() > 0,
                "expected some insufficient points in the mixed batch");

    // flagged points never enter aggregate curves: recount valid-only means
    const auto grid =
        report.at("meta").at("config").at("q_grid").get<std::vector<double>>();
    for (std::size_t qi = 0; qi < grid.size(); ++qi) {
      double sum = 0.0;
      std::size_t count = 0;
      for (const json& s : report.at("stocks")) {
        const json& fit = s.at("gamma_by_q")[qi];
        if (fit.at("status") == "valid") {
          sum += fit.at("gamma").get<double>();
          ++count;
        }
      }
      const json& row = report.at("aggregates").at("gamma_vs_q")[qi];
      out.require(row.at("count").get<std::size_t>() == count,
                  "aggregate count includes flagged points");
      if (count > 0) {
        out.require(std::fabs(row.at("mean").get<double>() - sum / count) <
                        1e-12,
                    "aggregate mean includes flagged points");
      }
    }
    fs::remove_all(dir);
  });

  // 9. determinism across runs and worker counts
  run_criterion(9, "byte-identical reports across 2 runs and workers {1, 8}",
                120.0, [](Outcome& out) {
    Config cfg;
    cfg.input_kind = "synth";
    cfg.synth_alpha = 0.85;
    cfg.synth_length = 1 << 16;
    cfg.synth_count = 4;
    cfg.seed = 3;
    cfg.dfa = true;
    cfg.store_pdfs = "all";
    cfg.workers = 1;
    const std::string a = serialize_report(run_pipeline(cfg).report);
    const std::string b = serialize_report(run_pipeline(cfg).report);
    cfg.workers = 8;
    const std::string c = serialize_report(run_pipeline(cfg).report);
    out.require(a == b, "two identical runs differ");
    out.require(a == c, "worker count changes the report");
  });

  // 10. factor machinery with planted trends
  run_criterion(10, "planted factor trend 0.1 +- 0.01 and delta-gamma slope "
                    "-0.70 +- 0.01", 10.0, [](Outcome& out) {
    Xoshiro256pp rng(77);
    GaussianSource gauss(78);
    std::vector<std::pair<double, double>> pts;
    for (int i = 0; i < 800; ++i) {
      const double ln_cap = std::log(2e7) + rng.uniform01() * std::log(1e4);
      pts.emplace_back(std::exp(ln_cap), 0.1 * ln_cap + 0.01 * gauss.next());
    }
    const FactorCurve curve =
        bin_and_aggregate(pts, FactorKind::Capitalization, {});
    out.note("factor slope = " + std::to_string(curve.slope));
    out.require(std::fabs(curve.slope - 0.1) <= 0.01,
                "factor slope outside 0.1 +- 0.01");

    std::vector<std::pair<double, double>> pairs;
    for (int i = 0; i < 200; ++i) {
      const double gamma = 0.2 + 0.4 * rng.uniform01();
      pairs.emplace_back(gamma, -0.7 * gamma + 0.5 + 0.005 * gauss.next());
    }
    const DeltaGammaRegression reg = regress_delta_gamma(pairs, 2.0, 2.0);
    out.note("delta-gamma slope = " + std::to_string(reg.slope));
    out.require(std::fabs(reg.slope + 0.70) <= 0.01,
                "regression slope outside -0.70 +- 0.01");
  });

  std::printf("acceptance: %d/10 criteria passed\n", 10 - g_failures);
  return g_failures == 0 ? 0 : 1;
}
