#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "vri/dfa.hpp"
#include "vri/intervals.hpp"
#include "vri/numeric.hpp"
#include "vri/scaling.hpp"
#include "vri/synth.hpp"

using namespace vri;

TEST_CASE("generate_correlated is deterministic per (spec, seed)") {
  SynthSpec spec;
  spec.length = 1 << 13;
  spec.alpha_target = 0.8;
  spec.seed = 99;
  const auto a = generate_correlated(spec);
  const auto b = generate_correlated(spec);
  CHECK(a == b);
  spec.seed = 100;
  CHECK(generate_correlated(spec) != a);
}

TEST_CASE("generate_correlated standardizes to machine precision") {
  SynthSpec spec;
  spec.length = 1 << 16;
  spec.alpha_target = 0.75;
  spec.seed = 5;
  const auto s = generate_correlated(spec);
  const auto ms = oracles::mean_std(s);
  CHECK(std::fabs(ms.mean) < 1e-12);
  CHECK(std::fabs(ms.std - 1.0) < 1e-12);
}

TEST_CASE("generate_correlated validates its spec") {
  SynthSpec spec;
  spec.length = 1000;  // not a power of two
  CHECK_THROWS_AS(generate_correlated(spec), std::invalid_argument);
  spec.length = 1 << 8;  // too short
  CHECK_THROWS_AS(generate_correlated(spec), std::invalid_argument);
  spec.length = 1 << 13;
  spec.alpha_target = 1.2;
  CHECK_THROWS_AS(generate_correlated(spec), std::domain_error);
}

TEST_CASE("alpha at or below 0.5 falls back to white noise") {
  SynthSpec spec;
  spec.length = 1 << 17;
  spec.alpha_target = 0.5;
  spec.seed = 21;
  const auto s = generate_correlated(spec);
  CHECK(s == white_noise(spec.length, spec.seed));
  CHECK(std::fabs(dfa(s, 2).alpha - 0.5) <= 0.03);
}

TEST_CASE("periodogram slope matches the target spectrum") {
  SynthSpec spec;
  spec.length = 1 << 18;
  spec.alpha_target = 0.8;
  spec.seed = 31;
  const auto s = generate_correlated(spec);
  const double beta = 2.0 * spec.alpha_target - 1.0;
  CHECK(std::fabs(oracles::periodogram_slope(s) + beta) <= 0.1);
}

TEST_CASE("shuffle preserves the multiset and kills correlations") {
  SynthSpec spec;
  spec.length = 1 << 17;
  spec.alpha_target = 0.9;
  spec.seed = 41;
  auto s = generate_correlated(spec);
  auto sorted_before = s;
  std::sort(sorted_before.begin(), sorted_before.end());

  auto shuffled = s;
  shuffle(std::span<double>(shuffled.data(), shuffled.size()), 7);
  auto sorted_after = shuffled;
  std::sort(sorted_after.begin(), sorted_after.end());
  CHECK(sorted_after == sorted_before);
  CHECK(shuffled != s);

  CHECK(std::fabs(dfa(shuffled, 2).alpha - 0.5) <= 0.03);

  // deterministic per seed
  auto again = s;
  shuffle(std::span<double>(again.data(), again.size()), 7);
  CHECK(again == shuffled);
}

TEST_CASE("sample_se_intervals has unit mean") {
  for (const double gamma : {0.3, 1.0}) {
    const auto taus = sample_se_intervals(gamma, 40000, 17);
    const auto ms = oracles::mean_std(taus);
    CHECK(std::fabs(ms.mean - 1.0) <= 3.0 / std::sqrt(40000.0));
  }
}

TEST_CASE("gamma=1 samples are exponential (KS at the 1% level)") {
  const std::size_t n = 50000;
  const auto taus = sample_se_intervals(1.0, n, 23);
  const double d = oracles::ks_distance(
      taus, [](double x) { return 1.0 - std::exp(-x); });
  CHECK(d < 1.63 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("sampler quantile inverts the SE distribution function") {
  for (const double gamma : {0.3, 0.5, 1.0, 2.0}) {
    const SeIntervalSampler sampler(gamma);
    const SeParams p = se_params(gamma);
    for (const double u : {1e-6, 1e-3, 0.05, 0.5, 0.95, 0.9999, 0.9999999}) {
      const double x = sampler.quantile(u);
      const double cdf =
          num::regularized_gamma_p(1.0 / gamma, std::pow(p.a * x, gamma));
      CHECK(cdf == doctest::Approx(u).epsilon(1e-8));
    }
  }
  CHECK_THROWS_AS(SeIntervalSampler(0.1), std::domain_error);
}

TEST_CASE("round trip: sample, bin, fit recovers gamma") {
  const auto taus = sample_se_intervals(0.3, 100000, 29);
  const SeFitResult fit =
      fit_se(scaled_pdf(intervals_from_samples(taus), 20, 50));
  CHECK(std::fabs(fit.gamma - 0.3) <= 0.03);
}

TEST_CASE("shuffled series intervals at q=1.5 look exponential") {
  SynthSpec spec;
  spec.length = 1 << 19;
  spec.alpha_target = 0.85;
  spec.seed = 2;
  auto s = generate_correlated(spec);
  shuffle(std::span<double>(s.data(), s.size()), 3);
  const SeFitResult fit =
      fit_se(scaled_pdf(extract_intervals(s, 1.5), 20, 50));
  CHECK(std::fabs(fit.gamma - 1.0) <= 0.05);
}
