#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "mdelta/error.hpp"
#include "mdelta/lemma_lab.hpp"
#include "mdelta/rng.hpp"
#include "oracles.hpp"

using namespace mdelta;
using namespace mdelta::lab;

TEST_CASE("binomial cdf") {
  const auto cdf = binomial_cdf(4, 0.25);
  CHECK(cdf[0] == doctest::Approx(std::pow(0.75, 4)).epsilon(1e-15));
  CHECK(cdf[1] == doctest::Approx(std::pow(0.75, 4) + 4 * 0.25 * std::pow(0.75, 3)).epsilon(1e-15));
  CHECK(cdf[4] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("domination: equality case and k = n") {
  const auto res = domination_tail(12, 0.3, constant_process(0.3));
  for (int k = 0; k <= 12; ++k) CHECK(std::fabs(res.tail[k] - res.binomial[k]) <= 1e-12);
  CHECK(res.tail[12] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(res.binomial[12] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("domination: tail by path enumeration matches a direct sum") {
  const auto proc = random_process(0.2, 99);
  const int n = 8;
  const auto res = domination_tail(n, 0.2, proc);
  std::vector<double> direct(n + 1, 0.0);
  for (std::uint32_t path = 0; path < (1u << n); ++path) {
    double p = 1.0;
    int ones = 0;
    for (int t = 0; t < n; ++t) {
      const std::uint32_t prefix = t == 0 ? 0 : path >> (n - t);
      const double c = proc(t, prefix);
      const bool bit = (path >> (n - 1 - t)) & 1U;
      p *= bit ? c : 1 - c;
      ones += bit;
    }
    for (int k = ones; k <= n; ++k) direct[k] += p;
  }
  for (int k = 0; k <= n; ++k) CHECK(res.tail[k] == doctest::Approx(direct[k]).epsilon(1e-13));
}

TEST_CASE("domination holds for random processes") {
  for (double q : {0.1, 0.3, 0.5}) {
    const auto rep = verify_domination(12, q, 50, 7);
    CHECK(rep.passed);
    CHECK(rep.trials == 51);
    CHECK(rep.failures == 0);
    CHECK(rep.extra_value("max_excess") <= 1e-12);
    CHECK(rep.extra_value("equality_gap") <= 1e-12);
  }
  CHECK_THROWS_AS(domination_tail(5, 0.5, constant_process(0.4)), PreconditionError);
  CHECK_THROWS_AS(domination_tail(21, 0.5, constant_process(0.5)), PreconditionError);
}

TEST_CASE("state count threshold and verdicts") {
  CHECK(state_count_threshold(2, 1 << 14) ==
        doctest::Approx(16384.0 / 16 - std::sqrt(16384.0 * 14 / 8)).epsilon(1e-12));
  const auto rep = verify_state_count(2, 1.0 / 16, 1 << 14, 300, 3);
  CHECK(rep.passed);
  CHECK(rep.bound == doctest::Approx(1.0 / 16384));
  const auto fair = verify_state_count(2, 0.0, 1 << 12, 200, 4);
  CHECK(fair.failures == 0);
  const auto again = verify_state_count(2, 1.0 / 16, 1 << 14, 300, 3);
  CHECK(again.failures == rep.failures);
  CHECK(again.empirical == rep.empirical);
  const auto skipped = verify_state_count(4, 0.0, 64, 10, 1);
  CHECK(skipped.skipped);
  CHECK(skipped.passed);
}

TEST_CASE("E[1/n_s] estimates") {
  const auto fair = estimate_inv_ns(2, 0.0, 1 << 12, 500, 5);
  for (double m : fair.mean) CHECK(m == doctest::Approx(4.0 / 4096).epsilon(0.05));
  CHECK(fair.report.passed);
  CHECK(fair.report.bound == doctest::Approx(2 * 2 * 8.0 / 4096));
  CHECK(fair.report.extra_value("statement_bound") == doctest::Approx(2 * 8.0 / 4096));
  const auto three = estimate_inv_ns(3, 1.0 / 16, 1 << 12, 50, 6);
  CHECK(three.report.extra_value("statement_bound") == doctest::Approx(0.01171875));
  const auto tiny = estimate_inv_ns(2, 0.2, 4, 200, 7);
  for (double m : tiny.mean) CHECK(m <= 1.0);
}

TEST_CASE("naive estimator mean squared error") {
  const auto rep = verify_mse(2, 1.0 / 16, 1 << 12, 300, 8);
  CHECK(rep.passed);
  const auto near_det = MarkovSource::full(1, {0.999, 0.999});
  const auto det = verify_mse(near_det, 1, 1 << 12, 100, 9);
  CHECK(det.passed);
  CHECK(det.empirical <= 1e-3);
  CHECK(verify_mse(2, 1.0 / 16, 1 << 10, 50, 10).empirical == verify_mse(2, 1.0 / 16, 1 << 10, 50, 10).empirical);
  CHECK_THROWS_AS(verify_mse(MarkovSource::full(3, std::vector<double>(8, 0.5)), 2, 100, 10, 1), PreconditionError);
}

TEST_CASE("stopped Azuma") {
  const auto fixed = verify_azuma_stopped(100, 3, 20000, 1, StoppingRule::Fixed);
  CHECK(fixed.bound == doctest::Approx(std::exp(-4.5)));
  CHECK(fixed.passed);
  const auto fp = verify_azuma_stopped(100, 5, 20000, 2, StoppingRule::FirstPassage);
  CHECK(fp.bound == doctest::Approx(100 * std::exp(-12.5)));
  CHECK(fp.extra_value("two_sided_bound") == doctest::Approx(200 * std::exp(-12.5)));
  CHECK(fp.passed);
  const auto trivial = verify_azuma_stopped(100, 1, 1000, 3, StoppingRule::RandomTime);
  CHECK(trivial.trivial);
  CHECK(trivial.passed);
  // One step of size one always reaches gamma = 1: rate 1 exceeds e^-1/2.
  const auto one = verify_azuma_stopped(1, 1, 1000, 4, StoppingRule::Fixed);
  CHECK(one.empirical == 1.0);
  CHECK_FALSE(one.passed);
  const StepGenerator half = [](Rng& rng, int, double) { return rng.bernoulli(0.5) ? 0.5 : -0.5; };
  CHECK(verify_azuma_stopped(50, 3, 2000, 5, StoppingRule::FirstPassage, half).passed);
  const StepGenerator bad = [](Rng&, int, double) { return 1.5; };
  CHECK_THROWS_AS(verify_azuma_stopped(10, 2, 10, 6, StoppingRule::Fixed, bad), PreconditionError);
  for (auto r : {StoppingRule::Fixed, StoppingRule::FirstPassage, StoppingRule::RandomTime}) {
    CHECK(parse_stopping_rule(to_string(r)) == r);
  }
  CHECK(verify_azuma_stopped(100, 4, 5000, 7, StoppingRule::RandomTime).empirical ==
        verify_azuma_stopped(100, 4, 5000, 7, StoppingRule::RandomTime).empirical);
}

TEST_CASE("deviation statistics") {
  const auto src = gen_continuity(4, DeltaSpec::exp(1), 3);
  const Bits x = sample(src, Past::zeros(4), 4096, 4);
  const auto st = deviation_stats(src, x, Past::zeros(4), 2);
  CHECK(st.threshold == doctest::Approx(1536.0));
  // Recompute z by hand from the counts and the true leaf parameters.
  const auto deep = count_table(x, Past::zeros(4), 4);
  double total = 0.0;
  for (std::uint32_t w = 0; w < 4; ++w) {
    double n_w = 0, n_w1 = 0, mass = 0;
    for (std::uint32_t s = 0; s < 16; ++s) {
      if ((s & 3U) != w) continue;
      n_w += static_cast<double>(deep.n(s));
      n_w1 += static_cast<double>(deep.n1(s));
      mass += static_cast<double>(deep.n(s)) * src.theta_of_state(s);
    }
    const double z = std::fabs(n_w1 - mass);
    CHECK(st.z[w] == doctest::Approx(z).epsilon(1e-12));
    total += z;
  }
  CHECK(st.z_total == doctest::Approx(total).epsilon(1e-12));
  const auto from_table = deviation_stats(src, deep, 2);
  CHECK(from_table.z_total == st.z_total);

  const auto iid = verify_deviation(MarkovSource::iid(0.5), Past::zeros(2), 2, 1 << 12, 300, 5);
  CHECK(iid.failures == 0);
  CHECK(iid.bound == doctest::Approx(4.0 / std::pow(4096.0, 3)));
  std::vector<DeviationStats> kept;
  verify_deviation(src, Past::zeros(4), 2, 1024, 20, 6, &kept);
  CHECK(kept.size() == 20);
  CHECK_THROWS_AS(verify_deviation(src, Past::zeros(4), 2, 63, 10, 1), PreconditionError);
}

TEST_CASE("truncation margins") {
  const auto d = DeltaSpec::exp(1);
  const auto src = gen_continuity(6, d, 12);
  const Bits x = sample(src, Past::zeros(6), 4096, 13);
  const auto res = verify_truncation(src, Past::zeros(6), 3, x, d);
  CHECK(res.passed);
  CHECK(res.margin <= res.step_bound + 1e-9);
  CHECK(res.step_bound <= res.bound);
  CHECK(res.margin == doctest::Approx(log_prob(src, Past::zeros(6), x) - log_prob(truncate(src, 3), Past::zeros(6), x)));
  const auto lossless = verify_truncation(gen_continuity(3, d, 14), Past::zeros(6), 3, x, d);
  CHECK(lossless.margin == 0.0);
  const auto flat = MarkovSource::full(6, std::vector<double>(64, 0.37));
  CHECK(std::fabs(verify_truncation(flat, Past::zeros(6), 3, x, d).margin) <= 1e-9);
  CHECK(verify_truncation_batch(3, d, 1024, 10, 1).passed);
}

TEST_CASE("chaining inequality") {
  const auto d = DeltaSpec::exp(1);
  const auto src = gen_continuity(4, d, 21);
  const Bits x = sample(src, Past::zeros(4), 4096, 22);
  const auto res = verify_chaining(src, Past::zeros(4), 2, x, d);
  CHECK(res.passed);
  CHECK(res.gap == doctest::Approx(res.log2_fine - res.log2_coarse));
  CHECK(res.log2_fine == doctest::Approx(log_prob_empirical(src, x, Past::zeros(4), 3)));
  const auto shallow = gen_continuity(2, d, 23);
  const auto eq = verify_chaining(shallow, Past::zeros(4), 2, x, d);
  CHECK(std::fabs(eq.gap) <= 1e-9);
  CHECK(verify_chaining_batch(2, d, 1024, 10, 2).passed);
}

TEST_CASE("default suite is deterministic") {
  const auto a = default_suite(3, 0.01);
  const auto b = default_suite(3, 0.01);
  REQUIRE(a.size() == 14);
  REQUIRE(b.size() == a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].lemma == b[i].lemma);
    CHECK(a[i].failures == b[i].failures);
    CHECK(a[i].empirical == b[i].empirical);
  }
}

TEST_CASE("auto trial counts") {
  CHECK(auto_trials(0.5, 100) == 1000);
  CHECK(auto_trials(1e-12, 100) == 1342177);
  CHECK(auto_trials(1e-12, 1 << 16) == 2048);
  CHECK(auto_trials(1e-12, 1 << 20) == 1000);
  CHECK(binomial_se(0.0, 100) == 0.0);
  CHECK(binomial_se(0.5, 100) == doctest::Approx(0.05));
}
