#include <cmath>
#include <numbers>

#include "doctest.h"
#include "mdelta/bounds.hpp"
#include "mdelta/coders.hpp"
#include "mdelta/error.hpp"
#include "mdelta/experiment.hpp"
#include "mdelta/redundancy.hpp"
#include "mdelta/rng.hpp"
#include "oracles.hpp"

using namespace mdelta;
namespace bd = mdelta::bounds;

TEST_CASE("regret examples") {
  const auto src = MarkovSource::full(1, {0.3, 0.6});
  SourceCoder self(src, Past::parse("0"));
  Rng rng(1);
  for (int i = 0; i < 20; ++i) {
    const Bits x = sample(src, Past::parse("0"), 50, static_cast<std::uint64_t>(i));
    CHECK(std::fabs(regret(src, Past::parse("0"), self, x)) <= 1e-12);
  }
  const auto near_one = MarkovSource::iid(1 - 1e-12);
  UniformCoder u;
  CHECK(regret(near_one, Past(), u, Bits(30, 1)) == doctest::Approx(30.0).epsilon(1e-9));
  KtCoder kt(0, Past());
  CHECK(regret(MarkovSource::iid(0.5), Past(), kt, parse_bits("011")) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("exact average redundancy") {
  const auto src = MarkovSource::full(1, {0.3, 0.6});
  CHECK(std::fabs(exact_avg_redundancy(src, Past::parse("0"), SourceCoder(src, Past::parse("0")), 10)) <= 1e-12);
  CHECK_THROWS_AS(exact_avg_redundancy(src, Past::parse("0"), UniformCoder(), 21), EnumerationCapError);
  // Gibbs: average redundancy of any normalized coder is nonnegative.
  for (auto kind : {CoderKind::Uniform, CoderKind::Kt, CoderKind::Mixture, CoderKind::Nml}) {
    const auto coder = make_coder(kind, 1, Past::parse("0"), 10);
    CHECK(exact_avg_redundancy(src, Past::parse("0"), *coder, 10) >= -1e-12);
  }
  // Uniform coder: n - H(p), with H computed from the oracle enumeration.
  const oracle::Leaves leaves{{"0", 0.3}, {"1", 0.6}};
  long double entropy = 0.0L;
  for (std::uint32_t v = 0; v < (1u << 8); ++v) {
    const long double lp = oracle::log2_prob(leaves, "0", oracle::bits_of(v, 8));
    entropy -= std::exp2(lp) * lp;
  }
  CHECK(exact_avg_redundancy(src, Past::parse("0"), UniformCoder(), 8) ==
        doctest::Approx(static_cast<double>(8 - entropy)).epsilon(1e-12));
}

TEST_CASE("Monte Carlo redundancy agrees with the exact value") {
  const auto src = MarkovSource::full(2, {0.2, 0.5, 0.7, 0.9});
  const Past past = Past::zeros(2);
  const KtCoder kt(2, past);
  const double exact = exact_avg_redundancy(src, past, kt, 14);
  const auto mc = mc_avg_redundancy(src, past, kt, 14, 20000, 3);
  CHECK(mc.trials == 20000);
  CHECK(std::fabs(mc.mean - exact) <= 5 * mc.standard_error);

  const auto self = mc_avg_redundancy(src, past, SourceCoder(src, past), 100, 100, 4);
  CHECK(std::fabs(self.mean) <= 1e-12);

  const auto small = mc_avg_redundancy(src, past, kt, 200, 400, 5);
  const auto large = mc_avg_redundancy(src, past, kt, 200, 1600, 5);
  CHECK(large.standard_error / small.standard_error == doctest::Approx(0.5).epsilon(0.2));

  const auto kept = mc_avg_redundancy(src, past, kt, 30, 10, 6, true, 2);
  REQUIRE(kept.samples.size() == 10);
  CHECK(kept.samples[3].seed == derive_seed(6, 3));
  CHECK(kept.samples[3].ell == 2);
  CHECK(kept.samples[3].regret == doctest::Approx(kept.samples[3].log2_p - kept.samples[3].log2_q));
  const auto again = mc_avg_redundancy(src, past, kt, 30, 10, 6, true, 2);
  CHECK(again.mean == kept.mean);
}

TEST_CASE("bound formulas match the term-by-term oracle") {
  const char* deltas[] = {"exp:1", "exp:0.5", "poly:2", "dexp:1", "exp:2:raw"};
  int points = 0;
  for (const char* text : deltas) {
    const auto d = DeltaSpec::parse(text);
    const auto dl = [&](int k) { return static_cast<long double>(d(k)); };
    for (double n : {std::ldexp(1.0, 8), std::ldexp(1.0, 12), std::ldexp(1.0, 16), std::ldexp(1.0, 20),
                     std::ldexp(1.0, 30)}) {
      for (int l : {1, 4}) {
        ++points;
        const double lo = static_cast<double>(oracle::bound::lower(n, l, d(l)));
        const double tr = static_cast<double>(oracle::bound::truncation(n, l, d(l)));
        const double re = static_cast<double>(oracle::bound::refined(n, l, dl));
        const double ra = static_cast<double>(oracle::bound::radius(n, l, dl));
        REQUIRE(bd::minimax_lower_bound(n, l, d) == doctest::Approx(lo).epsilon(1e-9));
        REQUIRE(bd::truncation_upper_term(n, l, d) == doctest::Approx(tr).epsilon(1e-9));
        REQUIRE(bd::refined_upper_bound(n, l, d) == doctest::Approx(re).epsilon(1e-9));
        REQUIRE(bd::good_set_radius(n, l, d) == doctest::Approx(ra).epsilon(1e-9));
        const double from_r = std::ldexp(std::log2(n), l - 1) + ra + (std::ldexp(1.0, 2 * l + 1) - std::ldexp(1.0, l)) / (n * n);
        REQUIRE(bd::refined_upper_bound_from_radius(n, l, d) == doctest::Approx(from_r).epsilon(1e-9));
        REQUIRE(bd::refined_safe_bound(n, l, d) == std::max(bd::refined_upper_bound(n, l, d),
                                                            bd::refined_upper_bound_from_radius(n, l, d)));
      }
    }
  }
  CHECK(points == 50);
}

TEST_CASE("lower bound examples") {
  const auto d = DeltaSpec::exp(1).unclamped();
  const double want = 80 - 36 - 4 * (std::log2(12 * std::numbers::pi * std::numbers::e) + 1);
  CHECK(bd::minimax_lower_bound(std::ldexp(1.0, 20), 3, d) == doctest::Approx(want).epsilon(1e-12));
  CHECK(bd::minimax_lower_bound(std::ldexp(1.0, 21), 3, d) - bd::minimax_lower_bound(std::ldexp(1.0, 20), 3, d) ==
        doctest::Approx(4.0).epsilon(1e-12));
  CHECK(bd::minimax_lower_bound(1e6, 3, DeltaSpec::exp(2)) < bd::minimax_lower_bound(1e6, 3, DeltaSpec::exp(1).unclamped()));
  CHECK_THROWS_AS(bd::minimax_lower_bound(1e6, 0, d), PreconditionError);
}

TEST_CASE("truncation bound scan") {
  const auto tiny = DeltaSpec::constant(1e-30);
  const auto opt = bd::truncation_upper_bound(1e6, tiny, 10);
  CHECK(opt.ell == 1);
  CHECK(opt.value == doctest::Approx(std::log2(1e6)).epsilon(1e-12));
  const double n = std::ldexp(1.0, 16);
  const auto e1 = bd::truncation_upper_bound(n, DeltaSpec::exp(1), bd::default_ell_max(n));
  CHECK(std::abs(e1.ell - 8) <= 2);
  CHECK(e1.value >= std::ldexp(std::log2(n), e1.ell - 1));
}

TEST_CASE("refined bound with vanishing delta") {
  const auto tiny = DeltaSpec::constant(1e-300);
  for (int l = 1; l <= 4; ++l) {
    const double n = 1e5;
    const double want = std::ldexp(std::log2(n), l - 1) + (std::ldexp(1.0, 2 * l + 1) - std::ldexp(1.0, l)) / (n * n);
    CHECK(bd::refined_upper_bound(n, l, tiny) == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("optimal depth prescriptions") {
  const auto dexp = bd::optimal_ell(std::ldexp(1.0, 16), DeltaSpec::double_exp(1), bd::Regime::Lower);
  REQUIRE(dexp.prescribed.has_value());
  CHECK(*dexp.prescribed == 4);
  CHECK(*dexp.prescribed_real == doctest::Approx(4.0));
  const auto e = bd::optimal_ell(std::ldexp(1.0, 15), DeltaSpec::exp(1), bd::Regime::Lower);
  CHECK(*e.prescribed_real == doctest::Approx(5.0));
  const auto t = bd::optimal_ell(std::ldexp(1.0, 16), DeltaSpec::exp(1), bd::Regime::Truncation);
  CHECK(*t.prescribed == 8);
  CHECK_FALSE(bd::optimal_ell(1e4, DeltaSpec::table({1, 0.1, 0.01}), bd::Regime::Lower, 2).prescribed);
  CHECK_THROWS_AS(bd::optimal_ell(3, DeltaSpec::exp(1), bd::Regime::Refined), PreconditionError);
  for (auto r : {bd::Regime::Lower, bd::Regime::Truncation, bd::Regime::Refined}) {
    CHECK(bd::parse_regime(bd::to_string(r)) == r);
  }
}

TEST_CASE("scanned optimum is the extreme of the scan") {
  for (double n : {1e3, 1e5, 1e7}) {
    for (auto regime : {bd::Regime::Lower, bd::Regime::Truncation, bd::Regime::Refined}) {
      const auto d = DeltaSpec::exp(0.7);
      const auto choice = bd::optimal_ell(n, d, regime);
      for (int l = 1; l <= bd::default_ell_max(n); ++l) {
        const double v = bd::regime_bound(regime, n, l, d);
        if (regime == bd::Regime::Lower) {
          REQUIRE(v <= choice.scanned_value);
        } else {
          REQUIRE(v >= choice.scanned_value);
        }
      }
      CHECK(bd::regime_bound(regime, n, choice.scanned, d) == choice.scanned_value);
    }
  }
}

TEST_CASE("bound report") {
  const auto rep = bd::bound_report(1048576, DeltaSpec::exp(1), 1, 12);
  CHECK(rep.rows.size() == 12);
  CHECK(rep.rows.front().ell == 1);
  CHECK(rep.rows.back().ell == 12);
  CHECK(rep.rows.front().clamped);
  for (const auto& row : rep.rows) {
    CHECK(row.refined_from_radius >= row.refined);
  }
  CHECK_THROWS_AS(bd::bound_report(1, DeltaSpec::exp(1), 1, 2), PreconditionError);
  CHECK_THROWS_AS(bd::bound_report(100, DeltaSpec::exp(1), 3, 2), PreconditionError);
}

TEST_CASE("class hypercube radius keeps sources inside the class") {
  const auto d = DeltaSpec::exp(1);
  for (int memory : {2, 4, 6}) {
    const double r = class_hypercube_radius(d, memory);
    CHECK(hypercube_ratio_bound(r) == doctest::Approx(d(memory - 1)).epsilon(1e-12));
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      REQUIRE(check_continuity(gen_hypercube(memory, r, seed), d).passed());
    }
  }
}

TEST_CASE("redundancy point is deterministic and below the refined bound") {
  RedundancyPointOptions opt;
  opt.sources = 4;
  opt.trials = 8;
  opt.seed = 11;
  const auto a = redundancy_point(1024, DeltaSpec::exp(1), opt);
  const auto b = redundancy_point(1024, DeltaSpec::exp(1), opt);
  CHECK(a.ell == bd::optimal_ell(1024, DeltaSpec::exp(1), bd::Regime::Refined).scanned);
  CHECK(a.memory == 2 * a.ell);
  REQUIRE(a.per_source.size() == 4);
  CHECK(a.per_source[2].mean == b.per_source[2].mean);
  CHECK(a.all_within);
  CHECK(a.max_mean <= a.refined);
}

TEST_CASE("log-log slope") {
  CHECK(log_log_slope({2, 4, 8}, {3, 12, 48}) == doctest::Approx(2.0));
  CHECK(std::isnan(log_log_slope({2}, {3})));
}
