#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "mdelta/codec.hpp"
#include "mdelta/coders.hpp"
#include "mdelta/error.hpp"
#include "mdelta/rng.hpp"
#include "oracles.hpp"

using namespace mdelta;

namespace {

Bits B(const std::string& s) { return parse_bits(s); }

double q_of(SequentialCoder& c, const std::string& x) { return std::exp2(log2_prob(c, B(x))); }

Bits random_bits(Rng& rng, std::size_t n, double p = 0.5) {
  Bits x(n);
  for (auto& b : x) b = rng.bernoulli(p);
  return x;
}

MarkovSource random_full(Rng& rng, int ell) {
  std::vector<double> theta(std::size_t{1} << ell);
  for (auto& t : theta) t = rng.uniform(0.02, 0.98);
  return MarkovSource::full(ell, theta);
}

}  // namespace

TEST_CASE("KT examples") {
  KtCoder kt0(0, Past());
  CHECK(kt0.prob_one() == 0.5);
  CHECK(q_of(kt0, "011") == doctest::Approx(1.0 / 16).epsilon(1e-15));
  KtCoder kt1(1, Past::parse("0"));
  CHECK(q_of(kt1, "00") == doctest::Approx(3.0 / 8).epsilon(1e-15));
  CHECK_THROWS_AS(KtCoder(2, Past::parse("1")), PreconditionError);
}

TEST_CASE("KT agrees with the counting oracle") {
  Rng rng(1);
  for (int ell = 0; ell <= 4; ++ell) {
    for (int rep = 0; rep < 10; ++rep) {
      const std::string past = format_bits(random_bits(rng, 4));
      const std::string x = format_bits(random_bits(rng, 300, 0.3));
      KtCoder kt(ell, Past::parse(past));
      const double want = static_cast<double>(std::log2(oracle::kt_prob(ell, past, x)));
      REQUIRE(log2_prob(kt, B(x)) == doctest::Approx(want).epsilon(1e-11));
    }
  }
}

TEST_CASE("mixture examples") {
  MixtureCoder mix(0, Past(), 2);
  CHECK(q_of(mix, "11") == doctest::Approx(5.0 / 16).epsilon(1e-14));
  MixtureCoder short_mix(0, Past(), 1);
  short_mix.update(1);
  CHECK_THROWS_AS(short_mix.prob_one(), std::out_of_range);
}

TEST_CASE("mixture probability is the average of KT and uniform") {
  Rng rng(2);
  for (int ell = 0; ell <= 3; ++ell) {
    const std::string past = "0110";
    for (std::size_t n : {1u, 7u, 64u}) {
      const std::string x = format_bits(random_bits(rng, n, 0.8));
      MixtureCoder mix(ell, Past::parse(past), n);
      const long double want = (oracle::kt_prob(ell, past, x) + std::pow(2.0L, -static_cast<long double>(n))) / 2;
      REQUIRE(log2_prob(mix, B(x)) == doctest::Approx(static_cast<double>(std::log2(want))).epsilon(1e-11));
      REQUIRE(-log2_prob(mix, B(x)) <= static_cast<double>(n) + 1 + 1e-12);
    }
  }
}

TEST_CASE("coders are normalized over all sequences") {
  for (int ell = 0; ell <= 2; ++ell) {
    for (int n : {1, 6, 12}) {
      const Past past = Past::parse("10");
      auto check = [&](SequentialCoder& c) {
        long double total = 0.0L;
        for (std::uint32_t v = 0; v < (1u << n); ++v) total += std::exp2(log2_prob(c, B(oracle::bits_of(v, n))));
        REQUIRE(std::fabs(static_cast<double>(total) - 1.0) <= 1e-10);
      };
      KtCoder kt(ell, past);
      MixtureCoder mix(ell, past, static_cast<std::size_t>(n));
      NmlCoder nml(ell, past, n);
      check(kt);
      check(mix);
      check(nml);
    }
  }
}

TEST_CASE("maximum likelihood examples") {
  CHECK(ml_log2_prob(count_table(B("1111111"), Past::parse("11"), 2)) == 0.0);
  CHECK(ml_log2_prob(count_table(B("01"), Past(), 0)) == doctest::Approx(-2.0).epsilon(1e-15));
  CHECK(ml_log2_prob(count_table(B("01"), Past::parse("0"), 1)) == doctest::Approx(-2.0).epsilon(1e-15));
}

TEST_CASE("ML probability matches the oracle and dominates every source") {
  Rng rng(3);
  for (int rep = 0; rep < 1000; ++rep) {
    const int ell = rep % 4;
    const auto src = random_full(rng, ell);
    const Bits past = random_bits(rng, 3);
    const std::size_t n = rep < 500 ? 10 : 400;
    const Bits x = sample(src, Past(past), n, static_cast<std::uint64_t>(rep));
    const double ml = ml_log2_prob(count_table(x, Past(past), ell));
    if (n <= 10) {
      const double want = static_cast<double>(std::log2(oracle::ml_prob(ell, format_bits(past), format_bits(x))));
      REQUIRE(ml == doctest::Approx(want).epsilon(1e-12));
    }
    REQUIRE(ml >= log_prob(src, Past(past), x) - 1e-12);
  }
}

TEST_CASE("Shtarkov sums") {
  CHECK(shtarkov_oracle(0, Past(), 2).sum == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(std::fabs(shtarkov_oracle(0, Past(), 2).log2_sum - std::log2(2.5)) <= 1e-12);
  CHECK(std::fabs(shtarkov_oracle(1, Past::parse("0"), 2).log2_sum - std::log2(3.25)) <= 1e-12);
  CHECK(shtarkov_oracle(0, Past(), 1).log2_sum == doctest::Approx(1.0));
  CHECK_THROWS_AS(shtarkov_oracle(0, Past(), 21), EnumerationCapError);
  CHECK_NOTHROW(shtarkov_oracle(0, Past(), 3, false, 3));
  CHECK_THROWS_AS(shtarkov_oracle(0, Past(), 4, false, 3), EnumerationCapError);
  for (int ell = 0; ell <= 2; ++ell) {
    for (int n : {3, 8}) {
      const auto got = shtarkov_oracle(ell, Past::parse("01"), n, true);
      CHECK(got.sum == doctest::Approx(static_cast<double>(oracle::shtarkov_sum(ell, "01", n))).epsilon(1e-12));
      CHECK(got.max_likelihood.size() == (std::size_t{1} << n));
      CHECK(got.max_likelihood[1] ==
            doctest::Approx(static_cast<double>(oracle::ml_prob(ell, "01", oracle::bits_of(1, n)))).epsilon(1e-12));
    }
  }
}

TEST_CASE("KT regret ceiling and NML optimality, exhaustively") {
  for (int ell = 0; ell <= 2; ++ell) {
    const Past past = Past::zeros(2);
    for (int n : {2, 5, 10, 12}) {
      KtCoder kt(ell, past);
      double kt_max = -1e300;
      double nml_max = -1e300, nml_min = 1e300;
      NmlCoder nml(ell, past, n);
      for (std::uint32_t v = 0; v < (1u << n); ++v) {
        const Bits x = B(oracle::bits_of(v, n));
        const double ml = ml_log2_prob(count_table(x, past, ell));
        kt_max = std::max(kt_max, ml - log2_prob(kt, x));
        const double r = ml - log2_prob(nml, x);
        nml_max = std::max(nml_max, r);
        nml_min = std::min(nml_min, r);
      }
      const double ceiling = std::ldexp(0.5 * std::log2(n) + 2, ell);
      REQUIRE(kt_max <= ceiling);
      // NML regret is the same constant log2(sum) for every sequence.
      REQUIRE(std::fabs(nml_max - nml.log2_shtarkov_sum()) <= 1e-9);
      REQUIRE(std::fabs(nml_min - nml.log2_shtarkov_sum()) <= 1e-9);
      REQUIRE(kt_max >= nml_max - 1e-9);
    }
  }
}

TEST_CASE("source coder and uniform coder") {
  const auto src = MarkovSource::full(1, {0.2, 0.9});
  SourceCoder sc(src, Past::parse("1"));
  const Bits x = B("1101001110");
  CHECK(log2_prob(sc, x) == doctest::Approx(log_prob(src, Past::parse("1"), x)).epsilon(1e-15));
  UniformCoder u;
  CHECK(log2_prob(u, x) == -10.0);
}

TEST_CASE("make_coder") {
  CHECK(make_coder(CoderKind::Kt, 1, Past::parse("0"), 5)->name() == "kt");
  CHECK(make_coder(CoderKind::Mixture, 1, Past::parse("0"), 5)->name() == "mixture");
  CHECK(make_coder(CoderKind::Nml, 1, Past::parse("0"), 5)->name() == "nml");
  CHECK(make_coder(CoderKind::Uniform, 0, Past(), 5)->name() == "uniform");
  CHECK_THROWS_AS(make_coder(CoderKind::Source, 1, Past::parse("0"), 5), PreconditionError);
  for (auto k : {CoderKind::Uniform, CoderKind::Kt, CoderKind::Mixture, CoderKind::Nml, CoderKind::Source}) {
    CHECK(parse_coder_kind(to_string(k)) == k);
  }
  CHECK_THROWS_AS(parse_coder_kind("ctw"), PreconditionError);
}

TEST_CASE("codec examples") {
  KtCoder kt(0, Past());
  const Bits x = B("011");
  const Bits code = encode(kt, x);
  CHECK(code.size() <= 6);
  CHECK(decode(kt, code, 3) == x);
  UniformCoder u;
  Rng rng(4);
  for (int i = 0; i < 200; ++i) {
    const Bits y = random_bits(rng, 1 + rng.next() % 100);
    const Bits cy = encode(u, y);
    REQUIRE(cy.size() <= y.size() + 2);
    REQUIRE(decode(u, cy, y.size()) == y);
  }
  CHECK(decode(u, encode(u, Bits{}), 0).empty());
}

TEST_CASE("codec round trip and length bound on seeded pairs") {
  Rng rng(5);
  for (int i = 0; i < 300; ++i) {
    const int ell = i % 5;
    const auto src = random_full(rng, ell);
    const std::size_t n = 1 + rng.next() % 500;
    const Past past = Past::zeros(4);
    const Bits x = sample(src, past, n, static_cast<std::uint64_t>(i));
    for (auto kind : {CoderKind::Kt, CoderKind::Mixture, CoderKind::Source}) {
      auto coder = make_coder(kind, ell, past, n, &src);
      const Bits code = encode(*coder, x);
      const double len = -log2_prob(*coder, x);
      REQUIRE(code.size() <= static_cast<std::size_t>(std::ceil(len - 1e-9)) + 2);
      REQUIRE(decode(*coder, code, n) == x);
    }
  }
}

TEST_CASE("codec handles extreme probabilities") {
  const auto skew = MarkovSource::iid(1e-12);
  SourceCoder sc(skew, Past());
  Bits ones(40, 1);
  const Bits code = encode(sc, ones);
  CHECK(decode(sc, code, ones.size()) == ones);
  Bits zeros(5000, 0);
  CHECK(decode(sc, encode(sc, zeros), zeros.size()) == zeros);
}

TEST_CASE("corrupted codewords are rejected") {
  KtCoder kt(1, Past::parse("0"));
  Rng rng(6);
  const Bits x = random_bits(rng, 200, 0.7);
  Bits code = encode(kt, x);
  Bits padded = code;
  padded.push_back(0);
  CHECK_THROWS_AS(decode(kt, padded, x.size()), DecodeError);
  Bits extra = code;
  extra.push_back(0);
  extra.push_back(1);
  CHECK_THROWS_AS(decode(kt, extra, x.size()), DecodeError);
  int wrong = 0;
  for (std::size_t i = 0; i + 1 < code.size(); ++i) {
    Bits flipped = code;
    flipped[i] ^= 1;
    try {
      if (decode(kt, flipped, x.size()) == x) ++wrong;
    } catch (const DecodeError&) {
    }
  }
  CHECK(wrong == 0);
}

TEST_CASE("bit packing and stream container") {
  const Bits bits = B("1011000110101");
  const auto bytes = pack_bits(bits);
  REQUIRE(bytes.size() == 2);
  CHECK(bytes[0] == 0b10110001);
  CHECK(bytes[1] == 0b10101000);
  CHECK(unpack_bits(bytes, bits.size()) == bits);
  CHECK_THROWS_AS(unpack_bits(bytes, 17), DecodeError);

  Stream s;
  s.header.ell = 3;
  s.header.n = 0x01020304;
  s.codeword = bits;
  const auto raw = write_stream(s);
  CHECK(raw.size() == 10);
  CHECK(raw[4] == 1);
  CHECK(raw[7] == 4);
  const auto back = read_stream(raw);
  CHECK(back.header.ell == 3);
  CHECK(back.header.n == 0x01020304u);
  CHECK(back.codeword == bits);

  auto bad = raw;
  bad[0] = 'X';
  CHECK_THROWS_AS(read_stream(bad), DecodeError);
  bad = raw;
  bad[2] = 9;
  CHECK_THROWS_AS(read_stream(bad), DecodeError);
  bad = raw;
  bad.push_back(0);
  CHECK_THROWS_AS(read_stream(bad), DecodeError);
  CHECK_THROWS_AS(read_stream(std::vector<std::uint8_t>(raw.begin(), raw.begin() + 5)), DecodeError);
}
