#pragma once

#include <cstdint>
#include <vector>

#include "mdelta/coders.hpp"
#include "mdelta/source_model.hpp"

namespace mdelta {

// Per-sequence regret log2 p(x | past) - log2 q(x), in bits.
double regret(const MarkovSource& source, const Past& past, SequentialCoder& coder, BitView x);

// sum_x p(x | past) * regret(x) by enumeration of {0,1}^n. Throws
// EnumerationCapError when n > cap.
double exact_avg_redundancy(const MarkovSource& source, const Past& past, const SequentialCoder& coder, int n,
                            int cap = kDefaultEnumerationCap);

struct RegretSample {
  std::uint64_t seed = 0;  // seed the sequence was sampled with
  std::size_t n = 0;
  int ell = 0;
  double log2_p = 0.0;
  double log2_q = 0.0;
  double regret = 0.0;  // log2_p - log2_q
};

struct McEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t trials = 0;
  std::vector<RegretSample> samples;  // filled when requested, in trial order
};

// Monte Carlo average redundancy over `trials` sequences sampled from the
// source; trial t uses derive_seed(seed, t). `ell` only labels the samples.
McEstimate mc_avg_redundancy(const MarkovSource& source, const Past& past, const SequentialCoder& coder,
                             std::size_t n, std::size_t trials, std::uint64_t seed, bool keep_samples = false,
                             int ell = 0);

}  // namespace mdelta
