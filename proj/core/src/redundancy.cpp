#include "mdelta/redundancy.hpp"

#include <cmath>

#include "mdelta/error.hpp"
#include "mdelta/parallel.hpp"
#include "mdelta/rng.hpp"

namespace mdelta {

double regret(const MarkovSource& source, const Past& past, SequentialCoder& coder, BitView x) {
  return log_prob(source, past, x) - log2_prob(coder, x);
}

double exact_avg_redundancy(const MarkovSource& source, const Past& past, const SequentialCoder& coder, int n,
                            int cap) {
  if (n < 0) throw PreconditionError("sequence length must be non-negative");
  if (n > cap) {
    throw EnumerationCapError("exact average redundancy enumerates 2^" + std::to_string(n) +
                              " sequences; cap is n <= " + std::to_string(cap));
  }
  past.require(source.memory(), "source past");
  const std::size_t count = std::size_t{1} << n;
  const std::size_t chunks = std::min<std::size_t>(count, 64);
  std::vector<double> terms(count);
  parallel_for(chunks, [&](std::size_t c) {
    auto local = coder.clone();
    Bits x(static_cast<std::size_t>(n));
    for (std::size_t idx = count * c / chunks; idx < count * (c + 1) / chunks; ++idx) {
      for (int t = 0; t < n; ++t) x[static_cast<std::size_t>(t)] = (idx >> (n - 1 - t)) & 1U;
      const double lp = log_prob(source, past, x);
      const double lq = log2_prob(*local, x);
      terms[idx] = std::exp2(lp) * (lp - lq);
    }
  });
  return pairwise_sum(terms);
}

McEstimate mc_avg_redundancy(const MarkovSource& source, const Past& past, const SequentialCoder& coder,
                             std::size_t n, std::size_t trials, std::uint64_t seed, bool keep_samples, int ell) {
  if (trials < 2) throw PreconditionError("Monte Carlo redundancy needs at least 2 trials");
  past.require(source.memory(), "source past");
  std::vector<RegretSample> samples(trials);
  const std::size_t chunks = std::min<std::size_t>(trials, 4 * static_cast<std::size_t>(worker_count()));
  parallel_for(chunks, [&](std::size_t c) {
    auto local = coder.clone();
    for (std::size_t t = trials * c / chunks; t < trials * (c + 1) / chunks; ++t) {
      RegretSample& s = samples[t];
      s.seed = derive_seed(seed, t);
      s.n = n;
      s.ell = ell;
      const Bits x = sample(source, past, n, s.seed);
      s.log2_p = log_prob(source, past, x);
      s.log2_q = log2_prob(*local, x);
      s.regret = s.log2_p - s.log2_q;
    }
  });
  std::vector<double> values(trials);
  for (std::size_t t = 0; t < trials; ++t) values[t] = samples[t].regret;
  McEstimate est;
  est.trials = trials;
  est.mean = pairwise_sum(values) / static_cast<double>(trials);
  for (auto& v : values) v = (v - est.mean) * (v - est.mean);
  const double variance = pairwise_sum(values) / static_cast<double>(trials - 1);
  est.standard_error = std::sqrt(variance / static_cast<double>(trials));
  if (keep_samples) est.samples = std::move(samples);
  return est;
}

}  // namespace mdelta
