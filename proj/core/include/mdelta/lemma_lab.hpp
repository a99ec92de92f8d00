#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mdelta/bits.hpp"
#include "mdelta/delta_spec.hpp"
#include "mdelta/rng.hpp"
#include "mdelta/source_model.hpp"

namespace mdelta::lab {

// Outcome of one verification harness. The verdict is
// empirical <= bound + slack. Monte Carlo harnesses use slack = 3 standard
// errors of the empirical rate; exact harnesses count violating instances
// against a bound of 0 and use no statistical slack.
struct VerificationReport {
  std::string lemma;
  std::string params;  // "key=value;key=value"
  std::size_t trials = 0;
  std::size_t failures = 0;
  double empirical = 0.0;
  double bound = 0.0;
  double slack = 0.0;
  bool passed = false;
  bool trivial = false;  // the bound is >= 1 (or the event is vacuous)
  bool skipped = false;
  std::string note;
  std::vector<std::pair<std::string, double>> extra;

  double extra_value(const std::string& key) const;  // throws std::out_of_range
};

double binomial_se(double rate, std::size_t trials);

// Trials for which 3 standard errors fall below 20% of `bound`, clipped to
// [1e3, min(1e7, 2^27 / n)].
std::size_t auto_trials(double bound, std::size_t n);

// ---- Deviation of counts from the empirical aggregated distribution ----

struct DeviationStats {
  int depth = 0;
  std::vector<double> z;  // |n_w1 - ptilde_w n_w| per w in {0,1}^depth, 0 when n_w = 0
  double z_total = 0.0;
  double threshold = 0.0;  // log2 n * sqrt(n 2^depth)
};

DeviationStats deviation_stats(const MarkovSource& source, const CountTable& deep, int depth);
DeviationStats deviation_stats(const MarkovSource& source, BitView x, const Past& past, int depth);

// ---- Domination of a history-dependent process by a binomial ----

// P(X_t = 1 | x_1..x_{t-1}) for t = 0-based position and the prefix packed
// with x_1 as the most significant bit.
using Conditional = std::function<double(int t, std::uint32_t prefix)>;

// Conditionals q + (1 - q) U with U uniform, drawn once per history node from
// a hash of (seed, node), so the process is reproducible under enumeration.
Conditional random_process(double q, std::uint64_t seed);
Conditional constant_process(double q);

struct DominationResult {
  int n = 0;
  double q = 0.0;
  std::vector<double> tail;      // Pr(sum X <= k), k = 0..n, by path enumeration
  std::vector<double> binomial;  // sum_{i<=k} C(n,i) q^i (1-q)^(n-i)
  double max_excess = 0.0;       // max_k tail - binomial
};

// Exact path enumeration over {0,1}^n (n <= 20). Throws PreconditionError if
// the process emits a conditional below q.
DominationResult domination_tail(int n, double q, const Conditional& process);
std::vector<double> binomial_cdf(int n, double q);

// `processes` random processes plus the constant-q equality case.
VerificationReport verify_domination(int n, double q, std::size_t processes, std::uint64_t seed,
                                     double tolerance = 1e-12);

// ---- State occupancy on hypercube sources ----

struct StateCountOptions {
  std::optional<std::uint32_t> state;  // default: the all-ones context
  std::optional<double> threshold;     // default: n/(2^(l+1) l) - sqrt(n log2 n/(2^l l))
};

double state_count_threshold(int ell, std::size_t n);

// Rate of {n_s <= k} against 1/n. Past is all zeros.
VerificationReport verify_state_count(const MarkovSource& source, int ell, std::size_t n, std::size_t trials,
                                      std::uint64_t seed, StateCountOptions options = {});
VerificationReport verify_state_count(int ell, double radius, std::size_t n, std::size_t trials,
                                      std::uint64_t seed, StateCountOptions options = {});

// E[1/n_s] with 1/n_s := 1 when n_s = 0, for every state s. The verdict
// compares the worst state's mean against 2 l 2^(l+1)/n; the tighter
// l 2^(l+1)/n is recorded as extra "statement_bound" / "statement_pass".
struct InvCountEstimate {
  std::vector<double> mean;  // per state
  std::vector<double> standard_error;
  std::uint32_t worst_state = 0;
  VerificationReport report;
};

InvCountEstimate estimate_inv_ns(const MarkovSource& source, int ell, std::size_t n, std::size_t trials,
                                 std::uint64_t seed);
InvCountEstimate estimate_inv_ns(int ell, double radius, std::size_t n, std::size_t trials, std::uint64_t seed);

// Naive estimator n_s1/n_s per state (squared error 1 when n_s = 0) against
// min(E[1/n_s], 1), slack 3 sqrt(se_mse^2 + se_inv^2). Reports the state with
// the smallest margin.
VerificationReport verify_mse(const MarkovSource& source, int ell, std::size_t n, std::size_t trials,
                              std::uint64_t seed);
VerificationReport verify_mse(int ell, double radius, std::size_t n, std::size_t trials, std::uint64_t seed);

// ---- Stopped martingales ----

enum class StoppingRule {
  Fixed,         // tau = n
  FirstPassage,  // first k with |S_k| >= gamma sqrt(k), else n
  RandomTime,    // tau uniform on 1..n, independent of the steps
};

StoppingRule parse_stopping_rule(const std::string& name);
std::string to_string(StoppingRule rule);

// Martingale difference X_k given the partial sum S_{k-1}; must satisfy
// |X_k| <= 1 (checked).
using StepGenerator = std::function<double(Rng& rng, int k, double partial_sum)>;

// Rate of |S_tau| >= gamma sqrt(tau) against the stopped-Azuma bound
// n e^(-gamma^2/2) (e^(-gamma^2/2) for the fixed rule). The two-sided
// Azuma-Hoeffding value, twice that, is recorded as extra "two_sided_bound".
// Without a step generator the steps are fair +-1.
VerificationReport verify_azuma_stopped(std::size_t n, double gamma, std::size_t trials, std::uint64_t seed,
                                        StoppingRule rule, const StepGenerator& steps = {});

// ---- Aggregate deviation, truncation, chaining ----

// Rate of {z_l > log2 n sqrt(n 2^l)} against 2^l / n^3. Requires n >= 64.
VerificationReport verify_deviation(const MarkovSource& source, const Past& past, int ell, std::size_t n,
                                    std::size_t trials, std::uint64_t seed,
                                    std::vector<DeviationStats>* kept = nullptr);

struct TruncationResult {
  double log2_p = 0.0;
  double log2_truncated = 0.0;  // log2 p_l(x), p_l = truncate(p, l)
  double log2_ml = 0.0;         // log2 of the memory-l maximum likelihood
  double margin = 0.0;          // log2_p - log2_truncated
  double margin_ml = 0.0;       // log2_p - log2_ml
  double step_bound = 0.0;      // n log2(1 + delta(l))
  double bound = 0.0;           // 2 n delta(l)
  bool passed = false;
};

TruncationResult verify_truncation(const MarkovSource& source, const Past& past, int ell, BitView x,
                                   const DeltaSpec& delta, double tolerance = 1e-9);

struct ChainingResult {
  double log2_fine = 0.0;    // log2 ptilde_{l+1}(x)
  double log2_coarse = 0.0;  // log2 ptilde_l(x)
  double z_next = 0.0;       // z_{l+1}
  double gap = 0.0;          // log2_fine - log2_coarse
  double allowed = 0.0;      // 2 n delta(l)^2 + 2 z_{l+1} delta(l)
  bool passed = false;
};

ChainingResult verify_chaining(const MarkovSource& source, const Past& past, int ell, BitView x,
                               const DeltaSpec& delta, double tolerance = 1e-9);

// `count` sources gen_continuity(2l, delta) with all-zeros past and a sampled
// x of length n each; extras carry the worst slack seen.
VerificationReport verify_truncation_batch(int ell, const DeltaSpec& delta, std::size_t n, std::size_t count,
                                           std::uint64_t seed);
VerificationReport verify_chaining_batch(int ell, const DeltaSpec& delta, std::size_t n, std::size_t count,
                                         std::uint64_t seed);

// Default parameterization of every harness, all seeded from `seed`.
// `trial_scale` multiplies the Monte Carlo trial counts (at least 2 trials).
std::vector<VerificationReport> default_suite(std::uint64_t seed, double trial_scale = 1.0);

}  // namespace mdelta::lab
