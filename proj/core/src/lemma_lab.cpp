#include "mdelta/lemma_lab.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "mdelta/coders.hpp"
#include "mdelta/error.hpp"
#include "mdelta/parallel.hpp"

namespace mdelta::lab {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

class Params {
 public:
  Params& add(const std::string& key, const std::string& value) {
    if (!text_.empty()) text_ += ';';
    text_ += key + '=' + value;
    return *this;
  }
  Params& add(const std::string& key, double value) { return add(key, num(value)); }
  const std::string& str() const { return text_; }

 private:
  std::string text_;
};

void finish_rate(VerificationReport& r) {
  r.empirical = r.trials ? static_cast<double>(r.failures) / static_cast<double>(r.trials) : 0.0;
  r.slack = 3.0 * binomial_se(r.empirical, r.trials);
  r.trivial = r.trivial || r.bound >= 1.0;
  r.passed = r.empirical <= r.bound + r.slack;
}

void finish_exact(VerificationReport& r) {
  r.bound = 0.0;
  r.slack = 0.0;
  r.empirical = r.trials ? static_cast<double>(r.failures) / static_cast<double>(r.trials) : 0.0;
  r.passed = r.failures == 0;
}

void require_trials(std::size_t trials, std::size_t minimum = 1) {
  if (trials < minimum) throw PreconditionError("harness needs at least " + std::to_string(minimum) + " trials");
}

void require_ell(int ell) {
  if (ell < 1 || ell > 16) throw PreconditionError("harness needs 1 <= ell <= 16");
}

// Per-trial depth-ell counts, one table per trial, all with an all-zeros past.
std::vector<CountTable> sampled_counts(const MarkovSource& source, int ell, std::size_t n, std::size_t trials,
                                       std::uint64_t seed) {
  const int depth = std::max(ell, source.memory());
  const Past past = Past::zeros(static_cast<std::size_t>(depth));
  std::vector<std::optional<CountTable>> slots(trials);
  parallel_for(trials, [&](std::size_t t) {
    const Bits x = sample(source, past, n, derive_seed(seed, t));
    CountTable table = count_table(x, past, depth);
    while (table.depth() > ell) table = table.marginalize();
    slots[t] = std::move(table);
  });
  std::vector<CountTable> out;
  out.reserve(trials);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

MarkovSource hypercube_for(int ell, double radius, std::uint64_t seed) {
  return gen_hypercube(ell, radius, derive_seed(seed, "source"));
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe mean_se(const std::vector<double>& values) {
  const std::size_t count = values.size();
  MeanSe out;
  if (count == 0) return out;
  out.mean = pairwise_sum(values) / static_cast<double>(count);
  if (count < 2) return out;
  std::vector<double> sq(count);
  for (std::size_t i = 0; i < count; ++i) sq[i] = (values[i] - out.mean) * (values[i] - out.mean);
  const double var = pairwise_sum(sq) / static_cast<double>(count - 1);
  out.se = std::sqrt(var / static_cast<double>(count));
  return out;
}

}  // namespace

double VerificationReport::extra_value(const std::string& key) const {
  for (const auto& [k, v] : extra) {
    if (k == key) return v;
  }
  throw std::out_of_range("report has no extra value '" + key + "'");
}

double binomial_se(double rate, std::size_t trials) {
  if (trials == 0) return 0.0;
  return std::sqrt(std::max(0.0, rate * (1.0 - rate)) / static_cast<double>(trials));
}

std::size_t auto_trials(double bound, std::size_t n) {
  const double lo = 1e3;
  double hi = 1e7;
  if (n > 0) hi = std::min(hi, std::ldexp(1.0, 27) / static_cast<double>(n));
  hi = std::max(hi, lo);
  double want = hi;
  if (bound > 0.0 && bound < 1.0) want = std::ceil(225.0 * (1.0 - bound) / bound);
  if (bound >= 1.0) want = lo;
  return static_cast<std::size_t>(std::clamp(want, lo, hi));
}

// ---------------------------------------------------------------------------

DeviationStats deviation_stats(const MarkovSource& source, const CountTable& deep, int depth) {
  const auto ptilde = empirical_aggregates(source, deep, depth);
  CountTable shallow = deep;
  while (shallow.depth() > depth) shallow = shallow.marginalize();
  DeviationStats stats;
  stats.depth = depth;
  stats.z.assign(shallow.width(), 0.0);
  for (std::uint32_t w = 0; w < shallow.width(); ++w) {
    if (shallow.n(w) == 0) continue;
    stats.z[w] = std::fabs(static_cast<double>(shallow.n1(w)) - *ptilde[w] * static_cast<double>(shallow.n(w)));
  }
  stats.z_total = pairwise_sum(stats.z);
  const double n = static_cast<double>(deep.total());
  stats.threshold = n >= 1.0 ? std::log2(n) * std::sqrt(n * std::ldexp(1.0, depth)) : 0.0;
  return stats;
}

DeviationStats deviation_stats(const MarkovSource& source, BitView x, const Past& past, int depth) {
  return deviation_stats(source, count_table(x, past, std::max(depth, source.memory())), depth);
}

// ---------------------------------------------------------------------------

Conditional random_process(double q, std::uint64_t seed) {
  if (!(q >= 0.0 && q <= 1.0)) throw PreconditionError("process floor q must lie in [0, 1]");
  return [q, seed](int t, std::uint32_t prefix) {
    const std::uint64_t node = (std::uint64_t{1} << t) | prefix;
    const std::uint64_t h = splitmix64(seed ^ splitmix64(node));
    const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
    return q + (1.0 - q) * u;
  };
}

Conditional constant_process(double q) {
  return [q](int, std::uint32_t) { return q; };
}

std::vector<double> binomial_cdf(int n, double q) {
  std::vector<double> cdf(static_cast<std::size_t>(n) + 1);
  double coeff = 1.0;
  double acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    if (i > 0) coeff = coeff * (n - i + 1) / i;
    acc += coeff * std::pow(q, i) * std::pow(1.0 - q, n - i);
    cdf[i] = acc;
  }
  return cdf;
}

DominationResult domination_tail(int n, double q, const Conditional& process) {
  if (n < 1 || n > 20) throw PreconditionError("domination check needs 1 <= n <= 20");
  if (!(q >= 0.0 && q <= 1.0)) throw PreconditionError("domination floor q must lie in [0, 1]");
  std::vector<double> pmf(static_cast<std::size_t>(n) + 1, 0.0);
  auto walk = [&](auto&& self, int t, std::uint32_t prefix, int ones, double mass) -> void {
    if (t == n) {
      pmf[ones] += mass;
      return;
    }
    const double c = process(t, prefix);
    if (!(c >= q && c <= 1.0)) {
      throw PreconditionError("process conditional " + num(c) + " at t=" + std::to_string(t) +
                              " is outside [q, 1] for q=" + num(q));
    }
    self(self, t + 1, prefix << 1, ones, mass * (1.0 - c));
    self(self, t + 1, (prefix << 1) | 1U, ones + 1, mass * c);
  };
  walk(walk, 0, 0, 0, 1.0);
  DominationResult out;
  out.n = n;
  out.q = q;
  out.binomial = binomial_cdf(n, q);
  out.tail.resize(pmf.size());
  double acc = 0.0;
  out.max_excess = -1.0;
  for (std::size_t k = 0; k < pmf.size(); ++k) {
    acc += pmf[k];
    out.tail[k] = acc;
    out.max_excess = std::max(out.max_excess, acc - out.binomial[k]);
  }
  return out;
}

VerificationReport verify_domination(int n, double q, std::size_t processes, std::uint64_t seed,
                                     double tolerance) {
  VerificationReport r;
  r.lemma = "domination";
  r.params = Params().add("n", n).add("q", q).add("processes", static_cast<double>(processes)).str();
  std::vector<double> excess(processes);
  parallel_for(processes, [&](std::size_t i) {
    excess[i] = domination_tail(n, q, random_process(q, derive_seed(seed, i))).max_excess;
  });
  const DominationResult equal = domination_tail(n, q, constant_process(q));
  double equality_gap = 0.0;
  for (std::size_t k = 0; k < equal.tail.size(); ++k) {
    equality_gap = std::max(equality_gap, std::fabs(equal.tail[k] - equal.binomial[k]));
  }
  r.trials = processes + 1;
  for (double e : excess) r.failures += e > tolerance ? 1 : 0;
  if (equality_gap > tolerance) ++r.failures;
  double worst = equal.max_excess;
  for (double e : excess) worst = std::max(worst, e);
  r.extra = {{"max_excess", worst}, {"equality_gap", equality_gap}, {"tolerance", tolerance}};
  finish_exact(r);
  return r;
}

// ---------------------------------------------------------------------------

double state_count_threshold(int ell, std::size_t n) {
  require_ell(ell);
  const double nn = static_cast<double>(n);
  const double states = std::ldexp(1.0, ell);
  return nn / (2.0 * states * ell) - std::sqrt(nn * std::log2(nn) / (states * ell));
}

VerificationReport verify_state_count(const MarkovSource& source, int ell, std::size_t n, std::size_t trials,
                                      std::uint64_t seed, StateCountOptions options) {
  require_ell(ell);
  require_trials(trials);
  if (n < 2) throw PreconditionError("state count needs n >= 2");
  const std::uint32_t state = options.state.value_or(depth_mask(ell));
  if (state > depth_mask(ell)) throw PreconditionError("state index out of range for depth " + std::to_string(ell));
  const double k = options.threshold.value_or(state_count_threshold(ell, n));

  VerificationReport r;
  r.lemma = "state_count";
  r.params = Params()
                 .add("ell", ell)
                 .add("n", static_cast<double>(n))
                 .add("state", Context{state, ell}.to_string())
                 .add("threshold", k)
                 .str();
  r.bound = 1.0 / static_cast<double>(n);
  r.extra = {{"threshold", k}};
  if (k <= 0.0) {
    r.skipped = true;
    r.passed = true;
    r.trivial = true;
    r.note = "threshold " + num(k) + " is not positive; event is empty for every sample";
    return r;
  }
  const auto tables = sampled_counts(source, ell, n, trials, seed);
  r.trials = trials;
  double min_count = static_cast<double>(n);
  for (const auto& t : tables) {
    const double ns = static_cast<double>(t.n(state));
    min_count = std::min(min_count, ns);
    if (ns <= k) ++r.failures;
  }
  r.extra.emplace_back("min_count", min_count);
  finish_rate(r);
  return r;
}

VerificationReport verify_state_count(int ell, double radius, std::size_t n, std::size_t trials,
                                      std::uint64_t seed, StateCountOptions options) {
  VerificationReport r = verify_state_count(hypercube_for(ell, radius, seed), ell, n, trials, seed, options);
  r.params += ";radius=" + num(radius);
  return r;
}

InvCountEstimate estimate_inv_ns(const MarkovSource& source, int ell, std::size_t n, std::size_t trials,
                                 std::uint64_t seed) {
  require_ell(ell);
  require_trials(trials, 2);
  const auto tables = sampled_counts(source, ell, n, trials, seed);
  const std::size_t width = std::size_t{1} << ell;
  InvCountEstimate est;
  est.mean.resize(width);
  est.standard_error.resize(width);
  std::vector<double> values(trials);
  for (std::uint32_t s = 0; s < width; ++s) {
    for (std::size_t t = 0; t < trials; ++t) {
      const auto ns = tables[t].n(s);
      values[t] = ns ? 1.0 / static_cast<double>(ns) : 1.0;
    }
    const MeanSe m = mean_se(values);
    est.mean[s] = m.mean;
    est.standard_error[s] = m.se;
    if (m.mean > est.mean[est.worst_state]) est.worst_state = s;
  }
  const double statement = ell * std::ldexp(1.0, ell + 1) / static_cast<double>(n);
  VerificationReport& r = est.report;
  r.lemma = "inv_count";
  r.params = Params().add("ell", ell).add("n", static_cast<double>(n)).str();
  r.trials = trials;
  r.empirical = est.mean[est.worst_state];
  r.slack = 3.0 * est.standard_error[est.worst_state];
  r.bound = 2.0 * statement;
  r.trivial = r.bound >= 1.0;
  r.passed = r.empirical <= r.bound + r.slack;
  r.failures = r.passed ? 0 : 1;
  r.note = "1/n_s counted as 1 when n_s = 0";
  r.extra = {{"worst_state", static_cast<double>(est.worst_state)},
             {"statement_bound", statement},
             {"statement_pass", r.empirical <= statement + r.slack ? 1.0 : 0.0}};
  return est;
}

InvCountEstimate estimate_inv_ns(int ell, double radius, std::size_t n, std::size_t trials, std::uint64_t seed) {
  InvCountEstimate est = estimate_inv_ns(hypercube_for(ell, radius, seed), ell, n, trials, seed);
  est.report.params += ";radius=" + num(radius);
  return est;
}

VerificationReport verify_mse(const MarkovSource& source, int ell, std::size_t n, std::size_t trials,
                              std::uint64_t seed) {
  require_ell(ell);
  require_trials(trials, 2);
  if (source.memory() > ell) throw PreconditionError("naive estimator check needs source memory <= ell");
  const auto tables = sampled_counts(source, ell, n, trials, seed);
  const std::size_t width = std::size_t{1} << ell;
  VerificationReport r;
  r.lemma = "mse";
  r.params = Params().add("ell", ell).add("n", static_cast<double>(n)).str();
  r.trials = trials;
  r.note = "squared error and 1/n_s counted as 1 when n_s = 0";
  std::vector<double> err(trials), inv(trials);
  double best_margin = 0.0;
  bool first = true;
  std::size_t failing = 0;
  for (std::uint32_t s = 0; s < width; ++s) {
    const double theta = source.theta_of_state(s & depth_mask(source.memory()));
    for (std::size_t t = 0; t < trials; ++t) {
      const auto ns = tables[t].n(s);
      if (ns == 0) {
        err[t] = 1.0;
        inv[t] = 1.0;
      } else {
        const double d = static_cast<double>(tables[t].n1(s)) / static_cast<double>(ns) - theta;
        err[t] = d * d;
        inv[t] = 1.0 / static_cast<double>(ns);
      }
    }
    const MeanSe e = mean_se(err), i = mean_se(inv);
    const double bound = std::min(i.mean, 1.0);
    const double slack = 3.0 * std::sqrt(e.se * e.se + i.se * i.se);
    const double margin = bound + slack - e.mean;
    if (margin < 0.0) ++failing;
    if (first || margin < best_margin) {
      first = false;
      best_margin = margin;
      r.empirical = e.mean;
      r.bound = bound;
      r.slack = slack;
      r.extra = {{"state", static_cast<double>(s)}, {"theta", theta}};
    }
  }
  r.failures = failing;
  r.extra.emplace_back("failing_states", static_cast<double>(failing));
  r.passed = failing == 0;
  return r;
}

VerificationReport verify_mse(int ell, double radius, std::size_t n, std::size_t trials, std::uint64_t seed) {
  VerificationReport r = verify_mse(hypercube_for(ell, radius, seed), ell, n, trials, seed);
  r.params += ";radius=" + num(radius);
  return r;
}

// ---------------------------------------------------------------------------

StoppingRule parse_stopping_rule(const std::string& name) {
  if (name == "fixed") return StoppingRule::Fixed;
  if (name == "first-passage") return StoppingRule::FirstPassage;
  if (name == "random-time") return StoppingRule::RandomTime;
  throw PreconditionError("unknown stopping rule '" + name + "' (fixed, first-passage, random-time)");
}

std::string to_string(StoppingRule rule) {
  switch (rule) {
    case StoppingRule::Fixed: return "fixed";
    case StoppingRule::FirstPassage: return "first-passage";
    case StoppingRule::RandomTime: return "random-time";
  }
  return "?";
}

namespace {

// One trial; returns true when |S_tau| >= gamma sqrt(tau).
bool azuma_trial(std::size_t n, double gamma, StoppingRule rule, const StepGenerator& steps, Rng& rng) {
  const double g2 = gamma * gamma;
  std::size_t tau = n;
  if (rule == StoppingRule::RandomTime) {
    tau = 1 + std::min(n - 1, static_cast<std::size_t>(rng.uniform() * static_cast<double>(n)));
  }
  auto crossed = [g2](double s, std::size_t k) { return s * s >= g2 * static_cast<double>(k); };
  if (!steps) {
    std::int64_t s = 0;
    std::uint64_t word = 0;
    for (std::size_t k = 1; k <= tau; ++k) {
      if ((k - 1) % 64 == 0) word = rng.next();
      s += (word & 1U) ? 1 : -1;
      word >>= 1;
      if (rule == StoppingRule::FirstPassage && crossed(static_cast<double>(s), k)) return true;
    }
    return crossed(static_cast<double>(s), tau);
  }
  double s = 0.0;
  for (std::size_t k = 1; k <= tau; ++k) {
    const double x = steps(rng, static_cast<int>(k), s);
    if (!(std::fabs(x) <= 1.0)) {
      throw PreconditionError("martingale step " + num(x) + " at k=" + std::to_string(k) +
                              " exceeds 1 in magnitude");
    }
    s += x;
    if (rule == StoppingRule::FirstPassage && crossed(s, k)) return true;
  }
  return crossed(s, tau);
}

}  // namespace

VerificationReport verify_azuma_stopped(std::size_t n, double gamma, std::size_t trials, std::uint64_t seed,
                                        StoppingRule rule, const StepGenerator& steps) {
  if (n < 1) throw PreconditionError("stopped martingale needs n >= 1");
  if (!(gamma > 0.0)) throw PreconditionError("stopped martingale needs gamma > 0");
  require_trials(trials);
  VerificationReport r;
  r.lemma = "azuma_stopped";
  r.params = Params()
                 .add("n", static_cast<double>(n))
                 .add("gamma", gamma)
                 .add("rule", to_string(rule))
                 .add("steps", steps ? "custom" : "rademacher")
                 .str();
  const double tail = std::exp(-gamma * gamma / 2.0);
  r.bound = rule == StoppingRule::Fixed ? tail : static_cast<double>(n) * tail;
  constexpr std::size_t kChunks = 256;
  const std::size_t chunks = std::min(kChunks, trials);
  std::vector<std::size_t> hits(chunks, 0);
  parallel_for(chunks, [&](std::size_t c) {
    const std::size_t lo = trials * c / chunks, hi = trials * (c + 1) / chunks;
    for (std::size_t t = lo; t < hi; ++t) {
      Rng rng(derive_seed(seed, t));
      hits[c] += azuma_trial(n, gamma, rule, steps, rng) ? 1 : 0;
    }
  });
  r.trials = trials;
  for (std::size_t h : hits) r.failures += h;
  r.extra = {{"two_sided_bound", 2.0 * r.bound}};
  finish_rate(r);
  r.extra.emplace_back("two_sided_pass", r.empirical <= 2.0 * r.bound + r.slack ? 1.0 : 0.0);
  if (r.trivial) r.note = "bound >= 1";
  return r;
}

// ---------------------------------------------------------------------------

VerificationReport verify_deviation(const MarkovSource& source, const Past& past, int ell, std::size_t n,
                                    std::size_t trials, std::uint64_t seed, std::vector<DeviationStats>* kept) {
  require_ell(ell);
  require_trials(trials);
  if (n < 64) throw PreconditionError("deviation check needs n >= 64 (log2 n >= 6)");
  const int depth = std::max(ell, source.memory());
  past.require(depth, "deviation check");
  std::vector<DeviationStats> stats(trials);
  parallel_for(trials, [&](std::size_t t) {
    const Bits x = sample(source, past, n, derive_seed(seed, t));
    stats[t] = deviation_stats(source, count_table(x, past, depth), ell);
  });
  VerificationReport r;
  r.lemma = "deviation";
  r.params = Params().add("ell", ell).add("n", static_cast<double>(n)).add("memory", source.memory()).str();
  r.trials = trials;
  r.bound = std::ldexp(1.0, ell) / std::pow(static_cast<double>(n), 3.0);
  double worst_ratio = 0.0;
  for (const auto& s : stats) {
    if (s.z_total > s.threshold) ++r.failures;
    worst_ratio = std::max(worst_ratio, s.z_total / s.threshold);
  }
  r.extra = {{"threshold", stats.front().threshold}, {"max_z_over_threshold", worst_ratio}};
  finish_rate(r);
  if (kept) *kept = std::move(stats);
  return r;
}

TruncationResult verify_truncation(const MarkovSource& source, const Past& past, int ell, BitView x,
                                   const DeltaSpec& delta, double tolerance) {
  require_ell(ell);
  past.require(std::max(ell, source.memory()), "truncation check");
  TruncationResult r;
  const double n = static_cast<double>(x.size());
  const double d = delta(ell);
  r.log2_p = log_prob(source, past, x);
  r.log2_truncated = log_prob(truncate(source, ell), past, x);
  r.log2_ml = ml_log2_prob(count_table(x, past, ell));
  r.margin = r.log2_p - r.log2_truncated;
  r.margin_ml = r.log2_p - r.log2_ml;
  r.step_bound = n * std::log2(1.0 + d);
  r.bound = 2.0 * n * d;
  r.passed = r.margin <= r.step_bound + tolerance && r.step_bound <= r.bound + tolerance &&
             r.margin_ml <= r.bound + tolerance;
  return r;
}

ChainingResult verify_chaining(const MarkovSource& source, const Past& past, int ell, BitView x,
                               const DeltaSpec& delta, double tolerance) {
  require_ell(ell);
  past.require(std::max(ell + 1, source.memory()), "chaining check");
  ChainingResult r;
  const double n = static_cast<double>(x.size());
  const double d = delta(ell);
  r.log2_fine = log_prob_empirical(source, x, past, ell + 1);
  r.log2_coarse = log_prob_empirical(source, x, past, ell);
  r.z_next = deviation_stats(source, x, past, ell + 1).z_total;
  r.gap = r.log2_fine - r.log2_coarse;
  r.allowed = 2.0 * n * d * d + 2.0 * r.z_next * d;
  r.passed = r.gap <= r.allowed + tolerance;
  return r;
}

namespace {

struct Instance {
  MarkovSource source;
  Past past;
  Bits x;
};

Instance continuity_instance(int ell, const DeltaSpec& delta, std::size_t n, std::uint64_t seed, std::size_t i) {
  const int memory = 2 * ell;
  MarkovSource source = gen_continuity(memory, delta, derive_seed(seed, 2 * i));
  Past past = Past::zeros(static_cast<std::size_t>(memory));
  Bits x = sample(source, past, n, derive_seed(seed, 2 * i + 1));
  return {std::move(source), std::move(past), std::move(x)};
}

}  // namespace

VerificationReport verify_truncation_batch(int ell, const DeltaSpec& delta, std::size_t n, std::size_t count,
                                           std::uint64_t seed) {
  require_ell(ell);
  require_trials(count);
  std::vector<TruncationResult> results(count);
  parallel_for(count, [&](std::size_t i) {
    const Instance in = continuity_instance(ell, delta, n, seed, i);
    results[i] = verify_truncation(in.source, in.past, ell, in.x, delta);
  });
  VerificationReport r;
  r.lemma = "truncation";
  r.params = Params().add("ell", ell).add("n", static_cast<double>(n)).add("delta", delta.to_string()).str();
  r.trials = count;
  double headroom = results.front().step_bound - results.front().margin;
  double max_margin = results.front().margin;
  for (const auto& t : results) {
    if (!t.passed) ++r.failures;
    headroom = std::min(headroom, t.step_bound - t.margin);
    max_margin = std::max(max_margin, t.margin);
  }
  r.extra = {{"max_margin", max_margin}, {"bound", results.front().bound}, {"min_headroom", headroom}};
  finish_exact(r);
  return r;
}

VerificationReport verify_chaining_batch(int ell, const DeltaSpec& delta, std::size_t n, std::size_t count,
                                         std::uint64_t seed) {
  require_ell(ell);
  require_trials(count);
  std::vector<ChainingResult> results(count);
  parallel_for(count, [&](std::size_t i) {
    const Instance in = continuity_instance(ell, delta, n, seed, i);
    results[i] = verify_chaining(in.source, in.past, ell, in.x, delta);
  });
  VerificationReport r;
  r.lemma = "chaining";
  r.params = Params().add("ell", ell).add("n", static_cast<double>(n)).add("delta", delta.to_string()).str();
  r.trials = count;
  double headroom = results.front().allowed - results.front().gap;
  double max_gap = results.front().gap;
  for (const auto& c : results) {
    if (!c.passed) ++r.failures;
    headroom = std::min(headroom, c.allowed - c.gap);
    max_gap = std::max(max_gap, c.gap);
  }
  r.extra = {{"max_gap", max_gap}, {"min_headroom", headroom}};
  finish_exact(r);
  return r;
}

// ---------------------------------------------------------------------------

std::vector<VerificationReport> default_suite(std::uint64_t seed, double trial_scale) {
  if (!(trial_scale > 0.0)) throw PreconditionError("trial scale must be positive");
  auto scaled = [&](double trials) {
    return std::max<std::size_t>(2, static_cast<std::size_t>(std::llround(trials * trial_scale)));
  };
  auto task = [&](const std::string& name) { return derive_seed(seed, name); };
  const DeltaSpec exp1 = DeltaSpec::exp(1.0);
  std::vector<VerificationReport> out;
  for (double q : {0.1, 0.3, 0.5}) {
    out.push_back(verify_domination(12, q, 200, task("domination:" + num(q))));
  }
  out.push_back(verify_state_count(2, 1.0 / 16, 1u << 14, scaled(1e4), task("state_count")));
  for (int ell : {2, 3}) {
    out.push_back(estimate_inv_ns(ell, 1.0 / 16, 1u << 12, scaled(1e4), task("inv_count:" + num(ell))).report);
  }
  for (int ell : {2, 3}) {
    out.push_back(verify_mse(ell, 1.0 / 16, 1u << 12, scaled(1e4), task("mse:" + num(ell))));
  }
  for (StoppingRule rule : {StoppingRule::Fixed, StoppingRule::FirstPassage, StoppingRule::RandomTime}) {
    out.push_back(verify_azuma_stopped(100, 5.0, scaled(1e6), task("azuma:" + to_string(rule)), rule));
  }
  {
    const MarkovSource source = gen_continuity(4, exp1, task("deviation:source"));
    out.push_back(verify_deviation(source, Past::zeros(4), 2, 1u << 12, scaled(1e4), task("deviation")));
  }
  out.push_back(verify_truncation_batch(3, exp1, 4096, 100, task("truncation")));
  out.push_back(verify_chaining_batch(3, exp1, 4096, 100, task("chaining")));
  return out;
}

}  // namespace mdelta::lab
