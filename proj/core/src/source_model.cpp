#include "mdelta/source_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <unordered_map>

#include "mdelta/error.hpp"
#include "mdelta/rng.hpp"

namespace mdelta {

namespace {

bool tree_order(const Context& a, const Context& b) {
  return a.length != b.length ? a.length < b.length : a.bits < b.bits;
}

std::uint64_t context_key(const Context& c) {
  return (static_cast<std::uint64_t>(c.length) << 32) | c.bits;
}

void require_depth(int depth, int limit, const char* what) {
  if (depth < 0 || depth > limit) {
    throw PreconditionError(std::string(what) + " depth " + std::to_string(depth) + " outside [0, " +
                            std::to_string(limit) + "]");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// ContextTree

ContextTree ContextTree::full(int depth) {
  require_depth(depth, kMaxMemory, "context tree");
  const std::uint32_t width = std::uint32_t{1} << depth;
  std::vector<Context> leaves;
  std::vector<std::uint32_t> map(width);
  leaves.reserve(width);
  for (std::uint32_t u = 0; u < width; ++u) {
    leaves.push_back(Context{u, depth});
    map[u] = u;
  }
  return ContextTree(std::move(leaves), depth, std::move(map));
}

ContextTree ContextTree::from_leaves(std::vector<Context> leaves) {
  if (leaves.empty()) throw PreconditionError("context tree needs at least one leaf");
  int memory = 0;
  for (const auto& leaf : leaves) {
    require_depth(leaf.length, kMaxMemory, "leaf");
    if ((leaf.bits & ~depth_mask(leaf.length)) != 0) throw PreconditionError("leaf bits exceed its length");
    memory = std::max(memory, leaf.length);
  }
  std::sort(leaves.begin(), leaves.end(), tree_order);
  std::unordered_map<std::uint64_t, std::uint32_t> index;
  for (std::uint32_t i = 0; i < leaves.size(); ++i) {
    if (!index.emplace(context_key(leaves[i]), i).second) {
      throw PreconditionError("duplicate leaf '" + leaves[i].to_string() + "'");
    }
  }
  const std::uint32_t width = std::uint32_t{1} << memory;
  std::vector<std::uint32_t> map(width);
  for (std::uint32_t u = 0; u < width; ++u) {
    int found = 0;
    for (int k = 0; k <= memory; ++k) {
      auto it = index.find(context_key(Context{u & depth_mask(k), k}));
      if (it != index.end()) {
        map[u] = it->second;
        ++found;
      }
    }
    const std::string state = Context{u, memory}.to_string();
    if (found == 0) throw PreconditionError("context tree is incomplete: no leaf is a suffix of " + state);
    if (found > 1) throw PreconditionError("context tree has nested leaves above state " + state);
  }
  return ContextTree(std::move(leaves), memory, std::move(map));
}

std::size_t ContextTree::context_of(BitView history) const {
  if (history.size() < static_cast<std::size_t>(memory_)) {
    throw PreconditionError("history of " + std::to_string(history.size()) + " bits is shorter than memory " +
                            std::to_string(memory_));
  }
  return state_to_leaf_[trailing_state(history, memory_)];
}

std::optional<std::size_t> ContextTree::find(const Context& leaf) const {
  auto it = std::lower_bound(leaves_.begin(), leaves_.end(), leaf, tree_order);
  if (it == leaves_.end() || *it != leaf) return std::nullopt;
  return static_cast<std::size_t>(it - leaves_.begin());
}

// ---------------------------------------------------------------------------
// MarkovSource

MarkovSource::MarkovSource(ContextTree tree, std::vector<double> theta)
    : tree_(std::move(tree)), theta_(std::move(theta)) {
  if (theta_.size() != tree_.size()) {
    throw PreconditionError("source has " + std::to_string(tree_.size()) + " leaves but " +
                            std::to_string(theta_.size()) + " parameters");
  }
  for (std::size_t i = 0; i < theta_.size(); ++i) {
    if (!(theta_[i] > 0.0 && theta_[i] < 1.0)) {
      throw PreconditionError("parameter of leaf '" + tree_.leaf(i).to_string() + "' is not in (0, 1)");
    }
  }
}

MarkovSource MarkovSource::full(int depth, std::vector<double> theta) {
  return MarkovSource(ContextTree::full(depth), std::move(theta));
}

double MarkovSource::theta_of(const Context& context) const {
  if (context.length < memory()) {
    throw PreconditionError("context '" + context.to_string() + "' is shorter than memory " +
                            std::to_string(memory()));
  }
  return theta_of_state(context.bits & depth_mask(memory()));
}

// ---------------------------------------------------------------------------
// Counts and probabilities

CountTable::CountTable(int depth, std::vector<std::uint64_t> n, std::vector<std::uint64_t> n1)
    : depth_(depth), n_(std::move(n)), n1_(std::move(n1)) {
  require_depth(depth, kMaxContextLength, "count table");
  if (n_.size() != (std::size_t{1} << depth) || n1_.size() != n_.size()) {
    throw PreconditionError("count table rows do not match depth");
  }
  for (std::size_t i = 0; i < n_.size(); ++i) {
    if (n1_[i] > n_[i]) throw PreconditionError("count table has n_w1 > n_w");
  }
}

std::uint64_t CountTable::total() const {
  std::uint64_t t = 0;
  for (auto v : n_) t += v;
  return t;
}

CountTable CountTable::marginalize() const {
  if (depth_ == 0) throw PreconditionError("cannot marginalize a depth-0 count table");
  const std::size_t half = n_.size() / 2;
  std::vector<std::uint64_t> n(half, 0), n1(half, 0);
  for (std::size_t u = 0; u < n_.size(); ++u) {
    n[u & (half - 1)] += n_[u];
    n1[u & (half - 1)] += n1_[u];
  }
  return CountTable(depth_ - 1, std::move(n), std::move(n1));
}

CountTable count_table(BitView x, const Past& past, int depth) {
  require_depth(depth, kMaxContextLength, "count table");
  std::uint32_t state = past.state(depth);
  const std::uint32_t mask = depth_mask(depth);
  std::vector<std::uint64_t> n(std::size_t{1} << depth, 0), n1(n.size(), 0);
  for (Bit b : x) {
    ++n[state];
    n1[state] += b;
    state = ((state << 1) | b) & mask;
  }
  return CountTable(depth, std::move(n), std::move(n1));
}

double log_prob(const MarkovSource& source, const Past& past, BitView x) {
  const int memory = source.memory();
  std::uint32_t state = past.state(memory);
  const std::uint32_t mask = depth_mask(memory);
  const auto& tree = source.tree();
  std::vector<double> log1(tree.size()), log0(tree.size());
  for (std::size_t i = 0; i < tree.size(); ++i) {
    log1[i] = std::log2(source.theta(i));
    log0[i] = std::log2(1.0 - source.theta(i));
  }
  double total = 0.0;
  for (Bit b : x) {
    const std::size_t leaf = tree.leaf_of_state(state);
    total += b ? log1[leaf] : log0[leaf];
    state = ((state << 1) | b) & mask;
  }
  return total;
}

Bits sample(const MarkovSource& source, const Past& past, std::size_t n, std::uint64_t seed) {
  const int memory = source.memory();
  std::uint32_t state = past.state(memory);
  const std::uint32_t mask = depth_mask(memory);
  Rng rng(seed);
  Bits out(n);
  for (std::size_t t = 0; t < n; ++t) {
    const Bit b = rng.uniform() < source.theta_of_state(state) ? 1 : 0;
    out[t] = b;
    state = ((state << 1) | b) & mask;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Stationary law and aggregation

double StationaryDistribution::mass(const Context& w) const {
  if (w.length > memory) {
    throw PreconditionError("mass of '" + w.to_string() + "' needs a context of at most memory " +
                            std::to_string(memory) + " bits");
  }
  const std::size_t stride = std::size_t{1} << w.length;
  double total = 0.0;
  for (std::size_t u = w.bits; u < state_probability.size(); u += stride) total += state_probability[u];
  return total;
}

StationaryDistribution stationary(const MarkovSource& source, StationaryOptions options) {
  const int memory = source.memory();
  const std::size_t width = std::size_t{1} << memory;
  const std::uint32_t mask = depth_mask(memory);
  StationaryDistribution out;
  out.memory = memory;
  std::vector<double> pi(width, 1.0 / static_cast<double>(width)), next(width);
  std::vector<double> theta(width);
  for (std::uint32_t u = 0; u < width; ++u) theta[u] = source.theta_of_state(u);

  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::uint32_t u = 0; u < width; ++u) {
      const std::uint32_t to0 = (u << 1) & mask;
      next[to0] += pi[u] * (1.0 - theta[u]);
      next[to0 | (mask ? 1U : 0U)] += pi[u] * theta[u];
    }
    if (memory == 0) next[0] = 1.0;
    double residual = 0.0;
    for (std::size_t u = 0; u < width; ++u) residual += std::abs(next[u] - pi[u]);
    out.iterations = it + 1;
    out.residual = residual;
    if (residual <= options.tolerance) {
      out.state_probability = std::move(pi);
      return out;
    }
    pi.swap(next);
  }
  throw NumericError("stationary power iteration did not converge in " + std::to_string(options.max_iterations) +
                         " iterations (residual " + std::to_string(out.residual) + ")",
                     out.residual);
}

double leaf_probability(const MarkovSource& source, const StationaryDistribution& pi, std::size_t leaf) {
  return pi.mass(source.tree().leaf(leaf));
}

std::vector<std::size_t> leaves_under(const ContextTree& tree, const Context& w) {
  std::vector<std::size_t> out;
  const auto leaves = tree.leaves();
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    if (w.is_suffix_of(leaves[i])) out.push_back(i);
  }
  if (out.empty()) {
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      if (leaves[i].is_suffix_of(w)) out.push_back(i);
    }
  }
  return out;
}

double aggregate_conditional(const MarkovSource& source, const StationaryDistribution& pi, const Context& w) {
  if (w.length >= source.memory()) return source.theta_of(w);
  const std::size_t stride = std::size_t{1} << w.length;
  double mass = 0.0, weighted = 0.0;
  for (std::size_t u = w.bits; u < pi.state_probability.size(); u += stride) {
    mass += pi.state_probability[u];
    weighted += pi.state_probability[u] * source.theta_of_state(static_cast<std::uint32_t>(u));
  }
  if (!(mass > 0.0)) throw PreconditionError("context '" + w.to_string() + "' has zero stationary mass");
  return weighted / mass;
}

double aggregate_conditional(const MarkovSource& source, const Context& w) {
  if (w.length >= source.memory()) return source.theta_of(w);
  return aggregate_conditional(source, stationary(source), w);
}

std::vector<std::optional<double>> empirical_aggregates(const MarkovSource& source, const CountTable& deep,
                                                        int depth) {
  const int memory = source.memory();
  if (deep.depth() < depth || deep.depth() < memory) {
    throw PreconditionError("empirical aggregates need counts of depth >= max(depth, memory)");
  }
  const std::size_t width = std::size_t{1} << depth;
  std::vector<std::optional<double>> out(width);
  if (depth >= memory) {
    for (std::uint32_t w = 0; w < width; ++w) out[w] = source.theta_of_state(w & depth_mask(memory));
    return out;
  }
  std::vector<double> weighted(width, 0.0);
  std::vector<std::uint64_t> count(width, 0);
  const std::uint32_t mem_mask = depth_mask(memory);
  for (std::uint32_t u = 0; u < deep.width(); ++u) {
    const std::uint64_t nu = deep.n(u);
    if (nu == 0) continue;
    const std::uint32_t w = u & depth_mask(depth);
    weighted[w] += static_cast<double>(nu) * source.theta_of_state(u & mem_mask);
    count[w] += nu;
  }
  for (std::size_t w = 0; w < width; ++w) {
    if (count[w] > 0) out[w] = weighted[w] / static_cast<double>(count[w]);
  }
  return out;
}

std::optional<double> empirical_aggregate(const MarkovSource& source, BitView x, const Past& past,
                                          const Context& w) {
  if (w.length >= source.memory()) return source.theta_of(w);
  const CountTable deep = count_table(x, past, source.memory());
  return empirical_aggregates(source, deep, w.length)[w.bits];
}

double log_prob_empirical(const MarkovSource& source, BitView x, const Past& past, int depth) {
  const int deep_depth = std::max(depth, source.memory());
  const CountTable deep = count_table(x, past, deep_depth);
  CountTable shallow = deep;
  while (shallow.depth() > depth) shallow = shallow.marginalize();
  const auto ptilde = empirical_aggregates(source, deep, depth);
  double total = 0.0;
  for (std::uint32_t w = 0; w < shallow.width(); ++w) {
    if (shallow.n(w) == 0) continue;
    const double p = *ptilde[w];
    if (shallow.n1(w)) total += static_cast<double>(shallow.n1(w)) * std::log2(p);
    if (shallow.n0(w)) total += static_cast<double>(shallow.n0(w)) * std::log2(1.0 - p);
  }
  return total;
}

MarkovSource truncate(const MarkovSource& source, int depth) {
  require_depth(depth, kMaxMemory, "truncation");
  if (source.memory() <= depth) return source;
  const std::size_t width = std::size_t{1} << depth;
  std::vector<double> theta(width);
  // Prepending zeros leaves the state index unchanged.
  for (std::uint32_t w = 0; w < width; ++w) theta[w] = source.theta_of_state(w);
  return MarkovSource::full(depth, std::move(theta));
}

// ---------------------------------------------------------------------------
// Continuity

ContinuityReport check_continuity(const MarkovSource& source, const DeltaSpec& delta) {
  struct Extremes {
    double lo = 2.0, hi = -1.0;
    std::size_t lo_leaf = 0, hi_leaf = 0;
  };
  const int memory = source.memory();
  const auto leaves = source.tree().leaves();
  std::vector<std::vector<Extremes>> nodes(static_cast<std::size_t>(memory) + 1);
  for (int k = 0; k <= memory; ++k) nodes[static_cast<std::size_t>(k)].resize(std::size_t{1} << k);
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    const double t = source.theta(i);
    for (int k = 0; k <= leaves[i].length; ++k) {
      Extremes& e = nodes[static_cast<std::size_t>(k)][leaves[i].bits & depth_mask(k)];
      if (t < e.lo) e.lo = t, e.lo_leaf = i;
      if (t > e.hi) e.hi = t, e.hi_leaf = i;
    }
  }
  ContinuityReport report;
  report.worst_excess = -std::numeric_limits<double>::infinity();
  for (int k = 0; k <= memory; ++k) {
    const double allowed = delta(k);
    const auto& level = nodes[static_cast<std::size_t>(k)];
    for (std::uint32_t w = 0; w < level.size(); ++w) {
      const Extremes& e = level[w];
      if (e.hi < 0.0 || e.lo_leaf == e.hi_leaf) continue;
      const double ratio1 = e.hi / e.lo - 1.0;
      const double ratio0 = (1.0 - e.lo) / (1.0 - e.hi) - 1.0;
      const Context wc{w, k};
      if (ratio1 - allowed > report.worst_excess) report.worst_excess = ratio1 - allowed;
      if (ratio0 - allowed > report.worst_excess) report.worst_excess = ratio0 - allowed;
      if (ratio1 > allowed) {
        report.violations.push_back({leaves[e.hi_leaf], leaves[e.lo_leaf], wc, 1, ratio1, allowed});
      }
      if (ratio0 > allowed) {
        report.violations.push_back({leaves[e.lo_leaf], leaves[e.hi_leaf], wc, 0, ratio0, allowed});
      }
    }
  }
  if (report.worst_excess == -std::numeric_limits<double>::infinity()) report.worst_excess = 0.0;
  return report;
}

// ---------------------------------------------------------------------------
// Generators

double hypercube_ratio_bound(double radius) { return 4.0 * radius / (1.0 - 2.0 * radius); }

MarkovSource gen_hypercube(int ell, double radius, std::uint64_t seed) {
  require_depth(ell, kMaxMemory, "hypercube");
  if (!(radius >= 0.0 && radius < 0.25)) throw PreconditionError("hypercube radius must lie in [0, 1/4)");
  Rng rng(seed);
  std::vector<double> theta(std::size_t{1} << ell);
  for (auto& t : theta) t = 0.5 + radius * (2.0 * rng.uniform() - 1.0);
  MarkovSource source = MarkovSource::full(ell, std::move(theta));
  if (radius > 0.0 && !check_continuity(source, DeltaSpec::constant(hypercube_ratio_bound(radius))
                                                     .unclamped()
                                                     .with_cap0(hypercube_ratio_bound(radius)))
                           .passed()) {
    throw GenerationError("hypercube source escaped its ratio band");
  }
  return source;
}

MarkovSource gen_continuity(int ell, const DeltaSpec& delta, std::uint64_t seed) {
  require_depth(ell, kMaxMemory, "continuity source");
  // Log-ratio budget available below a common suffix of length m, made
  // non-increasing so one budget covers every shorter common suffix too.
  constexpr double kSafety = 0.999;
  std::vector<double> budget(static_cast<std::size_t>(ell) + 1);
  for (int m = 0; m <= ell; ++m) {
    const double b = kSafety * std::log1p(delta(m));
    budget[static_cast<std::size_t>(m)] = m == 0 ? b : std::min(b, budget[static_cast<std::size_t>(m) - 1]);
  }
  // Depth-d refinement may move the log-parameter by at most g_d in total
  // spread; the tail sums telescope to budget[m] - budget[ell].
  std::vector<double> half_width(static_cast<std::size_t>(ell) + 1, 0.0);
  double growth = 1.0;
  for (int d = 1; d <= ell; ++d) {
    const double g = budget[static_cast<std::size_t>(d) - 1] - budget[static_cast<std::size_t>(d)];
    half_width[static_cast<std::size_t>(d)] = std::tanh(g / 2.0);
    growth *= 1.0 + half_width[static_cast<std::size_t>(d)];
  }
  const double root_hi = 0.5 / growth;

  Rng rng(seed);
  for (int attempt = 0; attempt < 64; ++attempt) {
    // Minority-symbol probabilities stay <= 1/2, so the ratio of the
    // complementary probabilities never exceeds the ratio of these.
    std::vector<double> level{rng.uniform(0.8 * root_hi, root_hi)};
    for (int d = 1; d <= ell; ++d) {
      const std::size_t parents = level.size();
      std::vector<double> next(parents * 2);
      for (std::size_t w = 0; w < next.size(); ++w) {
        const double u = 2.0 * rng.uniform() - 1.0;
        next[w] = level[w & (parents - 1)] * (1.0 + half_width[static_cast<std::size_t>(d)] * u);
      }
      level.swap(next);
    }
    const bool flip = rng.bernoulli(0.5);
    if (flip) {
      for (auto& t : level) t = 1.0 - t;
    }
    MarkovSource source = MarkovSource::full(ell, std::move(level));
    if (check_continuity(source, delta).passed()) return source;
  }
  throw GenerationError("could not sample a source satisfying continuity for " + delta.to_string());
}

}  // namespace mdelta
