#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mdelta/bits.hpp"
#include "mdelta/delta_spec.hpp"

namespace mdelta {

// Largest memory handled by the dense state tables below.
inline constexpr int kMaxMemory = 20;

// Leaves of a complete binary context tree. Every binary string of length
// memory() has exactly one leaf as a suffix.
class ContextTree {
 public:
  ContextTree() : ContextTree(full(0)) {}

  static ContextTree full(int depth);
  // Validates completeness and the no-leaf-is-a-suffix-of-another property.
  static ContextTree from_leaves(std::vector<Context> leaves);

  int memory() const noexcept { return memory_; }
  std::size_t size() const noexcept { return leaves_.size(); }
  std::span<const Context> leaves() const noexcept { return leaves_; }
  const Context& leaf(std::size_t index) const { return leaves_.at(index); }

  // Leaf index for a full-memory state (last memory() bits as an index).
  std::size_t leaf_of_state(std::uint32_t state) const { return state_to_leaf_[state]; }
  // Leaf index whose context is a suffix of `history` (length >= memory()).
  std::size_t context_of(BitView history) const;
  std::optional<std::size_t> find(const Context& leaf) const;

  friend bool operator==(const ContextTree& a, const ContextTree& b) { return a.leaves_ == b.leaves_; }

 private:
  ContextTree(std::vector<Context> leaves, int memory, std::vector<std::uint32_t> state_to_leaf)
      : leaves_(std::move(leaves)), memory_(memory), state_to_leaf_(std::move(state_to_leaf)) {}

  std::vector<Context> leaves_;  // sorted by (length, bits)
  int memory_ = 0;
  std::vector<std::uint32_t> state_to_leaf_;
};

// Binary Markov source: a context tree with P(next bit = 1 | leaf) per leaf.
class MarkovSource {
 public:
  // theta is indexed like tree.leaves(); every entry must lie in (0, 1).
  MarkovSource(ContextTree tree, std::vector<double> theta);

  // Convenience for full depth-`depth` trees; theta indexed by state.
  static MarkovSource full(int depth, std::vector<double> theta);
  static MarkovSource iid(double theta) { return full(0, {theta}); }

  const ContextTree& tree() const noexcept { return tree_; }
  int memory() const noexcept { return tree_.memory(); }
  std::span<const double> theta() const noexcept { return theta_; }
  double theta(std::size_t leaf) const { return theta_.at(leaf); }
  double theta_of_state(std::uint32_t state) const { return theta_[tree_.leaf_of_state(state)]; }
  // Probability of a 1 after the leaf that is a suffix of `context`
  // (|context| >= memory()).
  double theta_of(const Context& context) const;

  friend bool operator==(const MarkovSource&, const MarkovSource&) = default;

 private:
  ContextTree tree_;
  std::vector<double> theta_;
};

// Per-context counts of a sample with a fixed past: n_w and n_w1 for every
// w in {0,1}^depth, indexed by the context's state index.
class CountTable {
 public:
  CountTable(int depth, std::vector<std::uint64_t> n, std::vector<std::uint64_t> n1);

  int depth() const noexcept { return depth_; }
  std::size_t width() const noexcept { return n_.size(); }
  std::uint64_t n(std::uint32_t w) const { return n_.at(w); }
  std::uint64_t n1(std::uint32_t w) const { return n1_.at(w); }
  std::uint64_t n0(std::uint32_t w) const { return n_.at(w) - n1_.at(w); }
  std::uint64_t total() const;

  // Sums sibling rows (contexts that differ only in their oldest bit).
  CountTable marginalize() const;

  friend bool operator==(const CountTable&, const CountTable&) = default;

 private:
  int depth_;
  std::vector<std::uint64_t> n_;
  std::vector<std::uint64_t> n1_;
};

CountTable count_table(BitView x, const Past& past, int depth);

// log2 p(x | past). Contexts roll through past followed by x.
double log_prob(const MarkovSource& source, const Past& past, BitView x);

Bits sample(const MarkovSource& source, const Past& past, std::size_t n, std::uint64_t seed);

// Stationary law of the memory-ell shift-register chain.
struct StationaryDistribution {
  int memory = 0;
  std::vector<double> state_probability;  // indexed by full-memory state
  std::size_t iterations = 0;
  double residual = 0.0;  // ||pi P - pi||_1 at exit

  // Stationary mass of all states having `w` as a suffix, or (when |w|
  // exceeds the memory) of the state that is a suffix of `w`.
  double mass(const Context& w) const;
};

struct StationaryOptions {
  double tolerance = 1e-13;
  std::size_t max_iterations = 1'000'000;
};

// Power iteration from the uniform law. Throws NumericError (carrying the
// residual) when the iteration cap is reached first.
StationaryDistribution stationary(const MarkovSource& source, StationaryOptions options = {});

// Stationary probability of a leaf: the mass of states it is a suffix of.
double leaf_probability(const MarkovSource& source, const StationaryDistribution& pi, std::size_t leaf);

// Leaves compatible with w: those having w as a suffix, or the single leaf
// that is a suffix of w when w is longer than that branch of the tree.
std::vector<std::size_t> leaves_under(const ContextTree& tree, const Context& w);

// p(1 | w) as the stationary-weighted average of the leaf parameters over
// leaves_under(w). Throws PreconditionError if the stationary mass of w is 0.
double aggregate_conditional(const MarkovSource& source, const Context& w);
double aggregate_conditional(const MarkovSource& source, const StationaryDistribution& pi, const Context& w);

// Empirical aggregated probability of a 1 after w: sum over refining leaves s
// of n_s theta(s), divided by n_w. When |w| >= memory the sum has a single
// term and the value is theta of the leaf suffix of w, returned whether or
// not w occurs. Otherwise std::nullopt when n_w = 0.
std::optional<double> empirical_aggregate(const MarkovSource& source, BitView x, const Past& past,
                                          const Context& w);

// Same quantity for every w in {0,1}^depth at once (indexed by state), from a
// count table of depth max(depth, memory).
std::vector<std::optional<double>> empirical_aggregates(const MarkovSource& source, const CountTable& deep,
                                                        int depth);

// log2 of prod_w ptilde_w^{n_w1} (1 - ptilde_w)^{n_w0} over w in {0,1}^depth
// (contexts with n_w = 0 contribute nothing).
double log_prob_empirical(const MarkovSource& source, BitView x, const Past& past, int depth);

// Memory-depth source whose parameter at w is theta(s*) with s* the
// length-memory extension of w by prepended zeros. Sources whose memory is
// already <= depth are returned unchanged.
MarkovSource truncate(const MarkovSource& source, int depth);

struct ContinuityViolation {
  Context s1;  // leaf attaining the larger parameter
  Context s2;  // leaf attaining the smaller parameter
  Context w;   // common suffix
  int symbol;  // 1 for theta, 0 for 1 - theta
  double ratio_minus_one;
  double allowed;
};

struct ContinuityReport {
  std::vector<ContinuityViolation> violations;
  double worst_excess = 0.0;  // max (ratio - 1 - allowed), <= 0 when passing
  bool passed() const noexcept { return violations.empty(); }
};

// Checks |p(a|s1)/p(a|s2) - 1| <= delta(|w|) for all leaf pairs, both
// symbols, and every common suffix w. For each w the extreme pair over the
// leaves below w is reported.
ContinuityReport check_continuity(const MarkovSource& source, const DeltaSpec& delta);

// Full depth-ell tree with theta uniform on [1/2 - radius, 1/2 + radius].
MarkovSource gen_hypercube(int ell, double radius, std::uint64_t seed);

// Largest ratio |theta1/theta2 - 1| a hypercube source of the given radius can
// produce: 4r/(1 - 2r).
double hypercube_ratio_bound(double radius);

// Full depth-ell tree satisfying the continuity condition for delta, built by
// multiplicative refinement from a root near 1/2.
MarkovSource gen_continuity(int ell, const DeltaSpec& delta, std::uint64_t seed);

}  // namespace mdelta
