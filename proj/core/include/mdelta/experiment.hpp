#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mdelta/bounds.hpp"
#include "mdelta/coders.hpp"
#include "mdelta/delta_spec.hpp"

namespace mdelta {

// Half-width of a hypercube whose sources lie in the continuity class of
// `delta`: distinct leaves of depth `memory` share at most memory-1 symbols,
// and a radius-d cube produces ratios up to 4d/(1-2d), so
// d = delta(memory-1) / (4 + 2 delta(memory-1)).
double class_hypercube_radius(const DeltaSpec& delta, int memory);

struct RedundancyPointOptions {
  std::size_t sources = 50;
  std::size_t trials = 32;  // sequences per source
  CoderKind coder = CoderKind::Mixture;
  std::uint64_t seed = 1;
  double se_multiplier = 5.0;
  std::optional<int> ell;  // default: scanned optimum of the refined bound
};

struct SourceRegret {
  std::uint64_t seed = 0;
  double mean = 0.0;
  double standard_error = 0.0;
  bool within_bound = false;  // mean <= bound + se_multiplier * se
};

struct RedundancyPoint {
  double n = 0.0;
  int ell = 0;
  int memory = 0;  // memory of the sampled sources (2 ell)
  double radius = 0.0;
  double refined = 0.0;       // bound at ell, stated form
  double refined_safe = 0.0;  // max of both refined forms
  double truncation = 0.0;
  double lower = 0.0;  // max over the scan of the lower bound
  std::vector<SourceRegret> per_source;
  double max_mean = 0.0;
  double avg_mean = 0.0;
  bool all_within = false;
};

// Hypercube sources of memory 2 ell inside the class, each measured with the
// coder at depth ell over `trials` sampled sequences (all-zeros past).
RedundancyPoint redundancy_point(double n, const DeltaSpec& delta, const RedundancyPointOptions& options);

std::vector<RedundancyPoint> redundancy_vs_n(const std::vector<double>& ns, const DeltaSpec& delta,
                                             const RedundancyPointOptions& options);

// Least-squares slope of log2(y) against log2(x); NaN with fewer than two
// positive points.
double log_log_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace mdelta
