#include "mdelta/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mdelta/error.hpp"
#include "mdelta/parallel.hpp"
#include "mdelta/redundancy.hpp"
#include "mdelta/rng.hpp"
#include "mdelta/source_model.hpp"

namespace mdelta {

double class_hypercube_radius(const DeltaSpec& delta, int memory) {
  if (memory < 1) throw PreconditionError("hypercube radius needs memory >= 1");
  const double d = delta(memory - 1);
  return d / (4.0 + 2.0 * d);
}

RedundancyPoint redundancy_point(double n, const DeltaSpec& delta, const RedundancyPointOptions& options) {
  if (options.sources < 1) throw PreconditionError("redundancy point needs at least one source");
  if (options.trials < 2) throw PreconditionError("redundancy point needs at least two trials per source");
  RedundancyPoint point;
  point.n = n;
  point.ell = options.ell.value_or(bounds::optimal_ell(n, delta, bounds::Regime::Refined).scanned);
  point.memory = 2 * point.ell;
  if (point.memory > kMaxMemory) throw PreconditionError("source memory 2 ell exceeds the supported maximum");
  point.radius = class_hypercube_radius(delta, point.memory);
  point.refined = bounds::refined_upper_bound(n, point.ell, delta);
  point.refined_safe = bounds::refined_safe_bound(n, point.ell, delta);
  point.truncation = bounds::truncation_upper_term(n, point.ell, delta);
  point.lower = bounds::optimal_ell(n, delta, bounds::Regime::Lower).scanned_value;

  const std::size_t length = static_cast<std::size_t>(n);
  const Past past = Past::zeros(static_cast<std::size_t>(point.memory));
  point.per_source.resize(options.sources);
  for (std::size_t i = 0; i < options.sources; ++i) {
    const std::uint64_t source_seed = derive_seed(options.seed, 2 * i);
    const MarkovSource source = gen_hypercube(point.memory, point.radius, source_seed);
    const auto coder = make_coder(options.coder, point.ell, past, length, &source);
    const McEstimate est =
        mc_avg_redundancy(source, past, *coder, length, options.trials, derive_seed(options.seed, 2 * i + 1));
    SourceRegret& r = point.per_source[i];
    r.seed = source_seed;
    r.mean = est.mean;
    r.standard_error = est.standard_error;
    r.within_bound = est.mean <= point.refined + options.se_multiplier * est.standard_error;
  }
  std::vector<double> means;
  point.max_mean = -std::numeric_limits<double>::infinity();
  point.all_within = true;
  for (const auto& r : point.per_source) {
    means.push_back(r.mean);
    point.max_mean = std::max(point.max_mean, r.mean);
    point.all_within = point.all_within && r.within_bound;
  }
  point.avg_mean = pairwise_sum(means) / static_cast<double>(means.size());
  return point;
}

std::vector<RedundancyPoint> redundancy_vs_n(const std::vector<double>& ns, const DeltaSpec& delta,
                                             const RedundancyPointOptions& options) {
  std::vector<double> sorted = ns;
  std::sort(sorted.begin(), sorted.end());
  std::vector<RedundancyPoint> out;
  for (double n : sorted) {
    RedundancyPointOptions o = options;
    o.seed = derive_seed(options.seed, static_cast<std::uint64_t>(n));
    out.push_back(redundancy_point(n, delta, o));
  }
  return out;
}

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i) {
    if (x[i] > 0.0 && y[i] > 0.0) {
      lx.push_back(std::log2(x[i]));
      ly.push_back(std::log2(y[i]));
    }
  }
  if (lx.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const double k = static_cast<double>(lx.size());
  const double mx = pairwise_sum(lx) / k, my = pairwise_sum(ly) / k;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  return sxx > 0.0 ? sxy / sxx : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace mdelta
