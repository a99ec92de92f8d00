#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mdelta/delta_spec.hpp"

namespace mdelta::bounds {

// Closed-form redundancy bounds for continuity-constrained Markov classes.
// All logarithms are base 2; n is the sequence length (a double so that
// desk-scale and very large n share one code path).

// Lower bound on the average minimax redundancy of memory-ell sources:
//   2^(l-1) log n - 2^l (log 1/delta(l) + l/2) - 2^(l-1) (log(4 pi e l) + 1).
// Requires ell >= 1.
double minimax_lower_bound(double n, int ell, const DeltaSpec& delta);

// Truncation upper bound for one ell: 2^(l-1) log n + 2 n delta(l).
double truncation_upper_term(double n, int ell, const DeltaSpec& delta);

// Refined upper bound as stated:
//   2^(l-1) log n + n delta(2l)
//     + sum_{k=l}^{2l} (n delta(k)^2 + log n sqrt(n 2^k) delta(k))
//     + (2^(2l+1) - 2^l) / n^2.
double refined_upper_bound(double n, int ell, const DeltaSpec& delta);

// Radius r_l of the good-sequence set:
//   n delta(2l) + sum_{k=l}^{2l} (2 n delta(k)^2 + 2 log n sqrt(n 2^(k+1)) delta(k)).
double good_set_radius(double n, int ell, const DeltaSpec& delta);

// The refined bound rebuilt from good_set_radius:
//   2^(l-1) log n + r_l + (2^(2l+1) - 2^l) / n^2.
// It carries the radius' larger constants; refined_safe_bound is the max of
// the two forms.
double refined_upper_bound_from_radius(double n, int ell, const DeltaSpec& delta);
double refined_safe_bound(double n, int ell, const DeltaSpec& delta);

// Scan range 1 .. min(ceil(log2 n), 16).
int default_ell_max(double n);

struct Optimum {
  double value = 0.0;
  int ell = 0;
};

// min over ell in [1, ell_max] of truncation_upper_term.
Optimum truncation_upper_bound(double n, const DeltaSpec& delta, int ell_max);

enum class Regime { Lower, Truncation, Refined };

Regime parse_regime(const std::string& name);
std::string to_string(Regime regime);

// Bound value that `regime` optimizes (maximized for Lower, minimized
// otherwise); Refined uses the stated form.
double regime_bound(Regime regime, double n, int ell, const DeltaSpec& delta);

struct EllChoice {
  std::optional<double> prescribed_real;  // asymptotic prescription before rounding
  std::optional<int> prescribed;          // rounded and clipped to [1, ell_max]
  int scanned = 1;                        // exhaustive optimum over [1, ell_max]
  double scanned_value = 0.0;
};

// Asymptotic depth prescriptions:
//   Lower:      poly: log n - 2c log log n, exp: log n/(2c+1), dexp: (1/c) log log n
//   Truncation: poly: log n - c log log n,  exp: log n/(c+1),  dexp: (1/c) log log n
//   Refined:    exp: log n/(2c+1); other kinds use the Lower prescriptions.
// Table and constant families have no prescription. Requires n >= 4.
EllChoice optimal_ell(double n, const DeltaSpec& delta, Regime regime, int ell_max = 0);

struct BoundRow {
  int ell = 0;
  double lower = 0.0;
  double truncation = 0.0;
  double refined = 0.0;
  double refined_from_radius = 0.0;
  double radius = 0.0;
  bool clamped = false;  // admissibility clamp active at some depth in [ell, 2 ell]
};

struct BoundReport {
  double n = 0.0;
  DeltaSpec delta = DeltaSpec::exp(1.0);
  std::vector<BoundRow> rows;
  int argmax_lower = 0;
  int argmin_truncation = 0;
  int argmin_refined = 0;
  // max lower <= min of both upper scans. Recorded, not enforced: the bounds
  // are asymptotic and may cross at small n.
  bool lower_below_upper = true;
};

BoundReport bound_report(double n, const DeltaSpec& delta, int ell_lo, int ell_hi);

}  // namespace mdelta::bounds
