#include "mdelta/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mdelta/error.hpp"

namespace mdelta::bounds {

namespace {

void require_ell(int ell) {
  if (ell < 1) throw PreconditionError("bound needs ell >= 1");
  if (ell > 30) throw PreconditionError("bound ell too large");
}

void require_n(double n) {
  if (!(n >= 2.0)) throw PreconditionError("bound needs n >= 2");
}

double tail_term(double n, int ell) {
  return (std::ldexp(1.0, 2 * ell + 1) - std::ldexp(1.0, ell)) / (n * n);
}

}  // namespace

double minimax_lower_bound(double n, int ell, const DeltaSpec& delta) {
  require_n(n);
  require_ell(ell);
  const double half = std::ldexp(1.0, ell - 1);
  const double full = std::ldexp(1.0, ell);
  const double log_inv_delta = -delta.log2_at(ell);
  const double volume = std::log2(4.0 * std::numbers::pi * std::numbers::e * ell);
  return half * std::log2(n) - full * (log_inv_delta + ell / 2.0) - half * (volume + 1.0);
}

double truncation_upper_term(double n, int ell, const DeltaSpec& delta) {
  require_n(n);
  require_ell(ell);
  return std::ldexp(1.0, ell - 1) * std::log2(n) + 2.0 * n * delta(ell);
}

double refined_upper_bound(double n, int ell, const DeltaSpec& delta) {
  require_n(n);
  require_ell(ell);
  const double log_n = std::log2(n);
  double total = std::ldexp(1.0, ell - 1) * log_n + n * delta(2 * ell);
  for (int k = ell; k <= 2 * ell; ++k) {
    const double d = delta(k);
    total += n * d * d + log_n * std::sqrt(n * std::ldexp(1.0, k)) * d;
  }
  return total + tail_term(n, ell);
}

double good_set_radius(double n, int ell, const DeltaSpec& delta) {
  require_n(n);
  require_ell(ell);
  const double log_n = std::log2(n);
  double total = n * delta(2 * ell);
  for (int k = ell; k <= 2 * ell; ++k) {
    const double d = delta(k);
    total += 2.0 * n * d * d + 2.0 * log_n * std::sqrt(n * std::ldexp(1.0, k + 1)) * d;
  }
  return total;
}

double refined_upper_bound_from_radius(double n, int ell, const DeltaSpec& delta) {
  return std::ldexp(1.0, ell - 1) * std::log2(n) + good_set_radius(n, ell, delta) + tail_term(n, ell);
}

double refined_safe_bound(double n, int ell, const DeltaSpec& delta) {
  return std::max(refined_upper_bound(n, ell, delta), refined_upper_bound_from_radius(n, ell, delta));
}

int default_ell_max(double n) {
  require_n(n);
  return std::clamp(static_cast<int>(std::ceil(std::log2(n))), 1, 16);
}

Optimum truncation_upper_bound(double n, const DeltaSpec& delta, int ell_max) {
  if (ell_max < 1) throw PreconditionError("ell scan needs ell_max >= 1");
  Optimum best{truncation_upper_term(n, 1, delta), 1};
  for (int ell = 2; ell <= ell_max; ++ell) {
    const double v = truncation_upper_term(n, ell, delta);
    if (v < best.value) best = {v, ell};
  }
  return best;
}

Regime parse_regime(const std::string& name) {
  if (name == "lower") return Regime::Lower;
  if (name == "truncation") return Regime::Truncation;
  if (name == "refined") return Regime::Refined;
  throw PreconditionError("unknown regime '" + name + "' (lower, truncation, refined)");
}

std::string to_string(Regime regime) {
  switch (regime) {
    case Regime::Lower: return "lower";
    case Regime::Truncation: return "truncation";
    case Regime::Refined: return "refined";
  }
  return "?";
}

double regime_bound(Regime regime, double n, int ell, const DeltaSpec& delta) {
  switch (regime) {
    case Regime::Lower: return minimax_lower_bound(n, ell, delta);
    case Regime::Truncation: return truncation_upper_term(n, ell, delta);
    case Regime::Refined: return refined_upper_bound(n, ell, delta);
  }
  return 0.0;
}

EllChoice optimal_ell(double n, const DeltaSpec& delta, Regime regime, int ell_max) {
  if (!(n >= 4.0)) throw PreconditionError("optimal ell needs n >= 4");
  if (ell_max <= 0) ell_max = default_ell_max(n);
  EllChoice choice;
  const double log_n = std::log2(n);
  const double loglog_n = std::log2(log_n);
  const double c = delta.parameter();
  switch (delta.kind()) {
    case DeltaSpec::Kind::Poly:
      choice.prescribed_real = regime == Regime::Truncation ? log_n - c * loglog_n : log_n - 2.0 * c * loglog_n;
      break;
    case DeltaSpec::Kind::Exp:
      choice.prescribed_real = regime == Regime::Truncation ? log_n / (c + 1.0) : log_n / (2.0 * c + 1.0);
      break;
    case DeltaSpec::Kind::DoubleExp:
      choice.prescribed_real = loglog_n / c;
      break;
    case DeltaSpec::Kind::Table:
    case DeltaSpec::Kind::Constant:
      break;
  }
  if (choice.prescribed_real) {
    choice.prescribed = std::clamp(static_cast<int>(std::lround(*choice.prescribed_real)), 1, ell_max);
  }
  const bool maximize = regime == Regime::Lower;
  choice.scanned = 1;
  choice.scanned_value = regime_bound(regime, n, 1, delta);
  for (int ell = 2; ell <= ell_max; ++ell) {
    const double v = regime_bound(regime, n, ell, delta);
    if (maximize ? v > choice.scanned_value : v < choice.scanned_value) {
      choice.scanned = ell;
      choice.scanned_value = v;
    }
  }
  return choice;
}

BoundReport bound_report(double n, const DeltaSpec& delta, int ell_lo, int ell_hi) {
  if (ell_lo < 1 || ell_hi < ell_lo) throw PreconditionError("bound report needs 1 <= ell_lo <= ell_hi");
  BoundReport report;
  report.n = n;
  report.delta = delta;
  double best_lower = 0.0, best_trunc = 0.0, best_refined = 0.0;
  for (int ell = ell_lo; ell <= ell_hi; ++ell) {
    BoundRow row;
    row.ell = ell;
    row.lower = minimax_lower_bound(n, ell, delta);
    row.truncation = truncation_upper_term(n, ell, delta);
    row.refined = refined_upper_bound(n, ell, delta);
    row.refined_from_radius = refined_upper_bound_from_radius(n, ell, delta);
    row.radius = good_set_radius(n, ell, delta);
    for (int k = ell; k <= 2 * ell; ++k) row.clamped = row.clamped || delta.clamped_at(k);
    if (ell == ell_lo || row.lower > best_lower) best_lower = row.lower, report.argmax_lower = ell;
    if (ell == ell_lo || row.truncation < best_trunc) best_trunc = row.truncation, report.argmin_truncation = ell;
    if (ell == ell_lo || row.refined < best_refined) best_refined = row.refined, report.argmin_refined = ell;
    report.rows.push_back(row);
  }
  report.lower_below_upper = best_lower <= std::min(best_trunc, best_refined);
  return report;
}

}  // namespace mdelta::bounds
