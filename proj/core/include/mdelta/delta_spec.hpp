#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace mdelta {

// The continuity-rate function: a positive sequence m -> delta(m) bounding how
// far the transition probabilities of two states sharing a length-m suffix may
// differ multiplicatively.
//
// Every evaluation is min(formula, clamp(m)) with clamp(m) = (1 - 1e-9)/(4m)
// for m >= 1 and clamp(0) = cap0, which keeps the family admissible
// (delta(m) < 1/(4m)). An unclamped variant exists for formula reproduction
// and for auxiliary band families; it still applies cap0 at depth 0.
class DeltaSpec {
 public:
  enum class Kind { Poly, Exp, DoubleExp, Table, Constant };

  static DeltaSpec poly(double c);         // m^-c, c > 1
  static DeltaSpec exp(double c);          // 2^(-c m), c > 0
  static DeltaSpec double_exp(double c);   // 2^(-2^(c m)), c > 0
  static DeltaSpec table(std::vector<double> values);  // values[m], m >= 0
  static DeltaSpec constant(double value);

  // Textual forms: poly:c, exp:c, dexp:c, table:v0,v1,..., const:v, each
  // optionally followed by ":raw" (no admissibility clamp) and/or
  // ":cap=<v>" (depth-0 value).
  static DeltaSpec parse(std::string_view text);
  std::string to_string() const;

  DeltaSpec with_cap0(double cap0) const;
  DeltaSpec unclamped() const;

  Kind kind() const noexcept { return kind_; }
  double parameter() const noexcept { return param_; }
  double cap0() const noexcept { return cap0_; }
  bool clamps() const noexcept { return clamp_; }

  // delta(m). DoubleExp values below the smallest subnormal are returned as
  // that subnormal so the result stays positive; log2_at keeps full range.
  double operator()(int m) const;
  double log2_at(int m) const;

  // True when the admissibility clamp (or cap0) replaced the formula at m.
  bool clamped_at(int m) const;
  static double admissible_limit(int m);

  friend bool operator==(const DeltaSpec&, const DeltaSpec&) = default;

 private:
  DeltaSpec(Kind kind, double param, std::vector<double> table)
      : kind_(kind), param_(param), table_(std::move(table)) {}
  double formula_log2(int m) const;
  double limit_log2(int m) const;

  Kind kind_;
  double param_ = 0.0;
  std::vector<double> table_;
  double cap0_ = 1.0;
  bool clamp_ = true;
};

}  // namespace mdelta
