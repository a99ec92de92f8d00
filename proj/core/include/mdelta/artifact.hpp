#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mdelta/bounds.hpp"
#include "mdelta/lemma_lab.hpp"
#include "mdelta/redundancy.hpp"

namespace mdelta {

// Provenance written as '#' lines at the top of every artifact.
struct ArtifactMeta {
  std::string command;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::vector<std::pair<std::string, std::string>> extra;
};

// 16 hex digits of FNV-1a over the canonical configuration text.
std::string config_hash(std::string_view canonical_config);

// Shortest round-trip form (%.17g, with "inf"/"nan" spelled out).
std::string format_double(double value);
std::string csv_escape(std::string_view field);

// Comma-separated, '\n' line ends, header row after the '#' metadata lines.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const ArtifactMeta& meta, std::vector<std::string> columns);

  void row(const std::vector<std::string>& fields);
  std::size_t rows() const noexcept { return rows_; }

 private:
  std::ostream& out_;
  std::size_t width_;
  std::size_t rows_ = 0;
};

void write_meta(std::ostream& out, const ArtifactMeta& meta);

// Column sets are fixed.
//   bounds.csv: n,ell,delta,lb_t1,ub_prop,ub_t12,r_ell,clamped
//   regret.csv: seed,n,ell,logp,logq,regret
//   verify.csv: lemma,params,trials,failures,empirical,bound,slack,verdict
void write_bounds_csv(std::ostream& out, const ArtifactMeta& meta, const std::vector<bounds::BoundReport>& reports);
void write_regret_csv(std::ostream& out, const ArtifactMeta& meta, const std::vector<RegretSample>& samples);
void write_verify_csv(std::ostream& out, const ArtifactMeta& meta,
                      const std::vector<lab::VerificationReport>& reports);

std::string verdict_label(const lab::VerificationReport& report);

}  // namespace mdelta
