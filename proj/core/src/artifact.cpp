#include "mdelta/artifact.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "mdelta/error.hpp"
#include "mdelta/rng.hpp"
#include "mdelta/version.hpp"

namespace mdelta {

std::string config_hash(std::string_view canonical_config) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(canonical_config)));
  return buf;
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_meta(std::ostream& out, const ArtifactMeta& meta) {
  out << "# mdelta " << kVersion << '\n';
  if (!meta.command.empty()) out << "# command: " << meta.command << '\n';
  out << "# seed: " << meta.seed << '\n';
  out << "# config_hash: " << meta.config_hash << '\n';
  for (const auto& [k, v] : meta.extra) out << "# " << k << ": " << v << '\n';
}

CsvWriter::CsvWriter(std::ostream& out, const ArtifactMeta& meta, std::vector<std::string> columns)
    : out_(out), width_(columns.size()) {
  write_meta(out_, meta);
  for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << csv_escape(columns[i]);
  out_ << '\n';
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  if (fields.size() != width_) throw PreconditionError("csv row width does not match the header");
  for (std::size_t i = 0; i < fields.size(); ++i) out_ << (i ? "," : "") << csv_escape(fields[i]);
  out_ << '\n';
  ++rows_;
}

void write_bounds_csv(std::ostream& out, const ArtifactMeta& meta, const std::vector<bounds::BoundReport>& reports) {
  CsvWriter csv(out, meta, {"n", "ell", "delta", "lb_t1", "ub_prop", "ub_t12", "r_ell", "clamped"});
  for (const auto& report : reports) {
    for (const auto& row : report.rows) {
      csv.row({format_double(report.n), std::to_string(row.ell), report.delta.to_string(), format_double(row.lower),
               format_double(row.truncation), format_double(row.refined), format_double(row.radius),
               row.clamped ? "1" : "0"});
    }
  }
}

void write_regret_csv(std::ostream& out, const ArtifactMeta& meta, const std::vector<RegretSample>& samples) {
  CsvWriter csv(out, meta, {"seed", "n", "ell", "logp", "logq", "regret"});
  for (const auto& s : samples) {
    csv.row({std::to_string(s.seed), std::to_string(s.n), std::to_string(s.ell), format_double(s.log2_p),
             format_double(s.log2_q), format_double(s.regret)});
  }
}

std::string verdict_label(const lab::VerificationReport& report) {
  if (report.skipped) return "skipped";
  if (!report.passed) return "fail";
  return report.trivial ? "pass-trivial" : "pass";
}

void write_verify_csv(std::ostream& out, const ArtifactMeta& meta,
                      const std::vector<lab::VerificationReport>& reports) {
  CsvWriter csv(out, meta, {"lemma", "params", "trials", "failures", "empirical", "bound", "slack", "verdict"});
  for (const auto& r : reports) {
    csv.row({r.lemma, r.params, std::to_string(r.trials), std::to_string(r.failures), format_double(r.empirical),
             format_double(r.bound), format_double(r.slack), verdict_label(r)});
  }
}

}  // namespace mdelta
