#include "mdelta/coders.hpp"

#include <cmath>
#include <stdexcept>

#include "mdelta/error.hpp"
#include "mdelta/parallel.hpp"

namespace mdelta {

double log2_prob(SequentialCoder& coder, BitView x) {
  coder.reset();
  double total = 0.0;
  for (Bit b : x) {
    total += std::log2(coder.prob(b));
    coder.update(b);
  }
  return total;
}

// ---------------------------------------------------------------------------

KtCoder::KtCoder(int ell, Past past) : ell_(ell), past_(std::move(past)) {
  if (ell < 0 || ell > kMaxMemory) throw PreconditionError("KT depth outside [0, " + std::to_string(kMaxMemory) + "]");
  past_.require(ell, "KT coder past");
  ones_.assign(std::size_t{1} << ell, 0);
  zeros_.assign(ones_.size(), 0);
  state_ = past_.state(ell_);
}

void KtCoder::reset() {
  std::fill(ones_.begin(), ones_.end(), 0U);
  std::fill(zeros_.begin(), zeros_.end(), 0U);
  state_ = past_.state(ell_);
}

double KtCoder::prob_one() const {
  const double a = ones_[state_];
  const double b = zeros_[state_];
  return (a + 0.5) / (a + b + 1.0);
}

void KtCoder::update(Bit bit) {
  if (bit) {
    ++ones_[state_];
  } else {
    ++zeros_[state_];
  }
  state_ = ((state_ << 1) | bit) & depth_mask(ell_);
}

// ---------------------------------------------------------------------------

MixtureCoder::MixtureCoder(int ell, Past past, std::size_t horizon) : kt_(ell, std::move(past)), horizon_(horizon) {}

void MixtureCoder::reset() {
  kt_.reset();
  t_ = 0;
  log2_kt_ = 0.0;
}

double MixtureCoder::kt_weight() const {
  // q_KT(prefix) / (q_KT(prefix) + 2^-t)
  return 1.0 / (1.0 + std::exp2(-static_cast<double>(t_) - log2_kt_));
}

double MixtureCoder::prob_one() const {
  if (t_ >= horizon_) {
    throw std::out_of_range("mixture coder queried at position " + std::to_string(t_ + 1) + " beyond horizon " +
                            std::to_string(horizon_));
  }
  const double w = kt_weight();
  return w * kt_.prob_one() + (1.0 - w) * 0.5;
}

void MixtureCoder::update(Bit bit) {
  if (t_ >= horizon_) throw std::out_of_range("mixture coder updated beyond its horizon");
  log2_kt_ += std::log2(kt_.prob(bit));
  kt_.update(bit);
  ++t_;
}

// ---------------------------------------------------------------------------

SourceCoder::SourceCoder(MarkovSource source, Past past) : source_(std::move(source)), past_(std::move(past)) {
  past_.require(source_.memory(), "source coder past");
  state_ = past_.state(source_.memory());
}

void SourceCoder::reset() { state_ = past_.state(source_.memory()); }

void SourceCoder::update(Bit bit) { state_ = ((state_ << 1) | bit) & depth_mask(source_.memory()); }

// ---------------------------------------------------------------------------

double ml_log2_prob(const CountTable& counts) {
  double total = 0.0;
  for (std::uint32_t w = 0; w < counts.width(); ++w) {
    const double n = static_cast<double>(counts.n(w));
    const double a = static_cast<double>(counts.n1(w));
    const double b = n - a;
    if (a > 0) total += a * std::log2(a / n);
    if (b > 0) total += b * std::log2(b / n);
  }
  return total;
}

namespace {

// Depth-first enumeration of {0,1}^n maintaining per-context counts and the
// running maximized log-likelihood, so each step is O(1).
class ShtarkovEnumerator {
 public:
  ShtarkovEnumerator(int ell, const Past& past, int n)
      : n_(n), mask_(depth_mask(ell)), ones_(std::size_t{1} << ell, 0), zeros_(ones_.size(), 0),
        ml_(static_cast<std::size_t>(n + 1) * static_cast<std::size_t>(n + 1)),
        out_(std::size_t{1} << n) {
    for (int a = 0; a <= n; ++a) {
      for (int b = 0; b <= n; ++b) {
        const double total = a + b;
        double v = 0.0;
        if (a > 0) v += a * std::log2(a / total);
        if (b > 0) v += b * std::log2(b / total);
        ml_[index(a, b)] = v;
      }
    }
    walk(0, past.state(ell), 0, 0.0);
  }

  std::vector<double>& values() { return out_; }

 private:
  std::size_t index(std::uint32_t a, std::uint32_t b) const {
    return static_cast<std::size_t>(a) * static_cast<std::size_t>(n_ + 1) + b;
  }

  void walk(int t, std::uint32_t state, std::size_t prefix, double log2_ml) {
    if (t == n_) {
      out_[prefix] = std::exp2(log2_ml);
      return;
    }
    auto& a = ones_[state];
    auto& b = zeros_[state];
    const double before = ml_[index(a, b)];
    ++b;
    walk(t + 1, (state << 1) & mask_, prefix << 1, log2_ml - before + ml_[index(a, b)]);
    --b;
    ++a;
    walk(t + 1, ((state << 1) | 1U) & mask_, (prefix << 1) | 1U, log2_ml - before + ml_[index(a, b)]);
    --a;
  }

  int n_;
  std::uint32_t mask_;
  std::vector<std::uint32_t> ones_, zeros_;
  std::vector<double> ml_;
  std::vector<double> out_;
};

}  // namespace

ShtarkovResult shtarkov_oracle(int ell, const Past& past, int n, bool keep_sequences, int cap) {
  if (n < 0) throw PreconditionError("sequence length must be non-negative");
  if (n > cap) {
    throw EnumerationCapError("Shtarkov enumeration over 2^" + std::to_string(n) + " sequences exceeds the cap n <= " +
                              std::to_string(cap) + "; the unconstrained memory-" + std::to_string(ell) +
                              " sum is only computed exactly at small n");
  }
  if (ell < 0 || ell > kMaxMemory) throw PreconditionError("memory depth out of range");
  past.require(ell, "Shtarkov past");
  ShtarkovEnumerator walk(ell, past, n);
  ShtarkovResult result;
  result.ell = ell;
  result.n = n;
  result.sum = pairwise_sum(walk.values());
  result.log2_sum = std::log2(result.sum);
  if (keep_sequences) result.max_likelihood = std::move(walk.values());
  return result;
}

// ---------------------------------------------------------------------------

NmlCoder::NmlCoder(int ell, Past past, int n, int cap) : n_(n) {
  ShtarkovResult table = shtarkov_oracle(ell, past, n, true, cap);
  log2_sum_ = table.log2_sum;
  auto levels = std::make_shared<std::vector<std::vector<double>>>(static_cast<std::size_t>(n) + 1);
  (*levels)[static_cast<std::size_t>(n)] = std::move(table.max_likelihood);
  for (int t = n - 1; t >= 0; --t) {
    const auto& child = (*levels)[static_cast<std::size_t>(t) + 1];
    auto& level = (*levels)[static_cast<std::size_t>(t)];
    level.resize(child.size() / 2);
    for (std::size_t j = 0; j < level.size(); ++j) level[j] = child[2 * j] + child[2 * j + 1];
  }
  prefix_mass_ = std::move(levels);
}

void NmlCoder::reset() {
  t_ = 0;
  prefix_ = 0;
}

double NmlCoder::prob_one() const {
  if (t_ >= n_) throw std::out_of_range("NML coder queried beyond its horizon");
  const auto& levels = *prefix_mass_;
  const double here = levels[static_cast<std::size_t>(t_)][prefix_];
  const double one = levels[static_cast<std::size_t>(t_) + 1][2 * prefix_ + 1];
  return one / here;
}

void NmlCoder::update(Bit bit) {
  if (t_ >= n_) throw std::out_of_range("NML coder updated beyond its horizon");
  prefix_ = 2 * prefix_ + bit;
  ++t_;
}

// ---------------------------------------------------------------------------

CoderKind parse_coder_kind(const std::string& name) {
  if (name == "uniform") return CoderKind::Uniform;
  if (name == "kt") return CoderKind::Kt;
  if (name == "mixture") return CoderKind::Mixture;
  if (name == "nml") return CoderKind::Nml;
  if (name == "source") return CoderKind::Source;
  throw PreconditionError("unknown coder '" + name + "' (uniform, kt, mixture, nml, source)");
}

std::string to_string(CoderKind kind) {
  switch (kind) {
    case CoderKind::Uniform: return "uniform";
    case CoderKind::Kt: return "kt";
    case CoderKind::Mixture: return "mixture";
    case CoderKind::Nml: return "nml";
    case CoderKind::Source: return "source";
  }
  return "?";
}

std::unique_ptr<SequentialCoder> make_coder(CoderKind kind, int ell, const Past& past, std::size_t n,
                                            const MarkovSource* source) {
  switch (kind) {
    case CoderKind::Uniform: return std::make_unique<UniformCoder>();
    case CoderKind::Kt: return std::make_unique<KtCoder>(ell, past);
    case CoderKind::Mixture: return std::make_unique<MixtureCoder>(ell, past, n);
    case CoderKind::Nml:
      if (n > static_cast<std::size_t>(kDefaultEnumerationCap)) {
        throw EnumerationCapError("NML coder needs n <= " + std::to_string(kDefaultEnumerationCap));
      }
      return std::make_unique<NmlCoder>(ell, past, static_cast<int>(n));
    case CoderKind::Source:
      if (!source) throw PreconditionError("source coder needs a source");
      return std::make_unique<SourceCoder>(*source, past);
  }
  throw PreconditionError("unknown coder kind");
}

}  // namespace mdelta
