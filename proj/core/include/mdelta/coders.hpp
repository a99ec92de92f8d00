#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "mdelta/bits.hpp"
#include "mdelta/source_model.hpp"

namespace mdelta {

// Deterministic next-bit probability assigner. A coder defines the
// distribution q(x) = prod_t q(x_t | x_1..x_{t-1}) over sequences fed to it
// since the last reset().
class SequentialCoder {
 public:
  virtual ~SequentialCoder() = default;

  virtual void reset() = 0;
  // q(next = 1 | bits seen so far), strictly inside (0, 1).
  virtual double prob_one() const = 0;
  virtual void update(Bit bit) = 0;
  virtual std::unique_ptr<SequentialCoder> clone() const = 0;
  virtual std::string name() const = 0;

  double prob(Bit bit) const {
    const double p1 = prob_one();
    return bit ? p1 : 1.0 - p1;
  }
};

// log2 q(x), starting from a reset coder.
double log2_prob(SequentialCoder& coder, BitView x);

class UniformCoder final : public SequentialCoder {
 public:
  void reset() override {}
  double prob_one() const override { return 0.5; }
  void update(Bit) override {}
  std::unique_ptr<SequentialCoder> clone() const override { return std::make_unique<UniformCoder>(*this); }
  std::string name() const override { return "uniform"; }
};

// Per-state add-half (Krichevsky-Trofimov) estimator over the length-ell
// context: q(1) = (ones + 1/2) / (ones + zeros + 1).
class KtCoder final : public SequentialCoder {
 public:
  KtCoder(int ell, Past past);

  void reset() override;
  double prob_one() const override;
  void update(Bit bit) override;
  std::unique_ptr<SequentialCoder> clone() const override { return std::make_unique<KtCoder>(*this); }
  std::string name() const override { return "kt"; }

  int depth() const noexcept { return ell_; }

 private:
  int ell_;
  Past past_;
  std::uint32_t state_ = 0;
  std::vector<std::uint32_t> ones_;
  std::vector<std::uint32_t> zeros_;
};

// q(x) = (q_KT(x) + 2^-n) / 2 for a fixed horizon n, realized sequentially:
// the next-bit rule mixes the KT rule with 1/2 using the posterior weight of
// the KT component given the prefix.
class MixtureCoder final : public SequentialCoder {
 public:
  MixtureCoder(int ell, Past past, std::size_t horizon);

  void reset() override;
  double prob_one() const override;  // throws std::out_of_range past the horizon
  void update(Bit bit) override;
  std::unique_ptr<SequentialCoder> clone() const override { return std::make_unique<MixtureCoder>(*this); }
  std::string name() const override { return "mixture"; }

 private:
  double kt_weight() const;

  KtCoder kt_;
  std::size_t horizon_;
  std::size_t t_ = 0;
  double log2_kt_ = 0.0;  // log2 q_KT(prefix)
};

// Codes with the true source distribution (zero regret).
class SourceCoder final : public SequentialCoder {
 public:
  SourceCoder(MarkovSource source, Past past);

  void reset() override;
  double prob_one() const override { return source_.theta_of_state(state_); }
  void update(Bit bit) override;
  std::unique_ptr<SequentialCoder> clone() const override { return std::make_unique<SourceCoder>(*this); }
  std::string name() const override { return "source"; }

 private:
  MarkovSource source_;
  Past past_;
  std::uint32_t state_ = 0;
};

// log2 of the maximum-likelihood probability of the counted sample among all
// memory-depth sources: sum_w n_w1 log2(n_w1/n_w) + n_w0 log2(n_w0/n_w).
double ml_log2_prob(const CountTable& counts);

inline constexpr int kDefaultEnumerationCap = 20;

struct ShtarkovResult {
  int ell = 0;
  int n = 0;
  double sum = 0.0;       // sum over x of the maximized likelihood
  double log2_sum = 0.0;  // worst-case minimax regret of memory-ell sources
  // Maximized likelihood per sequence, indexed with x_1 as the most
  // significant bit. Empty unless requested.
  std::vector<double> max_likelihood;
};

// Exhaustive Shtarkov sum over {0,1}^n for memory-ell sources with the given
// past. Throws EnumerationCapError when n > cap.
ShtarkovResult shtarkov_oracle(int ell, const Past& past, int n, bool keep_sequences = false,
                               int cap = kDefaultEnumerationCap);

// Normalized maximum likelihood: q(x) = max-likelihood(x) / Shtarkov sum,
// realized sequentially from prefix sums of the enumerated table.
class NmlCoder final : public SequentialCoder {
 public:
  NmlCoder(int ell, Past past, int n, int cap = kDefaultEnumerationCap);

  void reset() override;
  double prob_one() const override;
  void update(Bit bit) override;
  std::unique_ptr<SequentialCoder> clone() const override { return std::make_unique<NmlCoder>(*this); }
  std::string name() const override { return "nml"; }

  double log2_shtarkov_sum() const noexcept { return log2_sum_; }

 private:
  int n_;
  double log2_sum_;
  // prefix_mass_[t][j]: total maximized likelihood of sequences whose first
  // t bits spell j.
  std::shared_ptr<const std::vector<std::vector<double>>> prefix_mass_;
  int t_ = 0;
  std::size_t prefix_ = 0;
};

enum class CoderKind { Uniform, Kt, Mixture, Nml, Source };

CoderKind parse_coder_kind(const std::string& name);
std::string to_string(CoderKind kind);

// Builds a coder for horizon n. `source` is required for CoderKind::Source.
std::unique_ptr<SequentialCoder> make_coder(CoderKind kind, int ell, const Past& past, std::size_t n,
                                            const MarkovSource* source = nullptr);

}  // namespace mdelta
