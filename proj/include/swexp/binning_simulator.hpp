#pragma once

// Monte Carlo and exact evaluation of random binning with the threshold
// erasure/list decoder. Given the bin of the true source vector and the side
// information y, a member xh is a candidate when
//
//   P(xh, y) > e^{nT} * sum_{x' in bin, x' != xh} P(x', y),
//
// with an empty remainder counting as an infinite ratio.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "swexp/source_model.hpp"

namespace swexp {

// Cap on |X|^n: the decoder enumerates every sequence of the bin exactly.
inline constexpr std::uint64_t kMaxSequences = std::uint64_t{1} << 24;

struct SimConfig {
  JointSource source;
  int n = 1;
  double rate = 0.0;       // nominal R, nats/symbol
  double threshold = 0.0;  // T, nats/symbol
  std::uint64_t trials = 0;
  std::uint64_t master_seed = 0;
  // Variable-rate mode: additive rate r(x) per X symbol. A sequence x' is
  // hashed uniformly into round(exp(sum_i r(x'_i))) bins (at least one).
  std::optional<std::vector<double>> letter_rates;
  unsigned workers = 1;
  // Keep the full record of every k-th trial (0 keeps none).
  std::uint64_t sample_stride = 0;

  explicit SimConfig(JointSource src) : source(std::move(src)) {}

  // Fixed-rate bin count round(e^{nR}), raised to 2 when smaller.
  std::uint64_t bin_count() const;
  double actual_rate() const;
  std::uint64_t sequence_count() const;  // |X|^n; throws ResourceError above the cap
  void validate() const;                 // DomainError / ResourceError
};

struct TrialRecord {
  std::uint64_t trial = 0;
  std::uint64_t x = 0;  // base-|X| sequence index, symbol i is digit i
  std::uint64_t y = 0;  // base-|Y| sequence index
  std::vector<std::uint64_t> bin;  // every member of x's bin, x included
  bool e1 = false;
  std::uint32_t candidates = 0;
};

struct TrialBatch {
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  // Mutually exclusive outcomes; they sum to trials.
  std::uint64_t correct_unique = 0;
  std::uint64_t incorrect_unique = 0;
  std::uint64_t erasure = 0;
  std::uint64_t list_output = 0;  // two or more candidates
  // Overlapping error events.
  std::uint64_t e1_count = 0;  // true x is not a candidate
  std::uint64_t e2_count = 0;  // at least one incorrect candidate
  std::uint64_t incorrect_candidate_sum = 0;
  std::uint64_t list_size_sum = 0;
  std::uint32_t max_list_size = 0;
  std::map<std::uint32_t, std::uint64_t> incorrect_histogram;
  std::vector<TrialRecord> samples;

  double mean_list_size() const;
  void merge(const TrialBatch& other);
};

// Deterministic in (master_seed, trials) and independent of cfg.workers.
TrialBatch run_trials(const SimConfig& cfg);

// Regenerates one trial from the seed, including its whole bin.
TrialRecord replay_trial(const SimConfig& cfg, std::uint64_t trial);

struct DecodeOutcome {
  bool truth_is_candidate = false;
  std::uint32_t candidates = 0;
  std::uint32_t incorrect_candidates = 0;
};

// Applies the threshold rule to a bin given each member's ln P(x', y).
DecodeOutcome decode_bin(std::span<const double> log_probs, std::size_t truth, double n_threshold);

struct ExactProbabilities {
  double e1 = 0.0;
  double e2 = 0.0;
  double erasure = 0.0;
  double correct_unique = 0.0;
  double incorrect_unique = 0.0;
  double list_output = 0.0;
  double mean_list_size = 0.0;
  double mean_incorrect = 0.0;
};

// Average over every binning map (requires prod of bin ranges <= 2^20).
ExactProbabilities exact_by_enumeration(const SimConfig& cfg);
// Per (x, y), average over the independent memberships of the other
// sequences in x's bin (requires at most 2^20 membership patterns).
ExactProbabilities exact_by_independence(const SimConfig& cfg);
// Enumeration when within its cap, else independence factorization.
ExactProbabilities exact_oracle(const SimConfig& cfg);

struct RatePoint {
  int n = 0;
  double rate = 0.0;
  std::uint64_t trials = 0;  // 0 when the rate is exact
};

struct ExponentFit {
  double slope = 0.0;      // exponent estimate, nats/symbol
  double intercept = 0.0;  // captures sub-exponential prefactors
  double std_error = 0.0;
  double ci = 0.0;  // 95% half-width
};

// Weighted least squares of -ln(rate) against n. Throws DomainError for
// fewer than 3 block lengths and DegenerateData when a rate is 0.
ExponentFit empirical_exponent(std::span<const RatePoint> points);

}  // namespace swexp
