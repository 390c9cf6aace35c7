#pragma once

// Labeled finite probability distributions and the information measures on
// them. All logarithms are base 2; information, entropy and divergences are
// in bits. Distributions are immutable values: every operation returns a new
// value, and anything that renormalizes divides by the freshly computed sum
// so drift stays at rounding level (the stored-sum tolerance is 1e-9).

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace credence {

// Tolerance for "sums to 1" checks on stored probability vectors.
inline constexpr double kSumTolerance = 1e-9;

namespace detail {

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace detail

// Ordered, index-addressable set of distinct labels: the mutually exclusive
// hypotheses (or outcome states, alleles, bins) a distribution ranges over.
class HypothesisSpace {
 public:
  explicit HypothesisSpace(std::vector<std::string> labels) : labels_(std::move(labels)) {
    if (labels_.empty()) throw ValidationError("hypothesis space needs at least one label");
    std::unordered_set<std::string_view> seen;
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      if (labels_[i].empty())
        throw ValidationError("label at index " + std::to_string(i) + " is empty");
      if (!seen.insert(labels_[i]).second)
        throw ValidationError("label \"" + labels_[i] + "\" appears more than once");
    }
  }

  std::size_t size() const noexcept { return labels_.size(); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::string& label(std::size_t i) const { return labels_.at(i); }

  std::optional<std::size_t> index_of(std::string_view label) const {
    for (std::size_t i = 0; i < labels_.size(); ++i)
      if (labels_[i] == label) return i;
    return std::nullopt;
  }

  friend bool operator==(const HypothesisSpace&, const HypothesisSpace&) = default;

 private:
  std::vector<std::string> labels_;
};

// Space with generated labels prefix0..prefixN-1, for unlabeled inputs (bins).
inline HypothesisSpace indexed_space(std::size_t n, std::string_view prefix = "bin") {
  std::vector<std::string> labels;
  labels.reserve(n);
  for (std::size_t i = 0; i < n; ++i) labels.push_back(std::string(prefix) + std::to_string(i));
  return HypothesisSpace(std::move(labels));
}

// Normalized probability vector over a hypothesis space. Entries are checked
// to lie in [0,1] and to sum to 1 within kSumTolerance at construction.
class Distribution {
 public:
  Distribution(HypothesisSpace space, std::vector<double> probs)
      : space_(std::move(space)), probs_(std::move(probs)) {
    if (probs_.size() != space_.size())
      throw ValidationError("expected " + std::to_string(space_.size()) + " probabilities, got " +
                            std::to_string(probs_.size()));
    double sum = 0.0;
    for (std::size_t i = 0; i < probs_.size(); ++i) {
      const double p = probs_[i];
      if (!(p >= 0.0))
        throw ValidationError("probability at index " + std::to_string(i) + " is negative or NaN");
      if (p > 1.0)
        throw ValidationError("probability at index " + std::to_string(i) + " exceeds 1");
      sum += p;
    }
    if (std::abs(sum - 1.0) > kSumTolerance)
      throw ValidationError("probabilities sum to " + detail::format_double(sum) +
                            ", expected 1 within 1e-09");
  }

  static Distribution uniform(HypothesisSpace space) {
    const std::size_t n = space.size();
    return Distribution(std::move(space), std::vector<double>(n, 1.0 / static_cast<double>(n)));
  }

  static Distribution point_mass(HypothesisSpace space, std::size_t index) {
    if (index >= space.size()) throw ValidationError("point mass index out of range");
    std::vector<double> p(space.size(), 0.0);
    p[index] = 1.0;
    return Distribution(std::move(space), std::move(p));
  }

  const HypothesisSpace& space() const noexcept { return space_; }
  const std::vector<double>& probs() const noexcept { return probs_; }
  double operator[](std::size_t i) const { return probs_.at(i); }
  std::size_t size() const noexcept { return probs_.size(); }

  std::size_t argmax() const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < probs_.size(); ++i)
      if (probs_[i] > probs_[best]) best = i;
    return best;
  }

 private:
  HypothesisSpace space_;
  std::vector<double> probs_;
};

namespace detail {

inline void require_same_space(const Distribution& a, const Distribution& b, const char* op) {
  if (a.space() != b.space())
    throw SpaceMismatchError(std::string(op) + ": distributions are over different spaces");
}

}  // namespace detail

// Expected information needed to reach certainty, in bits.
struct EntropyBits {
  double value = 0.0;
};

// 2^(-entropy): proximity to certainty, in (0, 1]. 1 exactly at a point mass.
struct KnowledgeScore {
  double value = 1.0;
};

// Surprise of an outcome with probability p: -log2(p) bits. +inf at p = 0.
inline double information_of(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("information_of: probability must be in [0, 1]");
  if (p == 0.0) return std::numeric_limits<double>::infinity();
  return -std::log2(p);
}

// Inverse of information_of on (0, 1]: 2^(-i).
inline double probability_from_information(double bits) {
  if (!(bits >= 0.0)) throw DomainError("probability_from_information: bits must be >= 0");
  return std::exp2(-bits);
}

// -sum p log2 p, with 0 log 0 taken as 0. Every term is non-negative, so the
// result is >= 0 exactly.
inline EntropyBits entropy(const Distribution& d) {
  double e = 0.0;
  for (double p : d.probs())
    if (p > 0.0) e -= p * std::log2(p);
  return EntropyBits{e};
}

inline KnowledgeScore knowledge(EntropyBits e) { return KnowledgeScore{std::exp2(-e.value)}; }

inline KnowledgeScore knowledge(const Distribution& d) { return knowledge(entropy(d)); }

// Non-negative weights scaled to sum to 1. Rejects negatives; all-zero
// weights are degenerate (no distribution to point at).
inline Distribution normalize(std::span<const double> weights, HypothesisSpace space) {
  if (weights.size() != space.size())
    throw ValidationError("normalize: expected " + std::to_string(space.size()) +
                          " weights, got " + std::to_string(weights.size()));
  double sum = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double w = weights[i];
    if (!(w >= 0.0) || !std::isfinite(w))
      throw DomainError("normalize: weight at index " + std::to_string(i) +
                        " is negative, NaN, or infinite");
    sum += w;
  }
  if (sum <= 0.0) throw DegenerateWeightsError("normalize: all weights are zero");
  std::vector<double> probs(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) probs[i] = weights[i] / sum;
  return Distribution(std::move(space), std::move(probs));
}

inline Distribution normalize(const std::vector<double>& weights, HypothesisSpace space) {
  return normalize(std::span<const double>(weights), std::move(space));
}

// Total variation distance: (1/2) sum |a_i - b_i|, in [0, 1].
inline double tv_distance(const Distribution& a, const Distribution& b) {
  detail::require_same_space(a, b, "tv_distance");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(a[i] - b[i]);
  return 0.5 * acc;
}

// KL divergence in bits: sum a_i log2(a_i / b_i), zero-probability terms of a
// contributing 0. Requires a absolutely continuous w.r.t. b. Rounding can
// push the total a shade below zero when a is almost b; clamped at 0 so
// Gibbs' inequality holds as stated.
inline double kl_divergence(const Distribution& a, const Distribution& b) {
  detail::require_same_space(a, b, "kl_divergence");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) continue;
    if (b[i] == 0.0)
      throw AbsoluteContinuityError("kl_divergence: index " + std::to_string(i) +
                                    " has mass in the first argument but none in the second");
    acc += a[i] * std::log2(a[i] / b[i]);
  }
  return acc < 0.0 ? 0.0 : acc;
}

}  // namespace credence
