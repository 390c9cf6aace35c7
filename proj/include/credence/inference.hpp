#pragma once

// Bayesian update engine. posterior() is the single-step update
// prior * likelihood / marginal; sequential_update() folds a data sequence
// through it, renormalizing at every step and recording the entropy and
// knowledge trajectory; condition_logical() is the 0/1-likelihood special
// case where updating degenerates to classical conditioning.

#include <concepts>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "core.hpp"
#include "errors.hpp"

namespace credence {

// Per-hypothesis plausibility of one piece of evidence, defined up to a
// positive scale. Need not sum to anything; must be non-negative with at
// least one positive entry.
class LikelihoodVector {
 public:
  LikelihoodVector(HypothesisSpace space, std::vector<double> values)
      : space_(std::move(space)), values_(std::move(values)) {
    if (values_.size() != space_.size())
      throw ValidationError("likelihood: expected " + std::to_string(space_.size()) +
                            " values, got " + std::to_string(values_.size()));
    bool any_positive = false;
    for (std::size_t i = 0; i < values_.size(); ++i) {
      const double v = values_[i];
      if (!(v >= 0.0) || !std::isfinite(v))
        throw ValidationError("likelihood value at index " + std::to_string(i) +
                              " is negative, NaN, or infinite");
      any_positive = any_positive || v > 0.0;
    }
    if (!any_positive) throw ValidationError("likelihood has no positive entry");
  }

  const HypothesisSpace& space() const noexcept { return space_; }
  const std::vector<double>& values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_.at(i); }

 private:
  HypothesisSpace space_;
  std::vector<double> values_;
};

// Conditional outcome probabilities per hypothesis: row n is the distribution
// of observable outcomes when hypothesis n holds. Columns supply the
// likelihood vectors for observed data.
class ObservationModel {
 public:
  ObservationModel(HypothesisSpace space, std::vector<std::string> outcomes,
                   std::vector<std::vector<double>> matrix)
      : space_(std::move(space)),
        outcomes_(HypothesisSpace(std::move(outcomes))),  // reuse label checks
        matrix_(std::move(matrix)) {
    if (matrix_.size() != space_.size())
      throw ValidationError("matrix: expected " + std::to_string(space_.size()) + " rows, got " +
                            std::to_string(matrix_.size()));
    for (std::size_t r = 0; r < matrix_.size(); ++r) {
      const auto& row = matrix_[r];
      if (row.size() != outcomes_.size())
        throw ValidationError("matrix row " + std::to_string(r) + " has " +
                              std::to_string(row.size()) + " entries, expected " +
                              std::to_string(outcomes_.size()));
      double sum = 0.0;
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (!(row[c] >= 0.0))
          throw ValidationError("matrix[" + std::to_string(r) + "][" + std::to_string(c) +
                                "] is negative or NaN");
        if (row[c] > 1.0)
          throw ValidationError("matrix[" + std::to_string(r) + "][" + std::to_string(c) +
                                "] exceeds 1");
        sum += row[c];
      }
      if (std::abs(sum - 1.0) > kSumTolerance)
        throw ValidationError("matrix row " + std::to_string(r) + " sums to " +
                              detail::format_double(sum) + ", expected 1 within 1e-09");
    }
  }

  const HypothesisSpace& space() const noexcept { return space_; }
  const std::vector<std::string>& outcomes() const noexcept { return outcomes_.labels(); }
  std::size_t outcome_count() const noexcept { return outcomes_.size(); }

  std::optional<std::size_t> outcome_index(std::string_view label) const {
    return outcomes_.index_of(label);
  }

  double prob(std::size_t hypothesis, std::size_t outcome) const {
    return matrix_.at(hypothesis).at(outcome);
  }

  // Column `outcome` as a likelihood vector over the hypothesis space.
  LikelihoodVector likelihood_of(std::size_t outcome) const {
    std::vector<double> column(space_.size());
    for (std::size_t n = 0; n < space_.size(); ++n) column[n] = matrix_[n].at(outcome);
    return LikelihoodVector(space_, std::move(column));
  }

 private:
  HypothesisSpace space_;
  HypothesisSpace outcomes_;
  std::vector<std::vector<double>> matrix_;
};

// One recorded update: the evidence applied and the state it produced.
struct TrajectoryStep {
  std::string evidence;
  Distribution posterior;
  EntropyBits entropy_bits;
  KnowledgeScore knowledge_score;
};

// Sequential run record. Step t's posterior is step t+1's prior; the
// recorded measures are computed from the recorded distribution.
class Trajectory {
 public:
  explicit Trajectory(Distribution initial) : initial_(std::move(initial)) {}

  void push(std::string evidence, Distribution posterior) {
    EntropyBits e = entropy(posterior);
    KnowledgeScore k = knowledge(e);
    steps_.push_back(TrajectoryStep{std::move(evidence), std::move(posterior), e, k});
  }

  const Distribution& initial() const noexcept { return initial_; }
  const std::vector<TrajectoryStep>& steps() const noexcept { return steps_; }
  std::size_t size() const noexcept { return steps_.size(); }

  const Distribution& final_distribution() const {
    return steps_.empty() ? initial_ : steps_.back().posterior;
  }

 private:
  Distribution initial_;
  std::vector<TrajectoryStep> steps_;
};

namespace detail {

inline void require_same_space(const Distribution& d, const LikelihoodVector& l, const char* op) {
  if (d.space() != l.space())
    throw SpaceMismatchError(std::string(op) +
                             ": distribution and likelihood are over different spaces");
}

}  // namespace detail

// Evidence probability under the prior: sum prior_n * L_n.
inline double marginal(const Distribution& prior, const LikelihoodVector& likelihood) {
  detail::require_same_space(prior, likelihood, "marginal");
  double m = 0.0;
  for (std::size_t n = 0; n < prior.size(); ++n) m += prior[n] * likelihood[n];
  return m;
}

// prior_n * L_n / marginal. Hypotheses with zero prior mass stay at exactly
// zero. Zero marginal means the evidence is impossible under every supported
// hypothesis.
inline Distribution posterior(const Distribution& prior, const LikelihoodVector& likelihood) {
  const double m = marginal(prior, likelihood);
  if (m <= 0.0)
    throw ContradictoryEvidenceError(
        "posterior: evidence impossible under every supported hypothesis");
  std::vector<double> probs(prior.size());
  for (std::size_t n = 0; n < prior.size(); ++n) probs[n] = prior[n] * likelihood[n] / m;
  return Distribution(prior.space(), std::move(probs));
}

// Folds each datum's likelihood column through posterior(), recording the
// distribution, entropy, and knowledge after every step.
inline Trajectory sequential_update(const Distribution& prior, const ObservationModel& model,
                                    std::span<const std::string> data) {
  if (prior.space() != model.space())
    throw SpaceMismatchError("sequential_update: prior and model are over different spaces");
  Trajectory trajectory(prior);
  for (std::size_t t = 0; t < data.size(); ++t) {
    const auto outcome = model.outcome_index(data[t]);
    if (!outcome)
      throw UnknownOutcomeError("sequential_update: datum at step " + std::to_string(t) +
                                " names unknown outcome \"" + data[t] + "\"");
    const LikelihoodVector likelihood = model.likelihood_of(*outcome);
    const Distribution& current = trajectory.final_distribution();
    if (marginal(current, likelihood) <= 0.0)
      throw ContradictoryEvidenceError("sequential_update: step " + std::to_string(t) +
                                           " (outcome \"" + data[t] +
                                           "\") is impossible under every supported hypothesis",
                                       t);
    trajectory.push(data[t], posterior(current, likelihood));
  }
  return trajectory;
}

inline Trajectory sequential_update(const Distribution& prior, const ObservationModel& model,
                                    const std::vector<std::string>& data) {
  return sequential_update(prior, model, std::span<const std::string>(data));
}

// Conditioning on a predicate over hypothesis labels: the one-bit logic
// special case, identical to posterior() with a 0/1 indicator likelihood.
// Excluded hypotheses end at exactly zero mass.
template <typename Keep>
  requires std::predicate<Keep, const std::string&>
Distribution condition_logical(const Distribution& prior, Keep&& keep) {
  std::vector<double> indicator(prior.size());
  bool any = false;
  for (std::size_t n = 0; n < prior.size(); ++n) {
    indicator[n] = keep(prior.space().label(n)) ? 1.0 : 0.0;
    any = any || indicator[n] > 0.0;
  }
  if (!any)
    throw ContradictoryEvidenceError("condition_logical: predicate excludes every hypothesis");
  return posterior(prior, LikelihoodVector(prior.space(), std::move(indicator)));
}

}  // namespace credence
