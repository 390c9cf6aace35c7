#pragma once

// Experiment selection by expected information gain: the preposterior mean
// KL divergence from prior to posterior over an experiment's outcomes, equal
// to the mutual information between hypothesis and outcome. Ranking is by
// expected entropy reduction; the expected knowledge gain (change in
// 2^(-entropy)) is recorded alongside but never ranked on, since the two
// orderings can differ.

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "core.hpp"
#include "errors.hpp"
#include "inference.hpp"

namespace credence {

// A candidate measurement: a label and the observation model describing what
// it would report under each hypothesis.
struct Experiment {
  std::string label;
  ObservationModel model;
};

// sum_d P(d) * KL(posterior_d || prior), in bits. Outcomes with zero
// marginal probability contribute nothing.
inline double expected_information_gain(const Distribution& prior, const Experiment& experiment) {
  const ObservationModel& model = experiment.model;
  if (prior.space() != model.space())
    throw SpaceMismatchError("expected_information_gain: prior and experiment disagree on space");
  double gain = 0.0;
  for (std::size_t d = 0; d < model.outcome_count(); ++d) {
    const LikelihoodVector likelihood = model.likelihood_of(d);
    const double m = marginal(prior, likelihood);
    if (m <= 0.0) continue;
    gain += m * kl_divergence(posterior(prior, likelihood), prior);
  }
  return gain;
}

// sum_d P(d) * K(posterior_d) - K(prior): how much closer to certainty the
// knowledge score is expected to move.
inline double expected_knowledge_gain(const Distribution& prior, const Experiment& experiment) {
  const ObservationModel& model = experiment.model;
  if (prior.space() != model.space())
    throw SpaceMismatchError("expected_knowledge_gain: prior and experiment disagree on space");
  double expected = 0.0;
  for (std::size_t d = 0; d < model.outcome_count(); ++d) {
    const LikelihoodVector likelihood = model.likelihood_of(d);
    const double m = marginal(prior, likelihood);
    if (m <= 0.0) continue;
    expected += m * knowledge(posterior(prior, likelihood)).value;
  }
  return expected - knowledge(prior).value;
}

struct DesignReport {
  std::vector<double> eig_bits;
  std::vector<double> knowledge_gain;
  std::size_t chosen_index = 0;
  std::string chosen_label;
};

// Scores every candidate and picks the largest expected information gain,
// ties broken to the lowest index.
inline DesignReport select_best(const Distribution& prior,
                                std::span<const Experiment> experiments) {
  if (experiments.empty()) throw EmptyDesignSpaceError("select_best: no experiments to choose from");
  DesignReport report;
  report.eig_bits.reserve(experiments.size());
  report.knowledge_gain.reserve(experiments.size());
  for (const Experiment& e : experiments) {
    report.eig_bits.push_back(expected_information_gain(prior, e));
    report.knowledge_gain.push_back(expected_knowledge_gain(prior, e));
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < report.eig_bits.size(); ++i)
    if (report.eig_bits[i] > report.eig_bits[best]) best = i;
  report.chosen_index = best;
  report.chosen_label = experiments[best].label;
  return report;
}

inline DesignReport select_best(const Distribution& prior,
                                const std::vector<Experiment>& experiments) {
  return select_best(prior, std::span<const Experiment>(experiments));
}

}  // namespace credence
