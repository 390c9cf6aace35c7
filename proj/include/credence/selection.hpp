#pragma once

// Natural selection as frequency dynamics. replicator_step applies
// freq_i' = freq_i * R_i / Rbar, the textbook selection update; the same
// arithmetic is a Bayesian update with fitness as likelihood and mean
// fitness as marginal, and equivalence_check() measures the two paths
// against each other. wright_fisher_step adds finite-population resampling
// on top of the deterministic update.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "core.hpp"
#include "errors.hpp"
#include "inference.hpp"
#include "rng.hpp"

namespace credence {

// Allele labels, their frequencies, strictly positive fitnesses, and an
// optional census size for stochastic steps. Frequencies form a proper
// distribution over the allele space.
class Population {
 public:
  Population(std::vector<std::string> alleles, std::vector<double> freqs,
             std::vector<double> fitnesses, std::optional<std::uint64_t> size = std::nullopt)
      : Population(Distribution(HypothesisSpace(std::move(alleles)), std::move(freqs)),
                   std::move(fitnesses), size) {}

  Population(Distribution freqs, std::vector<double> fitnesses,
             std::optional<std::uint64_t> size = std::nullopt)
      : freqs_(std::move(freqs)), fitnesses_(std::move(fitnesses)), size_(size) {
    if (fitnesses_.size() != freqs_.size())
      throw ValidationError("expected " + std::to_string(freqs_.size()) + " fitnesses, got " +
                            std::to_string(fitnesses_.size()));
    for (std::size_t i = 0; i < fitnesses_.size(); ++i)
      if (!(fitnesses_[i] > 0.0) || !std::isfinite(fitnesses_[i]))
        throw ValidationError("fitness at index " + std::to_string(i) +
                              " must be positive and finite");
    if (size_ && *size_ < 1) throw ValidationError("population size must be >= 1");
  }

  const HypothesisSpace& alleles() const noexcept { return freqs_.space(); }
  const Distribution& freqs() const noexcept { return freqs_; }
  const std::vector<double>& fitnesses() const noexcept { return fitnesses_; }
  std::optional<std::uint64_t> size() const noexcept { return size_; }

  // Same alleles, fitnesses, and size; new frequencies.
  Population with_freqs(Distribution freqs) const {
    return Population(std::move(freqs), fitnesses_, size_);
  }

 private:
  Distribution freqs_;
  std::vector<double> fitnesses_;
  std::optional<std::uint64_t> size_;
};

// Frequency-weighted average fitness Rbar. Positive by the fitness invariant.
inline double mean_fitness(const Population& pop) {
  double acc = 0.0;
  for (std::size_t i = 0; i < pop.freqs().size(); ++i) acc += pop.freqs()[i] * pop.fitnesses()[i];
  return acc;
}

// One deterministic generation: freq_i' = freq_i * R_i / Rbar. Extinct
// alleles stay at exactly zero; fitnesses and size carry over.
inline Population replicator_step(const Population& pop) {
  const std::size_t k = pop.freqs().size();
  std::vector<double> weighted(k);
  double rbar = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    weighted[i] = pop.freqs()[i] * pop.fitnesses()[i];
    rbar += weighted[i];
  }
  for (std::size_t i = 0; i < k; ++i) weighted[i] /= rbar;
  return pop.with_freqs(Distribution(pop.alleles(), std::move(weighted)));
}

// Two-allele update in its census form: N p R_A / (N p R_A + N q R_B).
// N cancels algebraically; it stays in the arithmetic so the cancellation is
// an observable contract rather than an assumption.
inline double two_allele_step(double p, double fitness_a, double fitness_b, std::uint64_t n) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("two_allele_step: p must be in [0, 1]");
  if (!(fitness_a > 0.0) || !(fitness_b > 0.0))
    throw DomainError("two_allele_step: fitnesses must be positive");
  if (n < 1) throw DomainError("two_allele_step: N must be >= 1");
  const double scale = static_cast<double>(n);
  const double a = scale * p * fitness_a;
  const double b = scale * (1.0 - p) * fitness_b;
  return a / (a + b);
}

// Deterministic update followed by multinomial resampling of `size`
// individuals. All randomness comes from the seed, so equal seeds mean
// bitwise-equal results.
inline Population wright_fisher_step(const Population& pop, std::uint64_t seed) {
  if (!pop.size())
    throw MissingSizeError("wright_fisher_step: population has no size; set \"size\"");
  const Population stepped = replicator_step(pop);
  const std::size_t k = stepped.freqs().size();
  const std::uint64_t n = *pop.size();

  std::vector<double> cumulative(k);
  double acc = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    acc += stepped.freqs()[i];
    cumulative[i] = acc;
  }

  std::vector<std::uint64_t> counts(k, 0);
  Engine eng = engine_for(seed);
  for (std::uint64_t draw = 0; draw < n; ++draw) {
    const double u = canonical(eng) * acc;
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    const std::size_t idx = std::min<std::size_t>(it - cumulative.begin(), k - 1);
    ++counts[idx];
  }

  std::vector<double> freqs(k);
  for (std::size_t i = 0; i < k; ++i)
    freqs[i] = static_cast<double>(counts[i]) / static_cast<double>(n);
  return pop.with_freqs(Distribution(pop.alleles(), std::move(freqs)));
}

// Per-generation record: state, mean fitness at that state, entropy of the
// frequency distribution.
struct GenerationRecord {
  Distribution freqs;
  double mean_fitness = 0.0;
  EntropyBits entropy_bits;
};

struct GenerationTrace {
  std::vector<GenerationRecord> generations;
};

// Iterates replicator_step (or wright_fisher_step with per-generation
// substreams of `seed`), recording every generation including the initial
// state. generations == 0 leaves only the initial state in the trace.
inline GenerationTrace evolve(const Population& pop, std::size_t generations,
                              bool stochastic = false, std::uint64_t seed = 0) {
  GenerationTrace trace;
  trace.generations.reserve(generations + 1);
  Population current = pop;
  trace.generations.push_back(
      GenerationRecord{current.freqs(), mean_fitness(current), entropy(current.freqs())});
  for (std::size_t g = 0; g < generations; ++g) {
    current = stochastic ? wright_fisher_step(current, substream(seed, g))
                         : replicator_step(current);
    trace.generations.push_back(
        GenerationRecord{current.freqs(), mean_fitness(current), entropy(current.freqs())});
  }
  return trace;
}

// Componentwise comparison of the selection path and the inference path:
// replicator_step against posterior() with fitnesses as the likelihood.
// For two alleles the closed-form two_allele_step is checked as well.
struct EquivalenceReport {
  Distribution replicator;
  Distribution bayes;
  double max_abs_difference = 0.0;
  std::optional<double> two_allele_difference;
};

inline EquivalenceReport equivalence_check(const Population& pop) {
  Distribution rep = replicator_step(pop).freqs();
  Distribution post = posterior(pop.freqs(), LikelihoodVector(pop.alleles(), pop.fitnesses()));
  double max_diff = 0.0;
  for (std::size_t i = 0; i < rep.size(); ++i)
    max_diff = std::max(max_diff, std::abs(rep[i] - post[i]));

  std::optional<double> two_allele;
  if (rep.size() == 2) {
    const double p = two_allele_step(pop.freqs()[0], pop.fitnesses()[0], pop.fitnesses()[1],
                                     pop.size().value_or(1));
    two_allele = std::max(std::abs(p - rep[0]), std::abs((1.0 - p) - rep[1]));
  }
  return EquivalenceReport{std::move(rep), std::move(post), max_diff, two_allele};
}

}  // namespace credence
