#pragma once

// Bead-level Monte Carlo of the three-compartment bead machine: beads are
// loaded into bins by the prior (largest-remainder rounding), each bead then
// survives a divider shaped like the likelihood (one Bernoulli trial per
// bead), and the normalized survivors are the empirical posterior.
//
// Retention scaling: "max-normalized" retains bin i with probability
// L_i / max(L) (keeps the most beads while preserving the posterior);
// "direct" retains with probability L_i and requires L_i <= 1.
//
// Determinism contract: beads are numbered globally in bin order and
// processed in fixed chunks of 65536, each chunk drawing from its own
// substream(seed, chunk). One uniform is drawn per bead regardless of bin,
// so retained counts are bitwise reproducible for any worker count.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "core.hpp"
#include "errors.hpp"
#include "inference.hpp"
#include "rng.hpp"

namespace credence {

enum class LikelihoodScaling { kMaxNormalized, kDirect };

inline constexpr std::uint64_t kGaltonChunkSize = 65536;

class GaltonConfig {
 public:
  GaltonConfig(Distribution prior, std::vector<double> likelihood, std::uint64_t beads,
               std::uint64_t seed, LikelihoodScaling scaling = LikelihoodScaling::kMaxNormalized)
      : prior_(std::move(prior)),
        likelihood_(std::move(likelihood)),
        beads_(beads),
        seed_(seed),
        scaling_(scaling) {
    if (prior_.size() < 2) throw ValidationError("galton device needs at least 2 bins");
    if (likelihood_.size() != prior_.size())
      throw ValidationError("likelihood: expected " + std::to_string(prior_.size()) +
                            " entries, got " + std::to_string(likelihood_.size()));
    for (std::size_t i = 0; i < likelihood_.size(); ++i) {
      if (!(likelihood_[i] > 0.0) || !std::isfinite(likelihood_[i]))
        throw ValidationError("likelihood[" + std::to_string(i) +
                              "] must be positive and finite");
      if (scaling_ == LikelihoodScaling::kDirect && likelihood_[i] > 1.0)
        throw ValidationError("likelihood[" + std::to_string(i) +
                              "] exceeds 1; direct scaling needs likelihoods in (0, 1]");
    }
    if (beads_ < 1) throw ValidationError("beads must be >= 1");
  }

  const Distribution& prior() const noexcept { return prior_; }
  const std::vector<double>& likelihood() const noexcept { return likelihood_; }
  std::uint64_t beads() const noexcept { return beads_; }
  std::uint64_t seed() const noexcept { return seed_; }
  LikelihoodScaling scaling() const noexcept { return scaling_; }
  std::size_t bins() const noexcept { return prior_.size(); }

  // Per-bin Bernoulli retention probability r_i, in (0, 1].
  std::vector<double> retention_probs() const {
    std::vector<double> r = likelihood_;
    if (scaling_ == LikelihoodScaling::kMaxNormalized) {
      const double max = *std::max_element(r.begin(), r.end());
      for (double& v : r) v /= max;
    }
    return r;
  }

  GaltonConfig with_beads(std::uint64_t beads) const {
    return GaltonConfig(prior_, likelihood_, beads, seed_, scaling_);
  }

  GaltonConfig with_seed(std::uint64_t seed) const {
    return GaltonConfig(prior_, likelihood_, beads_, seed, scaling_);
  }

 private:
  Distribution prior_;
  std::vector<double> likelihood_;
  std::uint64_t beads_;
  std::uint64_t seed_;
  LikelihoodScaling scaling_;
};

// Outcome of one run. loaded_i = retained_i + wasted_i per bin, the loaded
// counts sum to the bead count exactly, empirical is the normalized retained
// vector, and analytic is the inference-module posterior for the same prior
// and likelihood.
struct GaltonRun {
  std::vector<std::uint64_t> loaded;
  std::vector<std::uint64_t> retained;
  std::vector<std::uint64_t> wasted;
  Distribution empirical;
  Distribution analytic;
  double tv = 0.0;
};

// Every bead fell behind the divider; there is no empirical posterior to
// normalize. Carries the counts of the failed run.
class AllBeadsWastedError : public ComputationError {
 public:
  AllBeadsWastedError(std::vector<std::uint64_t> loaded, std::vector<std::uint64_t> wasted)
      : ComputationError("galton run wasted every bead; no posterior to read out"),
        loaded_(std::move(loaded)),
        wasted_(std::move(wasted)) {}

  const std::vector<std::uint64_t>& loaded() const noexcept { return loaded_; }
  const std::vector<std::uint64_t>& wasted() const noexcept { return wasted_; }

 private:
  std::vector<std::uint64_t> loaded_;
  std::vector<std::uint64_t> wasted_;
};

// Integer bead counts allocated by largest-remainder rounding of
// beads * prior_i. Counts sum to beads exactly; remainder ties go to the
// lowest bin index.
inline std::vector<std::uint64_t> load_prior(const Distribution& prior, std::uint64_t beads) {
  if (beads < 1) throw ValidationError("load_prior: beads must be >= 1");
  const std::size_t k = prior.size();
  std::vector<std::uint64_t> counts(k);
  std::vector<double> remainders(k);
  std::uint64_t assigned = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const double quota = static_cast<double>(beads) * prior[i];
    const double base = std::floor(quota);
    counts[i] = static_cast<std::uint64_t>(base);
    remainders[i] = quota - base;
    assigned += counts[i];
  }

  std::vector<std::size_t> order(k);
  for (std::size_t i = 0; i < k; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (remainders[a] != remainders[b]) return remainders[a] > remainders[b];
    return a < b;
  });

  // Leftover is < k beads; a 1e-9 sum drift at huge bead counts could also
  // leave assigned one past beads, trimmed from the smallest remainders.
  while (assigned < beads) {
    for (std::size_t j = 0; j < k && assigned < beads; ++j) {
      ++counts[order[j]];
      ++assigned;
    }
  }
  for (std::size_t j = k; assigned > beads && j-- > 0;) {
    if (counts[order[j]] > 0) {
      --counts[order[j]];
      --assigned;
    }
  }
  return counts;
}

// Real-valued retained-bead expectation per bin: beads * prior_i * r_i.
// The deterministic oracle the stochastic run is checked against.
inline std::vector<double> expected_counts(const GaltonConfig& config) {
  const std::vector<double> r = config.retention_probs();
  std::vector<double> expected(config.bins());
  for (std::size_t i = 0; i < expected.size(); ++i)
    expected[i] = static_cast<double>(config.beads()) * config.prior()[i] * r[i];
  return expected;
}

namespace detail {

// Chunk worker: beads [begin, end) of the global numbering, engine already
// positioned at the chunk's substream.
inline void run_chunk(std::uint64_t begin, std::uint64_t end,
                      const std::vector<std::uint64_t>& prefix, const std::vector<double>& r,
                      Engine& eng, std::vector<std::uint64_t>& retained) {
  std::size_t bin = 0;
  while (begin >= prefix[bin + 1]) ++bin;
  for (std::uint64_t j = begin; j < end; ++j) {
    while (j >= prefix[bin + 1]) ++bin;
    const double u = canonical(eng);
    if (u < r[bin]) ++retained[bin];
  }
}

}  // namespace detail

// Runs the device. `workers` only distributes chunks across threads; the
// output is identical for any value.
inline GaltonRun run(const GaltonConfig& config, unsigned workers = 1) {
  const std::size_t k = config.bins();
  const std::vector<std::uint64_t> loaded = load_prior(config.prior(), config.beads());
  const std::vector<double> r = config.retention_probs();

  std::vector<std::uint64_t> prefix(k + 1, 0);
  for (std::size_t i = 0; i < k; ++i) prefix[i + 1] = prefix[i] + loaded[i];
  const std::uint64_t total = prefix[k];
  const std::uint64_t chunks = (total + kGaltonChunkSize - 1) / kGaltonChunkSize;

  std::vector<std::uint64_t> retained(k, 0);
  auto process = [&](std::uint64_t chunk, std::vector<std::uint64_t>& out) {
    const std::uint64_t begin = chunk * kGaltonChunkSize;
    const std::uint64_t end = std::min(total, begin + kGaltonChunkSize);
    Engine eng = engine_for(config.seed(), chunk);
    detail::run_chunk(begin, end, prefix, r, eng, out);
  };

  if (workers <= 1 || chunks <= 1) {
    for (std::uint64_t c = 0; c < chunks; ++c) process(c, retained);
  } else {
    const unsigned n_threads = static_cast<unsigned>(std::min<std::uint64_t>(workers, chunks));
    std::vector<std::vector<std::uint64_t>> partial(n_threads, std::vector<std::uint64_t>(k, 0));
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t) {
      pool.emplace_back([&, t] {
        for (std::uint64_t c = t; c < chunks; c += n_threads) process(c, partial[t]);
      });
    }
    for (auto& th : pool) th.join();
    for (const auto& p : partial)
      for (std::size_t i = 0; i < k; ++i) retained[i] += p[i];
  }

  std::vector<std::uint64_t> wasted(k);
  std::uint64_t survivors = 0;
  for (std::size_t i = 0; i < k; ++i) {
    wasted[i] = loaded[i] - retained[i];
    survivors += retained[i];
  }
  if (survivors == 0) throw AllBeadsWastedError(loaded, std::move(wasted));

  std::vector<double> retained_real(retained.begin(), retained.end());
  Distribution empirical = normalize(retained_real, config.prior().space());
  Distribution analytic =
      posterior(config.prior(), LikelihoodVector(config.prior().space(), config.likelihood()));
  const double tv = tv_distance(empirical, analytic);
  return GaltonRun{loaded,          retained, std::move(wasted), std::move(empirical),
                   std::move(analytic), tv};
}

struct ConvergenceRow {
  std::uint64_t beads = 0;
  double mean_tv = 0.0;
  double std_tv = 0.0;
};

// Repeats the device seeds_per_count times per bead count and tabulates the
// total variation distance to the analytic posterior. Run (i, j) draws its
// seed from substream(config.seed, i * seeds_per_count + j); std is the
// sample standard deviation (0 for a single seed).
inline std::vector<ConvergenceRow> convergence_study(const GaltonConfig& config,
                                                     std::span<const std::uint64_t> bead_counts,
                                                     std::size_t seeds_per_count,
                                                     unsigned workers = 1) {
  if (bead_counts.empty()) throw ValidationError("convergence_study: bead_counts is empty");
  for (std::size_t i = 1; i < bead_counts.size(); ++i)
    if (bead_counts[i] <= bead_counts[i - 1])
      throw ValidationError("convergence_study: bead_counts must be strictly ascending");
  if (seeds_per_count < 1) throw ValidationError("convergence_study: seeds_per_count must be >= 1");

  std::vector<ConvergenceRow> rows;
  rows.reserve(bead_counts.size());
  for (std::size_t i = 0; i < bead_counts.size(); ++i) {
    std::vector<double> tvs;
    tvs.reserve(seeds_per_count);
    for (std::size_t j = 0; j < seeds_per_count; ++j) {
      const std::uint64_t run_seed =
          substream(config.seed(), static_cast<std::uint64_t>(i) * seeds_per_count + j);
      tvs.push_back(run(config.with_beads(bead_counts[i]).with_seed(run_seed), workers).tv);
    }
    double mean = 0.0;
    for (double tv : tvs) mean += tv;
    mean /= static_cast<double>(tvs.size());
    double var = 0.0;
    if (tvs.size() > 1) {
      for (double tv : tvs) var += (tv - mean) * (tv - mean);
      var /= static_cast<double>(tvs.size() - 1);
    }
    rows.push_back(ConvergenceRow{bead_counts[i], mean, std::sqrt(var)});
  }
  return rows;
}

inline std::vector<ConvergenceRow> convergence_study(const GaltonConfig& config,
                                                     const std::vector<std::uint64_t>& bead_counts,
                                                     std::size_t seeds_per_count,
                                                     unsigned workers = 1) {
  return convergence_study(config, std::span<const std::uint64_t>(bead_counts), seeds_per_count,
                           workers);
}

}  // namespace credence
