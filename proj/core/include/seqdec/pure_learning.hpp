#pragma once

#include <vector>

#include "seqdec/belief.hpp"
#include "seqdec/rng.hpp"

namespace seqdec {

struct PureLearningConfig {
  /// Hidden true mean of each alternative.
  std::vector<double> true_means;
  /// Experiment noise standard deviation. Zero means noiseless experiments.
  double sigma_w = 1.0;
  /// Number of experiments before the final design is chosen.
  int budget = 0;
  /// Priors per alternative; defaults to diffuse (precision 0) everywhere.
  std::vector<GaussianBelief> priors;
};

/// Ranking-and-selection problem scored by final reward: spend the budget
/// probing alternatives, then commit to the one with the best posterior mean.
/// Satisfies the FinalRewardModel concept.
class PureLearningModel {
public:
  explicit PureLearningModel(PureLearningConfig cfg);

  int num_alternatives() const { return static_cast<int>(cfg_.true_means.size()); }
  int budget() const { return cfg_.budget; }
  std::vector<GaussianBelief> prior_beliefs() const;

  /// Precision of one experiment. Noiseless experiments are represented by a
  /// very large finite precision so the conjugate update stays well defined;
  /// a single observation then pins the belief to the observed value to
  /// double precision.
  double experiment_precision() const;

  double experiment(int x, RandomStream& rng) const;
  double test_draw(int x, RandomStream& rng) const;

  /// Truth accessor for harness-side scoring. Search policies are handed
  /// beliefs only and have no path to this.
  double true_mean(int x) const;

private:
  PureLearningConfig cfg_;
};

} // namespace seqdec
