#include "seqdec/pure_learning.hpp"

#include "seqdec/errors.hpp"

namespace seqdec {

PureLearningModel::PureLearningModel(PureLearningConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.true_means.empty()) throw ModelError("pure learning: no alternatives");
  if (cfg_.sigma_w < 0.0) throw ModelError("pure learning: sigma_w must be nonnegative");
  if (cfg_.budget < 0) throw ModelError("pure learning: negative budget");
  if (!cfg_.priors.empty() && cfg_.priors.size() != cfg_.true_means.size())
    throw ModelError("pure learning: priors must match the number of alternatives");
}

std::vector<GaussianBelief> PureLearningModel::prior_beliefs() const {
  if (!cfg_.priors.empty()) return cfg_.priors;
  return std::vector<GaussianBelief>(cfg_.true_means.size(), GaussianBelief{0.0, 0.0});
}

double PureLearningModel::experiment_precision() const {
  if (cfg_.sigma_w == 0.0) return 1e30;
  return 1.0 / (cfg_.sigma_w * cfg_.sigma_w);
}

double PureLearningModel::experiment(int x, RandomStream& rng) const {
  return cfg_.true_means.at(static_cast<std::size_t>(x)) +
         (cfg_.sigma_w > 0.0 ? rng.normal(0.0, cfg_.sigma_w) : 0.0);
}

double PureLearningModel::test_draw(int x, RandomStream& rng) const {
  return experiment(x, rng);
}

double PureLearningModel::true_mean(int x) const {
  return cfg_.true_means.at(static_cast<std::size_t>(x));
}

} // namespace seqdec
