#pragma once

#include <concepts>
#include <cstdint>
#include <vector>

#include "seqdec/belief.hpp"
#include "seqdec/errors.hpp"
#include "seqdec/rng.hpp"
#include "seqdec/stats.hpp"

namespace seqdec {

/// Requirements on a learning problem scored by final reward: a finite set of
/// designs, Gaussian priors, noisy experiments during the search phase and
/// fresh evaluation draws for the chosen design.
template <class L>
concept FinalRewardModel = requires(const L& m, int x, RandomStream& rng) {
  { m.num_alternatives() } -> std::convertible_to<int>;
  { m.budget() } -> std::convertible_to<int>;
  { m.prior_beliefs() } -> std::convertible_to<std::vector<GaussianBelief>>;
  { m.experiment_precision() } -> std::convertible_to<double>;
  { m.experiment(x, rng) } -> std::convertible_to<double>;
  { m.test_draw(x, rng) } -> std::convertible_to<double>;
};

struct FinalRewardResult {
  EvalResult summary;
  /// Design chosen in each replication, in replication order.
  std::vector<int> chosen;
};

/// Runs the experiment budget under `search_policy`, picks the design with
/// the highest posterior mean (ties to the lowest index), and scores it by
/// the average of `test_samples` fresh draws. Repeated over `replications`
/// with substreams derived per replication.
///
/// search_policy sees only the belief list and the experiment counter; it
/// never sees the true means.
template <FinalRewardModel L, class SearchPolicy>
FinalRewardResult evaluate_final_reward(const L& model, SearchPolicy&& search_policy,
                                        std::uint64_t master_seed, int replications,
                                        int test_samples) {
  if (replications <= 0) throw Error("evaluate_final_reward: replications must be positive");
  if (test_samples <= 0) throw Error("evaluate_final_reward: test_samples must be positive");

  std::vector<GaussianBelief> priors = model.prior_beliefs();
  if (model.budget() == 0) {
    bool any_informed = false;
    for (const auto& b : priors) any_informed = any_informed || b.precision > 0.0;
    if (!any_informed)
      throw Error("evaluate_final_reward: no basis for final design "
                  "(zero budget and diffuse priors)");
  }

  FinalRewardResult out;
  std::vector<double> totals;
  totals.reserve(static_cast<std::size_t>(replications));

  for (int r = 0; r < replications; ++r) {
    RandomStream exp_rng(derive_stream(master_seed, static_cast<std::uint64_t>(r), "experiment"));
    RandomStream test_rng(derive_stream(master_seed, static_cast<std::uint64_t>(r), "test"));

    std::vector<GaussianBelief> beliefs = priors;
    for (int n = 0; n < model.budget(); ++n) {
      int x = search_policy(beliefs, n);
      if (x < 0 || x >= model.num_alternatives())
        throw Error("evaluate_final_reward: policy chose design out of range");
      double w = model.experiment(x, exp_rng);
      beliefs[static_cast<std::size_t>(x)] =
          conjugate_update(beliefs[static_cast<std::size_t>(x)], w, model.experiment_precision());
    }

    int best = 0;
    for (int x = 1; x < model.num_alternatives(); ++x)
      if (beliefs[static_cast<std::size_t>(x)].mean > beliefs[static_cast<std::size_t>(best)].mean)
        best = x;

    double acc = 0.0;
    for (int k = 0; k < test_samples; ++k) acc += model.test_draw(best, test_rng);
    totals.push_back(acc / test_samples);
    out.chosen.push_back(best);
  }

  out.summary = summarize(totals);
  return out;
}

} // namespace seqdec
