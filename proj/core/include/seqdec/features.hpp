#pragma once

#include <functional>
#include <string>
#include <vector>

#include "seqdec/flu.hpp"

namespace seqdec {

/// One named basis function over the controller state.
struct Feature {
  std::string name;
  std::function<double(const FluControllerState&)> eval;
};

/// Named basis for linear value approximations and analytic policies.
/// Spatial states enter through their per-region totals, so one basis
/// serves every variant.
struct FeatureSet {
  std::string name;
  std::vector<Feature> features;

  std::size_t size() const { return features.size(); }
  std::vector<std::string> feature_names() const;

  /// Evaluates every feature. A non-finite value raises ModelError naming
  /// the offending feature.
  std::vector<double> values(const FluControllerState& s) const;
};

/// Constant, belief mean, belief spread and their squares.
FeatureSet flu_basic_features();

/// Lookup by the name stored in policy specifications ("flu-basic").
/// Unknown names raise ModelError listing what exists.
FeatureSet feature_set_by_name(const std::string& name);

} // namespace seqdec
