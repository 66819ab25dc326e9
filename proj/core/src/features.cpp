#include "seqdec/features.hpp"

#include <cmath>

#include "seqdec/errors.hpp"

namespace seqdec {

std::vector<std::string> FeatureSet::feature_names() const {
  std::vector<std::string> out;
  out.reserve(features.size());
  for (const auto& f : features) out.push_back(f.name);
  return out;
}

std::vector<double> FeatureSet::values(const FluControllerState& s) const {
  std::vector<double> out;
  out.reserve(features.size());
  for (const auto& f : features) {
    double v = f.eval(s);
    if (!std::isfinite(v))
      throw ModelError("feature " + f.name + " is not finite");
    out.push_back(v);
  }
  return out;
}

FeatureSet flu_basic_features() {
  FeatureSet fs;
  fs.name = "flu-basic";
  fs.features = {
      {"const", [](const FluControllerState&) { return 1.0; }},
      {"mu_bar", [](const FluControllerState& s) { return s.mu_bar_total(); }},
      {"mu_bar_sq",
       [](const FluControllerState& s) {
         double m = s.mu_bar_total();
         return m * m;
       }},
      {"sigma_bar", [](const FluControllerState& s) { return s.sigma_bar_total(); }},
      {"sigma_bar_sq",
       [](const FluControllerState& s) {
         double v = s.sigma_bar_total();
         return v * v;
       }},
  };
  return fs;
}

FeatureSet feature_set_by_name(const std::string& name) {
  if (name == "flu-basic") return flu_basic_features();
  throw ModelError("unknown feature set \"" + name + "\" (available: flu-basic)");
}

} // namespace seqdec
