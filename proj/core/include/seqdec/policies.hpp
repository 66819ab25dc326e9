#pragma once

#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "seqdec/belief.hpp"
#include "seqdec/flu.hpp"

namespace seqdec {

enum class PolicyKind {
  PfaObserve,
  PfaVaccinate,
  PfaLinear,
  CfaIe,
  CfaVaccinateArgmax,
  VfaLinear,
  DlaSimplifiedMdp,
  Hybrid,
};

const char* policy_tag(PolicyKind kind);
PolicyKind policy_kind_from_tag(const std::string& tag);

/// Declarative description of a policy: a class tag plus named parameters.
/// Linear kinds carry ordered feature weights and a feature set name; a
/// hybrid carries one component spec for the observation side and one for
/// the vaccination side.
struct PolicySpec {
  PolicyKind kind = PolicyKind::PfaObserve;
  std::map<std::string, double> params;
  std::vector<std::pair<std::string, double>> linear_weights;
  std::string feature_set;
  std::shared_ptr<const PolicySpec> observe;
  std::shared_ptr<const PolicySpec> vaccinate;
};

/// Routes a dotted name to the right slot: "observe.x" and "vaccinate.x"
/// address a hybrid's components, "weight.f" addresses the linear weight
/// named f (appending it if absent), anything else is a plain parameter.
void set_policy_param(PolicySpec& spec, const std::string& name, double value);

/// JSON round-trip. The document is an object with "tag" plus optional
/// "params" (object), "weights" (array of {name, value}), "features"
/// (string), and, for hybrids only, "observe" and "vaccinate" (nested
/// specs). Unknown keys and unknown tags are rejected; hybrids do not
/// nest.
std::string policy_spec_to_json(const PolicySpec& spec);
PolicySpec policy_spec_from_json(const std::string& text);

/// Observe exactly when the relative spread sigma_bar / mu_bar reaches the
/// threshold. A nonpositive mean counts as maximal relative uncertainty.
int pfa_observe(const FluControllerState& s, double theta_obs);

/// Dose proportional to the believed excess over the target level:
/// max{0, mu_bar + theta_zeta * sigma_bar - mu_vac} / theta_vac, capped at
/// the stock on hand when inventory is modeled.
double pfa_vaccinate(const FluControllerState& s, double theta_vac, double theta_zeta,
                     double mu_vac);

/// Interval-estimation region choice: argmax of mean plus theta_ie times
/// the spread. Ties go to the lowest index.
std::size_t cfa_ie_select(const std::vector<GaussianBelief>& beliefs, double theta_ie);

/// Region with the highest believed mean. Ties go to the lowest index.
std::size_t cfa_vaccinate_argmax(const std::vector<GaussianBelief>& beliefs);

/// Instantiates the spec as a runnable policy for the given problem.
/// Parameter bounds, variant compatibility, and hybrid composition are
/// checked here; the returned callable is pure in (state, period) except
/// for the lookahead kind, which memoizes solved grids internally.
FluPolicy make_flu_policy(const FluConfig& cfg, const PolicySpec& spec);

} // namespace seqdec
