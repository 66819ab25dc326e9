#include "seqdec/policies.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "json.hpp"

#include "seqdec/dla.hpp"
#include "seqdec/errors.hpp"
#include "seqdec/features.hpp"
#include "seqdec/vfa.hpp"

namespace seqdec {

namespace {

struct TagEntry {
  PolicyKind kind;
  const char* tag;
};

constexpr TagEntry kTags[] = {
    {PolicyKind::PfaObserve, "PFA-Observe"},
    {PolicyKind::PfaVaccinate, "PFA-Vaccinate"},
    {PolicyKind::PfaLinear, "PFA-Linear"},
    {PolicyKind::CfaIe, "CFA-IE"},
    {PolicyKind::CfaVaccinateArgmax, "CFA-VaccinateArgmax"},
    {PolicyKind::VfaLinear, "VFA-Linear"},
    {PolicyKind::DlaSimplifiedMdp, "DLA-SimplifiedMdp"},
    {PolicyKind::Hybrid, "Hybrid"},
};

std::string valid_tags() {
  std::string out;
  for (const auto& e : kTags) {
    if (!out.empty()) out += ", ";
    out += e.tag;
  }
  return out;
}

double require_param(const PolicySpec& spec, const std::string& name) {
  auto it = spec.params.find(name);
  if (it == spec.params.end())
    throw ModelError(std::string("policy ") + policy_tag(spec.kind) +
                     " needs parameter " + name);
  return it->second;
}

double param_or(const PolicySpec& spec, const std::string& name, double fallback) {
  auto it = spec.params.find(name);
  return it == spec.params.end() ? fallback : it->second;
}

double inventory_rate(const FluConfig& cfg) {
  return flu_has_inventory(cfg.variant) ? cfg.inventory_rate : 0.0;
}

double stock_on_hand(const FluControllerState& s) {
  return std::max(0.0, s.inventory);
}

void reject_spatial(const FluConfig& cfg, PolicyKind kind) {
  if (flu_is_spatial(cfg.variant))
    throw ModelError(std::string("policy ") + policy_tag(kind) +
                     " does not cover the spatial variant");
}

void require_vaccination(const FluConfig& cfg, PolicyKind kind) {
  if (!flu_has_vaccination(cfg.variant))
    throw ModelError(std::string("policy ") + policy_tag(kind) +
                     " needs a variant with a vaccination decision");
}

/// Clamps the vaccination components of a composed decision to the stock
/// on hand, leaving the observation components alone. Allocations are
/// scaled down proportionally.
void clamp_vaccination(const FluConfig& cfg, const FluControllerState& s, FluDecision& x) {
  if (!flu_has_inventory(cfg.variant)) return;
  const double cap = stock_on_hand(s);
  const double total = x.total_vaccinate(cfg.variant);
  if (total <= cap) return;
  if (flu_is_spatial(cfg.variant)) {
    const double scale = total > 0.0 ? cap / total : 0.0;
    for (double& v : x.vac_alloc) v *= scale;
  } else {
    x.vaccinate = cap;
  }
}

/// Weight vector aligned to the feature set's order; weights name the
/// features they apply to, unmentioned features get zero.
std::vector<double> aligned_weights(const FeatureSet& fs, const PolicySpec& spec) {
  std::vector<double> theta(fs.size(), 0.0);
  for (const auto& [name, value] : spec.linear_weights) {
    bool found = false;
    for (std::size_t i = 0; i < fs.size(); ++i) {
      if (fs.features[i].name == name) {
        theta[i] = value;
        found = true;
        break;
      }
    }
    if (!found)
      throw ModelError("weight names unknown feature \"" + name + "\" in feature set " +
                       fs.name);
  }
  return theta;
}

FeatureSet feature_set_for(const PolicySpec& spec) {
  return feature_set_by_name(spec.feature_set.empty() ? "flu-basic" : spec.feature_set);
}

/// Shared vaccination completion for the CFA kinds: full dose at the
/// chosen region, limited by stock when inventory is modeled.
void cfa_vaccinate_completion(const FluConfig& cfg, const FluControllerState& s,
                              FluDecision& x) {
  if (!flu_has_vaccination(cfg.variant)) return;
  double dose = cfg.vac_dose;
  if (flu_has_inventory(cfg.variant)) dose = std::min(dose, stock_on_hand(s));
  if (flu_is_spatial(cfg.variant)) {
    x.vac_alloc.assign(s.beliefs.size(), 0.0);
    x.vac_alloc[cfa_vaccinate_argmax(s.beliefs)] = dose;
  } else {
    x.vaccinate = dose;
  }
  x.inventory_order = inventory_rate(cfg);
}

FluPolicy make_component(const FluConfig& cfg, const PolicySpec& spec);

FluPolicy make_hybrid(const FluConfig& cfg, const PolicySpec& spec) {
  if (!spec.observe || !spec.vaccinate)
    throw ModelError("policy Hybrid needs both an observe and a vaccinate component");
  if (spec.observe->kind == PolicyKind::Hybrid ||
      spec.vaccinate->kind == PolicyKind::Hybrid)
    throw ModelError("policy Hybrid components cannot themselves be hybrids");
  FluPolicy obs_side = make_component(cfg, *spec.observe);
  FluPolicy vac_side = make_component(cfg, *spec.vaccinate);
  return [cfg, obs_side, vac_side](const FluControllerState& s, int t) {
    FluDecision from_obs = obs_side(s, t);
    FluDecision x = vac_side(s, t);
    x.observe = from_obs.observe;
    x.obs_region = from_obs.obs_region;
    clamp_vaccination(cfg, s, x);
    return x;
  };
}

FluPolicy make_component(const FluConfig& cfg, const PolicySpec& spec) {
  switch (spec.kind) {
    case PolicyKind::PfaObserve: {
      reject_spatial(cfg, spec.kind);
      const double theta_obs = require_param(spec, "theta_obs");
      if (theta_obs < 0.0) throw ModelError("theta_obs must be nonnegative");
      const double rate = inventory_rate(cfg);
      return [theta_obs, rate](const FluControllerState& s, int) {
        FluDecision x;
        x.observe = pfa_observe(s, theta_obs);
        x.inventory_order = rate;
        return x;
      };
    }
    case PolicyKind::PfaVaccinate: {
      reject_spatial(cfg, spec.kind);
      require_vaccination(cfg, spec.kind);
      const double theta_vac = require_param(spec, "theta_vac");
      if (theta_vac <= 0.0) throw ModelError("theta_vac must be positive");
      const double theta_zeta = param_or(spec, "theta_zeta", 0.0);
      const double mu_vac = require_param(spec, "mu_vac");
      const double rate = inventory_rate(cfg);
      return [=](const FluControllerState& s, int) {
        FluDecision x;
        x.observe = 1;
        x.vaccinate = pfa_vaccinate(s, theta_vac, theta_zeta, mu_vac);
        x.inventory_order = rate;
        return x;
      };
    }
    case PolicyKind::PfaLinear: {
      reject_spatial(cfg, spec.kind);
      require_vaccination(cfg, spec.kind);
      FeatureSet fs = feature_set_for(spec);
      std::vector<double> theta = aligned_weights(fs, spec);
      const bool capped = flu_has_inventory(cfg.variant);
      const double rate = inventory_rate(cfg);
      return [fs = std::move(fs), theta = std::move(theta), capped,
              rate](const FluControllerState& s, int) {
        std::vector<double> phi = fs.values(s);
        double dose = 0.0;
        for (std::size_t i = 0; i < phi.size(); ++i) dose += theta[i] * phi[i];
        dose = std::max(0.0, dose);
        if (capped) dose = std::min(dose, stock_on_hand(s));
        FluDecision x;
        x.observe = 1;
        x.vaccinate = dose;
        x.inventory_order = rate;
        return x;
      };
    }
    case PolicyKind::CfaIe: {
      const double theta_ie = require_param(spec, "theta_ie");
      return [cfg, theta_ie](const FluControllerState& s, int) {
        FluDecision x;
        x.observe = 1;
        x.obs_region = flu_is_spatial(cfg.variant)
                           ? static_cast<int>(cfa_ie_select(s.beliefs, theta_ie))
                           : 0;
        cfa_vaccinate_completion(cfg, s, x);
        return x;
      };
    }
    case PolicyKind::CfaVaccinateArgmax: {
      return [cfg](const FluControllerState& s, int) {
        FluDecision x;
        x.observe = 1;
        x.obs_region = flu_is_spatial(cfg.variant)
                           ? static_cast<int>(cfa_vaccinate_argmax(s.beliefs))
                           : 0;
        cfa_vaccinate_completion(cfg, s, x);
        return x;
      };
    }
    case PolicyKind::VfaLinear: {
      FeatureSet fs = feature_set_for(spec);
      std::vector<double> theta = aligned_weights(fs, spec);
      return [cfg, fs = std::move(fs),
              theta = std::move(theta)](const FluControllerState& s, int) {
        return vfa_decision(cfg, fs, theta, s);
      };
    }
    case PolicyKind::DlaSimplifiedMdp: {
      DlaConfig la;
      la.mu_points = static_cast<int>(param_or(spec, "mu_points", la.mu_points));
      la.beta_points = static_cast<int>(param_or(spec, "beta_points", la.beta_points));
      la.lookahead = static_cast<int>(param_or(spec, "lookahead", la.lookahead));
      la.gh_points = static_cast<int>(param_or(spec, "gh_points", la.gh_points));
      auto policy = std::make_shared<DlaPolicy>(cfg, la);
      return [policy](const FluControllerState& s, int t) { return (*policy)(s, t); };
    }
    case PolicyKind::Hybrid:
      throw ModelError("policy Hybrid components cannot themselves be hybrids");
  }
  throw ModelError("unhandled policy kind");
}

} // namespace

const char* policy_tag(PolicyKind kind) {
  for (const auto& e : kTags)
    if (e.kind == kind) return e.tag;
  throw ModelError("unhandled policy kind");
}

PolicyKind policy_kind_from_tag(const std::string& tag) {
  for (const auto& e : kTags)
    if (tag == e.tag) return e.kind;
  throw ModelError("unknown policy tag \"" + tag + "\" (valid: " + valid_tags() + ")");
}

void set_policy_param(PolicySpec& spec, const std::string& name, double value) {
  auto route = [&](const std::string& prefix,
                   const std::shared_ptr<const PolicySpec>& side) {
    if (name.rfind(prefix, 0) != 0) return false;
    if (!side)
      throw ModelError("parameter " + name + " addresses a missing hybrid component");
    auto updated = std::make_shared<PolicySpec>(*side);
    set_policy_param(*updated, name.substr(prefix.size()), value);
    if (prefix[0] == 'o')
      spec.observe = std::move(updated);
    else
      spec.vaccinate = std::move(updated);
    return true;
  };
  if (route("observe.", spec.observe)) return;
  if (route("vaccinate.", spec.vaccinate)) return;
  if (name.rfind("weight.", 0) == 0) {
    const std::string feature = name.substr(7);
    for (auto& [wname, wvalue] : spec.linear_weights) {
      if (wname == feature) {
        wvalue = value;
        return;
      }
    }
    spec.linear_weights.emplace_back(feature, value);
    return;
  }
  spec.params[name] = value;
}

namespace {

nlohmann::json spec_to_json_value(const PolicySpec& spec) {
  nlohmann::json j;
  j["tag"] = policy_tag(spec.kind);
  if (!spec.params.empty()) {
    nlohmann::json p = nlohmann::json::object();
    for (const auto& [name, value] : spec.params) p[name] = value;
    j["params"] = std::move(p);
  }
  if (!spec.linear_weights.empty()) {
    nlohmann::json w = nlohmann::json::array();
    for (const auto& [name, value] : spec.linear_weights)
      w.push_back({{"name", name}, {"value", value}});
    j["weights"] = std::move(w);
  }
  if (!spec.feature_set.empty()) j["features"] = spec.feature_set;
  if (spec.observe) j["observe"] = spec_to_json_value(*spec.observe);
  if (spec.vaccinate) j["vaccinate"] = spec_to_json_value(*spec.vaccinate);
  return j;
}

PolicySpec spec_from_json_value(const nlohmann::json& j, bool nested) {
  if (!j.is_object()) throw ModelError("policy spec must be a JSON object");
  PolicySpec spec;
  if (!j.contains("tag") || !j.at("tag").is_string())
    throw ModelError("policy spec needs a string \"tag\"");
  spec.kind = policy_kind_from_tag(j.at("tag").get<std::string>());
  if (nested && spec.kind == PolicyKind::Hybrid)
    throw ModelError("policy Hybrid components cannot themselves be hybrids");
  for (const auto& [key, value] : j.items()) {
    if (key == "tag") continue;
    if (key == "params") {
      if (!value.is_object()) throw ModelError("policy \"params\" must be an object");
      for (const auto& [name, pv] : value.items()) {
        if (!pv.is_number())
          throw ModelError("policy parameter " + name + " must be a number");
        spec.params[name] = pv.get<double>();
      }
    } else if (key == "weights") {
      if (!value.is_array()) throw ModelError("policy \"weights\" must be an array");
      for (const auto& entry : value) {
        if (!entry.is_object() || !entry.contains("name") || !entry.contains("value") ||
            !entry.at("name").is_string() || !entry.at("value").is_number() ||
            entry.size() != 2)
          throw ModelError("policy weight entries must be {name, value} objects");
        spec.linear_weights.emplace_back(entry.at("name").get<std::string>(),
                                         entry.at("value").get<double>());
      }
    } else if (key == "features") {
      if (!value.is_string()) throw ModelError("policy \"features\" must be a string");
      spec.feature_set = value.get<std::string>();
    } else if (key == "observe" || key == "vaccinate") {
      if (spec.kind != PolicyKind::Hybrid)
        throw ModelError("policy key \"" + key + "\" is only valid on a Hybrid spec");
      auto side = std::make_shared<PolicySpec>(spec_from_json_value(value, true));
      if (key == "observe")
        spec.observe = std::move(side);
      else
        spec.vaccinate = std::move(side);
    } else {
      throw ModelError("unknown policy spec key \"" + key + "\"");
    }
  }
  if (spec.kind == PolicyKind::Hybrid && (!spec.observe || !spec.vaccinate))
    throw ModelError("policy Hybrid needs both an observe and a vaccinate component");
  return spec;
}

} // namespace

std::string policy_spec_to_json(const PolicySpec& spec) {
  return spec_to_json_value(spec).dump();
}

PolicySpec policy_spec_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ModelError("policy spec is not valid JSON");
  return spec_from_json_value(j, false);
}

int pfa_observe(const FluControllerState& s, double theta_obs) {
  const double mu = s.mu_bar_total();
  if (mu <= 0.0) return 1;
  return s.sigma_bar_total() / mu >= theta_obs ? 1 : 0;
}

double pfa_vaccinate(const FluControllerState& s, double theta_vac, double theta_zeta,
                     double mu_vac) {
  if (theta_vac <= 0.0) throw ModelError("theta_vac must be positive");
  const double excess = s.mu_bar_total() + theta_zeta * s.sigma_bar_total() - mu_vac;
  double dose = std::max(0.0, excess) / theta_vac;
  if (flu_has_inventory(s.variant)) dose = std::min(dose, stock_on_hand(s));
  return dose;
}

std::size_t cfa_ie_select(const std::vector<GaussianBelief>& beliefs, double theta_ie) {
  if (beliefs.empty()) throw ModelError("cfa_ie_select needs at least one belief");
  std::size_t best = 0;
  double best_score = beliefs[0].mean + theta_ie * beliefs[0].sigma();
  for (std::size_t i = 1; i < beliefs.size(); ++i) {
    const double score = beliefs[i].mean + theta_ie * beliefs[i].sigma();
    if (score > best_score) {
      best = i;
      best_score = score;
    }
  }
  return best;
}

std::size_t cfa_vaccinate_argmax(const std::vector<GaussianBelief>& beliefs) {
  return cfa_ie_select(beliefs, 0.0);
}

FluPolicy make_flu_policy(const FluConfig& cfg, const PolicySpec& spec) {
  cfg.validate();
  if (spec.kind == PolicyKind::Hybrid) return make_hybrid(cfg, spec);
  return make_component(cfg, spec);
}

} // namespace seqdec
