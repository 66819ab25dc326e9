#pragma once

#include <string>

#include "seqdec/pomdp.hpp"

namespace seqdec {

/// Parses a POMDP from its JSON form:
///
/// {
///   "states": ["healthy", "sick"]       (or an integer count)
///   "actions": [...],
///   "observations": [...],
///   "transition": [action][state][next_state],
///   "observation_probs": [action][next_state][observation],
///   "contribution": [state][action],
///   "horizon": 3
/// }
///
/// The result is validated; errors carry the offending field.
DiscretePomdp pomdp_from_json_text(const std::string& text);

DiscretePomdp load_pomdp_json(const std::string& path);

/// Inverse of pomdp_from_json_text. load(save(m)) reproduces m exactly:
/// numbers are emitted in shortest round-trip form.
std::string pomdp_to_json_text(const DiscretePomdp& m);

void save_pomdp_json(const DiscretePomdp& m, const std::string& path);

} // namespace seqdec
