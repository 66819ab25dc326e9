#include "seqdec/pomdp_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

#include "seqdec/errors.hpp"

namespace seqdec {

namespace {

using nlohmann::json;

std::pair<int, std::vector<std::string>> parse_axis(const json& j, const std::string& key) {
  if (!j.contains(key)) throw ModelError("pomdp json: missing field '" + key + "'");
  const json& v = j.at(key);
  if (v.is_number_integer()) {
    int n = v.get<int>();
    if (n <= 0) throw ModelError("pomdp json: '" + key + "' must be positive");
    return {n, {}};
  }
  if (v.is_array()) {
    std::vector<std::string> names;
    for (const auto& e : v) {
      if (!e.is_string()) throw ModelError("pomdp json: '" + key + "' must list names");
      names.push_back(e.get<std::string>());
    }
    if (names.empty()) throw ModelError("pomdp json: '" + key + "' must not be empty");
    return {static_cast<int>(names.size()), names};
  }
  throw ModelError("pomdp json: '" + key + "' must be a count or a list of names");
}

Eigen::MatrixXd parse_matrix(const json& j, int rows, int cols, const std::string& what) {
  if (!j.is_array() || static_cast<int>(j.size()) != rows)
    throw ModelError("pomdp json: " + what + " must have " + std::to_string(rows) + " rows");
  Eigen::MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    const json& row = j.at(static_cast<std::size_t>(r));
    if (!row.is_array() || static_cast<int>(row.size()) != cols)
      throw ModelError("pomdp json: row " + std::to_string(r) + " of " + what + " must have " +
                       std::to_string(cols) + " entries");
    for (int c = 0; c < cols; ++c) {
      const json& e = row.at(static_cast<std::size_t>(c));
      if (!e.is_number()) throw ModelError("pomdp json: non-numeric entry in " + what);
      m(r, c) = e.get<double>();
    }
  }
  return m;
}

std::vector<Eigen::MatrixXd> parse_tensor(const json& j, const std::string& key, int actions,
                                          int rows, int cols) {
  if (!j.contains(key)) throw ModelError("pomdp json: missing field '" + key + "'");
  const json& t = j.at(key);
  if (!t.is_array() || static_cast<int>(t.size()) != actions)
    throw ModelError("pomdp json: '" + key + "' must have one matrix per action");
  std::vector<Eigen::MatrixXd> out;
  for (int a = 0; a < actions; ++a)
    out.push_back(parse_matrix(t.at(static_cast<std::size_t>(a)), rows, cols,
                               key + "[" + std::to_string(a) + "]"));
  return out;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

} // namespace

DiscretePomdp pomdp_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ModelError(std::string("pomdp json: parse error: ") + e.what());
  }
  if (!j.is_object()) throw ModelError("pomdp json: top level must be an object");

  DiscretePomdp m;
  auto [ns, state_names] = parse_axis(j, "states");
  auto [na, action_names] = parse_axis(j, "actions");
  auto [no, obs_names] = parse_axis(j, "observations");
  m.num_states = ns;
  m.num_actions = na;
  m.num_observations = no;
  m.state_names = std::move(state_names);
  m.action_names = std::move(action_names);
  m.observation_names = std::move(obs_names);

  m.transition = parse_tensor(j, "transition", na, ns, ns);
  m.observation = parse_tensor(j, "observation_probs", na, ns, no);
  if (!j.contains("contribution")) throw ModelError("pomdp json: missing field 'contribution'");
  m.contribution = parse_matrix(j.at("contribution"), ns, na, "contribution");
  if (!j.contains("horizon") || !j.at("horizon").is_number_integer())
    throw ModelError("pomdp json: missing integer field 'horizon'");
  m.horizon = j.at("horizon").get<int>();

  m.validate();
  return m;
}

DiscretePomdp load_pomdp_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ModelError("load_pomdp_json: cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return pomdp_from_json_text(ss.str());
}

std::string pomdp_to_json_text(const DiscretePomdp& m) {
  m.validate();
  json j;
  if (!m.state_names.empty())
    j["states"] = m.state_names;
  else
    j["states"] = m.num_states;
  if (!m.action_names.empty())
    j["actions"] = m.action_names;
  else
    j["actions"] = m.num_actions;
  if (!m.observation_names.empty())
    j["observations"] = m.observation_names;
  else
    j["observations"] = m.num_observations;

  json t = json::array();
  json o = json::array();
  for (int a = 0; a < m.num_actions; ++a) {
    t.push_back(matrix_to_json(m.transition[static_cast<std::size_t>(a)]));
    o.push_back(matrix_to_json(m.observation[static_cast<std::size_t>(a)]));
  }
  j["transition"] = std::move(t);
  j["observation_probs"] = std::move(o);
  j["contribution"] = matrix_to_json(m.contribution);
  j["horizon"] = m.horizon;
  return j.dump(2) + "\n";
}

void save_pomdp_json(const DiscretePomdp& m, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ModelError("save_pomdp_json: cannot open " + path);
  f << pomdp_to_json_text(m);
  if (!f) throw ModelError("save_pomdp_json: write failed for " + path);
}

} // namespace seqdec
