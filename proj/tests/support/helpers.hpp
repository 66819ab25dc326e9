#pragma once

// Shared fixtures for the test binaries: random POMDP instances and small
// command/process helpers. Everything here is independent of the library's
// own solvers so it can serve as oracle scaffolding.

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "seqdec/pomdp.hpp"
#include "seqdec/rng.hpp"

namespace testsupport {

inline seqdec::DiscretePomdp random_pomdp(seqdec::RandomStream& rng, int k, int a, int o,
                                          int horizon) {
  seqdec::DiscretePomdp m;
  m.num_states = k;
  m.num_actions = a;
  m.num_observations = o;
  m.horizon = horizon;
  for (int i = 0; i < k; ++i) m.state_names.push_back("s" + std::to_string(i));
  for (int i = 0; i < a; ++i) m.action_names.push_back("a" + std::to_string(i));
  for (int i = 0; i < o; ++i) m.observation_names.push_back("w" + std::to_string(i));
  auto stochastic = [&](int rows, int cols) {
    Eigen::MatrixXd mat(rows, cols);
    for (int r = 0; r < rows; ++r) {
      double sum = 0.0;
      for (int c = 0; c < cols; ++c) {
        mat(r, c) = rng.uniform(0.05, 1.0);
        sum += mat(r, c);
      }
      mat.row(r) /= sum;
    }
    return mat;
  };
  for (int act = 0; act < a; ++act) {
    m.transition.push_back(stochastic(k, k));
    m.observation.push_back(stochastic(k, o));
  }
  m.contribution = Eigen::MatrixXd::Zero(k, a);
  for (int s = 0; s < k; ++s)
    for (int act = 0; act < a; ++act) m.contribution(s, act) = rng.uniform(-1.0, 1.0);
  return m;
}

inline seqdec::BeliefVector random_belief(seqdec::RandomStream& rng, int k) {
  seqdec::BeliefVector b(k);
  double sum = 0.0;
  for (int s = 0; s < k; ++s) {
    b(s) = rng.uniform(0.05, 1.0);
    sum += b(s);
  }
  return b / sum;
}

struct CommandResult {
  int exit_code = -1;
  std::string output; // stdout and stderr, interleaved
};

/// Runs a shell command, capturing combined output. Used by the CLI tests.
inline CommandResult run_command(const std::string& command) {
  CommandResult res;
  std::string full = command + " 2>&1";
  FILE* pipe = popen(full.c_str(), "r");
  if (!pipe) return res;
  std::array<char, 4096> buf;
  while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe))
    res.output.append(buf.data(), n);
  int status = pclose(pipe);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
}

/// Fresh scratch directory under the system temp dir, removed on destruction.
struct ScratchDir {
  std::string path;

  explicit ScratchDir(const std::string& tag) {
    path = (std::filesystem::temp_directory_path() /
            ("seqdec-" + tag + "-" + std::to_string(::getpid())))
               .string();
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~ScratchDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
};

} // namespace testsupport
