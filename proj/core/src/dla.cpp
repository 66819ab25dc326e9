#include "seqdec/dla.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "seqdec/errors.hpp"

namespace seqdec {

GaussHermite gauss_hermite(int n) {
  if (n < 1) throw ModelError("gauss_hermite needs at least one node");
  GaussHermite out;
  if (n == 1) {
    out.nodes = {0.0};
    out.weights = {1.0};
    return out;
  }
  // Golub-Welsch on the Hermite three-term recurrence. The physicists'
  // Jacobi matrix has zero diagonal and off-diagonals sqrt(k/2); scaling
  // the eigenvalues by sqrt(2) converts to standard-normal nodes.
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double off = std::sqrt(k / 2.0);
    jacobi(k - 1, k) = off;
    jacobi(k, k - 1) = off;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
  out.nodes.resize(n);
  out.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    out.nodes[i] = std::sqrt(2.0) * es.eigenvalues()(i);
    const double v = es.eigenvectors()(0, i);
    out.weights[i] = v * v;
  }
  return out;
}

void DlaConfig::validate() const {
  if (mu_points < 2) throw ModelError("dla mu_points must be at least 2");
  if (beta_points < 2) throw ModelError("dla beta_points must be at least 2");
  if (lookahead < 0) throw ModelError("dla lookahead must be nonnegative");
  if (gh_points < 1) throw ModelError("dla gh_points must be at least 1");
}

namespace {

double observation_precision(const FluConfig& cfg) {
  // Matches the belief update: a zero-noise channel acts as an effectively
  // infinite precision.
  return cfg.sigma_w > 0 ? 1.0 / (cfg.sigma_w * cfg.sigma_w) : 1e30;
}

} // namespace

DlaPolicy::DlaPolicy(FluConfig cfg, DlaConfig lookahead_cfg)
    : cfg_(std::move(cfg)), la_(lookahead_cfg) {
  cfg_.validate();
  la_.validate();
  if (cfg_.variant < 1 || cfg_.variant > 3)
    throw ModelError("DLA lookahead covers the belief-state variants 1..3");
  gh_ = gauss_hermite(la_.gh_points);
  beta_w_ = observation_precision(cfg_);
}

const DlaPolicy::Solved& DlaPolicy::solve_for(double delta_bar,
                                              double drift_var,
                                              double beta0) {
  const std::array<double, 3> key{delta_bar, drift_var, beta0};
  if (auto it = memo_.find(key); it != memo_.end()) return it->second;
  ++solves_;

  Solved sv;
  const int nm = la_.mu_points;
  const int nb = la_.beta_points;
  const int h = la_.lookahead;

  sv.mu_grid.resize(nm);
  const double mu_hi = std::max(1.0, 3.0 * cfg_.prior_mean);
  for (int i = 0; i < nm; ++i)
    sv.mu_grid[i] = mu_hi * static_cast<double>(i) / (nm - 1);

  // Precision only grows, by beta_w per observation, so a geometric grid
  // from the current precision to the all-observe endpoint covers every
  // reachable point.
  sv.beta_grid.resize(nb);
  const double b_lo = std::max(beta0, beta_w_ * 1e-9);
  const double b_hi = b_lo + std::max(1, h) * beta_w_;
  for (int j = 0; j < nb; ++j) {
    const double frac = static_cast<double>(j) / (nb - 1);
    sv.beta_grid[j] = b_lo * std::pow(b_hi / b_lo, frac);
  }

  const double sigma_mu2 = cfg_.sigma_mu * cfg_.sigma_mu;
  const double sigma_w2 = cfg_.sigma_w * cfg_.sigma_w;

  std::vector<double> prev(static_cast<std::size_t>(nm) * nb, 0.0);
  std::vector<double> cur(prev.size(), 0.0);

  auto value_at = [&](const std::vector<double>& layer, double mu,
                      double beta) {
    // Bilinear over the grid, linear in mu and in log(beta).
    const auto& mg = sv.mu_grid;
    const auto& bg = sv.beta_grid;
    const double mu_c = std::clamp(mu, mg.front(), mg.back());
    const double be_c = std::clamp(beta, bg.front(), bg.back());
    auto mi = std::upper_bound(mg.begin(), mg.end(), mu_c) - mg.begin();
    auto bi = std::upper_bound(bg.begin(), bg.end(), be_c) - bg.begin();
    const int i1 = std::clamp<int>(static_cast<int>(mi), 1, nm - 1);
    const int j1 = std::clamp<int>(static_cast<int>(bi), 1, nb - 1);
    const int i0 = i1 - 1;
    const int j0 = j1 - 1;
    const double tu = (mu_c - mg[i0]) / (mg[i1] - mg[i0]);
    const double tb =
        (std::log(be_c) - std::log(bg[j0])) / (std::log(bg[j1]) - std::log(bg[j0]));
    auto at = [&](int i, int j) { return layer[i * nb + j]; };
    const double lo = at(i0, j0) * (1 - tb) + at(i0, j1) * tb;
    const double hi = at(i1, j0) * (1 - tb) + at(i1, j1) * tb;
    return lo * (1 - tu) + hi * tu;
  };

  for (int k = 1; k <= h; ++k) {
    for (int i = 0; i < nm; ++i) {
      for (int j = 0; j < nb; ++j) {
        const double mu = sv.mu_grid[i];
        const double beta = sv.beta_grid[j];
        // The uncertainty charge is assessed on the belief as it stands,
        // before the period's draw, so it is common to both actions.
        const double hold = cfg_.c_unc / std::sqrt(beta);

        // Skip: the belief mean drifts, the precision stays put.
        const double skip = value_at(prev, mu + delta_bar, beta);

        // Observe: predictive draw w ~ N(mu + delta_bar, var), then the
        // conjugate posterior. The predictive variance stacks the belief
        // spread, the frozen drift spread, and both noise channels.
        const double beta2 = beta + beta_w_;
        const double pred_mean = mu + delta_bar;
        const double pred_var =
            1.0 / beta + drift_var + sigma_mu2 + sigma_w2;
        const double pred_sd = std::sqrt(std::max(0.0, pred_var));
        double cont = 0.0;
        for (std::size_t q = 0; q < gh_.nodes.size(); ++q) {
          const double w = pred_mean + pred_sd * gh_.nodes[q];
          const double post_mean = (beta * pred_mean + beta_w_ * w) / beta2;
          cont += gh_.weights[q] * value_at(prev, post_mean, beta2);
        }
        const double observe = cfg_.c_obs + cont;

        cur[i * nb + j] = hold + std::min(skip, observe);
      }
    }
    std::swap(prev, cur);
  }

  sv.value = std::move(prev);
  return memo_.emplace(key, std::move(sv)).first->second;
}

double DlaPolicy::interpolate(const Solved& sv, double mu, double beta) {
  const auto& mg = sv.mu_grid;
  const auto& bg = sv.beta_grid;
  if (mu < mg.front() || mu > mg.back() || beta < bg.front() ||
      beta > bg.back())
    clamped_ = true;
  const double mu_c = std::clamp(mu, mg.front(), mg.back());
  const double be_c = std::clamp(beta, bg.front(), bg.back());
  const int nm = static_cast<int>(mg.size());
  const int nb = static_cast<int>(bg.size());
  auto mi = std::upper_bound(mg.begin(), mg.end(), mu_c) - mg.begin();
  auto bi = std::upper_bound(bg.begin(), bg.end(), be_c) - bg.begin();
  const int i1 = std::clamp<int>(static_cast<int>(mi), 1, nm - 1);
  const int j1 = std::clamp<int>(static_cast<int>(bi), 1, nb - 1);
  const int i0 = i1 - 1;
  const int j0 = j1 - 1;
  const double tu = (mu_c - mg[i0]) / (mg[i1] - mg[i0]);
  const double tb =
      (std::log(be_c) - std::log(bg[j0])) / (std::log(bg[j1]) - std::log(bg[j0]));
  auto at = [&](int i, int j) { return sv.value[i * nb + j]; };
  const double lo = at(i0, j0) * (1 - tb) + at(i0, j1) * tb;
  const double hi = at(i1, j0) * (1 - tb) + at(i1, j1) * tb;
  return lo * (1 - tu) + hi * tu;
}

FluDecision DlaPolicy::operator()(const FluControllerState& s, int) {
  const auto& b = s.beliefs[0];
  double delta_bar = 0.0;
  double drift_var = 0.0;
  if (cfg_.variant == 3) {
    delta_bar = s.drift.mean;
    drift_var = s.drift.precision > 0 ? 1.0 / s.drift.precision : 0.0;
  }
  const Solved& sv = solve_for(delta_bar, drift_var, b.precision);

  const double sigma_mu2 = cfg_.sigma_mu * cfg_.sigma_mu;
  const double sigma_w2 = cfg_.sigma_w * cfg_.sigma_w;

  // Both branches are evaluated from the exact current belief, not a grid
  // point. The common uncertainty charge on the current belief drops out
  // of the comparison.
  const double v_skip = interpolate(sv, b.mean + delta_bar, b.precision);

  const double beta2 = b.precision + beta_w_;
  const double pred_mean = b.mean + delta_bar;
  const double pred_var =
      1.0 / b.precision + drift_var + sigma_mu2 + sigma_w2;
  const double pred_sd = std::sqrt(std::max(0.0, pred_var));
  double cont = 0.0;
  for (std::size_t q = 0; q < gh_.nodes.size(); ++q) {
    const double w = pred_mean + pred_sd * gh_.nodes[q];
    const double post_mean =
        (b.precision * pred_mean + beta_w_ * w) / beta2;
    cont += gh_.weights[q] * interpolate(sv, post_mean, beta2);
  }
  const double v_obs = cfg_.c_obs + cont;

  FluDecision x;
  x.observe = v_skip <= v_obs ? 0 : 1;
  return x;
}

} // namespace seqdec
