#include "ramp/planner/mppi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "ramp/config.hpp"

namespace ramp {

const char* to_string(Objective o) { return o == Objective::FixedHorizon ? "fixed_horizon" : "variable_horizon"; }

const char* to_string(UnknownPolicy p) {
  switch (p) {
    case UnknownPolicy::Free:
      return "free";
    case UnknownPolicy::Impenetrable:
      return "impenetrable";
    case UnknownPolicy::RiskAware:
      break;
  }
  return "risk_aware";
}

void MppiParams::validate() const {
  if (samples < 1) throw std::invalid_argument("MppiParams: samples must be >= 1");
  if (!(noise_std > 0.0)) throw std::invalid_argument("MppiParams: noise_std must be > 0");
  if (!(temperature > 0.0)) throw std::invalid_argument("MppiParams: temperature must be > 0");
  if (!(smoothing >= 0.0 && smoothing < 1.0)) throw std::invalid_argument("MppiParams: smoothing must lie in [0, 1)");
  if (!(noise_correlation >= 0.0 && noise_correlation < 1.0)) {
    throw std::invalid_argument("MppiParams: noise_correlation must lie in [0, 1)");
  }
  if (threads < 1) throw std::invalid_argument("MppiParams: threads must be >= 1");
}

MppiParams mppi_params_from_config(const Config& c, MppiParams p) {
  p.samples = c.get_int("mppi.samples", p.samples);
  p.noise_std = c.get_double("mppi.noise_std", p.noise_std);
  p.temperature = c.get_double("mppi.temperature", p.temperature);
  p.smoothing = c.get_double("mppi.smoothing", p.smoothing);
  p.noise_correlation = c.get_double("mppi.noise_correlation", p.noise_correlation);
  p.threads = c.get_int("mppi.threads", p.threads);
  p.validate();
  return p;
}

RolloutScore score_rollout(Rollout& rollout, const RobotState& x0, std::span<const Control> controls,
                           const PlanningContext& context, const PlannerSettings& settings) {
  const CostParams& cp = settings.cost;
  simulate_rollout(rollout, x0, controls, cp.dt(), settings.platform);
  classify_rollout(rollout, *context.grid);
  if (settings.unknown == UnknownPolicy::Free) {
    std::replace(rollout.classes.begin(), rollout.classes.end(), CellState::Unknown, CellState::Free);
    rollout.transitions.clear();
  }
  rollout.ttr = compute_ttr(rollout.states, context.goal, cp.goal_radius, cp.steps());

  rollout.cost = settings.objective == Objective::VariableHorizon
                     ? trajectory_cost(rollout, context.goal, cp)
                     : fixed_horizon_cost(rollout, context.goal, cp, settings.fixed);

  RolloutScore score;
  std::uint8_t first = 0;
  if (settings.risk_constraints) {
    const ConstraintReport report =
        evaluate_constraints(rollout, controls, context.terrain, settings.constraints, settings.platform);
    score.constraint_violations = report.violations;
    rollout.cost.penalty += report.penalty;
    if (report.flags.size() > 1) first = report.flags[1];
  }
  const bool unknown_blocks = settings.unknown == UnknownPolicy::Impenetrable;
  const int last = std::min(rollout.last_index(), rollout.ttr);
  for (int t = 1; t <= last; ++t) {
    const CellState c = rollout.classes[static_cast<std::size_t>(t)];
    if (c == CellState::Occupied || (unknown_blocks && c == CellState::Unknown)) {
      ++score.occupancy_hits;
      if (t == 1) first = 1;
    }
  }
  rollout.cost.penalty += settings.constraints.penalty * score.occupancy_hits;
  score.blocked_first_step = first != 0;
  return score;
}

Eigen::VectorXd softmin_weights(const Eigen::VectorXd& costs, double temperature) {
  const Eigen::Index k = costs.size();
  double lowest = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < k; ++i) {
    if (std::isfinite(costs[i])) lowest = std::min(lowest, costs[i]);
  }
  if (!std::isfinite(lowest)) return Eigen::VectorXd::Constant(k, 1.0 / static_cast<double>(k));
  Eigen::VectorXd w(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    w[i] = std::isfinite(costs[i]) ? std::exp(-(costs[i] - lowest) / temperature) : 0.0;
  }
  return w / w.sum();
}

Eigen::VectorXd weighted_update(const Eigen::MatrixXd& samples, const Eigen::VectorXd& weights) {
  return samples * weights;
}

std::vector<Control> unpack_controls(const Eigen::VectorXd& packed) {
  std::vector<Control> out(static_cast<std::size_t>(packed.size() / 2));
  for (std::size_t t = 0; t < out.size(); ++t) {
    out[t] = {packed[static_cast<Eigen::Index>(2 * t)], packed[static_cast<Eigen::Index>(2 * t + 1)]};
  }
  return out;
}

MppiPlanner::MppiPlanner(PlannerSettings settings, std::uint64_t seed) : settings_(std::move(settings)), rng_(seed) {
  settings_.cost.validate();
  settings_.constraints.validate();
  settings_.platform.validate();
  settings_.mppi.validate();
  reset();
}

void MppiPlanner::reset() { nominal_.assign(static_cast<std::size_t>(settings_.cost.steps()), Control{}); }

PlanResult MppiPlanner::plan(const RobotState& x0, const Control& current, const PlanningContext& context) {
  if (!context.grid) throw std::invalid_argument("MppiPlanner::plan: no grid");
  const int n = settings_.cost.steps();
  const int k = settings_.mppi.samples;
  const double dt = settings_.cost.dt();
  const PlatformSpec& platform = settings_.platform;

  // Sample 0 is the noise-free nominal. Noise is drawn serially so results do
  // not depend on the thread count. AR(1) noise with stationary std noise_std;
  // white noise would mostly be absorbed by the wheel acceleration limit.
  samples_.resize(2 * n, k);
  std::normal_distribution<double> noise(0.0, settings_.mppi.noise_std);
  const double rho = settings_.mppi.noise_correlation;
  const double innovation = std::sqrt(1.0 - rho * rho);
  for (int s = 0; s < k; ++s) {
    Control prev = current;
    Control eps;
    for (int t = 0; t < n; ++t) {
      Control u = nominal_[static_cast<std::size_t>(t)];
      if (s > 0) {
        eps.left = t == 0 ? noise(rng_) : rho * eps.left + innovation * noise(rng_);
        eps.right = t == 0 ? noise(rng_) : rho * eps.right + innovation * noise(rng_);
        u.left += eps.left;
        u.right += eps.right;
      }
      prev = rate_limit(u, prev, dt, platform);
      samples_(2 * t, s) = prev.left;
      samples_(2 * t + 1, s) = prev.right;
    }
  }

  rollouts_.resize(static_cast<std::size_t>(k));
  scores_.resize(static_cast<std::size_t>(k));
  auto evaluate = [&](int begin, int end) {
    std::vector<Control> controls(static_cast<std::size_t>(n));
    for (int s = begin; s < end; ++s) {
      for (int t = 0; t < n; ++t) controls[static_cast<std::size_t>(t)] = {samples_(2 * t, s), samples_(2 * t + 1, s)};
      scores_[static_cast<std::size_t>(s)] =
          score_rollout(rollouts_[static_cast<std::size_t>(s)], x0, controls, context, settings_);
    }
  };
  const int threads = std::min(settings_.mppi.threads, k);
  if (threads <= 1) {
    evaluate(0, k);
  } else {
    std::vector<std::jthread> pool;
    const int chunk = (k + threads - 1) / threads;
    for (int b = 0; b < k; b += chunk) pool.emplace_back(evaluate, b, std::min(k, b + chunk));
  }

  Eigen::VectorXd costs(k);
  int best = 0;
  int feasible = 0;
  bool all_blocked = true;
  for (int s = 0; s < k; ++s) {
    const Rollout& r = rollouts_[static_cast<std::size_t>(s)];
    costs[s] = r.cost.total();
    if (costs[s] < costs[best]) best = s;
    if (r.cost.penalty == 0.0) ++feasible;
    all_blocked = all_blocked && scores_[static_cast<std::size_t>(s)].blocked_first_step;
  }

  PlanResult result;
  result.best = rollouts_[static_cast<std::size_t>(best)];
  PlanDiagnostics& d = result.diagnostics;
  d.best_cost = result.best.cost;
  d.m = result.best.m();
  d.ttr = result.best.ttr;
  d.violations = scores_[static_cast<std::size_t>(best)].constraint_violations;
  d.occupancy_hits = scores_[static_cast<std::size_t>(best)].occupancy_hits;
  d.feasible_samples = feasible;

  if (all_blocked) {
    d.emergency_stop = true;
    reset();
    result.command = Control{};
    result.sequence = nominal_;
    score_rollout(result.planned, x0, result.sequence, context, settings_);
    return result;
  }

  const Eigen::VectorXd update = weighted_update(samples_, softmin_weights(costs, settings_.mppi.temperature));
  const double keep = settings_.mppi.smoothing;
  result.sequence = unpack_controls(update);
  Control prev = current;
  for (int t = 0; t < n; ++t) {
    Control& u = result.sequence[static_cast<std::size_t>(t)];
    const Control& old = nominal_[static_cast<std::size_t>(t)];
    u = rate_limit({(1.0 - keep) * u.left + keep * old.left, (1.0 - keep) * u.right + keep * old.right}, prev, dt,
                   platform);
    prev = u;
  }
  result.command = result.sequence.front();
  score_rollout(result.planned, x0, result.sequence, context, settings_);

  std::copy(result.sequence.begin() + 1, result.sequence.end(), nominal_.begin());
  nominal_.back() = result.sequence.back();
  return result;
}

}  // namespace ramp
