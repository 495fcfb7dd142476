#include "ramp/planner/cost.hpp"

#include <cmath>
#include <stdexcept>

#include "ramp/config.hpp"

namespace ramp {

int CostParams::steps() const { return static_cast<int>(std::lround(horizon * frequency)); }

void CostParams::validate() const {
  auto fail = [](const char* what) { throw std::invalid_argument(std::string("CostParams: ") + what); };
  if (!(alpha > 0.0)) fail("alpha must be > 0");
  if (!(beta >= 0.5 && beta <= 1.0)) fail("beta must lie in [0.5, 1]");
  if (!(gamma > 1.0)) fail("gamma must be > 1");
  if (!(horizon > 0.0 && frequency > 0.0)) fail("horizon and frequency must be > 0");
  if (std::abs(horizon * frequency - steps()) > 1e-9) fail("horizon * frequency must be an integer step count");
  if (!(s_default > 0.0)) fail("s_default must be > 0");
  if (!(goal_radius >= 0.0)) fail("goal_radius must be >= 0");
}

CostParams cost_params_from_config(const Config& c, CostParams p) {
  p.alpha = c.get_double("planner.alpha", p.alpha);
  p.beta = c.get_double("planner.beta", p.beta);
  p.gamma = c.get_double("planner.gamma", p.gamma);
  p.horizon = c.get_double("planner.horizon", p.horizon);
  p.frequency = c.get_double("planner.frequency", p.frequency);
  p.s_default = c.get_double("planner.s_default", p.s_default);
  p.goal_radius = c.get_double("planner.goal_radius", p.goal_radius);
  p.validate();
  return p;
}

void simulate_rollout(Rollout& rollout, const RobotState& x0, std::span<const Control> controls, double dt,
                      const PlatformSpec& platform) {
  rollout.states.resize(controls.size() + 1);
  rollout.speeds.resize(controls.size());
  rollout.states[0] = x0;
  for (std::size_t t = 0; t < controls.size(); ++t) {
    rollout.states[t + 1] = step(rollout.states[t], controls[t], dt, platform);
    rollout.speeds[t] = std::abs(linear_velocity(controls[t]));
  }
}

std::vector<Transition> extract_transitions(std::span<const CellState> classes) {
  std::vector<Transition> out;
  bool inside = false;
  for (std::size_t t = 0; t < classes.size(); ++t) {
    const bool unknown = classes[t] == CellState::Unknown;
    if (unknown && !inside) {
      out.push_back({static_cast<int>(t), 0});
      inside = true;
    } else if (!unknown && inside) {
      out.back().exit = static_cast<int>(t);
      inside = false;
    }
  }
  if (inside) out.back().exit = static_cast<int>(classes.size()) - 1;
  return out;
}

void classify_rollout(Rollout& rollout, const OccupancyGrid& grid) {
  rollout.classes.resize(rollout.states.size());
  for (std::size_t t = 0; t < rollout.states.size(); ++t) {
    rollout.classes[t] = grid.at_world(rollout.states[t].position);
  }
  rollout.transitions = extract_transitions(rollout.classes);
}

int compute_ttr(std::span<const RobotState> states, const Eigen::Vector2d& goal, double goal_radius,
                int horizon_steps) {
  const double r2 = goal_radius * goal_radius * (1.0 + 1e-12) + 1e-12;
  const int n = std::min<int>(static_cast<int>(states.size()) - 1, horizon_steps);
  for (int t = 0; t <= n; ++t) {
    if ((states[static_cast<std::size_t>(t)].position - goal).squaredNorm() <= r2) return t;
  }
  return horizon_steps;
}

double cost_to_go(const Eigen::Vector2d& p, const Eigen::Vector2d& goal, double s_default) {
  const double d = (goal - p).norm() / s_default;
  return d * d;
}

CostBreakdown trajectory_cost(const Rollout& rollout, const Eigen::Vector2d& goal, const CostParams& params) {
  const double f = params.frequency;
  const int ttr = rollout.ttr;
  const int last = rollout.last_index();
  auto position_at = [&](int t) { return rollout.states[static_cast<std::size_t>(std::min(t, last))].position; };

  CostBreakdown cost;
  const int m = rollout.m();
  if (m > 0) {
    double sum = 0.0;
    int prev_exit = 0;
    for (const auto& tr : rollout.transitions) {
      if (tr.enter <= ttr) {
        const double gap = (tr.enter - prev_exit) / f;
        sum += params.gamma * gap * gap + cost_to_go(position_at(tr.enter), goal, params.s_default);
      }
      prev_exit = tr.exit;
    }
    cost.transition = (1.0 - params.beta) / m * sum;
  }

  const double ttr_s = ttr / f;
  cost.terminal = params.beta * (params.gamma * ttr_s * ttr_s + cost_to_go(position_at(ttr), goal, params.s_default));

  double speed_sum = 0.0;
  double unknown_steps = 0.0;
  for (const auto& tr : rollout.transitions) {
    for (int t = tr.enter; t <= tr.exit && t <= ttr; ++t) speed_sum += rollout.speed_at(t);
    unknown_steps += tr.exit - tr.enter;
  }
  if (unknown_steps > 0.0) cost.unknown_speed = params.alpha * speed_sum / unknown_steps;
  return cost;
}

CostBreakdown fixed_horizon_cost(const Rollout& rollout, const Eigen::Vector2d& goal, const CostParams& params,
                                 const FixedHorizonWeights& weights) {
  CostBreakdown cost;
  double stage = 0.0;
  for (std::size_t t = 1; t < rollout.states.size(); ++t) {
    stage += cost_to_go(rollout.states[t].position, goal, params.s_default);
  }
  cost.terminal = weights.terminal * cost_to_go(rollout.states.back().position, goal, params.s_default) +
                  weights.stage * stage / params.frequency;
  return cost;
}

}  // namespace ramp
