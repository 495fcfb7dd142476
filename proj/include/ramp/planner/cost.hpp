#pragma once

#include <Eigen/Core>

#include <span>
#include <vector>

#include "ramp/dynamics.hpp"
#include "ramp/mapping.hpp"

namespace ramp {

class Config;

struct CostParams {
  double alpha = 60.0;      ///< unknown-space speed weight
  double beta = 0.99;       ///< terminal vs. transition blend, [0.5, 1]
  double gamma = 50.0;      ///< time weight, > 1
  double horizon = 10.0;    ///< s
  double frequency = 20.0;  ///< Hz
  double s_default = 0.1;   ///< post-rollout heuristic speed, m/s
  double goal_radius = 1.5;

  int steps() const;
  double dt() const { return 1.0 / frequency; }
  void validate() const;
};

CostParams cost_params_from_config(const Config& config, CostParams base = {});

/// Entry into (`enter`, t_i) and exit from (`exit`, t_i') unknown space, as
/// state indices. A rollout that ends in unknown space exits at its last
/// index.
struct Transition {
  int enter = 0;
  int exit = 0;
  bool operator==(const Transition&) const = default;
};

struct CostBreakdown {
  double transition = 0.0;     ///< first term: per-transition time and cost-to-go
  double terminal = 0.0;       ///< second term: time-to-reach and terminal cost-to-go
  double unknown_speed = 0.0;  ///< third term: mean speed in unknown space
  double penalty = 0.0;        ///< constraint and occupancy penalties

  double total() const { return transition + terminal + unknown_speed + penalty; }
};

struct Rollout {
  std::vector<RobotState> states;  ///< x_0 .. x_N
  std::vector<double> speeds;      ///< |v_t| of the control applied at state t, t < N
  std::vector<CellState> classes;  ///< per state
  std::vector<Transition> transitions;
  int ttr = 0;  ///< steps
  CostBreakdown cost;

  int m() const { return static_cast<int>(transitions.size()); }
  int last_index() const { return static_cast<int>(states.size()) - 1; }
  /// The terminal state has no outgoing control, so its speed is zero.
  double speed_at(int t) const {
    return t >= 0 && t < static_cast<int>(speeds.size()) ? speeds[static_cast<std::size_t>(t)] : 0.0;
  }
};

/// Integrates `controls` from x0; fills states and speeds.
void simulate_rollout(Rollout& rollout, const RobotState& x0, std::span<const Control> controls, double dt,
                      const PlatformSpec& platform);

/// Known (Free or Occupied) to Unknown crossings. A rollout starting in
/// unknown space has its first entry at index 0.
std::vector<Transition> extract_transitions(std::span<const CellState> classes);

/// Per-state class from the grid (Unknown off the grid) plus transitions.
void classify_rollout(Rollout& rollout, const OccupancyGrid& grid);

/// First state index inside the goal disc, or `horizon_steps` if none.
int compute_ttr(std::span<const RobotState> states, const Eigen::Vector2d& goal, double goal_radius,
                int horizon_steps);

/// (|goal - p| / s_default)^2
double cost_to_go(const Eigen::Vector2d& p, const Eigen::Vector2d& goal, double s_default);

/// Variable-horizon cost. Requires classes, transitions and ttr to be set.
/// Times are converted from steps to seconds before squaring. Penalty is
/// left at zero.
CostBreakdown trajectory_cost(const Rollout& rollout, const Eigen::Vector2d& goal, const CostParams& params);

/// Fixed-horizon baseline: terminal cost-to-go plus its time integral over
/// the whole horizon. No transition or unknown-space terms.
struct FixedHorizonWeights {
  double terminal = 1.0;
  double stage = 1.0;
};

CostBreakdown fixed_horizon_cost(const Rollout& rollout, const Eigen::Vector2d& goal, const CostParams& params,
                                 const FixedHorizonWeights& weights = {});

}  // namespace ramp
