#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <vector>

#include "ramp/planner/constraints.hpp"
#include "ramp/planner/cost.hpp"

namespace ramp {

class Config;

enum class Objective { FixedHorizon, VariableHorizon };
enum class UnknownPolicy { Free, Impenetrable, RiskAware };

const char* to_string(Objective o);
const char* to_string(UnknownPolicy p);

struct MppiParams {
  int samples = 512;
  double noise_std = 1.0;  ///< per wheel, m/s
  double temperature = 2.0;
  double smoothing = 0.2;  ///< weight kept from the previous nominal
  double noise_correlation = 0.999;  ///< per-step AR(1) coefficient of the noise, [0, 1)
  int threads = 1;

  void validate() const;
};

MppiParams mppi_params_from_config(const Config& config, MppiParams base = {});

struct PlannerSettings {
  Objective objective = Objective::VariableHorizon;
  UnknownPolicy unknown = UnknownPolicy::RiskAware;
  bool risk_constraints = true;
  CostParams cost;
  ConstraintParams constraints;
  PlatformSpec platform;
  MppiParams mppi;
  FixedHorizonWeights fixed;
};

/// Immutable inputs for one planning cycle.
struct PlanningContext {
  const OccupancyGrid* grid = nullptr;
  ConstraintTerrain terrain;
  Eigen::Vector2d goal = Eigen::Vector2d::Zero();
};

struct RolloutScore {
  int constraint_violations = 0;
  int occupancy_hits = 0;  ///< Occupied steps, plus Unknown steps when impenetrable
  bool blocked_first_step = false;
};

/// Rolls `controls` out from x0 and fills the rollout's classes, TTR and cost
/// (including penalties). Pure apart from writing into `rollout`.
RolloutScore score_rollout(Rollout& rollout, const RobotState& x0, std::span<const Control> controls,
                           const PlanningContext& context, const PlannerSettings& settings);

/// Softmin importance weights exp(-(J - min J) / temperature), normalized.
/// Non-finite costs get zero weight; if every cost is non-finite the weights
/// are uniform.
Eigen::VectorXd softmin_weights(const Eigen::VectorXd& costs, double temperature);

/// Weighted average of sample columns; each column packs one sequence as
/// (left_0, right_0, left_1, ...).
Eigen::VectorXd weighted_update(const Eigen::MatrixXd& samples, const Eigen::VectorXd& weights);

std::vector<Control> unpack_controls(const Eigen::VectorXd& packed);

struct PlanDiagnostics {
  CostBreakdown best_cost;
  int m = 0;
  int ttr = 0;
  int violations = 0;       ///< constraint violations of the best sample
  int occupancy_hits = 0;   ///< of the best sample
  int feasible_samples = 0; ///< samples with zero penalty
  bool emergency_stop = false;
};

struct PlanResult {
  Control command;                ///< first control to apply
  std::vector<Control> sequence;  ///< full planned sequence
  Rollout best;                   ///< minimum-cost sample
  Rollout planned;                ///< rollout of `sequence`
  PlanDiagnostics diagnostics;
};

/// Sampling-based planner; keeps the warm-started nominal between cycles.
class MppiPlanner {
 public:
  MppiPlanner(PlannerSettings settings, std::uint64_t seed);

  PlanResult plan(const RobotState& x0, const Control& current, const PlanningContext& context);

  const PlannerSettings& settings() const { return settings_; }
  const std::vector<Control>& nominal() const { return nominal_; }
  void reset();

 private:
  PlannerSettings settings_;
  std::mt19937_64 rng_;
  std::vector<Control> nominal_;
  Eigen::MatrixXd samples_;
  std::vector<Rollout> rollouts_;
  std::vector<RolloutScore> scores_;
};

/// Per-cycle CSV log of the best sample's breakdown.
void write_diagnostics_header(std::ostream& out);
void write_diagnostics_row(std::ostream& out, double time, const PlanDiagnostics& d);

/// step, x, y, yaw, speed, class
void write_trajectory_csv(std::ostream& out, const Rollout& rollout);

}  // namespace ramp
