#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ramp/dynamics.hpp"
#include "ramp/mapping.hpp"
#include "ramp/planner/mppi.hpp"
#include "ramp/sensor.hpp"
#include "ramp/terrain.hpp"

namespace ramp {

class Config;

enum class MapperKind { Raytracing, GroundInflation };
enum class Outcome { ReachedGoal, CollidedWithRock, TippedOver, Timeout };

const char* to_string(MapperKind m);
const char* to_string(Outcome o);
Outcome outcome_from_string(const std::string& s);

struct PipelineConfig {
  std::string name;
  MapperKind mapper = MapperKind::GroundInflation;
  Objective planner = Objective::VariableHorizon;
  UnknownPolicy unknown = UnknownPolicy::RiskAware;
  bool risk_constraints = true;
  CostParams cost;
  ConstraintParams constraints;

  /// "pipeline1", "pipeline2", "pipeline3" or "ramp".
  static PipelineConfig preset(const std::string& name);
};

std::vector<std::string> preset_names();

/// Preset with `planner.*` and `constraints.*` overrides from the config.
PipelineConfig pipeline_from_config(const std::string& preset, const Config& config);

struct BenchConfig {
  TerrainSpec terrain;
  LidarSpec lidar = LidarSpec::default_spec();
  ClassifierParams classifier;
  InflationParams inflation;
  double memory_window = 3.0;  ///< s
  PlatformSpec platform;
  MppiParams mppi;

  double scan_rate = 10.0;          ///< Hz; the loop itself runs at the planner frequency
  double timeout = 120.0;           ///< s
  double estop_timeout = 5.0;       ///< s of continuous emergency stop before giving up
  double stall_timeout = 20.0;      ///< s without moving stall_distance before giving up
  double stall_distance = 1.0;      ///< m
  double map_size = 80.0;           ///< side of the robot-centred grid, m
  double start_clear_radius = 4.0;  ///< ground under and around the start pose is known
  double tip_dwell = 1.0;           ///< s of continuous slope-turning violation

  void validate() const;
};

BenchConfig bench_config_from_config(const Config& config);

struct TrialResult {
  std::uint64_t seed = 0;
  Outcome outcome = Outcome::Timeout;
  double elapsed = 0.0;           ///< s
  double distance = 0.0;          ///< m travelled
  double unknown_time = 0.0;      ///< s spent on Unknown cells of the current map
  double unknown_distance = 0.0;  ///< m travelled on Unknown cells

  double average_speed() const { return elapsed > 0.0 ? distance / elapsed : 0.0; }
};

struct TrialOutputs {
  std::ostream* trajectory = nullptr;   ///< executed states, one row per step
  std::ostream* diagnostics = nullptr;  ///< planner diagnostics per cycle
  std::ostream* final_grid = nullptr;   ///< fused grid at the end of the trial
};

TrialResult run_trial(const BenchConfig& bench, const PipelineConfig& pipeline, std::uint64_t seed,
                      const TrialOutputs& outputs = {});

struct BatchSummary {
  int trials = 0;
  int reached = 0;
  int collided = 0;
  int tipped = 0;
  int timed_out = 0;
  double mean_success_speed = 0.0;  ///< over successful trials; 0 without any
  double unknown_speed = 0.0;       ///< pooled over all trials; 0 without unknown travel

  double rate(int count) const { return trials > 0 ? static_cast<double>(count) / trials : 0.0; }
  double success_rate() const { return rate(reached); }
  double collision_rate() const { return rate(collided); }
};

BatchSummary summarize(std::span<const TrialResult> results);

/// Trial i runs with seed base_seed + i. Trials are spread over `jobs`
/// threads; results are independent of the thread count. `on_trial` may be
/// called from worker threads, one call at a time.
std::vector<TrialResult> run_batch(const BenchConfig& bench, const PipelineConfig& pipeline, int trials,
                                   std::uint64_t base_seed,
                                   const std::function<void(int, const TrialResult&)>& on_trial = {}, int jobs = 1);

void write_trials_csv(std::ostream& out, std::span<const TrialResult> results);
std::vector<TrialResult> read_trials_csv(std::istream& in);
void write_summary(std::ostream& out, const std::string& pipeline, const BatchSummary& summary);

/// Simulator failure rule: slope-turning violation held for longer than
/// `dwell`, or a centripetal violation at any step.
class TipMonitor {
 public:
  TipMonitor(const ConstraintParams& params, const PlatformSpec& platform, double dwell)
      : params_(params), platform_(platform), dwell_(dwell) {}

  /// Feeds the state reached under `applied`; returns true once tipped.
  bool update(const RobotState& state, const Control& applied, const SlopeField& slopes, double dt);
  double violation_time() const { return held_; }

 private:
  ConstraintParams params_;
  PlatformSpec platform_;
  double dwell_;
  double held_ = 0.0;
};

/// `states[t + 1]` is reached from `states[t]` under `controls[t]`.
bool tip_over_check(std::span<const RobotState> states, std::span<const Control> controls, const SlopeField& slopes,
                    const ConstraintParams& params, const PlatformSpec& platform, double dt, double dwell = 1.0);

}  // namespace ramp
