#include <stdexcept>

#include "ramp/bench.hpp"
#include "ramp/config.hpp"

namespace ramp {

const char* to_string(MapperKind m) { return m == MapperKind::Raytracing ? "raytracing" : "ground_inflation"; }

const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::ReachedGoal:
      return "reached_goal";
    case Outcome::CollidedWithRock:
      return "collided";
    case Outcome::TippedOver:
      return "tipped_over";
    case Outcome::Timeout:
      break;
  }
  return "timeout";
}

Outcome outcome_from_string(const std::string& s) {
  for (Outcome o : {Outcome::ReachedGoal, Outcome::CollidedWithRock, Outcome::TippedOver, Outcome::Timeout}) {
    if (s == to_string(o)) return o;
  }
  throw std::invalid_argument("unknown outcome '" + s + "'");
}

std::vector<std::string> preset_names() { return {"pipeline1", "pipeline2", "pipeline3", "ramp"}; }

PipelineConfig PipelineConfig::preset(const std::string& name) {
  PipelineConfig p;
  p.name = name;
  if (name == "ramp") return p;
  p.planner = Objective::FixedHorizon;
  p.risk_constraints = false;
  if (name == "pipeline1") {
    p.mapper = MapperKind::Raytracing;
    p.unknown = UnknownPolicy::Free;
  } else if (name == "pipeline2") {
    p.mapper = MapperKind::Raytracing;
    p.unknown = UnknownPolicy::Impenetrable;
  } else if (name == "pipeline3") {
    p.mapper = MapperKind::GroundInflation;
    p.unknown = UnknownPolicy::Impenetrable;
  } else {
    throw std::invalid_argument("unknown pipeline preset '" + name + "'");
  }
  return p;
}

PipelineConfig pipeline_from_config(const std::string& preset, const Config& config) {
  PipelineConfig p = PipelineConfig::preset(preset);
  p.cost = cost_params_from_config(config, p.cost);
  p.constraints = constraint_params_from_config(config, p.constraints);
  return p;
}

void BenchConfig::validate() const {
  terrain.validate();
  lidar.validate();
  platform.validate();
  mppi.validate();
  if (!(memory_window >= 0.0)) throw std::invalid_argument("BenchConfig: memory_window must be >= 0");
  if (!(scan_rate > 0.0)) throw std::invalid_argument("BenchConfig: scan_rate must be > 0");
  if (!(timeout > 0.0 && estop_timeout > 0.0)) throw std::invalid_argument("BenchConfig: timeouts must be > 0");
  if (!(stall_timeout > 0.0 && stall_distance > 0.0)) {
    throw std::invalid_argument("BenchConfig: stall_timeout and stall_distance must be > 0");
  }
  if (!(map_size > 0.0)) throw std::invalid_argument("BenchConfig: map_size must be > 0");
  if (!(start_clear_radius >= 0.0)) throw std::invalid_argument("BenchConfig: start_clear_radius must be >= 0");
  if (!(tip_dwell >= 0.0)) throw std::invalid_argument("BenchConfig: tip_dwell must be >= 0");
}

BenchConfig bench_config_from_config(const Config& c) {
  BenchConfig b;
  b.terrain = terrain_spec_from_config(c, b.terrain);
  b.lidar = lidar_spec_from_config(c, b.lidar);
  b.classifier = classifier_params_from_config(c, b.classifier);
  b.inflation = inflation_params_from_config(c, b.inflation);
  b.memory_window = c.get_double("mapping.memory_window", b.memory_window);
  b.platform = platform_spec_from_config(c, b.platform);
  b.mppi = mppi_params_from_config(c, b.mppi);
  b.scan_rate = c.get_double("bench.scan_rate", b.scan_rate);
  b.timeout = c.get_double("bench.timeout", b.timeout);
  b.estop_timeout = c.get_double("bench.estop_timeout", b.estop_timeout);
  b.stall_timeout = c.get_double("bench.stall_timeout", b.stall_timeout);
  b.stall_distance = c.get_double("bench.stall_distance", b.stall_distance);
  b.map_size = c.get_double("bench.map_size", b.map_size);
  b.start_clear_radius = c.get_double("bench.start_clear_radius", b.start_clear_radius);
  b.tip_dwell = c.get_double("bench.tip_dwell", b.tip_dwell);
  b.validate();
  return b;
}

}  // namespace ramp
