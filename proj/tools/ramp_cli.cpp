// Command line front end: benchmark batches, terrain export, scans and map replay.
#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "ramp/bench.hpp"
#include "ramp/config.hpp"

namespace fs = std::filesystem;
using namespace ramp;

namespace {

Config load_config(const std::string& path) { return path.empty() ? Config{} : Config::from_file(path); }

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void warn_unused(const Config& config) {
  for (const auto& key : config.unused_keys()) std::cerr << "warning: unused config key '" << key << "'\n";
}

int bench_run(const std::string& config_path, const std::string& preset, int trials, std::uint64_t seed,
              const fs::path& out_dir, bool dump, int jobs) {
  const Config config = load_config(config_path);
  const BenchConfig bench = bench_config_from_config(config);
  const PipelineConfig pipeline = pipeline_from_config(preset, config);
  warn_unused(config);
  fs::create_directories(out_dir);

  auto report = [&](const TrialResult& r) {
    std::cerr << preset << " seed " << r.seed << ": " << to_string(r.outcome) << " after " << r.elapsed << " s, "
              << r.average_speed() << " m/s\n";
  };
  std::vector<TrialResult> results;
  if (dump) {
    for (int i = 0; i < trials; ++i) {
      const std::uint64_t s = seed + static_cast<std::uint64_t>(i);
      const std::string stem = preset + "_" + std::to_string(s);
      std::ofstream traj = open_out(out_dir / (stem + "_trajectory.csv"));
      std::ofstream diag = open_out(out_dir / (stem + "_planner.csv"));
      std::ofstream grid = open_out(out_dir / (stem + "_grid.txt"));
      results.push_back(run_trial(bench, pipeline, s, {&traj, &diag, &grid}));
      report(results.back());
    }
  } else {
    results = run_batch(bench, pipeline, trials, seed, [&](int, const TrialResult& r) { report(r); }, jobs);
  }

  std::ofstream csv = open_out(out_dir / (preset + "_trials.csv"));
  write_trials_csv(csv, results);
  std::ofstream summary = open_out(out_dir / (preset + "_summary.json"));
  write_summary(summary, preset, summarize(results));
  write_summary(std::cout, preset, summarize(results));
  return 0;
}

int bench_summarize(const fs::path& csv_path, const std::string& name) {
  std::ifstream in(csv_path);
  if (!in) throw std::runtime_error("cannot read " + csv_path.string());
  const auto results = read_trials_csv(in);
  write_summary(std::cout, name, summarize(results));
  return 0;
}

int terrain_export(const std::string& config_path, std::uint64_t seed, const fs::path& out) {
  const Config config = load_config(config_path);
  TerrainSpec spec = terrain_spec_from_config(config);
  spec.seed = seed;
  warn_unused(config);
  const Terrain terrain = generate_terrain(spec);
  std::ofstream file = open_out(out);
  write_heightmap(file, terrain.map);
  std::cout << "start " << terrain.layout.start.transpose() << "\ngoal " << terrain.layout.goal.transpose()
            << "\ncrest_x " << terrain.layout.crest_x << "\nrocks " << terrain.rocks.size() << '\n';
  return 0;
}

int scan_once(const std::string& config_path, std::uint64_t seed, double x, double y, double yaw_deg,
              const fs::path& out) {
  const Config config = load_config(config_path);
  TerrainSpec spec = terrain_spec_from_config(config);
  spec.seed = seed;
  const LidarSpec lidar = lidar_spec_from_config(config);
  const ClassifierParams classifier = classifier_params_from_config(config);
  warn_unused(config);
  const Terrain terrain = generate_terrain(spec);
  const Eigen::Vector2d p = (x == 0.0 && y == 0.0) ? terrain.layout.start : Eigen::Vector2d(x, y);
  const Pose3 pose = pose_on_terrain(terrain.map, p, deg2rad(yaw_deg));
  CloudFrame frame;
  frame.cloud = classify(scan(HeightBlocks(terrain.map), pose, lidar), classifier);
  frame.sensor = sensor_origin(pose, lidar);
  std::ofstream file = open_out(out);
  write_cloud_csv(file, frame);
  std::cout << frame.cloud.size() << " points\n";
  return 0;
}

int map_replay(const std::vector<std::string>& clouds, const std::string& mapper, double size, double resolution,
               double window, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  MapMemory memory(window);
  int index = 0;
  for (const auto& path : clouds) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    const CloudFrame frame = read_cloud_csv(in);
    if (!frame.sensor) throw std::runtime_error(path + ": missing '# sensor' line");
    const GridFrame gf = GridFrame::centered(frame.sensor->head<2>(), size, size, resolution);
    const OccupancyGrid raw = mapper == "raytrace" ? raytrace(frame.cloud, frame.sensor->head<2>(), gf, frame.stamp)
                                                   : inflate(frame.cloud, gf, {}, frame.stamp);
    const OccupancyGrid fused = fuse(memory, raw);
    std::ofstream file = open_out(out_dir / ("grid_" + std::to_string(index++) + ".txt"));
    write_grid(file, fused);
    std::cout << path << ": unknown " << fused.count(CellState::Unknown) << " free " << fused.count(CellState::Free)
              << " occupied " << fused.count(CellState::Occupied) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RAMP mapping and planning benchmark"};
  app.require_subcommand(1);

  auto* bench = app.add_subcommand("bench", "Closed-loop benchmark");
  bench->require_subcommand(1);
  std::string config_path, preset = "ramp";
  int trials = 50;
  std::uint64_t seed = 1;
  std::string out_dir = "bench_out";
  bool dump = false;
  int jobs = 1;
  auto* run = bench->add_subcommand("run", "Run a batch of trials");
  run->add_option("--config", config_path, "Config file")->check(CLI::ExistingFile);
  run->add_option("--pipeline", preset, "pipeline1 | pipeline2 | pipeline3 | ramp")
      ->check(CLI::IsMember(preset_names()));
  run->add_option("--trials", trials, "Trial count")->check(CLI::PositiveNumber);
  run->add_option("--seed", seed, "Base seed; trial i uses seed + i");
  run->add_option("--out", out_dir, "Output directory");
  run->add_flag("--dump", dump, "Write per-trial trajectory, planner log and final grid");
  run->add_option("--jobs", jobs, "Trials run in parallel")->check(CLI::PositiveNumber);

  std::string csv_path, name = "batch";
  auto* summ = bench->add_subcommand("summarize", "Recompute aggregates from a per-trial CSV");
  summ->add_option("csv", csv_path)->required()->check(CLI::ExistingFile);
  summ->add_option("--name", name);

  auto* terrain = app.add_subcommand("terrain", "Terrain tools");
  terrain->require_subcommand(1);
  std::string out_file = "heightmap.txt";
  auto* exp = terrain->add_subcommand("export", "Write the scenario heightmap");
  exp->add_option("--config", config_path)->check(CLI::ExistingFile);
  exp->add_option("--seed", seed);
  exp->add_option("--out", out_file);

  double x = 0.0, y = 0.0, yaw = 0.0;
  auto* sc = app.add_subcommand("scan", "Simulate and classify one LiDAR scan");
  sc->add_option("--config", config_path)->check(CLI::ExistingFile);
  sc->add_option("--seed", seed);
  sc->add_option("--x", x, "Robot x (default: scenario start)");
  sc->add_option("--y", y);
  sc->add_option("--yaw", yaw, "deg");
  sc->add_option("--out", out_file);

  auto* map = app.add_subcommand("map", "Mapping tools");
  map->require_subcommand(1);
  std::vector<std::string> clouds;
  std::string mapper = "inflate";
  double size = 60.0, resolution = 0.2, window = 3.0;
  auto* replay = map->add_subcommand("replay", "Fuse a sequence of labeled clouds");
  replay->add_option("clouds", clouds, "Cloud CSV files in time order")->required()->check(CLI::ExistingFile);
  replay->add_option("--mapper", mapper)->check(CLI::IsMember({"inflate", "raytrace"}));
  replay->add_option("--size", size, "Grid side, m");
  replay->add_option("--resolution", resolution);
  replay->add_option("--window", window, "Memory window, s");
  replay->add_option("--out", out_dir);

  CLI11_PARSE(app, argc, argv);
  try {
    if (run->parsed()) return bench_run(config_path, preset, trials, seed, out_dir, dump, jobs);
    if (summ->parsed()) return bench_summarize(csv_path, name);
    if (exp->parsed()) return terrain_export(config_path, seed, out_file);
    if (sc->parsed()) return scan_once(config_path, seed, x, y, yaw, out_file);
    if (replay->parsed()) return map_replay(clouds, mapper, size, resolution, window, out_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
