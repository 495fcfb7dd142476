#include <algorithm>
#include <atomic>
#include <exception>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "ramp/bench.hpp"

namespace ramp {

BatchSummary summarize(std::span<const TrialResult> results) {
  BatchSummary s;
  s.trials = static_cast<int>(results.size());
  double speed_sum = 0.0;
  double unknown_distance = 0.0;
  double unknown_time = 0.0;
  for (const auto& r : results) {
    switch (r.outcome) {
      case Outcome::ReachedGoal:
        ++s.reached;
        speed_sum += r.average_speed();
        break;
      case Outcome::CollidedWithRock:
        ++s.collided;
        break;
      case Outcome::TippedOver:
        ++s.tipped;
        break;
      case Outcome::Timeout:
        ++s.timed_out;
        break;
    }
    unknown_distance += r.unknown_distance;
    unknown_time += r.unknown_time;
  }
  if (s.reached > 0) s.mean_success_speed = speed_sum / s.reached;
  if (unknown_time > 0.0) s.unknown_speed = unknown_distance / unknown_time;
  return s;
}

std::vector<TrialResult> run_batch(const BenchConfig& bench, const PipelineConfig& pipeline, int trials,
                                   std::uint64_t base_seed, const std::function<void(int, const TrialResult&)>& on_trial,
                                   int jobs) {
  if (trials < 1) throw std::invalid_argument("run_batch: trials must be >= 1");
  std::vector<TrialResult> results(static_cast<std::size_t>(trials));
  std::atomic<int> next{0};
  std::mutex report;
  std::exception_ptr error;
  auto worker = [&] {
    for (int i = next++; i < trials; i = next++) {
      try {
        results[static_cast<std::size_t>(i)] = run_trial(bench, pipeline, base_seed + static_cast<std::uint64_t>(i));
      } catch (...) {
        const std::lock_guard lock(report);
        if (!error) error = std::current_exception();
        next = trials;
        return;
      }
      if (on_trial) {
        const std::lock_guard lock(report);
        on_trial(i, results[static_cast<std::size_t>(i)]);
      }
    }
  };
  const int threads = std::clamp(jobs, 1, trials);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
  return results;
}

void write_trials_csv(std::ostream& out, std::span<const TrialResult> results) {
  out << "seed,outcome,elapsed,distance,unknown_time,unknown_distance\n" << std::setprecision(17);
  for (const auto& r : results) {
    out << r.seed << ',' << to_string(r.outcome) << ',' << r.elapsed << ',' << r.distance << ',' << r.unknown_time
        << ',' << r.unknown_distance << '\n';
  }
}

std::vector<TrialResult> read_trials_csv(std::istream& in) {
  std::vector<TrialResult> out;
  std::string line;
  if (!std::getline(in, line)) return out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string field;
    TrialResult r;
    auto next = [&]() {
      if (!std::getline(ss, field, ',')) throw std::runtime_error("read_trials_csv: short row '" + line + "'");
      return field;
    };
    r.seed = std::stoull(next());
    r.outcome = outcome_from_string(next());
    r.elapsed = std::stod(next());
    r.distance = std::stod(next());
    r.unknown_time = std::stod(next());
    r.unknown_distance = std::stod(next());
    out.push_back(r);
  }
  return out;
}

void write_summary(std::ostream& out, const std::string& pipeline, const BatchSummary& s) {
  out << std::setprecision(6) << "{\n"
      << "  \"pipeline\": \"" << pipeline << "\",\n"
      << "  \"trials\": " << s.trials << ",\n"
      << "  \"success_rate\": " << s.success_rate() << ",\n"
      << "  \"collision_rate\": " << s.collision_rate() << ",\n"
      << "  \"tip_rate\": " << s.rate(s.tipped) << ",\n"
      << "  \"timeout_rate\": " << s.rate(s.timed_out) << ",\n"
      << "  \"mean_success_speed\": " << s.mean_success_speed << ",\n"
      << "  \"unknown_speed\": " << s.unknown_speed << "\n"
      << "}\n";
}

}  // namespace ramp
