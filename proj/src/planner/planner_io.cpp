#include <iomanip>
#include <ostream>

#include "ramp/planner/mppi.hpp"

namespace ramp {

void write_diagnostics_header(std::ostream& out) {
  out << "time,transition,terminal,unknown_speed,penalty,total,m,ttr,violations,occupancy_hits,feasible,estop\n";
}

void write_diagnostics_row(std::ostream& out, double time, const PlanDiagnostics& d) {
  const CostBreakdown& c = d.best_cost;
  out << std::setprecision(10) << time << ',' << c.transition << ',' << c.terminal << ',' << c.unknown_speed << ','
      << c.penalty << ',' << c.total() << ',' << d.m << ',' << d.ttr << ',' << d.violations << ','
      << d.occupancy_hits << ',' << d.feasible_samples << ',' << (d.emergency_stop ? 1 : 0) << '\n';
}

void write_trajectory_csv(std::ostream& out, const Rollout& r) {
  out << "step,x,y,yaw,speed,class\n" << std::setprecision(10);
  for (std::size_t t = 0; t < r.states.size(); ++t) {
    const RobotState& x = r.states[t];
    const char cls = t < r.classes.size() ? to_char(r.classes[t]) : 'U';
    out << t << ',' << x.position.x() << ',' << x.position.y() << ',' << x.yaw << ','
        << r.speed_at(static_cast<int>(t)) << ',' << cls << '\n';
  }
}

}  // namespace ramp
