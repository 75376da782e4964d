// Trace and report serialization. The CSV schema is fixed:
//   t,agent_id,x,y,z,vx,vy,vz,phase,motors_on
// one header row, drone rows in scenario order per tick followed by the rover
// row as agent_id -1. Writers are pure views of the trace.
#pragma once

#include <string>
#include <vector>

#include "swarmsim/metrics.hpp"
#include "swarmsim/sim.hpp"

namespace swarmsim {

std::string trace_to_csv(const SimTrace& trace);

std::string summary_to_json(const std::vector<RunReport>& reports,
                            const std::vector<SpeedSummary>& summaries,
                            const std::string& scenario_hash, const std::string& window_name);

// Top-view trajectory plot: rover path, drone paths, start and landing marks.
std::string trace_to_svg(const SimTrace& trace);

void write_file(const std::string& path, const std::string& content);

}  // namespace swarmsim
