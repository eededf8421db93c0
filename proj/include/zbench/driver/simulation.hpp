#pragma once

#include <string>
#include <vector>

#include "zbench/driver/output.hpp"

namespace zbench::driver {

struct ImbalanceReport {
  int step = 0;
  std::vector<double> fractions;  ///< owned points per rank after spatial migration
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  double ratio = 0.0;  ///< max / mean
};

/// Collective: migrates the surface nodes onto the spatial mesh and reduces the counts.
ImbalanceReport imbalance_report(transport::Comm& comm, const mesh::SurfaceMesh& mesh,
                                 const mesh::SurfaceField& field, const br::SpatialMesh& smesh,
                                 int step);

struct StepMetrics {
  int step = 0;
  double t = 0.0;
  double wall_s = 0.0;
  double max_abs_z3 = 0.0;
};

struct RunResult {
  std::string run_id;
  GlobalState initial;
  GlobalState final_state;
  transport::CommTrace trace;
  std::vector<StepMetrics> metrics;
  std::vector<ImbalanceReport> imbalance;
  double wall_s = 0.0;
};

std::string run_id(const SimConfig& cfg);

/// Validates, spawns the ranks and advances `steps` steps. With an output directory, writes
/// state CSVs (initial, every write_every steps, final), meta.json, trace.json and
/// metrics.json.
RunResult run(const SimConfig& cfg);

nlohmann::json metrics_json(const RunResult& result);

}  // namespace zbench::driver
