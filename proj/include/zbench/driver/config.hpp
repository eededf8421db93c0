#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "zbench/zmodel/zmodel.hpp"

namespace zbench::driver {

enum class InitialCondition { single_mode, multi_mode };

InitialCondition parse_ic(std::string_view s);
std::string_view to_string(InitialCondition ic);
mesh::BoundaryType parse_bc(std::string_view s);
std::string_view to_string(mesh::BoundaryType bc);
/// "PxQ" or a rank count (square-ish grid).
transport::GridShape parse_grid(std::string_view s);

/// Complete problem deck.
struct SimConfig {
  int nx = 64;
  int ny = 64;
  transport::GridShape grid{1, 1};
  zmodel::ModelOrder order = zmodel::ModelOrder::low;
  std::optional<zmodel::SolverKind> solver;  ///< unset: cutoff for medium, exact for high
  mesh::BoundaryType bc = mesh::BoundaryType::periodic;
  InitialCondition ic = InitialCondition::multi_mode;
  double amplitude = 0.25;
  int modes = 4;
  std::uint64_t seed = 1;
  double u0 = -19.0, u1 = 19.0;
  double v0 = -19.0, v1 = 19.0;
  br::SpatialBox box{{-19.0, -19.0, -19.0}, {19.0, 19.0, 19.0}};
  double cutoff = 0.5;
  zmodel::PhysicsParams physics{0.5, 1.0, 0.0, 0.0};
  double dt = 0.05;
  int steps = 10;
  int fft_config = 7;
  std::string out_dir;
  int write_every = 0;
  int imbalance_every = 0;  ///< 0 disables the imbalance report
  bool trace_events = false;
  transport::Backend backend = transport::Backend::threads;
  std::string restart;  ///< CSV to start from instead of the initial condition
  int restart_step = 0;

  zmodel::SolverKind resolved_solver() const;
  mesh::MeshSpec mesh_spec() const { return {nx, ny, u0, u1, v0, v1, bc}; }
  zmodel::ZModelConfig model_config() const;
  transport::RunOptions run_options() const;
};

/// Multi-mode periodic deck: 64x64 over (-19, 19), low order.
SimConfig multi_mode_deck();
/// Single-mode free deck: 64x64 over (-3, 3), high order with the cutoff solver at 0.5.
SimConfig single_mode_deck();

/// Rejects every inconsistent deck with ConfigError; call before spawning ranks.
void validate(const SimConfig& cfg);

nlohmann::json to_json(const SimConfig& cfg);

}  // namespace zbench::driver
