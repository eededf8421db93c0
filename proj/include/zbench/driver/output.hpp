#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "zbench/driver/config.hpp"

namespace zbench::driver {

/// Whole-mesh state in global (i, j) order, j fastest.
struct GlobalState {
  int nx = 0;
  int ny = 0;
  std::vector<double> x, y, z, w1, w2;

  std::size_t at(int i, int j) const { return static_cast<std::size_t>(i) * ny + j; }
  friend bool operator==(const GlobalState&, const GlobalState&) = default;
};

/// Collects every rank's owned nodes on rank 0 (pattern point_to_point). Other ranks get
/// an empty state.
GlobalState gather_state(transport::Comm& comm, const mesh::SurfaceMesh& mesh,
                         const mesh::SurfaceField& field);

/// Copies the owned part of a global state into `field` and refreshes ghosts.
void scatter_state(transport::Comm& comm, const mesh::SurfaceMesh& mesh, const GlobalState& state,
                   mesh::SurfaceField& field);

std::string csv_name(int step);
/// Header i,j,x,y,z,w1,w2 and one row per node with 17 significant digits.
void write_csv(const std::filesystem::path& path, const GlobalState& state);
GlobalState read_csv(const std::filesystem::path& path, int nx, int ny);
void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

}  // namespace zbench::driver
