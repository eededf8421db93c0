#pragma once

#include <utility>

#include "zbench/br/spatial_mesh.hpp"

namespace zbench::br {

struct CutoffStats {
  std::int64_t owned = 0;   ///< points owned by this rank's spatial block
  std::int64_t ghosts = 0;
  std::int64_t pairs = 0;   ///< neighbor pairs evaluated, self pairs included
};

/// Velocity from sources within 3D distance <= cutoff: migrate, spatial halo, cell list
/// (edge = cutoff, 27 cells), accumulation in global index order, migrate back.
std::vector<Vec3> cutoff_br(transport::Comm& comm, const SpatialMesh& smesh,
                            const std::vector<BRNode>& owned, const BRKernelParams& params,
                            double cutoff, CutoffStats* stats = nullptr);

/// (target, source) home index pairs with |z_t - z_s| <= cutoff for targets in this
/// rank's spatial block, sorted.
std::vector<std::pair<std::int64_t, std::int64_t>> neighbor_pairs(
    transport::Comm& comm, const SpatialMesh& smesh, const std::vector<BRNode>& owned,
    double cutoff);

}  // namespace zbench::br
