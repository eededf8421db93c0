#pragma once

#include <vector>

#include "zbench/br/kernel.hpp"
#include "zbench/transport/comm.hpp"

namespace zbench::br {

struct SpatialBox {
  Vec3 lo{-3.0, -3.0, -3.0};
  Vec3 hi{3.0, 3.0, 3.0};
};

struct MigratedPoint {
  Vec3 pos{};
  Vec3 q{};
  int home_rank = 0;
  std::int64_t home_index = 0;
};

/// 2D x/y block decomposition of a 3D box over the rank grid; blocks span all z.
/// Blocks are half-open and points outside the box belong to the nearest boundary block.
class SpatialMesh {
 public:
  SpatialMesh(const SpatialBox& box, transport::GridShape grid);

  const SpatialBox& box() const { return box_; }
  transport::GridShape grid() const { return grid_; }
  int owner(const Vec3& p) const;
  /// x/y extent of a rank's block; edge blocks are open towards infinity.
  void block_bounds(int rank, double& x0, double& x1, double& y0, double& y1) const;

 private:
  int cell(double v, double lo, double hi, int n) const;

  SpatialBox box_;
  transport::GridShape grid_;
};

/// Sends every node to the rank whose block contains it (pattern migrate, non-empty
/// messages only). Result is sorted by home index. NaN positions throw NumericalError.
std::vector<MigratedPoint> migrate_to_spatial(transport::Comm& comm, const SpatialMesh& smesh,
                                              const std::vector<BRNode>& owned);

/// Ghost copies of remote points within x/y distance < cutoff of this rank's block
/// (pattern halo). Sorted by home index.
std::vector<MigratedPoint> spatial_halo(transport::Comm& comm, const SpatialMesh& smesh,
                                        const std::vector<MigratedPoint>& owned, double cutoff);

/// Returns values computed for migrated points to their home ranks (pattern migrate).
/// Output is aligned with `home_nodes`.
std::vector<Vec3> migrate_home(transport::Comm& comm, const std::vector<MigratedPoint>& points,
                               const std::vector<Vec3>& values,
                               const std::vector<BRNode>& home_nodes);

}  // namespace zbench::br
