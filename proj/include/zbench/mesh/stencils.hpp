#pragma once

#include "zbench/mesh/surface_mesh.hpp"

namespace zbench::mesh {

/// Per-node surface quantities on owned nodes. Ghost entries are left at zero.
struct SurfaceGeometry {
  NodeField du_z;    ///< central difference of position along u (3)
  NodeField dv_z;    ///< central difference of position along v (3)
  NodeField normal;  ///< du_z x dv_z, not normalized (3)
  NodeField lap_z;   ///< 9-point Laplacian of position (3)
  NodeField lap_w;   ///< 9-point Laplacian of vorticity (2)
};

/// Requires valid depth-1 ghosts; performs no communication.
SurfaceGeometry surface_stencils(const SurfaceMesh& mesh, const SurfaceField& field);

/// Central differences of every component on owned nodes.
NodeField diff_u(const SurfaceMesh& mesh, const NodeField& f);
NodeField diff_v(const SurfaceMesh& mesh, const NodeField& f);

/// Compact second-order 9-point Laplacian over (u, v):
/// (1/12) [d_uu(j-1) + 10 d_uu(j) + d_uu(j+1)] + (1/12) [d_vv(i-1) + 10 d_vv(i) + d_vv(i+1)],
/// which reduces to the classic (4 edges + corners - 20 center) / 6h^2 stencil when du == dv.
NodeField laplacian(const SurfaceMesh& mesh, const NodeField& f);

}  // namespace zbench::mesh
