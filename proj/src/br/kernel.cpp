#include "zbench/br/kernel.hpp"

#include <numbers>

#include <fmt/format.h>

#include "zbench/common.hpp"

namespace zbench::br {

void BRKernelParams::validate() const {
  if (!(epsilon > 0.0)) throw ConfigError(fmt::format("epsilon must be positive, got {}", epsilon));
  if (!(du > 0.0) || !(dv > 0.0)) throw ConfigError("BR quadrature weights must be positive");
}

double BRKernelParams::scale() const { return -du * dv / (4.0 * std::numbers::pi); }

std::vector<BRNode> br_nodes(const mesh::SurfaceMesh& mesh, const mesh::SurfaceField& field,
                             const mesh::SurfaceGeometry& geom) {
  const auto& b = mesh.owned();
  std::vector<BRNode> out;
  out.reserve(b.count());
  for (int i = b.i.begin; i < b.i.end; ++i) {
    for (int j = b.j.begin; j < b.j.end; ++j) {
      BRNode n;
      const double w1 = field.vorticity(0, i, j);
      const double w2 = field.vorticity(1, i, j);
      for (int c = 0; c < 3; ++c) {
        n.pos[c] = field.position(c, i, j);
        n.q[c] = w1 * geom.dv_z(c, i, j) - w2 * geom.du_z(c, i, j);
      }
      if (std::isnan(n.pos[0]) || std::isnan(n.pos[1]) || std::isnan(n.pos[2])) {
        throw NumericalError(fmt::format("NaN position at node ({}, {})", i, j));
      }
      n.index = static_cast<std::int64_t>(i) * mesh.ny() + j;
      out.push_back(n);
    }
  }
  return out;
}

}  // namespace zbench::br
