#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "zbench/mesh/stencils.hpp"

namespace zbench::br {

using Vec3 = std::array<double, 3>;

inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

struct BRKernelParams {
  double epsilon = 0.0;
  double du = 0.0;
  double dv = 0.0;

  /// Throws ConfigError unless epsilon, du and dv are positive.
  void validate() const;
  /// -(1 / 4 pi) du dv
  double scale() const;
};

/// q x r / (|r|^2 + eps^2)^{3/2}
inline Vec3 kernel(const Vec3& r, const Vec3& q, double epsilon) {
  const double d2 = dot(r, r) + epsilon * epsilon;
  if (d2 == 0.0) return {0.0, 0.0, 0.0};
  const double inv = 1.0 / (d2 * std::sqrt(d2));
  const Vec3 c = cross(q, r);
  return {c[0] * inv, c[1] * inv, c[2] * inv};
}

/// One owned surface node as seen by the BR solvers.
struct BRNode {
  Vec3 pos{};
  Vec3 q{};                ///< w1 D_v z - w2 D_u z
  std::int64_t index = 0;  ///< global i * ny + j
};

/// Owned nodes in (i, j) order, j fastest. Throws NumericalError on a NaN position.
std::vector<BRNode> br_nodes(const mesh::SurfaceMesh& mesh, const mesh::SurfaceField& field,
                             const mesh::SurfaceGeometry& geom);

}  // namespace zbench::br
