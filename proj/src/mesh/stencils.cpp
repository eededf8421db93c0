#include "zbench/mesh/stencils.hpp"

namespace zbench::mesh {

namespace {

template <class Op>
NodeField per_owned(const NodeField& f, int out_components, Op op) {
  NodeField out(f.owned(), out_components);
  const Box2& b = f.owned();
  for (int c = 0; c < out_components; ++c) {
    for (int i = b.i.begin; i < b.i.end; ++i) {
      for (int j = b.j.begin; j < b.j.end; ++j) out(c, i, j) = op(c, i, j);
    }
  }
  return out;
}

}  // namespace

NodeField diff_u(const SurfaceMesh& mesh, const NodeField& f) {
  const double inv = 1.0 / (2.0 * mesh.du());
  return per_owned(f, f.components(),
                   [&](int c, int i, int j) { return (f(c, i + 1, j) - f(c, i - 1, j)) * inv; });
}

NodeField diff_v(const SurfaceMesh& mesh, const NodeField& f) {
  const double inv = 1.0 / (2.0 * mesh.dv());
  return per_owned(f, f.components(),
                   [&](int c, int i, int j) { return (f(c, i, j + 1) - f(c, i, j - 1)) * inv; });
}

NodeField laplacian(const SurfaceMesh& mesh, const NodeField& f) {
  const double iuu = 1.0 / (mesh.du() * mesh.du());
  const double ivv = 1.0 / (mesh.dv() * mesh.dv());
  return per_owned(f, f.components(), [&](int c, int i, int j) {
    auto duu = [&](int jj) { return (f(c, i + 1, jj) - 2.0 * f(c, i, jj) + f(c, i - 1, jj)) * iuu; };
    auto dvv = [&](int ii) { return (f(c, ii, j + 1) - 2.0 * f(c, ii, j) + f(c, ii, j - 1)) * ivv; };
    return (duu(j - 1) + 10.0 * duu(j) + duu(j + 1)) / 12.0 +
           (dvv(i - 1) + 10.0 * dvv(i) + dvv(i + 1)) / 12.0;
  });
}

SurfaceGeometry surface_stencils(const SurfaceMesh& mesh, const SurfaceField& field) {
  SurfaceGeometry g;
  g.du_z = diff_u(mesh, field.position);
  g.dv_z = diff_v(mesh, field.position);
  g.normal = per_owned(field.position, 3, [&](int c, int i, int j) {
    const int a = (c + 1) % 3;
    const int b = (c + 2) % 3;
    return g.du_z(a, i, j) * g.dv_z(b, i, j) - g.du_z(b, i, j) * g.dv_z(a, i, j);
  });
  g.lap_z = laplacian(mesh, field.position);
  g.lap_w = laplacian(mesh, field.vorticity);
  return g;
}

}  // namespace zbench::mesh
