#include "zbench/driver/rocket_rig.hpp"

#include <cmath>
#include <numbers>

namespace zbench::driver {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

double keyed_uniform(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  const std::uint64_t h = splitmix(seed ^ splitmix(a ^ splitmix(b)));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

double perturbation(const SimConfig& cfg, double u, double v) {
  constexpr double pi = std::numbers::pi;
  const double uh = 2.0 * (u - cfg.u0) / (cfg.u1 - cfg.u0) - 1.0;
  const double vh = 2.0 * (v - cfg.v0) / (cfg.v1 - cfg.v0) - 1.0;
  if (cfg.ic == InitialCondition::single_mode) return std::cos(pi * uh) * std::cos(pi * vh);
  double p = 0.0;
  for (int k = 1; k <= cfg.modes; ++k) {
    const double phi = 2.0 * pi * keyed_uniform(cfg.seed, k, 0);
    const double psi = 2.0 * pi * keyed_uniform(cfg.seed, k, 1);
    p += std::cos(2.0 * pi * k * uh + phi) * std::cos(2.0 * pi * k * vh + psi);
  }
  return p / cfg.modes;
}

mesh::SurfaceField init_rocket_rig(transport::Comm& comm, const mesh::SurfaceMesh& mesh,
                                   const SimConfig& cfg) {
  auto f = mesh.make_surface();
  const auto& b = mesh.owned();
  for (int i = b.i.begin; i < b.i.end; ++i) {
    for (int j = b.j.begin; j < b.j.end; ++j) {
      const double u = mesh.u_at(i);
      const double v = mesh.v_at(j);
      f.position(0, i, j) = u;
      f.position(1, i, j) = v;
      f.position(2, i, j) = cfg.amplitude == 0.0 ? 0.0 : cfg.amplitude * perturbation(cfg, u, v);
    }
  }
  mesh.update_ghosts(comm, f);
  return f;
}

}  // namespace zbench::driver
