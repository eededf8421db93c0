#pragma once

#include "zbench/driver/config.hpp"

namespace zbench::driver {

/// Counter-based uniform value in [0, 1) keyed by (seed, a, b).
double keyed_uniform(std::uint64_t seed, std::uint64_t a, std::uint64_t b);

/// Perturbation P(u, v) in [-1, 1] of the deck's initial condition.
double perturbation(const SimConfig& cfg, double u, double v);

/// z = (u, v, amplitude * P(u, v)), w = 0 on owned nodes, ghosts updated.
mesh::SurfaceField init_rocket_rig(transport::Comm& comm, const mesh::SurfaceMesh& mesh,
                                   const SimConfig& cfg);

}  // namespace zbench::driver
