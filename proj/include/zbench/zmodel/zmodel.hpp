#pragma once

#include <optional>
#include <string_view>

#include "zbench/br/cutoff_solver.hpp"
#include "zbench/br/exact_solver.hpp"
#include "zbench/fft/dist_fft.hpp"
#include "zbench/mesh/stencils.hpp"

namespace zbench::zmodel {

enum class ModelOrder { low, medium, high };
enum class SolverKind { exact, cutoff };
enum class VorticityMethod { stencil, spectral };

ModelOrder parse_order(std::string_view s);
SolverKind parse_solver(std::string_view s);
std::string_view to_string(ModelOrder o);
std::string_view to_string(SolverKind s);

struct PhysicsParams {
  double atwood = 0.5;
  double gravity = 1.0;
  double mu = 0.0;
  double epsilon = 0.0;  ///< 0 selects 0.25 * u-extent / nx
};

struct ZModelConfig {
  ModelOrder order = ModelOrder::high;
  SolverKind solver = SolverKind::exact;
  double cutoff = 0.5;
  PhysicsParams physics;
  fft::FftCommConfig fft;
  br::SpatialBox box;
};

/// Throws ConfigError for combinations the model cannot run.
void validate(const ZModelConfig& cfg, mesh::BoundaryType bc);

struct Derivatives {
  mesh::NodeField dz;  ///< 3 components
  mesh::NodeField dw;  ///< 2 components
};

/// Time derivatives of position and vorticity under one of the three model orders.
///  high:   dz from the BR solver, dw with mesh stencils
///  medium: dz from the BR solver, dw with spectral operators
///  low:    dz from the Fourier multiplier velocity, dw with spectral operators
class ZModel {
 public:
  ZModel(const mesh::SurfaceMesh& mesh, ZModelConfig cfg);

  const ZModelConfig& config() const { return cfg_; }
  const mesh::SurfaceMesh& mesh() const { return *mesh_; }
  br::BRKernelParams kernel_params() const;

  /// Requires valid ghosts on `field`.
  Derivatives derivatives(transport::Comm& comm, const mesh::SurfaceField& field) const;

  /// BR velocity with the configured solver.
  mesh::NodeField br_velocity(transport::Comm& comm, const mesh::SurfaceField& field,
                              const mesh::SurfaceGeometry& geom) const;

  /// dw1 = 2A (mu L(w1) - D_u Phi), dw2 = 2A (mu L(w2) - D_v Phi), Phi = |V|^2 / 2 - g z3.
  mesh::NodeField vorticity_rhs(transport::Comm& comm, const mesh::SurfaceField& field,
                                const mesh::SurfaceGeometry& geom, const mesh::NodeField& velocity,
                                VorticityMethod method) const;

  /// Normal velocity n_hat * F^-1[(i k_v q_x - i k_u q_y) / (2 |k|)] with the k = 0 mode removed.
  mesh::NodeField low_order_velocity(transport::Comm& comm, const mesh::SurfaceField& field,
                                     const mesh::SurfaceGeometry& geom) const;

  /// Stats of the last cutoff solve on this rank.
  const br::CutoffStats& last_cutoff_stats() const { return stats_; }

 private:
  const fft::DistributedFft& fft() const;

  const mesh::SurfaceMesh* mesh_;
  ZModelConfig cfg_;
  std::optional<fft::DistributedFft> fft_;
  br::SpatialMesh smesh_;
  mutable br::CutoffStats stats_;
};

}  // namespace zbench::zmodel
