#pragma once

#include <functional>
#include <vector>

#include "zbench/zmodel/zmodel.hpp"

namespace zbench::timeint {

/// du = F(u) on a flat state vector.
using Rhs = std::function<void(const std::vector<double>& u, std::vector<double>& du)>;

/// One SSP-RK3 step written in increment form:
///   u1 = u + dt F(u)
///   u2 = u + dt (F(u) + F(u1)) / 4
///   u' = u + dt (F(u) + F(u1) + 4 F(u2)) / 6
/// Same stages and weights as the Shu-Osher form; F = 0 leaves u bitwise unchanged.
std::vector<double> rk3_step(const std::vector<double>& u, double dt, const Rhs& f);

struct TimeState {
  long step = 0;
  double t = 0.0;
  double dt = 0.0;
};

/// Advances a surface field with the model's derivatives. Ghosts are refreshed before
/// every evaluation and again on return.
class TimeIntegrator {
 public:
  explicit TimeIntegrator(const zmodel::ZModel& model) : model_(&model) {}

  /// Throws NumericalError naming the step and rank if the new state holds a NaN.
  void step(transport::Comm& comm, mesh::SurfaceField& field, TimeState& ts) const;

 private:
  const zmodel::ZModel* model_;
};

std::vector<double> flatten(const mesh::SurfaceField& field);
void unflatten(const std::vector<double>& u, mesh::SurfaceField& field);

}  // namespace zbench::timeint
