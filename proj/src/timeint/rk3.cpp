#include "zbench/timeint/rk3.hpp"

#include <cmath>

#include <fmt/format.h>

#include "zbench/common.hpp"

namespace zbench::timeint {

std::vector<double> rk3_step(const std::vector<double>& u, double dt, const Rhs& f) {
  const std::size_t n = u.size();
  std::vector<double> k0(n), k1(n), k2(n), stage(n);
  f(u, k0);
  for (std::size_t i = 0; i < n; ++i) stage[i] = u[i] + dt * k0[i];
  f(stage, k1);
  for (std::size_t i = 0; i < n; ++i) stage[i] = u[i] + dt * (0.25 * k0[i] + 0.25 * k1[i]);
  f(stage, k2);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = u[i] + dt * (k0[i] / 6.0 + k1[i] / 6.0 + 2.0 * k2[i] / 3.0);
  }
  return out;
}

std::vector<double> flatten(const mesh::SurfaceField& field) {
  std::vector<double> out;
  for (int c = 0; c < 3; ++c) {
    auto v = field.position.owned_values(c);
    out.insert(out.end(), v.begin(), v.end());
  }
  for (int c = 0; c < 2; ++c) {
    auto v = field.vorticity.owned_values(c);
    out.insert(out.end(), v.begin(), v.end());
  }
  return out;
}

void unflatten(const std::vector<double>& u, mesh::SurfaceField& field) {
  const auto n = static_cast<std::size_t>(field.position.owned().count());
  for (int c = 0; c < 3; ++c) field.position.set_owned_values(c, {u.data() + c * n, n});
  for (int c = 0; c < 2; ++c) field.vorticity.set_owned_values(c, {u.data() + (3 + c) * n, n});
}

void TimeIntegrator::step(transport::Comm& comm, mesh::SurfaceField& field, TimeState& ts) const {
  const auto& m = model_->mesh();
  comm.trace().set_step(ts.step);
  auto rhs = [&](const std::vector<double>& u, std::vector<double>& du) {
    unflatten(u, field);
    m.update_ghosts(comm, field);
    auto d = model_->derivatives(comm, field);
    mesh::SurfaceField tmp{std::move(d.dz), std::move(d.dw)};
    du = flatten(tmp);
  };
  auto next = rk3_step(flatten(field), ts.dt, rhs);
  for (double v : next) {
    if (std::isnan(v)) {
      throw NumericalError(fmt::format("NaN in state after step {} on rank {}", ts.step + 1, comm.rank()));
    }
  }
  unflatten(next, field);
  m.update_ghosts(comm, field);
  ++ts.step;
  ts.t = ts.step * ts.dt;
}

}  // namespace zbench::timeint
