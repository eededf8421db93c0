#include "zbench/zmodel/zmodel.hpp"

#include <cmath>

#include <fmt/format.h>

#include "zbench/common.hpp"

namespace zbench::zmodel {

using fft::cplx;
using fft::Wavenumber;
using mesh::NodeField;
using mesh::SurfaceField;
using mesh::SurfaceGeometry;
using transport::Comm;

ModelOrder parse_order(std::string_view s) {
  if (s == "low") return ModelOrder::low;
  if (s == "medium") return ModelOrder::medium;
  if (s == "high") return ModelOrder::high;
  throw ConfigError(fmt::format("unknown order '{}'", s));
}

SolverKind parse_solver(std::string_view s) {
  if (s == "exact") return SolverKind::exact;
  if (s == "cutoff") return SolverKind::cutoff;
  throw ConfigError(fmt::format("unknown solver '{}'", s));
}

std::string_view to_string(ModelOrder o) {
  switch (o) {
    case ModelOrder::low: return "low";
    case ModelOrder::medium: return "medium";
    case ModelOrder::high: return "high";
  }
  return "?";
}

std::string_view to_string(SolverKind s) { return s == SolverKind::exact ? "exact" : "cutoff"; }

void validate(const ZModelConfig& cfg, mesh::BoundaryType bc) {
  if (cfg.order != ModelOrder::high && bc == mesh::BoundaryType::free) {
    throw ConfigError(fmt::format("{}-order model requires periodic boundaries", to_string(cfg.order)));
  }
  if (cfg.order != ModelOrder::low && cfg.solver == SolverKind::cutoff && !(cfg.cutoff > 0.0)) {
    throw ConfigError(fmt::format("cutoff solver needs a positive cutoff, got {}", cfg.cutoff));
  }
  const auto& p = cfg.physics;
  if (!(p.atwood > 0.0 && p.atwood <= 1.0)) throw ConfigError(fmt::format("atwood {} not in (0, 1]", p.atwood));
  if (!(p.gravity >= 0.0)) throw ConfigError("gravity must be non-negative");
  if (!(p.mu >= 0.0)) throw ConfigError("mu must be non-negative");
  if (!(p.epsilon >= 0.0)) throw ConfigError("epsilon must be non-negative");
}

namespace {

bool fft_feasible(const mesh::SurfaceMesh& m) {
  const int r = m.grid().count();
  return m.bc() == mesh::BoundaryType::periodic && fft::is_power_of_two(m.nx()) &&
         fft::is_power_of_two(m.ny()) && m.nx() >= r && m.ny() >= r;
}

std::vector<cplx> complex_owned(const NodeField& f, int comp) {
  auto v = f.owned_values(comp);
  return {v.begin(), v.end()};
}

void set_real(NodeField& f, int comp, const std::vector<cplx>& v) {
  std::vector<double> re(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) re[k] = v[k].real();
  f.set_owned_values(comp, re);
}

// Odd derivatives lose the Nyquist mode, whose derivative is not representable.
cplx ik_u(const Wavenumber& w) { return w.nyquist_u ? cplx(0.0) : cplx(0.0, w.ku); }
cplx ik_v(const Wavenumber& w) { return w.nyquist_v ? cplx(0.0) : cplx(0.0, w.kv); }
cplx neg_k2(const Wavenumber& w) { return cplx(-(w.ku * w.ku + w.kv * w.kv)); }

}  // namespace

ZModel::ZModel(const mesh::SurfaceMesh& mesh, ZModelConfig cfg)
    : mesh_(&mesh), cfg_(cfg), smesh_(cfg.box, mesh.grid()) {
  validate(cfg_, mesh.bc());
  if (cfg_.physics.epsilon == 0.0) cfg_.physics.epsilon = 0.25 * mesh.u_extent() / mesh.nx();
  if (cfg_.order != ModelOrder::high || fft_feasible(mesh)) fft_.emplace(mesh, cfg_.fft);
}

const fft::DistributedFft& ZModel::fft() const {
  if (!fft_) throw ConfigError("spectral operators need a periodic power-of-two mesh");
  return *fft_;
}

br::BRKernelParams ZModel::kernel_params() const {
  return {cfg_.physics.epsilon, mesh_->du(), mesh_->dv()};
}

NodeField ZModel::br_velocity(Comm& comm, const SurfaceField& field, const SurfaceGeometry& geom) const {
  const auto nodes = br::br_nodes(*mesh_, field, geom);
  std::vector<br::Vec3> w;
  if (cfg_.solver == SolverKind::exact) {
    w = br::exact_br(comm, nodes, kernel_params());
  } else {
    w = br::cutoff_br(comm, smesh_, nodes, kernel_params(), cfg_.cutoff, &stats_);
  }
  NodeField out = mesh_->make_field(3);
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const int i = static_cast<int>(nodes[k].index / mesh_->ny());
    const int j = static_cast<int>(nodes[k].index % mesh_->ny());
    for (int c = 0; c < 3; ++c) out(c, i, j) = w[k][c];
  }
  return out;
}

NodeField ZModel::low_order_velocity(Comm& comm, const SurfaceField& field,
                                     const SurfaceGeometry& geom) const {
  if (mesh_->bc() != mesh::BoundaryType::periodic) {
    throw ConfigError("low-order velocity requires periodic boundaries");
  }
  const auto& b = mesh_->owned();
  NodeField q = mesh_->make_field(2);
  for (int i = b.i.begin; i < b.i.end; ++i) {
    for (int j = b.j.begin; j < b.j.end; ++j) {
      const double w1 = field.vorticity(0, i, j);
      const double w2 = field.vorticity(1, i, j);
      for (int c = 0; c < 2; ++c) q(c, i, j) = w1 * geom.dv_z(c, i, j) - w2 * geom.du_z(c, i, j);
    }
  }
  const auto& f = fft();
  auto qx = f.forward(comm, complex_owned(q, 0));
  auto qy = f.forward(comm, complex_owned(q, 1));
  // Combine in place: qx <- M(k) (i k_v qx - i k_u qy).
  const auto& box = qx.local.box;
  for (int i = box.i.begin; i < box.i.end; ++i) {
    for (int j = box.j.begin; j < box.j.end; ++j) {
      const Wavenumber w = qx.wavenumber(i, j);
      const double k = std::sqrt(w.ku * w.ku + w.kv * w.kv);
      cplx& a = qx.local.at(i, j);
      a = k == 0.0 ? cplx(0.0) : (ik_v(w) * a - ik_u(w) * qy.local.at(i, j)) / (2.0 * k);
    }
  }
  const auto vn = f.inverse(comm, std::move(qx));

  NodeField out = mesh_->make_field(3);
  std::size_t k = 0;
  for (int i = b.i.begin; i < b.i.end; ++i) {
    for (int j = b.j.begin; j < b.j.end; ++j, ++k) {
      const double nx = geom.normal(0, i, j);
      const double ny = geom.normal(1, i, j);
      const double nz = geom.normal(2, i, j);
      const double len = std::sqrt(nx * nx + ny * ny + nz * nz);
      const double s = len > 0.0 ? vn[k].real() / len : 0.0;
      out(0, i, j) = s * nx;
      out(1, i, j) = s * ny;
      out(2, i, j) = s * nz;
    }
  }
  return out;
}

NodeField ZModel::vorticity_rhs(Comm& comm, const SurfaceField& field, const SurfaceGeometry& geom,
                                const NodeField& velocity, VorticityMethod method) const {
  const auto& b = mesh_->owned();
  const double g = cfg_.physics.gravity;
  const double two_a = 2.0 * cfg_.physics.atwood;
  const double mu = cfg_.physics.mu;

  NodeField phi = mesh_->make_field(1);
  for (int i = b.i.begin; i < b.i.end; ++i) {
    for (int j = b.j.begin; j < b.j.end; ++j) {
      const double vx = velocity(0, i, j), vy = velocity(1, i, j), vz = velocity(2, i, j);
      phi(0, i, j) = 0.5 * (vx * vx + vy * vy + vz * vz) - g * field.position(2, i, j);
    }
  }

  NodeField dphi_u, dphi_v, lap_w;
  if (method == VorticityMethod::stencil) {
    mesh_->halo_exchange(comm, phi);
    mesh::BoundaryCondition(*mesh_).extrapolate(phi);
    dphi_u = mesh::diff_u(*mesh_, phi);
    dphi_v = mesh::diff_v(*mesh_, phi);
    lap_w = geom.lap_w;
  } else {
    const auto& f = fft();
    dphi_u = mesh_->make_field(1);
    dphi_v = mesh_->make_field(1);
    lap_w = mesh_->make_field(2);
    auto spec_u = f.forward(comm, complex_owned(phi, 0));
    auto spec_v = spec_u;
    fft::apply_multiplier(spec_u, ik_u);
    fft::apply_multiplier(spec_v, ik_v);
    set_real(dphi_u, 0, f.inverse(comm, std::move(spec_u)));
    set_real(dphi_v, 0, f.inverse(comm, std::move(spec_v)));
    for (int c = 0; c < 2; ++c) {
      auto spec = f.forward(comm, complex_owned(field.vorticity, c));
      fft::apply_multiplier(spec, neg_k2);
      set_real(lap_w, c, f.inverse(comm, std::move(spec)));
    }
  }

  NodeField dw = mesh_->make_field(2);
  for (int i = b.i.begin; i < b.i.end; ++i) {
    for (int j = b.j.begin; j < b.j.end; ++j) {
      dw(0, i, j) = two_a * (mu * lap_w(0, i, j) - dphi_u(0, i, j));
      dw(1, i, j) = two_a * (mu * lap_w(1, i, j) - dphi_v(0, i, j));
    }
  }
  return dw;
}

Derivatives ZModel::derivatives(Comm& comm, const SurfaceField& field) const {
  comm.trace().count("zmodel.derivatives");
  const auto geom = mesh::surface_stencils(*mesh_, field);
  Derivatives d;
  if (cfg_.order == ModelOrder::low) {
    d.dz = low_order_velocity(comm, field, geom);
  } else {
    d.dz = br_velocity(comm, field, geom);
  }
  const auto method = cfg_.order == ModelOrder::high ? VorticityMethod::stencil : VorticityMethod::spectral;
  d.dw = vorticity_rhs(comm, field, geom, d.dz, method);
  return d;
}

}  // namespace zbench::zmodel
