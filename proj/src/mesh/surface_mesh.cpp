#include "zbench/mesh/surface_mesh.hpp"

#include <algorithm>
#include <map>

#include <fmt/format.h>

#include "zbench/common.hpp"

namespace zbench::mesh {

namespace {

int floor_div(int a, int b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }
int floor_mod(int a, int b) { return a - floor_div(a, b) * b; }

}  // namespace

NodeField::NodeField(Box2 owned, int components)
    : owned_(owned),
      components_(components),
      lx_(owned.i.size() + 2 * kHaloDepth),
      ly_(owned.j.size() + 2 * kHaloDepth),
      data_(static_cast<std::size_t>(components) * lx_ * ly_, 0.0) {}

void NodeField::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

std::vector<double> NodeField::owned_values(int c) const {
  std::vector<double> out;
  out.reserve(owned_.count());
  for (int i = owned_.i.begin; i < owned_.i.end; ++i) {
    for (int j = owned_.j.begin; j < owned_.j.end; ++j) out.push_back((*this)(c, i, j));
  }
  return out;
}

void NodeField::set_owned_values(int c, std::span<const double> values) {
  if (static_cast<long>(values.size()) != owned_.count()) {
    throw std::invalid_argument("owned value count mismatch");
  }
  std::size_t k = 0;
  for (int i = owned_.i.begin; i < owned_.i.end; ++i) {
    for (int j = owned_.j.begin; j < owned_.j.end; ++j) (*this)(c, i, j) = values[k++];
  }
}

SurfaceMesh::SurfaceMesh(const MeshSpec& spec, transport::GridShape grid, int rank)
    : spec_(spec), grid_(grid), rank_(rank) {
  const bool periodic = spec.bc == BoundaryType::periodic;
  const int min_nodes = periodic ? 1 : 2;
  if (spec.nx < min_nodes || spec.ny < min_nodes) {
    throw ConfigError(fmt::format("mesh {}x{} is too small", spec.nx, spec.ny));
  }
  if (!(spec.u1 > spec.u0) || !(spec.v1 > spec.v0)) {
    throw ConfigError("mesh parameter bounds must be increasing");
  }
  if (rank < 0 || rank >= grid.count()) throw ConfigError("rank outside the rank grid");
  boxes_ = decompose(spec.nx, spec.ny, grid);
  du_ = u_extent() / (periodic ? spec.nx : spec.nx - 1);
  dv_ = v_extent() / (periodic ? spec.ny : spec.ny - 1);

  owner_i_.resize(spec.nx);
  owner_j_.resize(spec.ny);
  for (int p = 0; p < grid.px; ++p) {
    const auto& r = boxes_[p * grid.py].i;
    for (int i = r.begin; i < r.end; ++i) owner_i_[i] = p;
  }
  for (int q = 0; q < grid.py; ++q) {
    const auto& r = boxes_[q].j;
    for (int j = r.begin; j < r.end; ++j) owner_j_[j] = q;
  }

  std::map<int, std::vector<GhostLink>> recv;
  for (const auto& link : ghost_links(rank_)) {
    int owner = owner_of(link.si, link.sj);
    if (owner == rank_) {
      self_links_.push_back(link);
    } else {
      recv[owner].push_back(link);
    }
  }
  recv_plan_.assign(recv.begin(), recv.end());

  for (int r = 0; r < grid.count(); ++r) {
    if (r == rank_) continue;
    std::vector<GhostLink> links;
    for (const auto& link : ghost_links(r)) {
      if (owner_of(link.si, link.sj) == rank_) links.push_back(link);
    }
    if (!links.empty()) send_plan_.emplace_back(r, std::move(links));
  }
}

bool SurfaceMesh::wrap(int gi, int gj, int& si, int& sj) const {
  if (spec_.bc == BoundaryType::periodic) {
    si = floor_mod(gi, spec_.nx);
    sj = floor_mod(gj, spec_.ny);
    return true;
  }
  si = gi;
  sj = gj;
  return gi >= 0 && gi < spec_.nx && gj >= 0 && gj < spec_.ny;
}

std::vector<SurfaceMesh::GhostLink> SurfaceMesh::ghost_links(int rank) const {
  const Box2& box = boxes_[rank];
  std::vector<GhostLink> links;
  for (int gi = box.i.begin - kHaloDepth; gi < box.i.end + kHaloDepth; ++gi) {
    for (int gj = box.j.begin - kHaloDepth; gj < box.j.end + kHaloDepth; ++gj) {
      if (box.contains(gi, gj)) continue;
      int si = 0;
      int sj = 0;
      if (wrap(gi, gj, si, sj)) links.push_back({gi, gj, si, sj});
    }
  }
  return links;
}

void SurfaceMesh::halo_exchange(transport::Comm& comm,
                                std::initializer_list<NodeField*> fields) const {
  std::vector<transport::Outgoing> sends;
  sends.reserve(send_plan_.size());
  for (const auto& [peer, links] : send_plan_) {
    std::vector<double> buf;
    for (const auto& l : links) {
      for (const NodeField* f : fields) {
        for (int c = 0; c < f->components(); ++c) buf.push_back((*f)(c, l.si, l.sj));
      }
    }
    sends.push_back({peer, transport::pack<double>(buf)});
  }

  for (const auto& l : self_links_) {
    for (NodeField* f : fields) {
      for (int c = 0; c < f->components(); ++c) (*f)(c, l.gi, l.gj) = (*f)(c, l.si, l.sj);
    }
  }

  auto incoming = comm.exchange(std::move(sends), transport::Pattern::halo);
  for (const auto& msg : incoming) {
    auto it = std::find_if(recv_plan_.begin(), recv_plan_.end(),
                           [&](const auto& e) { return e.first == msg.source; });
    if (it == recv_plan_.end()) {
      throw transport::TransportError(
          fmt::format("unexpected halo message from rank {}", msg.source));
    }
    auto values = transport::unpack<double>(msg.payload);
    std::size_t k = 0;
    for (const auto& l : it->second) {
      for (NodeField* f : fields) {
        for (int c = 0; c < f->components(); ++c) {
          if (k >= values.size()) throw transport::TransportError("short halo payload");
          (*f)(c, l.gi, l.gj) = values[k++];
        }
      }
    }
  }
}

void SurfaceMesh::update_ghosts(transport::Comm& comm, SurfaceField& field) const {
  halo_exchange(comm, {&field.position, &field.vorticity});
  BoundaryCondition(*this).apply(field);
}

void BoundaryCondition::apply(SurfaceField& field) const {
  if (mesh_->bc() == BoundaryType::periodic) {
    periodic_offset(field.position);
  } else {
    extrapolate(field.position);
    extrapolate(field.vorticity);
  }
}

void BoundaryCondition::periodic_offset(NodeField& position) const {
  const Box2 alloc = position.allocated();
  const Box2& own = position.owned();
  for (int gi = alloc.i.begin; gi < alloc.i.end; ++gi) {
    const int si = floor_div(gi, mesh_->nx());
    for (int gj = alloc.j.begin; gj < alloc.j.end; ++gj) {
      if (own.contains(gi, gj)) continue;
      const int sj = floor_div(gj, mesh_->ny());
      if (si != 0) position(0, gi, gj) += si * mesh_->u_extent();
      if (sj != 0) position(1, gi, gj) += sj * mesh_->v_extent();
    }
  }
}

void BoundaryCondition::extrapolate(NodeField& f) const {
  if (mesh_->bc() != BoundaryType::free) return;
  const int nx = mesh_->nx();
  const int ny = mesh_->ny();
  const Box2 alloc = f.allocated();

  // Along u for in-domain rows, then along v for every column.
  for (int gj = std::max(alloc.j.begin, 0); gj < std::min(alloc.j.end, ny); ++gj) {
    for (int gi = alloc.i.begin; gi < alloc.i.end; ++gi) {
      if (gi >= 0 && gi < nx) continue;
      const int a = gi < 0 ? 0 : nx - 1;
      const int b = gi < 0 ? 1 : nx - 2;
      const int dist = gi < 0 ? -gi : gi - (nx - 1);
      for (int c = 0; c < f.components(); ++c) {
        const double pa = f(c, a, gj);
        const double pb = f(c, b, gj);
        f(c, gi, gj) = pa + dist * (pa - pb);
      }
    }
  }
  for (int gi = alloc.i.begin; gi < alloc.i.end; ++gi) {
    for (int gj = alloc.j.begin; gj < alloc.j.end; ++gj) {
      if (gj >= 0 && gj < ny) continue;
      const int a = gj < 0 ? 0 : ny - 1;
      const int b = gj < 0 ? 1 : ny - 2;
      const int dist = gj < 0 ? -gj : gj - (ny - 1);
      for (int c = 0; c < f.components(); ++c) {
        const double pa = f(c, gi, a);
        const double pb = f(c, gi, b);
        f(c, gi, gj) = pa + dist * (pa - pb);
      }
    }
  }
}

}  // namespace zbench::mesh
