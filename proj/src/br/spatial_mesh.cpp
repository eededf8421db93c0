#include "zbench/br/spatial_mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "zbench/common.hpp"

namespace zbench::br {

using transport::Pattern;

namespace {

bool by_home(const MigratedPoint& a, const MigratedPoint& b) { return a.home_index < b.home_index; }

template <class T>
std::vector<T> route(transport::Comm& comm, std::vector<std::vector<T>>& buckets, Pattern pattern) {
  std::vector<transport::Outgoing> sends;
  for (int d = 0; d < comm.size(); ++d) {
    if (!buckets[d].empty()) sends.push_back({d, transport::pack<T>(buckets[d])});
  }
  std::vector<T> out;
  for (auto& msg : comm.exchange(std::move(sends), pattern)) {
    auto part = transport::unpack<T>(msg.payload);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

}  // namespace

SpatialMesh::SpatialMesh(const SpatialBox& box, transport::GridShape grid) : box_(box), grid_(grid) {
  for (int c = 0; c < 3; ++c) {
    if (!(box.hi[c] > box.lo[c])) throw ConfigError("spatial box must have positive extent");
  }
  if (grid.px < 1 || grid.py < 1) throw ConfigError("spatial mesh needs a non-empty rank grid");
}

int SpatialMesh::cell(double v, double lo, double hi, int n) const {
  const double k = std::floor((v - lo) / (hi - lo) * n);
  if (!(k > 0.0)) return 0;
  if (k >= n - 1) return n - 1;
  return static_cast<int>(k);
}

int SpatialMesh::owner(const Vec3& p) const {
  const int bi = cell(p[0], box_.lo[0], box_.hi[0], grid_.px);
  const int bj = cell(p[1], box_.lo[1], box_.hi[1], grid_.py);
  return bi * grid_.py + bj;
}

void SpatialMesh::block_bounds(int rank, double& x0, double& x1, double& y0, double& y1) const {
  constexpr double inf = std::numeric_limits<double>::infinity();
  const int bi = rank / grid_.py;
  const int bj = rank % grid_.py;
  const double hx = (box_.hi[0] - box_.lo[0]) / grid_.px;
  const double hy = (box_.hi[1] - box_.lo[1]) / grid_.py;
  x0 = bi == 0 ? -inf : box_.lo[0] + bi * hx;
  x1 = bi == grid_.px - 1 ? inf : box_.lo[0] + (bi + 1) * hx;
  y0 = bj == 0 ? -inf : box_.lo[1] + bj * hy;
  y1 = bj == grid_.py - 1 ? inf : box_.lo[1] + (bj + 1) * hy;
}

std::vector<MigratedPoint> migrate_to_spatial(transport::Comm& comm, const SpatialMesh& smesh,
                                              const std::vector<BRNode>& owned) {
  std::vector<std::vector<MigratedPoint>> buckets(comm.size());
  for (const auto& n : owned) {
    if (std::isnan(n.pos[0]) || std::isnan(n.pos[1]) || std::isnan(n.pos[2])) {
      throw NumericalError(fmt::format("NaN position at node {}", n.index));
    }
    buckets[smesh.owner(n.pos)].push_back({n.pos, n.q, comm.rank(), n.index});
  }
  auto out = route(comm, buckets, Pattern::migrate);
  std::sort(out.begin(), out.end(), by_home);
  return out;
}

std::vector<MigratedPoint> spatial_halo(transport::Comm& comm, const SpatialMesh& smesh,
                                        const std::vector<MigratedPoint>& owned, double cutoff) {
  const int ranks = comm.size();
  std::vector<std::vector<MigratedPoint>> buckets(ranks);
  for (int r = 0; r < ranks; ++r) {
    if (r == comm.rank()) continue;
    double x0, x1, y0, y1;
    smesh.block_bounds(r, x0, x1, y0, y1);
    for (const auto& p : owned) {
      const double dx = std::max({x0 - p.pos[0], 0.0, p.pos[0] - x1});
      const double dy = std::max({y0 - p.pos[1], 0.0, p.pos[1] - y1});
      if (dx < cutoff && dy < cutoff) buckets[r].push_back(p);
    }
  }
  auto out = route(comm, buckets, Pattern::halo);
  std::sort(out.begin(), out.end(), by_home);
  return out;
}

std::vector<Vec3> migrate_home(transport::Comm& comm, const std::vector<MigratedPoint>& points,
                               const std::vector<Vec3>& values,
                               const std::vector<BRNode>& home_nodes) {
  struct Result {
    std::int64_t index;
    Vec3 value;
  };
  std::vector<std::vector<Result>> buckets(comm.size());
  for (std::size_t k = 0; k < points.size(); ++k) {
    buckets[points[k].home_rank].push_back({points[k].home_index, values[k]});
  }
  auto back = route(comm, buckets, Pattern::migrate);
  std::vector<Vec3> out(home_nodes.size(), Vec3{0.0, 0.0, 0.0});
  std::vector<char> seen(home_nodes.size(), 0);
  for (const auto& r : back) {
    auto it = std::lower_bound(home_nodes.begin(), home_nodes.end(), r.index,
                               [](const BRNode& n, std::int64_t idx) { return n.index < idx; });
    if (it == home_nodes.end() || it->index != r.index) {
      throw transport::TransportError(fmt::format("migrated result for unknown node {}", r.index));
    }
    const auto k = static_cast<std::size_t>(it - home_nodes.begin());
    out[k] = r.value;
    seen[k] = 1;
  }
  if (std::count(seen.begin(), seen.end(), 0) != 0) {
    throw transport::TransportError("migration lost a node on the way back");
  }
  return out;
}

}  // namespace zbench::br
