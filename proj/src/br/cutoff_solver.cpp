#include "zbench/br/cutoff_solver.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include <fmt/format.h>

#include "zbench/common.hpp"

namespace zbench::br {

namespace {

struct CellKey {
  std::int64_t x, y, z;
  bool operator==(const CellKey&) const = default;
};

struct CellHash {
  std::size_t operator()(const CellKey& k) const {
    std::uint64_t h = static_cast<std::uint64_t>(k.x) * 0x9e3779b97f4a7c15ULL;
    h ^= static_cast<std::uint64_t>(k.y) * 0xc2b2ae3d27d4eb4fULL + (h << 6) + (h >> 2);
    h ^= static_cast<std::uint64_t>(k.z) * 0x165667b19e3779f9ULL + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

class CellList {
 public:
  CellList(const std::vector<MigratedPoint>& sources, double edge) : edge_(edge) {
    for (std::size_t s = 0; s < sources.size(); ++s) cells_[key(sources[s].pos)].push_back(static_cast<int>(s));
  }

  // Candidate sources around p, ascending (sources are sorted by home index).
  void candidates(const Vec3& p, std::vector<int>& out) const {
    out.clear();
    const CellKey c = key(p);
    for (std::int64_t dx = -1; dx <= 1; ++dx) {
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        for (std::int64_t dz = -1; dz <= 1; ++dz) {
          auto it = cells_.find({c.x + dx, c.y + dy, c.z + dz});
          if (it != cells_.end()) out.insert(out.end(), it->second.begin(), it->second.end());
        }
      }
    }
    std::sort(out.begin(), out.end());
  }

 private:
  CellKey key(const Vec3& p) const {
    return {static_cast<std::int64_t>(std::floor(p[0] / edge_)),
            static_cast<std::int64_t>(std::floor(p[1] / edge_)),
            static_cast<std::int64_t>(std::floor(p[2] / edge_))};
  }

  double edge_;
  std::unordered_map<CellKey, std::vector<int>, CellHash> cells_;
};

struct Spatial {
  std::vector<MigratedPoint> targets;
  std::vector<MigratedPoint> sources;  // targets and ghosts, by home index
};

Spatial gather_spatial(transport::Comm& comm, const SpatialMesh& smesh,
                       const std::vector<BRNode>& owned, double cutoff) {
  if (!(cutoff > 0.0)) throw ConfigError(fmt::format("cutoff must be positive, got {}", cutoff));
  Spatial s;
  s.targets = migrate_to_spatial(comm, smesh, owned);
  auto ghosts = spatial_halo(comm, smesh, s.targets, cutoff);
  s.sources.reserve(s.targets.size() + ghosts.size());
  std::merge(s.targets.begin(), s.targets.end(), ghosts.begin(), ghosts.end(),
             std::back_inserter(s.sources),
             [](const MigratedPoint& a, const MigratedPoint& b) { return a.home_index < b.home_index; });
  return s;
}

template <class Visit>
void for_each_neighbor(const Spatial& s, double cutoff, Visit visit) {
  const CellList cells(s.sources, cutoff);
  const double c2 = cutoff * cutoff;
  std::vector<int> cand;
  for (std::size_t t = 0; t < s.targets.size(); ++t) {
    const Vec3& zt = s.targets[t].pos;
    cells.candidates(zt, cand);
    for (int k : cand) {
      const Vec3 r = zt - s.sources[k].pos;
      if (dot(r, r) <= c2) visit(t, s.sources[k], r);
    }
  }
}

}  // namespace

std::vector<Vec3> cutoff_br(transport::Comm& comm, const SpatialMesh& smesh,
                            const std::vector<BRNode>& owned, const BRKernelParams& params,
                            double cutoff, CutoffStats* stats) {
  params.validate();
  comm.trace().count("br.cutoff");
  const Spatial s = gather_spatial(comm, smesh, owned, cutoff);

  const double eps = params.epsilon;
  std::vector<Vec3> acc(s.targets.size(), Vec3{0.0, 0.0, 0.0});
  std::int64_t pairs = 0;
  for_each_neighbor(s, cutoff, [&](std::size_t t, const MigratedPoint& src, const Vec3& r) {
    const Vec3 k = kernel(r, src.q, eps);
    acc[t][0] += k[0];
    acc[t][1] += k[1];
    acc[t][2] += k[2];
    ++pairs;
  });
  const double scale = params.scale();
  for (auto& a : acc) a = {scale * a[0], scale * a[1], scale * a[2]};

  if (stats != nullptr) {
    stats->owned = static_cast<std::int64_t>(s.targets.size());
    stats->ghosts = static_cast<std::int64_t>(s.sources.size() - s.targets.size());
    stats->pairs = pairs;
  }
  return migrate_home(comm, s.targets, acc, owned);
}

std::vector<std::pair<std::int64_t, std::int64_t>> neighbor_pairs(
    transport::Comm& comm, const SpatialMesh& smesh, const std::vector<BRNode>& owned,
    double cutoff) {
  const Spatial s = gather_spatial(comm, smesh, owned, cutoff);
  std::vector<std::pair<std::int64_t, std::int64_t>> out;
  for_each_neighbor(s, cutoff, [&](std::size_t t, const MigratedPoint& src, const Vec3&) {
    out.emplace_back(s.targets[t].home_index, src.home_index);
  });
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace zbench::br
