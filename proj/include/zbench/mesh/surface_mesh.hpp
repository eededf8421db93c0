#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "zbench/mesh/decomposition.hpp"
#include "zbench/transport/comm.hpp"

namespace zbench::mesh {

enum class BoundaryType { periodic, free };

inline constexpr int kHaloDepth = 2;

/// Multi-component node values over an owned box plus a kHaloDepth ghost frame.
/// Indexed by global (unwrapped) node index; storage is component-major, then i, then j.
class NodeField {
 public:
  NodeField() = default;
  NodeField(Box2 owned, int components);

  double& operator()(int c, int i, int j) { return data_[index(c, i, j)]; }
  double operator()(int c, int i, int j) const { return data_[index(c, i, j)]; }

  const Box2& owned() const { return owned_; }
  Box2 allocated() const {
    return {{owned_.i.begin - kHaloDepth, owned_.i.end + kHaloDepth},
            {owned_.j.begin - kHaloDepth, owned_.j.end + kHaloDepth}};
  }
  int components() const { return components_; }
  void fill(double v);

  /// Owned values of component c in (i, j) order.
  std::vector<double> owned_values(int c) const;
  void set_owned_values(int c, std::span<const double> values);

  friend bool operator==(const NodeField&, const NodeField&) = default;

 private:
  std::size_t index(int c, int i, int j) const {
    return (static_cast<std::size_t>(c) * lx_ + (i - owned_.i.begin + kHaloDepth)) * ly_ +
           (j - owned_.j.begin + kHaloDepth);
  }

  Box2 owned_{};
  int components_ = 0;
  int lx_ = 0;
  int ly_ = 0;
  std::vector<double> data_;
};

/// Interface state: position (x, y, z) and vorticity (w1, w2) per node.
struct SurfaceField {
  NodeField position;
  NodeField vorticity;

  friend bool operator==(const SurfaceField&, const SurfaceField&) = default;
};

struct MeshSpec {
  int nx = 0;
  int ny = 0;
  double u0 = -1.0;
  double u1 = 1.0;
  double v0 = -1.0;
  double v1 = 1.0;
  BoundaryType bc = BoundaryType::periodic;
};

/// Block-decomposed 2D surface mesh as seen from one rank.
class SurfaceMesh {
 public:
  SurfaceMesh(const MeshSpec& spec, transport::GridShape grid, int rank);

  const MeshSpec& spec() const { return spec_; }
  int nx() const { return spec_.nx; }
  int ny() const { return spec_.ny; }
  BoundaryType bc() const { return spec_.bc; }
  transport::GridShape grid() const { return grid_; }
  int rank() const { return rank_; }
  const Box2& owned() const { return boxes_[rank_]; }
  const std::vector<Box2>& boxes() const { return boxes_; }

  /// Parameter spacing: extent / n for periodic, extent / (n - 1) for free.
  double du() const { return du_; }
  double dv() const { return dv_; }
  double u_at(int i) const { return spec_.u0 + i * du_; }
  double v_at(int j) const { return spec_.v0 + j * dv_; }
  double u_extent() const { return spec_.u1 - spec_.u0; }
  double v_extent() const { return spec_.v1 - spec_.v0; }

  int owner_of(int gi, int gj) const { return owner_i_[gi] * grid_.py + owner_j_[gj]; }

  NodeField make_field(int components) const { return NodeField(owned(), components); }
  SurfaceField make_surface() const { return {make_field(3), make_field(2)}; }

  /// Fills every in-domain ghost node (depth 2, corners included) with the owner's
  /// values, wrapping at periodic edges. One message per neighbor rank, class halo.
  void halo_exchange(transport::Comm& comm, std::initializer_list<NodeField*> fields) const;
  void halo_exchange(transport::Comm& comm, NodeField& field) const { halo_exchange(comm, {&field}); }

  /// Halo exchange of position and vorticity followed by the boundary condition.
  void update_ghosts(transport::Comm& comm, SurfaceField& field) const;

 private:
  struct GhostLink {
    int gi, gj;  // ghost node, unwrapped
    int si, sj;  // source node, wrapped into the domain
  };

  bool wrap(int gi, int gj, int& si, int& sj) const;
  std::vector<GhostLink> ghost_links(int rank) const;

  MeshSpec spec_;
  transport::GridShape grid_;
  int rank_;
  double du_;
  double dv_;
  std::vector<Box2> boxes_;
  std::vector<int> owner_i_;
  std::vector<int> owner_j_;
  // Peer rank -> links, both in the receiver's canonical ghost order.
  std::vector<std::pair<int, std::vector<GhostLink>>> recv_plan_;
  std::vector<std::pair<int, std::vector<GhostLink>>> send_plan_;
  std::vector<GhostLink> self_links_;
};

/// Finalizes ghost nodes after a halo exchange: periodic offset of ghost positions, or
/// linear extrapolation of out-of-domain ghosts for free boundaries. Not idempotent for
/// periodic meshes; apply exactly once per exchange.
class BoundaryCondition {
 public:
  explicit BoundaryCondition(const SurfaceMesh& mesh) : mesh_(&mesh) {}

  void apply(SurfaceField& field) const;

  /// Linear extrapolation into out-of-domain ghosts (free boundaries only; no-op otherwise).
  void extrapolate(NodeField& field) const;

 private:
  void periodic_offset(NodeField& position) const;

  const SurfaceMesh* mesh_;
};

}  // namespace zbench::mesh
