#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "zbench/fft/fft1d.hpp"
#include "zbench/mesh/surface_mesh.hpp"
#include "zbench/transport/comm.hpp"

namespace zbench::fft {

/// Communication knobs of the distributed transform. Index = 4*all_to_all + 2*pencils + reorder.
struct FftCommConfig {
  bool all_to_all = true;
  bool pencils = true;
  bool reorder = true;

  int index() const { return (all_to_all ? 4 : 0) + (pencils ? 2 : 0) + (reorder ? 1 : 0); }
  static FftCommConfig from_index(int index);
  std::string describe() const;
  friend bool operator==(const FftCommConfig&, const FftCommConfig&) = default;
};

enum class LayoutKind {
  block2d,    ///< surface mesh blocks
  u_lines,    ///< complete lines along u (all i), j distributed
  v_lines,    ///< complete lines along v (all j), i distributed
};

enum class StorageOrder { j_fastest, i_fastest };

/// Complex values on one rank's box of some layout.
struct LocalArray {
  mesh::Box2 box;
  StorageOrder order = StorageOrder::j_fastest;
  std::vector<cplx> data;

  LocalArray() = default;
  LocalArray(mesh::Box2 b, StorageOrder o)
      : box(b), order(o), data(static_cast<std::size_t>(b.count())) {}

  std::size_t index(int i, int j) const {
    const int li = i - box.i.begin;
    const int lj = j - box.j.begin;
    return order == StorageOrder::j_fastest
               ? static_cast<std::size_t>(li) * box.j.size() + lj
               : static_cast<std::size_t>(lj) * box.i.size() + li;
  }
  cplx& at(int i, int j) { return data[index(i, j)]; }
  const cplx& at(int i, int j) const { return data[index(i, j)]; }
};

struct Wavenumber {
  double ku = 0.0;
  double kv = 0.0;
  bool nyquist_u = false;
  bool nyquist_v = false;
};

/// Forward spectrum in the transform's output layout.
struct SpectralField {
  int nx = 0;
  int ny = 0;
  double u_extent = 1.0;
  double v_extent = 1.0;
  LayoutKind layout = LayoutKind::v_lines;
  int config_index = 0;
  LocalArray local;

  /// k = 2 pi / extent * (n < N/2 ? n : n - N).
  Wavenumber wavenumber(int i, int j) const;
};

/// Pointwise multiplication by m(k); no communication.
void apply_multiplier(SpectralField& spec, const std::function<cplx(const Wavenumber&)>& m);

/// Distributed 2D complex FFT over the surface-mesh block decomposition.
///
/// Schedule: block2d -> u_lines, transform along u, -> v_lines, transform along v; the
/// inverse runs the same path backwards and normalizes by 1 / (nx ny).
///  - pencils: the u_lines layout splits j evenly over all ranks and both transposes are
///    global exchanges. Without pencils the u_lines layout is a slab aligned with the rank
///    grid, so the first phase is a gather inside each grid column and only the second
///    phase is global.
///  - all_to_all: every transpose is one dense exchange in which each rank messages every
///    member of its exchange group, empty payloads included. Otherwise the transpose runs
///    as group-size - 1 point-to-point rounds that only carry non-empty payloads.
///  - reorder: received data is packed into line-contiguous order before the local
///    transforms; otherwise transforms run strided over the sender's ordering.
class DistributedFft {
 public:
  /// Throws ConfigError unless nx and ny are powers of two and the layouts fit the rank grid.
  DistributedFft(const mesh::SurfaceMesh& mesh, FftCommConfig cfg);

  const FftCommConfig& config() const { return cfg_; }

  /// `block` holds the owned values of this rank in (i, j) order, j fastest.
  SpectralField forward(transport::Comm& comm, const std::vector<cplx>& block) const;
  std::vector<cplx> inverse(transport::Comm& comm, SpectralField spec) const;

  SpectralField forward(transport::Comm& comm, const mesh::NodeField& field, int component) const;
  /// Writes the real part of the inverse into owned nodes of `out`.
  void inverse(transport::Comm& comm, SpectralField spec, mesh::NodeField& out,
               int component) const;

  const std::vector<mesh::Box2>& layout_boxes(LayoutKind kind) const;

 private:
  LocalArray redistribute(transport::Comm& comm, const LocalArray& src,
                          const std::vector<mesh::Box2>& dst_boxes, StorageOrder dst_order,
                          const std::vector<int>& group) const;
  void transform_u(LocalArray& a, bool inverse) const;
  void transform_v(LocalArray& a, bool inverse) const;
  std::vector<int> column_group(int rank) const;

  const mesh::SurfaceMesh* mesh_;
  FftCommConfig cfg_;
  Fft1d fft_u_;
  Fft1d fft_v_;
  std::vector<mesh::Box2> block_boxes_;
  std::vector<mesh::Box2> u_boxes_;
  std::vector<mesh::Box2> v_boxes_;
  std::vector<int> all_ranks_;
};

}  // namespace zbench::fft
