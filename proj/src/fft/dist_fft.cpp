#include "zbench/fft/dist_fft.hpp"

#include <algorithm>
#include <numbers>

#include <fmt/format.h>

#include "zbench/common.hpp"

namespace zbench::fft {

using mesh::Box2;
using transport::Comm;
using transport::Pattern;

FftCommConfig FftCommConfig::from_index(int index) {
  if (index < 0 || index > 7) throw ConfigError(fmt::format("FFT config {} not in 0..7", index));
  return {(index & 4) != 0, (index & 2) != 0, (index & 1) != 0};
}

std::string FftCommConfig::describe() const {
  return fmt::format("cfg{} (all_to_all={}, pencils={}, reorder={})", index(), all_to_all,
                     pencils, reorder);
}

Wavenumber SpectralField::wavenumber(int i, int j) const {
  Wavenumber w;
  const int si = i < nx / 2 ? i : i - nx;
  const int sj = j < ny / 2 ? j : j - ny;
  w.ku = 2.0 * std::numbers::pi / u_extent * si;
  w.kv = 2.0 * std::numbers::pi / v_extent * sj;
  w.nyquist_u = nx > 1 && i == nx / 2;
  w.nyquist_v = ny > 1 && j == ny / 2;
  return w;
}

void apply_multiplier(SpectralField& spec, const std::function<cplx(const Wavenumber&)>& m) {
  const Box2& b = spec.local.box;
  for (int i = b.i.begin; i < b.i.end; ++i) {
    for (int j = b.j.begin; j < b.j.end; ++j) spec.local.at(i, j) *= m(spec.wavenumber(i, j));
  }
}

namespace {

template <class Fn>
void traverse(const Box2& box, StorageOrder order, Fn fn) {
  if (order == StorageOrder::j_fastest) {
    for (int i = box.i.begin; i < box.i.end; ++i) {
      for (int j = box.j.begin; j < box.j.end; ++j) fn(i, j);
    }
  } else {
    for (int j = box.j.begin; j < box.j.end; ++j) {
      for (int i = box.i.begin; i < box.i.end; ++i) fn(i, j);
    }
  }
}

}  // namespace

DistributedFft::DistributedFft(const mesh::SurfaceMesh& mesh, FftCommConfig cfg)
    : mesh_(&mesh), cfg_(cfg), fft_u_(mesh.nx()), fft_v_(mesh.ny()), block_boxes_(mesh.boxes()) {
  const auto grid = mesh.grid();
  const int ranks = grid.count();
  const int nx = mesh.nx();
  const int ny = mesh.ny();
  if (nx < ranks || ny < ranks) {
    throw ConfigError(fmt::format("{}x{} mesh cannot be split into lines over {} ranks", nx, ny,
                                  ranks));
  }
  for (const auto& r : mesh::split_balanced(nx, ranks)) v_boxes_.push_back({r, {0, ny}});
  if (cfg.pencils) {
    for (const auto& r : mesh::split_balanced(ny, ranks)) u_boxes_.push_back({{0, nx}, r});
  } else {
    for (int p = 0; p < grid.px; ++p) {
      for (int q = 0; q < grid.py; ++q) {
        const auto& jq = block_boxes_[q].j;
        auto piece = mesh::split_balanced(jq.size(), grid.px)[p];
        u_boxes_.push_back({{0, nx}, {jq.begin + piece.begin, jq.begin + piece.end}});
      }
    }
  }
  all_ranks_.resize(ranks);
  for (int r = 0; r < ranks; ++r) all_ranks_[r] = r;
}

const std::vector<Box2>& DistributedFft::layout_boxes(LayoutKind kind) const {
  switch (kind) {
    case LayoutKind::block2d: return block_boxes_;
    case LayoutKind::u_lines: return u_boxes_;
    case LayoutKind::v_lines: return v_boxes_;
  }
  return block_boxes_;
}

std::vector<int> DistributedFft::column_group(int rank) const {
  const auto grid = mesh_->grid();
  const int q = rank % grid.py;
  std::vector<int> g;
  for (int p = 0; p < grid.px; ++p) g.push_back(p * grid.py + q);
  return g;
}

LocalArray DistributedFft::redistribute(Comm& comm, const LocalArray& src,
                                        const std::vector<Box2>& dst_boxes,
                                        StorageOrder dst_order,
                                        const std::vector<int>& group) const {
  const int me = comm.rank();
  // Source boxes of every rank are implied by the layout the source belongs to.
  const std::vector<Box2>* src_boxes = nullptr;
  for (auto kind : {LayoutKind::block2d, LayoutKind::u_lines, LayoutKind::v_lines}) {
    if (layout_boxes(kind)[me] == src.box) {
      src_boxes = &layout_boxes(kind);
      break;
    }
  }
  if (src_boxes == nullptr) throw std::logic_error("redistribute: unknown source layout");

  LocalArray dst(dst_boxes[me], dst_order);
  const StorageOrder wire_order = cfg_.reorder ? dst_order : src.order;

  auto pack_for = [&](int d) {
    std::vector<cplx> buf;
    const Box2 inter = mesh::intersect(src.box, dst_boxes[d]);
    buf.reserve(inter.count());
    traverse(inter, wire_order, [&](int i, int j) { buf.push_back(src.at(i, j)); });
    return buf;
  };
  auto unpack_from = [&](int s, const std::vector<cplx>& buf) {
    const Box2 inter = mesh::intersect((*src_boxes)[s], dst.box);
    if (static_cast<long>(buf.size()) != inter.count()) {
      throw transport::TransportError(fmt::format(
          "FFT transpose: rank {} expected {} values from rank {}, got {}", me, inter.count(), s,
          buf.size()));
    }
    std::size_t k = 0;
    traverse(inter, wire_order, [&](int i, int j) { dst.at(i, j) = buf[k++]; });
  };

  unpack_from(me, pack_for(me));

  const int g = static_cast<int>(group.size());
  const int pos = static_cast<int>(std::find(group.begin(), group.end(), me) - group.begin());
  if (cfg_.all_to_all) {
    std::vector<transport::Outgoing> sends;
    for (int d : group) {
      if (d != me) sends.push_back({d, transport::pack<cplx>(pack_for(d))});
    }
    for (auto& msg : comm.exchange(std::move(sends), Pattern::all_to_all)) {
      unpack_from(msg.source, transport::unpack<cplx>(msg.payload));
    }
  } else {
    for (int k = 1; k < g; ++k) {
      const int d = group[(pos + k) % g];
      std::vector<transport::Outgoing> sends;
      auto buf = pack_for(d);
      if (!buf.empty()) sends.push_back({d, transport::pack<cplx>(buf)});
      for (auto& msg : comm.exchange(std::move(sends), Pattern::all_to_all)) {
        unpack_from(msg.source, transport::unpack<cplx>(msg.payload));
      }
    }
  }
  comm.trace().count("fft.transpose");
  if (g == comm.size() && g > 1) comm.trace().count("fft.global_transpose");
  return dst;
}

void DistributedFft::transform_u(LocalArray& a, bool inverse) const {
  const std::ptrdiff_t stride = a.order == StorageOrder::i_fastest ? 1 : a.box.j.size();
  for (int j = a.box.j.begin; j < a.box.j.end; ++j) {
    cplx* line = &a.at(0, j);
    inverse ? fft_u_.inverse(line, stride) : fft_u_.forward(line, stride);
  }
}

void DistributedFft::transform_v(LocalArray& a, bool inverse) const {
  const std::ptrdiff_t stride = a.order == StorageOrder::j_fastest ? 1 : a.box.i.size();
  for (int i = a.box.i.begin; i < a.box.i.end; ++i) {
    cplx* line = &a.at(i, 0);
    inverse ? fft_v_.inverse(line, stride) : fft_v_.forward(line, stride);
  }
}

SpectralField DistributedFft::forward(Comm& comm, const std::vector<cplx>& block) const {
  const int me = comm.rank();
  LocalArray a(block_boxes_[me], StorageOrder::j_fastest);
  if (block.size() != a.data.size()) throw std::invalid_argument("FFT input size mismatch");
  a.data = block;
  comm.trace().count("fft.forward");

  const auto& group1 = cfg_.pencils ? all_ranks_ : column_group(me);
  LocalArray b = redistribute(comm, a, u_boxes_,
                              cfg_.reorder ? StorageOrder::i_fastest : a.order, group1);
  transform_u(b, false);
  LocalArray c = redistribute(comm, b, v_boxes_,
                              cfg_.reorder ? StorageOrder::j_fastest : b.order, all_ranks_);
  transform_v(c, false);

  SpectralField out;
  out.nx = mesh_->nx();
  out.ny = mesh_->ny();
  out.u_extent = mesh_->u_extent();
  out.v_extent = mesh_->v_extent();
  out.layout = LayoutKind::v_lines;
  out.config_index = cfg_.index();
  out.local = std::move(c);
  return out;
}

std::vector<cplx> DistributedFft::inverse(Comm& comm, SpectralField spec) const {
  const int me = comm.rank();
  if (spec.layout != LayoutKind::v_lines || spec.config_index != cfg_.index() ||
      spec.nx != mesh_->nx() || spec.ny != mesh_->ny() || !(spec.local.box == v_boxes_[me])) {
    throw std::invalid_argument(fmt::format(
        "spectral field layout (cfg{}, {}x{}) does not match transform {} on {}x{}",
        spec.config_index, spec.nx, spec.ny, cfg_.describe(), mesh_->nx(), mesh_->ny()));
  }
  comm.trace().count("fft.inverse");
  LocalArray c = std::move(spec.local);
  transform_v(c, true);
  LocalArray b = redistribute(comm, c, u_boxes_,
                              cfg_.reorder ? StorageOrder::i_fastest : c.order, all_ranks_);
  transform_u(b, true);
  const auto& group1 = cfg_.pencils ? all_ranks_ : column_group(me);
  LocalArray a = redistribute(comm, b, block_boxes_, StorageOrder::j_fastest, group1);
  const double scale = 1.0 / (static_cast<double>(mesh_->nx()) * mesh_->ny());
  for (auto& v : a.data) v *= scale;
  return std::move(a.data);
}

SpectralField DistributedFft::forward(Comm& comm, const mesh::NodeField& field,
                                      int component) const {
  auto owned = field.owned_values(component);
  return forward(comm, std::vector<cplx>(owned.begin(), owned.end()));
}

void DistributedFft::inverse(Comm& comm, SpectralField spec, mesh::NodeField& out,
                             int component) const {
  auto values = inverse(comm, std::move(spec));
  std::vector<double> re(values.size());
  std::transform(values.begin(), values.end(), re.begin(), [](const cplx& v) { return v.real(); });
  out.set_owned_values(component, re);
}

}  // namespace zbench::fft
