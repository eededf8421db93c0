#include "zbench/br/exact_solver.hpp"

#include <algorithm>

namespace zbench::br {

std::vector<Vec3> exact_br(transport::Comm& comm, const std::vector<BRNode>& owned,
                           const BRKernelParams& params) {
  params.validate();
  const int ranks = comm.size();
  comm.trace().count("br.exact");

  // Circulate every block once around the ring, keeping what passes by.
  std::vector<BRNode> sources = owned;
  transport::Bytes travelling = transport::pack<BRNode>(owned);
  for (int shift = 1; shift < ranks; ++shift) {
    travelling = comm.ring_shift(std::move(travelling), 1);
    auto block = transport::unpack<BRNode>(travelling);
    sources.insert(sources.end(), block.begin(), block.end());
  }
  std::sort(sources.begin(), sources.end(),
            [](const BRNode& a, const BRNode& b) { return a.index < b.index; });

  const double eps = params.epsilon;
  const double scale = params.scale();
  std::vector<Vec3> out(owned.size());
  for (std::size_t t = 0; t < owned.size(); ++t) {
    Vec3 acc{0.0, 0.0, 0.0};
    const Vec3& zi = owned[t].pos;
    for (const auto& s : sources) {
      const Vec3 k = kernel(zi - s.pos, s.q, eps);
      acc[0] += k[0];
      acc[1] += k[1];
      acc[2] += k[2];
    }
    out[t] = {scale * acc[0], scale * acc[1], scale * acc[2]};
  }
  return out;
}

}  // namespace zbench::br
