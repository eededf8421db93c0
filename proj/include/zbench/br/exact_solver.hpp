#pragma once

#include "zbench/br/kernel.hpp"
#include "zbench/transport/comm.hpp"

namespace zbench::br {

/// All-pairs velocity of the owned nodes. Every block travels the ring once (R - 1 shifts);
/// sources are then summed in global index order so the result does not depend on R.
std::vector<Vec3> exact_br(transport::Comm& comm, const std::vector<BRNode>& owned,
                           const BRKernelParams& params);

}  // namespace zbench::br
