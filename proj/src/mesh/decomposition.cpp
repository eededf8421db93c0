#include "zbench/mesh/decomposition.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "zbench/common.hpp"

namespace zbench::mesh {

std::vector<IndexRange> split_balanced(int n, int parts) {
  if (parts < 1 || n < parts) {
    throw ConfigError(fmt::format("cannot split {} nodes into {} blocks", n, parts));
  }
  std::vector<IndexRange> out;
  out.reserve(parts);
  const int base = n / parts;
  const int extra = n % parts;
  int start = 0;
  for (int p = 0; p < parts; ++p) {
    int len = base + (p < extra ? 1 : 0);
    out.push_back({start, start + len});
    start += len;
  }
  return out;
}

std::vector<Box2> decompose(int nx, int ny, transport::GridShape grid) {
  if (grid.px > nx || grid.py > ny) {
    throw ConfigError(fmt::format("rank grid {}x{} is larger than the {}x{} mesh", grid.px,
                                  grid.py, nx, ny));
  }
  auto xs = split_balanced(nx, grid.px);
  auto ys = split_balanced(ny, grid.py);
  std::vector<Box2> boxes;
  boxes.reserve(grid.count());
  for (int i = 0; i < grid.px; ++i) {
    for (int j = 0; j < grid.py; ++j) boxes.push_back({xs[i], ys[j]});
  }
  return boxes;
}

Box2 intersect(const Box2& a, const Box2& b) {
  Box2 r;
  r.i = {std::max(a.i.begin, b.i.begin), std::min(a.i.end, b.i.end)};
  r.j = {std::max(a.j.begin, b.j.begin), std::min(a.j.end, b.j.end)};
  if (r.i.end < r.i.begin) r.i.end = r.i.begin;
  if (r.j.end < r.j.begin) r.j.end = r.j.begin;
  return r;
}

}  // namespace zbench::mesh
