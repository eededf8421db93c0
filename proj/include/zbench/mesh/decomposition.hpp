#pragma once

#include <vector>

#include "zbench/transport/comm.hpp"

namespace zbench::mesh {

/// Half-open index range [begin, end).
struct IndexRange {
  int begin = 0;
  int end = 0;
  int size() const { return end - begin; }
  bool contains(int k) const { return k >= begin && k < end; }
  friend bool operator==(const IndexRange&, const IndexRange&) = default;
};

struct Box2 {
  IndexRange i;
  IndexRange j;
  long count() const { return static_cast<long>(i.size()) * j.size(); }
  bool contains(int gi, int gj) const { return i.contains(gi) && j.contains(gj); }
  friend bool operator==(const Box2&, const Box2&) = default;
};

/// Splits [0, n) into `parts` contiguous ranges whose sizes differ by at most one;
/// the first n % parts ranges get the extra element.
std::vector<IndexRange> split_balanced(int n, int parts);

/// Owned box of every rank; rank id = i * py + j owns block (i, j).
/// Throws ConfigError when the rank grid is larger than the mesh.
std::vector<Box2> decompose(int nx, int ny, transport::GridShape grid);

/// Intersection of two boxes (possibly empty).
Box2 intersect(const Box2& a, const Box2& b);

}  // namespace zbench::mesh
