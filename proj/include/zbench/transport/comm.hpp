#pragma once

#include <chrono>
#include <cstddef>
#include <cstring>
#include <functional>
#include <memory>
#include <optional>
#include <source_location>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "zbench/transport/trace.hpp"

namespace zbench::transport {

using Bytes = std::vector<std::byte>;

struct Outgoing {
  int dest = 0;
  Bytes payload;
};

struct Incoming {
  int source = 0;
  Bytes payload;
};

enum class ReduceOp { sum, max, min };

enum class Backend {
  threads,     ///< one OS thread per rank, free-running
  sequential,  ///< one rank runs at a time, round-robin at communication points
};

/// Logical 2D arrangement of ranks. Rank id = i * py + j for grid coordinate (i, j).
struct GridShape {
  int px = 1;
  int py = 1;
  int count() const { return px * py; }
  friend bool operator==(const GridShape&, const GridShape&) = default;
};

/// Most square factorization px * py == n with px >= py.
GridShape square_grid(int n);

struct RunOptions {
  int rank_count = 1;
  GridShape grid{};
  Backend backend = Backend::threads;
  std::chrono::milliseconds timeout{30000};
};

class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DeadlockError : public TransportError {
 public:
  using TransportError::TransportError;
};

class CollectiveMismatchError : public TransportError {
 public:
  using TransportError::TransportError;
};

/// Thrown inside ranks that were blocked when another rank failed.
class RankAborted : public TransportError {
 public:
  using TransportError::TransportError;
};

namespace detail {
class World;
}

/// Per-rank handle to the message-passing layer. Not shared between ranks.
class Comm {
 public:
  Comm(detail::World& world, int rank);

  int rank() const { return rank_; }
  int size() const;
  GridShape grid() const;
  int grid_i() const { return rank_ / grid().py; }
  int grid_j() const { return rank_ % grid().py; }
  int rank_of(int i, int j) const { return i * grid().py + j; }

  /// Collective sparse exchange. Every payload is delivered exactly once, in
  /// (source, send order). Self-sends are delivered locally and not traced.
  std::vector<Incoming> exchange(std::vector<Outgoing> sends, Pattern pattern,
                                 std::source_location where = std::source_location::current());

  /// Rank i receives the payload of rank (i - direction) mod R.
  Bytes ring_shift(Bytes payload, int direction,
                   std::source_location where = std::source_location::current());

  std::vector<double> all_reduce(std::span<const double> values, ReduceOp op,
                                 std::source_location where = std::source_location::current());
  double all_reduce(double value, ReduceOp op,
                    std::source_location where = std::source_location::current());
  void barrier(std::source_location where = std::source_location::current());

  RankTrace& trace() { return *trace_; }
  const RankTrace& trace() const { return *trace_; }

 private:
  detail::World* world_;
  int rank_;
  RankTrace* trace_;
};

template <class T>
  requires std::is_trivially_copyable_v<T>
Bytes pack(std::span<const T> values) {
  Bytes out(values.size_bytes());
  if (!values.empty()) std::memcpy(out.data(), values.data(), values.size_bytes());
  return out;
}

template <class T>
  requires std::is_trivially_copyable_v<T>
std::vector<T> unpack(const Bytes& bytes) {
  if (bytes.size() % sizeof(T) != 0) {
    throw TransportError("payload size " + std::to_string(bytes.size()) +
                         " is not a multiple of element size " + std::to_string(sizeof(T)));
  }
  std::vector<T> out(bytes.size() / sizeof(T));
  if (!out.empty()) std::memcpy(out.data(), bytes.data(), bytes.size());
  return out;
}

template <class T>
struct SpawnResult {
  std::vector<T> results;
  CommTrace trace;
};

namespace detail {
CommTrace run_ranks(const RunOptions& options, const std::function<void(Comm&)>& body);
}

/// Runs `body` once per rank and joins. Rethrows the first rank failure.
template <class Body>
auto spawn_ranks(const RunOptions& options, Body&& body) {
  using Raw = std::invoke_result_t<Body&, Comm&>;
  using T = std::conditional_t<std::is_void_v<Raw>, std::monostate, Raw>;
  std::vector<std::optional<T>> slots(options.rank_count > 0 ? options.rank_count : 0);
  CommTrace trace = detail::run_ranks(options, [&](Comm& comm) {
    if constexpr (std::is_void_v<Raw>) {
      body(comm);
      slots[comm.rank()].emplace();
    } else {
      slots[comm.rank()].emplace(body(comm));
    }
  });
  SpawnResult<T> out;
  out.results.reserve(slots.size());
  for (auto& s : slots) out.results.push_back(std::move(*s));
  out.trace = std::move(trace);
  return out;
}

}  // namespace zbench::transport
