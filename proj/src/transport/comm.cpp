#include "zbench/transport/comm.hpp"

#include <algorithm>
#include <cmath>
#include <condition_variable>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

#include <fmt/format.h>

namespace zbench::transport {

GridShape square_grid(int n) {
  if (n < 1) throw std::invalid_argument("rank count must be positive");
  int py = static_cast<int>(std::sqrt(static_cast<double>(n)));
  while (py > 1 && n % py != 0) --py;
  return {n / py, py};
}

namespace detail {

namespace {

enum class OpKind { exchange, ring_shift, all_reduce };

std::string_view kind_name(OpKind k) {
  switch (k) {
    case OpKind::exchange: return "exchange";
    case OpKind::ring_shift: return "ring_shift";
    case OpKind::all_reduce: return "all_reduce";
  }
  return "?";
}

std::string site(const std::source_location& loc) {
  return fmt::format("{}:{} ({})", loc.file_name(), loc.line(), loc.function_name());
}

struct Slot {
  OpKind kind{};
  Pattern pattern{};
  std::int64_t param = 0;
  int first_rank = 0;
  std::source_location first_site;
  int arrived = 0;
  int departed = 0;
  std::vector<std::vector<Incoming>> inbox;
  std::vector<std::vector<double>> values;
};

}  // namespace

struct CollectiveResult {
  std::vector<Incoming> inbox;
  std::vector<std::vector<double>> values;
};

class World {
 public:
  explicit World(const RunOptions& opts)
      : opts_(opts),
        seq_(opts.rank_count, 0),
        pending_(opts.rank_count),
        finished_(opts.rank_count, false),
        traces_(opts.rank_count) {}

  const RunOptions& options() const { return opts_; }
  RankTrace& trace(int rank) { return traces_[rank]; }
  std::vector<RankTrace> take_traces() { return std::move(traces_); }

  CollectiveResult collective(int rank, OpKind kind, Pattern pattern, std::int64_t param,
                              std::vector<Outgoing> sends, std::vector<double> values,
                              const std::source_location& where) {
    std::unique_lock lock(mu_);
    if (failed_) throw RankAborted("run aborted by another rank");
    const std::uint64_t seq = seq_[rank]++;
    const int n = opts_.rank_count;

    auto [it, created] = slots_.try_emplace(seq);
    Slot& slot = it->second;
    if (created) {
      slot.kind = kind;
      slot.pattern = pattern;
      slot.param = param;
      slot.first_rank = rank;
      slot.first_site = where;
      slot.inbox.resize(n);
      slot.values.resize(n);
    } else if (slot.kind != kind || slot.pattern != pattern || slot.param != param) {
      auto msg = fmt::format(
          "collective mismatch at call #{}: rank {} entered {}({}, param={}) at {}, but rank {} "
          "entered {}({}, param={}) at {}",
          seq, slot.first_rank, kind_name(slot.kind), to_string(slot.pattern), slot.param,
          site(slot.first_site), rank, kind_name(kind), to_string(pattern), param, site(where));
      fail_locked(std::make_exception_ptr(CollectiveMismatchError(msg)));
      throw CollectiveMismatchError(msg);
    }

    for (auto& out : sends) {
      if (out.dest < 0 || out.dest >= n) {
        auto msg = fmt::format("rank {} sent to invalid destination {} at {}", rank, out.dest,
                               site(where));
        fail_locked(std::make_exception_ptr(TransportError(msg)));
        throw TransportError(msg);
      }
      slot.inbox[out.dest].push_back({rank, std::move(out.payload)});
    }
    slot.values[rank] = std::move(values);
    ++slot.arrived;
    ++progress_;
    cv_.notify_all();

    pending_[rank] = fmt::format("{}({}) call #{} at {}", kind_name(kind), to_string(pattern), seq,
                                 site(where));
    wait_until(lock, rank, [&] { return slot.arrived == n; });
    pending_[rank].clear();

    CollectiveResult result;
    result.inbox = std::move(slot.inbox[rank]);
    std::stable_sort(result.inbox.begin(), result.inbox.end(),
                     [](const Incoming& a, const Incoming& b) { return a.source < b.source; });
    if (kind == OpKind::all_reduce) result.values = slot.values;
    if (++slot.departed == n) slots_.erase(it);
    return result;
  }

  void start(int rank) {
    if (opts_.backend != Backend::sequential) return;
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return turn_ == rank || failed_; });
  }

  void finish(int rank, std::exception_ptr error) {
    std::unique_lock lock(mu_);
    finished_[rank] = true;
    ++finished_count_;
    ++progress_;
    if (error) {
      if (!first_error_) first_error_ = error;
      failed_ = true;
    }
    if (opts_.backend == Backend::sequential && turn_ == rank) pass_turn(rank);
    cv_.notify_all();
  }

  std::exception_ptr first_error() const { return first_error_; }

 private:
  template <class Pred>
  void wait_until(std::unique_lock<std::mutex>& lock, int rank, Pred pred) {
    if (opts_.backend == Backend::sequential) {
      while (!pred()) {
        if (failed_) throw RankAborted("run aborted by another rank");
        if (finished_count_ > 0) deadlock(rank);
        const std::uint64_t seen = progress_;
        if (!pass_turn(rank)) deadlock(rank);
        cv_.notify_all();
        cv_.wait(lock, [&] { return turn_ == rank || failed_; });
        if (failed_) throw RankAborted("run aborted by another rank");
        if (!pred() && progress_ == seen) deadlock(rank);
      }
      return;
    }
    const auto deadline = std::chrono::steady_clock::now() + opts_.timeout;
    while (!pred()) {
      if (failed_) throw RankAborted("run aborted by another rank");
      if (finished_count_ > 0) deadlock(rank);
      if (cv_.wait_until(lock, deadline) == std::cv_status::timeout && !pred() && !failed_) {
        deadlock(rank);
      }
    }
  }

  // Hands the turn to the next unfinished rank. Returns false if none besides `rank`.
  bool pass_turn(int rank) {
    const int n = opts_.rank_count;
    for (int k = 1; k < n; ++k) {
      int cand = (rank + k) % n;
      if (!finished_[cand]) {
        turn_ = cand;
        return true;
      }
    }
    return false;
  }

  [[noreturn]] void deadlock(int rank) {
    std::string msg = fmt::format("deadlock detected by rank {}:", rank);
    for (int r = 0; r < opts_.rank_count; ++r) {
      if (finished_[r]) {
        msg += fmt::format("\n  rank {}: finished", r);
      } else if (pending_[r].empty()) {
        msg += fmt::format("\n  rank {}: running (no pending operation)", r);
      } else {
        msg += fmt::format("\n  rank {}: waiting in {}", r, pending_[r]);
      }
    }
    fail_locked(std::make_exception_ptr(DeadlockError(msg)));
    throw DeadlockError(msg);
  }

  void fail_locked(std::exception_ptr e) {
    if (!first_error_) first_error_ = std::move(e);
    failed_ = true;
    cv_.notify_all();
  }

  RunOptions opts_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::map<std::uint64_t, Slot> slots_;
  std::vector<std::uint64_t> seq_;
  std::vector<std::string> pending_;
  std::vector<bool> finished_;
  int finished_count_ = 0;
  std::uint64_t progress_ = 0;
  int turn_ = 0;
  bool failed_ = false;
  std::exception_ptr first_error_;
  std::vector<RankTrace> traces_;
};

CommTrace run_ranks(const RunOptions& options, const std::function<void(Comm&)>& body) {
  if (options.rank_count < 1) throw std::invalid_argument("rank_count must be >= 1");
  if (options.grid.px < 1 || options.grid.py < 1 ||
      options.grid.count() != options.rank_count) {
    throw std::invalid_argument(fmt::format("grid shape {}x{} does not factor rank count {}",
                                            options.grid.px, options.grid.py,
                                            options.rank_count));
  }
  World world(options);
  auto rank_main = [&](int rank) {
    std::exception_ptr error;
    try {
      world.start(rank);
      Comm comm(world, rank);
      body(comm);
    } catch (const RankAborted&) {
      // the primary failure is already recorded
    } catch (...) {
      error = std::current_exception();
    }
    world.finish(rank, error);
  };

  if (options.rank_count == 1) {
    rank_main(0);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(options.rank_count);
    for (int r = 0; r < options.rank_count; ++r) threads.emplace_back(rank_main, r);
    for (auto& t : threads) t.join();
  }
  if (auto e = world.first_error()) std::rethrow_exception(e);
  return CommTrace{world.take_traces()};
}

}  // namespace detail

Comm::Comm(detail::World& world, int rank)
    : world_(&world), rank_(rank), trace_(&world.trace(rank)) {}

int Comm::size() const { return world_->options().rank_count; }

GridShape Comm::grid() const { return world_->options().grid; }

std::vector<Incoming> Comm::exchange(std::vector<Outgoing> sends, Pattern pattern,
                                     std::source_location where) {
  for (const auto& s : sends) {
    if (s.dest != rank_) trace_->record_send(pattern, s.dest, s.payload.size());
  }
  auto result = world_->collective(rank_, detail::OpKind::exchange, pattern, 0, std::move(sends),
                                   {}, where);
  for (const auto& in : result.inbox) {
    if (in.source != rank_) trace_->record_receive(pattern, in.source, in.payload.size());
  }
  return std::move(result.inbox);
}

Bytes Comm::ring_shift(Bytes payload, int direction, std::source_location where) {
  if (direction != 1 && direction != -1) {
    throw std::invalid_argument("ring_shift direction must be +1 or -1");
  }
  const int n = size();
  const int dest = ((rank_ + direction) % n + n) % n;
  if (dest != rank_) trace_->record_send(Pattern::ring, dest, payload.size());
  std::vector<Outgoing> sends;
  sends.push_back({dest, std::move(payload)});
  auto result = world_->collective(rank_, detail::OpKind::ring_shift, Pattern::ring, direction,
                                   std::move(sends), {}, where);
  if (result.inbox.size() != 1) {
    throw TransportError(fmt::format("rank {} received {} ring payloads", rank_,
                                     result.inbox.size()));
  }
  auto& in = result.inbox.front();
  if (in.source != rank_) trace_->record_receive(Pattern::ring, in.source, in.payload.size());
  return std::move(in.payload);
}

std::vector<double> Comm::all_reduce(std::span<const double> values, ReduceOp op,
                                     std::source_location where) {
  const int n = size();
  const std::uint64_t bytes = values.size_bytes();
  for (int p = 0; p < n; ++p) {
    if (p != rank_) trace_->record_send(Pattern::reduce, p, bytes);
  }
  const std::int64_t param = static_cast<std::int64_t>(values.size()) * 4 + static_cast<int>(op);
  auto result = world_->collective(rank_, detail::OpKind::all_reduce, Pattern::reduce, param, {},
                                   std::vector<double>(values.begin(), values.end()), where);
  for (int p = 0; p < n; ++p) {
    if (p != rank_) trace_->record_receive(Pattern::reduce, p, bytes);
  }

  // Contributions are combined in sorted order so the result does not depend
  // on which rank holds which value.
  std::vector<double> out(values.size());
  std::vector<double> column(n);
  for (std::size_t k = 0; k < values.size(); ++k) {
    bool has_nan = false;
    for (int p = 0; p < n; ++p) {
      column[p] = result.values[p][k];
      has_nan |= std::isnan(column[p]);
    }
    if (has_nan) {
      out[k] = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    switch (op) {
      case ReduceOp::sum: {
        std::sort(column.begin(), column.end());
        double s = 0.0;
        for (double v : column) s += v;
        out[k] = s;
        break;
      }
      case ReduceOp::max: out[k] = *std::max_element(column.begin(), column.end()); break;
      case ReduceOp::min: out[k] = *std::min_element(column.begin(), column.end()); break;
    }
  }
  return out;
}

double Comm::all_reduce(double value, ReduceOp op, std::source_location where) {
  return all_reduce(std::span<const double>(&value, 1), op, where).front();
}

void Comm::barrier(std::source_location where) { all_reduce(std::span<const double>{}, ReduceOp::sum, where); }

}  // namespace zbench::transport
