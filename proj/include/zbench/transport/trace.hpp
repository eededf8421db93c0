#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace zbench::transport {

/// Communication pattern classes tracked by the transport.
enum class Pattern : std::uint8_t { halo, all_to_all, ring, migrate, reduce, point_to_point };

inline constexpr std::array<Pattern, 6> kAllPatterns = {
    Pattern::halo,   Pattern::all_to_all, Pattern::ring,
    Pattern::migrate, Pattern::reduce,    Pattern::point_to_point};

std::string_view to_string(Pattern p);

struct PatternCounter {
  std::uint64_t messages_sent = 0;
  std::uint64_t bytes_sent = 0;
  std::uint64_t messages_received = 0;
  std::uint64_t bytes_received = 0;

  PatternCounter& operator+=(const PatternCounter& o);
  friend bool operator==(const PatternCounter&, const PatternCounter&) = default;
};

PatternCounter operator-(PatternCounter a, const PatternCounter& b);

struct TraceEvent {
  std::int64_t step = 0;
  Pattern pattern = Pattern::point_to_point;
  int peer = 0;
  std::uint64_t bytes = 0;
  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

/// Counters and event log for a single rank. Only the owning rank mutates it.
class RankTrace {
 public:
  void record_send(Pattern p, int peer, std::uint64_t bytes);
  void record_receive(Pattern p, int peer, std::uint64_t bytes);

  /// Named operation counter ("zmodel.derivatives", "fft.forward", ...).
  void count(std::string_view op, std::uint64_t n = 1);

  void set_step(std::int64_t step) { step_ = step; }
  std::int64_t step() const { return step_; }

  const PatternCounter& counter(Pattern p) const {
    return counters_[static_cast<std::size_t>(p)];
  }
  const std::array<PatternCounter, kAllPatterns.size()>& counters() const { return counters_; }
  const std::vector<TraceEvent>& events() const { return events_; }
  std::uint64_t op_count(std::string_view op) const;
  const std::map<std::string, std::uint64_t, std::less<>>& ops() const { return ops_; }

  friend bool operator==(const RankTrace&, const RankTrace&) = default;

 private:
  std::array<PatternCounter, kAllPatterns.size()> counters_{};
  std::vector<TraceEvent> events_;
  std::map<std::string, std::uint64_t, std::less<>> ops_;
  std::int64_t step_ = 0;
};

/// Merged trace of a whole run, assembled after every rank has joined.
struct CommTrace {
  std::vector<RankTrace> per_rank;

  PatternCounter total(Pattern p) const;
  std::uint64_t op_count(std::string_view op) const;
  int ranks() const { return static_cast<int>(per_rank.size()); }

  nlohmann::json to_json(const std::string& run_id, bool include_events = false) const;

  friend bool operator==(const CommTrace&, const CommTrace&) = default;
};

}  // namespace zbench::transport
