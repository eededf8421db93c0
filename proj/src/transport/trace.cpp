#include "zbench/transport/trace.hpp"

namespace zbench::transport {

std::string_view to_string(Pattern p) {
  switch (p) {
    case Pattern::halo: return "halo";
    case Pattern::all_to_all: return "all_to_all";
    case Pattern::ring: return "ring";
    case Pattern::migrate: return "migrate";
    case Pattern::reduce: return "reduce";
    case Pattern::point_to_point: return "point_to_point";
  }
  return "unknown";
}

PatternCounter& PatternCounter::operator+=(const PatternCounter& o) {
  messages_sent += o.messages_sent;
  bytes_sent += o.bytes_sent;
  messages_received += o.messages_received;
  bytes_received += o.bytes_received;
  return *this;
}

PatternCounter operator-(PatternCounter a, const PatternCounter& b) {
  a.messages_sent -= b.messages_sent;
  a.bytes_sent -= b.bytes_sent;
  a.messages_received -= b.messages_received;
  a.bytes_received -= b.bytes_received;
  return a;
}

void RankTrace::record_send(Pattern p, int peer, std::uint64_t bytes) {
  auto& c = counters_[static_cast<std::size_t>(p)];
  c.messages_sent += 1;
  c.bytes_sent += bytes;
  events_.push_back({step_, p, peer, bytes});
}

void RankTrace::record_receive(Pattern p, int /*peer*/, std::uint64_t bytes) {
  auto& c = counters_[static_cast<std::size_t>(p)];
  c.messages_received += 1;
  c.bytes_received += bytes;
}

void RankTrace::count(std::string_view op, std::uint64_t n) {
  auto it = ops_.find(op);
  if (it == ops_.end()) {
    ops_.emplace(std::string(op), n);
  } else {
    it->second += n;
  }
}

std::uint64_t RankTrace::op_count(std::string_view op) const {
  auto it = ops_.find(op);
  return it == ops_.end() ? 0 : it->second;
}

PatternCounter CommTrace::total(Pattern p) const {
  PatternCounter sum;
  for (const auto& r : per_rank) sum += r.counter(p);
  return sum;
}

std::uint64_t CommTrace::op_count(std::string_view op) const {
  std::uint64_t n = 0;
  for (const auto& r : per_rank) n += r.op_count(op);
  return n;
}

namespace {

nlohmann::json counters_json(const std::array<PatternCounter, kAllPatterns.size()>& counters) {
  nlohmann::json j = nlohmann::json::object();
  for (Pattern p : kAllPatterns) {
    const auto& c = counters[static_cast<std::size_t>(p)];
    j[std::string(to_string(p))] = {{"messages", c.messages_sent},
                                    {"bytes", c.bytes_sent},
                                    {"messages_received", c.messages_received},
                                    {"bytes_received", c.bytes_received}};
  }
  return j;
}

}  // namespace

nlohmann::json CommTrace::to_json(const std::string& run_id, bool include_events) const {
  std::array<PatternCounter, kAllPatterns.size()> totals{};
  for (Pattern p : kAllPatterns) totals[static_cast<std::size_t>(p)] = total(p);

  nlohmann::json doc;
  doc["run_id"] = run_id;
  doc["ranks"] = ranks();
  doc["patterns"] = counters_json(totals);
  nlohmann::json ranks_json = nlohmann::json::array();
  for (std::size_t r = 0; r < per_rank.size(); ++r) {
    const auto& rt = per_rank[r];
    nlohmann::json rj;
    rj["rank"] = r;
    rj["patterns"] = counters_json(rt.counters());
    rj["ops"] = rt.ops();
    if (include_events) {
      nlohmann::json ev = nlohmann::json::array();
      for (const auto& e : rt.events()) {
        ev.push_back({{"step", e.step},
                      {"pattern", std::string(to_string(e.pattern))},
                      {"peer", e.peer},
                      {"bytes", e.bytes}});
      }
      rj["events"] = std::move(ev);
    }
    ranks_json.push_back(std::move(rj));
  }
  doc["per_rank"] = std::move(ranks_json);
  return doc;
}

}  // namespace zbench::transport
