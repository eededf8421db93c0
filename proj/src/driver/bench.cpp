#include "zbench/driver/bench.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>
#include <set>

#include <fmt/format.h>

#include "zbench/common.hpp"

namespace zbench::driver {

using transport::Pattern;

BenchCase parse_case(std::string_view s) {
  if (s == "low-weak") return BenchCase::low_weak;
  if (s == "low-strong") return BenchCase::low_strong;
  if (s == "high-weak") return BenchCase::high_weak;
  if (s == "high-strong") return BenchCase::high_strong;
  if (s == "fft-sweep") return BenchCase::fft_sweep;
  throw ConfigError(fmt::format("unknown bench case '{}'", s));
}

std::string_view to_string(BenchCase c) {
  switch (c) {
    case BenchCase::low_weak: return "low-weak";
    case BenchCase::low_strong: return "low-strong";
    case BenchCase::high_weak: return "high-weak";
    case BenchCase::high_strong: return "high-strong";
    case BenchCase::fft_sweep: return "fft-sweep";
  }
  return "?";
}

namespace {

bool weak(BenchCase c) { return c == BenchCase::low_weak || c == BenchCase::high_weak; }
bool high(BenchCase c) { return c == BenchCase::high_weak || c == BenchCase::high_strong; }

int default_base(BenchCase c) {
  switch (c) {
    case BenchCase::low_weak: return 32;
    case BenchCase::low_strong: return 64;
    case BenchCase::high_weak: return 16;
    case BenchCase::high_strong: return 64;
    case BenchCase::fft_sweep: return 8;
  }
  return 0;
}

std::vector<int> config_list(const BenchOptions& o) {
  if (!o.fft_configs.empty()) return o.fft_configs;
  if (o.bench_case == BenchCase::fft_sweep) return {0, 1, 2, 3, 4, 5, 6, 7};
  return {SimConfig{}.fft_config};
}

double max_state_diff(const GlobalState& a, const GlobalState& b) {
  if (a.nx != b.nx || a.ny != b.ny) return INFINITY;
  double m = 0.0;
  auto scan = [&](const std::vector<double>& x, const std::vector<double>& y) {
    for (std::size_t k = 0; k < x.size(); ++k) m = std::max(m, std::abs(x[k] - y[k]));
  };
  scan(a.x, b.x);
  scan(a.y, b.y);
  scan(a.z, b.z);
  scan(a.w1, b.w1);
  scan(a.w2, b.w2);
  return m;
}

bool finite(const GlobalState& s) {
  for (const auto* v : {&s.x, &s.y, &s.z, &s.w1, &s.w2}) {
    for (double d : *v) {
      if (!std::isfinite(d)) return false;
    }
  }
  return true;
}

}  // namespace

SimConfig bench_deck(const BenchOptions& opts, int ranks, int fft_config) {
  SimConfig c = high(opts.bench_case) ? single_mode_deck() : multi_mode_deck();
  c.grid = parse_grid(std::to_string(ranks));
  const int base = opts.base > 0 ? opts.base : default_base(opts.bench_case);
  if (weak(opts.bench_case)) {
    c.nx = base * c.grid.px;
    c.ny = base * c.grid.py;
  } else {
    c.nx = c.ny = base;
  }
  c.steps = opts.steps;
  c.fft_config = fft_config;
  c.backend = opts.backend;
  return c;
}

std::vector<BenchRow> run_bench(const BenchOptions& opts) {
  std::vector<BenchRow> rows;
  const auto configs = config_list(opts);
  for (int r : opts.ranks) {
    std::optional<GlobalState> reference;
    for (int cfg : configs) {
      BenchRow row;
      row.bench_case = std::string(to_string(opts.bench_case));
      row.ranks = r;
      row.fft_config = cfg;
      row.steps = opts.steps;
      try {
        const SimConfig deck = bench_deck(opts, r, cfg);
        row.grid = deck.grid;
        row.nx = deck.nx;
        row.ny = deck.ny;
        auto res = run(deck);
        row.wall_s = res.wall_s;
        row.trace = std::move(res.trace);
        row.pass = finite(res.final_state);
        if (!row.pass) row.error = "non-finite state";
        if (opts.bench_case == BenchCase::fft_sweep) {
          if (!reference) reference = res.final_state;
          row.max_diff = max_state_diff(*reference, res.final_state);
          if (row.max_diff > 1e-10) {
            row.pass = false;
            row.error = fmt::format("differs from config {} by {:.3g}", configs.front(), row.max_diff);
          }
        }
      } catch (const std::exception& e) {
        row.pass = false;
        row.error = e.what();
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

int max_peers(const transport::CommTrace& trace, Pattern p) {
  std::size_t best = 0;
  for (const auto& rt : trace.per_rank) {
    std::set<int> peers;
    for (const auto& e : rt.events()) {
      if (e.pattern == p) peers.insert(e.peer);
    }
    best = std::max(best, peers.size());
  }
  return static_cast<int>(best);
}

void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows) {
  os << "case,ranks,grid,nx,ny,fft_config,steps,wall_s";
  for (Pattern p : transport::kAllPatterns) {
    os << ',' << to_string(p) << "_messages," << to_string(p) << "_bytes";
  }
  os << ",all_to_all_peers,max_diff,status,error\n";
  for (const auto& r : rows) {
    os << fmt::format("{},{},{}x{},{},{},{},{},{:.6f}", r.bench_case, r.ranks, r.grid.px, r.grid.py,
                      r.nx, r.ny, r.fft_config, r.steps, r.wall_s);
    for (Pattern p : transport::kAllPatterns) {
      const auto t = r.trace.total(p);
      os << ',' << t.messages_sent << ',' << t.bytes_sent;
    }
    std::string err = r.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    os << fmt::format(",{},{:.3g},{},{}\n", max_peers(r.trace, Pattern::all_to_all), r.max_diff,
                      r.pass ? "pass" : "fail", err);
  }
}

}  // namespace zbench::driver
