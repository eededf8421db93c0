#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "zbench/driver/simulation.hpp"

namespace zbench::driver {

enum class BenchCase { low_weak, low_strong, high_weak, high_strong, fft_sweep };

BenchCase parse_case(std::string_view s);
std::string_view to_string(BenchCase c);

struct BenchOptions {
  BenchCase bench_case = BenchCase::low_strong;
  std::vector<int> ranks{1, 4};
  std::vector<int> fft_configs;  ///< empty: all eight for fft-sweep, the deck's config otherwise
  int steps = 2;
  int base = 0;                  ///< mesh edge (strong) or per-rank edge (weak); 0 = case default
  transport::Backend backend = transport::Backend::threads;
};

struct BenchRow {
  std::string bench_case;
  int ranks = 0;
  transport::GridShape grid;
  int nx = 0;
  int ny = 0;
  int fft_config = 0;
  int steps = 0;
  double wall_s = 0.0;
  transport::CommTrace trace;
  double max_diff = 0.0;  ///< against the first config at the same rank count (sweep only)
  bool pass = false;
  std::string error;
};

/// Deck of one bench cell.
SimConfig bench_deck(const BenchOptions& opts, int ranks, int fft_config);

/// Runs every (rank count, config) cell in order; failures are recorded and the sweep continues.
std::vector<BenchRow> run_bench(const BenchOptions& opts);

/// Largest number of distinct peers any rank sent to under pattern p.
int max_peers(const transport::CommTrace& trace, transport::Pattern p);

void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows);

}  // namespace zbench::driver
