#include "zbench/driver/config.hpp"

#include <charconv>
#include <cmath>

#include <fmt/format.h>

#include "zbench/common.hpp"
#include "zbench/fft/fft1d.hpp"
#include "zbench/mesh/decomposition.hpp"

namespace zbench::driver {

using zmodel::ModelOrder;
using zmodel::SolverKind;

InitialCondition parse_ic(std::string_view s) {
  if (s == "single" || s == "single_mode" || s == "single-mode") return InitialCondition::single_mode;
  if (s == "multi" || s == "multi_mode" || s == "multi-mode") return InitialCondition::multi_mode;
  throw ConfigError(fmt::format("unknown initial condition '{}'", s));
}

std::string_view to_string(InitialCondition ic) {
  return ic == InitialCondition::single_mode ? "single_mode" : "multi_mode";
}

mesh::BoundaryType parse_bc(std::string_view s) {
  if (s == "periodic") return mesh::BoundaryType::periodic;
  if (s == "free") return mesh::BoundaryType::free;
  throw ConfigError(fmt::format("unknown boundary type '{}'", s));
}

std::string_view to_string(mesh::BoundaryType bc) {
  return bc == mesh::BoundaryType::periodic ? "periodic" : "free";
}

namespace {

int parse_positive(std::string_view s, std::string_view what) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || v < 1) {
    throw ConfigError(fmt::format("bad {} '{}'", what, s));
  }
  return v;
}

}  // namespace

transport::GridShape parse_grid(std::string_view s) {
  const auto x = s.find_first_of("xX");
  if (x == std::string_view::npos) return transport::square_grid(parse_positive(s, "rank count"));
  return {parse_positive(s.substr(0, x), "rank grid"), parse_positive(s.substr(x + 1), "rank grid")};
}

SolverKind SimConfig::resolved_solver() const {
  if (solver) return *solver;
  return order == ModelOrder::medium ? SolverKind::cutoff : SolverKind::exact;
}

zmodel::ZModelConfig SimConfig::model_config() const {
  zmodel::ZModelConfig c;
  c.order = order;
  c.solver = resolved_solver();
  c.cutoff = cutoff;
  c.physics = physics;
  c.fft = fft::FftCommConfig::from_index(fft_config);
  c.box = box;
  return c;
}

transport::RunOptions SimConfig::run_options() const {
  transport::RunOptions o;
  o.rank_count = grid.count();
  o.grid = grid;
  o.backend = backend;
  return o;
}

SimConfig multi_mode_deck() { return SimConfig{}; }

SimConfig single_mode_deck() {
  SimConfig c;
  c.order = ModelOrder::high;
  c.solver = SolverKind::cutoff;
  c.bc = mesh::BoundaryType::free;
  c.ic = InitialCondition::single_mode;
  c.amplitude = 0.05;
  c.u0 = c.v0 = -3.0;
  c.u1 = c.v1 = 3.0;
  c.box = {{-3.0, -3.0, -3.0}, {3.0, 3.0, 3.0}};
  c.cutoff = 0.5;
  return c;
}

void validate(const SimConfig& c) {
  const int min_nodes = c.bc == mesh::BoundaryType::free ? 3 : 2;
  if (c.nx < min_nodes || c.ny < min_nodes) {
    throw ConfigError(fmt::format("mesh {}x{} too small for {} boundaries", c.nx, c.ny, to_string(c.bc)));
  }
  if (c.grid.px < 1 || c.grid.py < 1) throw ConfigError("rank grid must be positive");
  mesh::decompose(c.nx, c.ny, c.grid);
  if (!(c.u1 > c.u0) || !(c.v1 > c.v0)) throw ConfigError("parameter domain must have positive extent");
  for (int k = 0; k < 3; ++k) {
    if (!(c.box.hi[k] > c.box.lo[k])) throw ConfigError("spatial box must have positive extent");
  }
  if (c.fft_config < 0 || c.fft_config > 7) {
    throw ConfigError(fmt::format("fft config {} not in 0..7", c.fft_config));
  }
  zmodel::validate(c.model_config(), c.bc);
  if (c.order != ModelOrder::high) {
    const int r = c.grid.count();
    if (!fft::is_power_of_two(c.nx) || !fft::is_power_of_two(c.ny)) {
      throw ConfigError(fmt::format("{}-order model needs power-of-two mesh sizes, got {}x{}",
                                    zmodel::to_string(c.order), c.nx, c.ny));
    }
    if (c.nx < r || c.ny < r) {
      throw ConfigError(fmt::format("{}x{} mesh too small for FFT lines over {} ranks", c.nx, c.ny, r));
    }
  }
  if (!std::isfinite(c.amplitude)) throw ConfigError("amplitude must be finite");
  if (c.modes < 1) throw ConfigError("modes must be at least 1");
  if (!(c.dt > 0.0) || !std::isfinite(c.dt)) throw ConfigError("dt must be positive");
  if (c.steps < 0) throw ConfigError("steps must be non-negative");
  if (c.write_every < 0 || c.imbalance_every < 0) throw ConfigError("intervals must be non-negative");
  if (c.restart_step < 0) throw ConfigError("restart step must be non-negative");
}

nlohmann::json to_json(const SimConfig& c) {
  nlohmann::json j;
  j["nx"] = c.nx;
  j["ny"] = c.ny;
  j["ranks"] = fmt::format("{}x{}", c.grid.px, c.grid.py);
  j["order"] = zmodel::to_string(c.order);
  j["solver"] = zmodel::to_string(c.resolved_solver());
  j["bc"] = to_string(c.bc);
  j["ic"] = to_string(c.ic);
  j["amplitude"] = c.amplitude;
  j["modes"] = c.modes;
  j["seed"] = c.seed;
  j["domain"] = {{"u", {c.u0, c.u1}}, {"v", {c.v0, c.v1}}};
  j["spatial_box"] = {{"lo", c.box.lo}, {"hi", c.box.hi}};
  j["cutoff"] = c.cutoff;
  j["atwood"] = c.physics.atwood;
  j["gravity"] = c.physics.gravity;
  j["mu"] = c.physics.mu;
  j["epsilon"] = c.physics.epsilon;
  j["dt"] = c.dt;
  j["steps"] = c.steps;
  j["fft_config"] = c.fft_config;
  j["write_every"] = c.write_every;
  j["imbalance_every"] = c.imbalance_every;
  j["scheduler"] = c.backend == transport::Backend::threads ? "threads" : "sequential";
  if (!c.restart.empty()) {
    j["restart"] = c.restart;
    j["restart_step"] = c.restart_step;
  }
  return j;
}

}  // namespace zbench::driver
