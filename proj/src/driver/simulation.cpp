#include "zbench/driver/simulation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include <fmt/format.h>

#include "zbench/common.hpp"
#include "zbench/driver/rocket_rig.hpp"
#include "zbench/timeint/rk3.hpp"

namespace zbench::driver {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

ImbalanceReport imbalance_report(transport::Comm& comm, const mesh::SurfaceMesh& mesh,
                                 const mesh::SurfaceField& field, const br::SpatialMesh& smesh,
                                 int step) {
  std::vector<br::BRNode> nodes;
  const auto& b = mesh.owned();
  for (int i = b.i.begin; i < b.i.end; ++i) {
    for (int j = b.j.begin; j < b.j.end; ++j) {
      nodes.push_back({{field.position(0, i, j), field.position(1, i, j), field.position(2, i, j)},
                       {},
                       static_cast<std::int64_t>(i) * mesh.ny() + j});
    }
  }
  const auto owned = br::migrate_to_spatial(comm, smesh, nodes);
  std::vector<double> counts(comm.size(), 0.0);
  counts[comm.rank()] = static_cast<double>(owned.size());
  counts = comm.all_reduce(counts, transport::ReduceOp::sum);

  ImbalanceReport r;
  r.step = step;
  double total = 0.0;
  for (double c : counts) total += c;
  for (double c : counts) r.fractions.push_back(c / total);
  r.min = *std::min_element(r.fractions.begin(), r.fractions.end());
  r.max = *std::max_element(r.fractions.begin(), r.fractions.end());
  r.mean = 1.0 / comm.size();
  r.ratio = r.max / r.mean;
  return r;
}

std::string run_id(const SimConfig& cfg) {
  // FNV-1a over the deck echo, so identical decks share an id.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : to_json(cfg).dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

namespace {

struct RankOutput {
  GlobalState initial;
  GlobalState final_state;
  std::vector<StepMetrics> metrics;
  std::vector<ImbalanceReport> imbalance;
};

double max_abs_z3(transport::Comm& comm, const mesh::SurfaceMesh& mesh, const mesh::SurfaceField& f) {
  double m = 0.0;
  const auto& b = mesh.owned();
  for (int i = b.i.begin; i < b.i.end; ++i) {
    for (int j = b.j.begin; j < b.j.end; ++j) m = std::max(m, std::abs(f.position(2, i, j)));
  }
  return comm.all_reduce(m, transport::ReduceOp::max);
}

}  // namespace

RunResult run(const SimConfig& cfg) {
  validate(cfg);
  GlobalState restart;
  if (!cfg.restart.empty()) restart = read_csv(cfg.restart, cfg.nx, cfg.ny);
  const fs::path out = cfg.out_dir;
  if (!out.empty()) {
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec || !fs::is_directory(out)) {
      throw IoError(fmt::format("cannot create output directory {}: {}", out.string(), ec.message()));
    }
  }

  const auto spec = cfg.mesh_spec();
  const auto model_cfg = cfg.model_config();
  const auto start = Clock::now();

  auto spawned = transport::spawn_ranks(cfg.run_options(), [&](transport::Comm& comm) {
    const mesh::SurfaceMesh mesh(spec, comm.grid(), comm.rank());
    const zmodel::ZModel model(mesh, model_cfg);
    const timeint::TimeIntegrator integrator(model);
    const br::SpatialMesh smesh(cfg.box, comm.grid());
    const bool root = comm.rank() == 0;

    mesh::SurfaceField field = mesh.make_surface();
    if (cfg.restart.empty()) {
      field = init_rocket_rig(comm, mesh, cfg);
    } else {
      scatter_state(comm, mesh, restart, field);
    }
    timeint::TimeState ts{cfg.restart_step, cfg.restart_step * cfg.dt, cfg.dt};

    RankOutput o;
    o.initial = gather_state(comm, mesh, field);
    auto write = [&](const GlobalState& s, int step) {
      if (root && !out.empty()) write_csv(out / csv_name(step), s);
    };
    write(o.initial, static_cast<int>(ts.step));
    auto report = [&](int step) {
      if (cfg.imbalance_every > 0 && step % cfg.imbalance_every == 0) {
        o.imbalance.push_back(imbalance_report(comm, mesh, field, smesh, step));
      }
    };
    report(static_cast<int>(ts.step));

    bool final_written = true;
    for (int s = 0; s < cfg.steps; ++s) {
      const auto t0 = Clock::now();
      try {
        integrator.step(comm, field, ts);
      } catch (const NumericalError& e) {
        if (std::string_view(e.what()).find(" on rank ") != std::string_view::npos) throw;
        throw NumericalError(fmt::format("{} (step {} on rank {})", e.what(), ts.step + 1, comm.rank()));
      } catch (const ConfigError&) {
        throw;
      } catch (const transport::TransportError&) {
        throw;
      } catch (const std::exception& e) {
        throw std::runtime_error(fmt::format("rank {}, step {}: {}", comm.rank(), ts.step + 1, e.what()));
      }
      const double wall = std::chrono::duration<double>(Clock::now() - t0).count();
      const int step = static_cast<int>(ts.step);
      o.metrics.push_back({step, ts.t, wall, max_abs_z3(comm, mesh, field)});
      final_written = false;
      if (cfg.write_every > 0 && step % cfg.write_every == 0) {
        write(gather_state(comm, mesh, field), step);
        final_written = true;
      }
      report(step);
    }
    o.final_state = cfg.steps == 0 ? o.initial : gather_state(comm, mesh, field);
    if (!final_written) write(o.final_state, static_cast<int>(ts.step));
    return o;
  });

  RunResult r;
  r.run_id = run_id(cfg);
  r.wall_s = std::chrono::duration<double>(Clock::now() - start).count();
  auto& root = spawned.results.front();
  r.initial = std::move(root.initial);
  r.final_state = std::move(root.final_state);
  r.metrics = std::move(root.metrics);
  r.imbalance = std::move(root.imbalance);
  r.trace = std::move(spawned.trace);

  if (!out.empty()) {
    auto meta = nlohmann::json{{"run_id", r.run_id}, {"deck", to_json(cfg)},
                               {"columns", {"i", "j", "x", "y", "z", "w1", "w2"}}};
    write_json(out / "meta.json", meta);
    write_json(out / "trace.json", r.trace.to_json(r.run_id, cfg.trace_events));
    write_json(out / "metrics.json", metrics_json(r));
  }
  return r;
}

nlohmann::json metrics_json(const RunResult& r) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& m : r.metrics) {
    steps.push_back({{"step", m.step}, {"t", m.t}, {"wall_s", m.wall_s}, {"max_abs_z3", m.max_abs_z3}});
  }
  nlohmann::json imb = nlohmann::json::array();
  for (const auto& rep : r.imbalance) {
    imb.push_back({{"step", rep.step},
                   {"fractions", rep.fractions},
                   {"min", rep.min},
                   {"max", rep.max},
                   {"mean", rep.mean},
                   {"max_over_mean", rep.ratio}});
  }
  return {{"run_id", r.run_id}, {"wall_s", r.wall_s}, {"steps", steps}, {"imbalance", imb}};
}

}  // namespace zbench::driver
