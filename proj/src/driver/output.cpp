#include "zbench/driver/output.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "zbench/common.hpp"

namespace zbench::driver {

namespace {

struct NodeRecord {
  std::int32_t i, j;
  double v[5];
};

}  // namespace

GlobalState gather_state(transport::Comm& comm, const mesh::SurfaceMesh& mesh,
                         const mesh::SurfaceField& field) {
  std::vector<NodeRecord> mine;
  const auto& b = mesh.owned();
  mine.reserve(b.count());
  for (int i = b.i.begin; i < b.i.end; ++i) {
    for (int j = b.j.begin; j < b.j.end; ++j) {
      mine.push_back({i, j,
                      {field.position(0, i, j), field.position(1, i, j), field.position(2, i, j),
                       field.vorticity(0, i, j), field.vorticity(1, i, j)}});
    }
  }
  std::vector<transport::Outgoing> sends;
  if (comm.rank() != 0) sends.push_back({0, transport::pack<NodeRecord>(mine)});
  auto inbox = comm.exchange(std::move(sends), transport::Pattern::point_to_point);
  GlobalState g;
  if (comm.rank() != 0) return g;

  g.nx = mesh.nx();
  g.ny = mesh.ny();
  const std::size_t n = static_cast<std::size_t>(g.nx) * g.ny;
  for (auto* v : {&g.x, &g.y, &g.z, &g.w1, &g.w2}) v->assign(n, 0.0);
  auto place = [&](const NodeRecord& r) {
    const auto k = g.at(r.i, r.j);
    g.x[k] = r.v[0];
    g.y[k] = r.v[1];
    g.z[k] = r.v[2];
    g.w1[k] = r.v[3];
    g.w2[k] = r.v[4];
  };
  for (const auto& r : mine) place(r);
  for (const auto& msg : inbox) {
    for (const auto& r : transport::unpack<NodeRecord>(msg.payload)) place(r);
  }
  return g;
}

void scatter_state(transport::Comm& comm, const mesh::SurfaceMesh& mesh, const GlobalState& state,
                   mesh::SurfaceField& field) {
  if (state.nx != mesh.nx() || state.ny != mesh.ny()) {
    throw ConfigError(fmt::format("state is {}x{}, mesh is {}x{}", state.nx, state.ny, mesh.nx(), mesh.ny()));
  }
  const auto& b = mesh.owned();
  for (int i = b.i.begin; i < b.i.end; ++i) {
    for (int j = b.j.begin; j < b.j.end; ++j) {
      const auto k = state.at(i, j);
      field.position(0, i, j) = state.x[k];
      field.position(1, i, j) = state.y[k];
      field.position(2, i, j) = state.z[k];
      field.vorticity(0, i, j) = state.w1[k];
      field.vorticity(1, i, j) = state.w2[k];
    }
  }
  mesh.update_ghosts(comm, field);
}

std::string csv_name(int step) { return fmt::format("state_{:06d}.csv", step); }

void write_csv(const std::filesystem::path& path, const GlobalState& s) {
  std::ofstream os(path);
  if (!os) throw IoError(fmt::format("cannot open {} for writing", path.string()));
  std::string buf = "i,j,x,y,z,w1,w2\n";
  for (int i = 0; i < s.nx; ++i) {
    for (int j = 0; j < s.ny; ++j) {
      const auto k = s.at(i, j);
      fmt::format_to(std::back_inserter(buf), "{},{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", i, j,
                     s.x[k], s.y[k], s.z[k], s.w1[k], s.w2[k]);
    }
  }
  os << buf;
  if (!os) throw IoError(fmt::format("failed writing {}", path.string()));
}

GlobalState read_csv(const std::filesystem::path& path, int nx, int ny) {
  std::ifstream is(path);
  if (!is) throw IoError(fmt::format("cannot open {}", path.string()));
  std::string line;
  if (!std::getline(is, line) || line != "i,j,x,y,z,w1,w2") {
    throw IoError(fmt::format("{}: missing header i,j,x,y,z,w1,w2", path.string()));
  }
  GlobalState g;
  g.nx = nx;
  g.ny = ny;
  const std::size_t n = static_cast<std::size_t>(nx) * ny;
  for (auto* v : {&g.x, &g.y, &g.z, &g.w1, &g.w2}) v->assign(n, 0.0);
  std::vector<char> seen(n, 0);
  int row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() != 7) throw IoError(fmt::format("{}:{}: expected 7 columns", path.string(), row));
    int i = 0, j = 0;
    double v[5];
    bool ok = std::from_chars(cells[0].data(), cells[0].data() + cells[0].size(), i).ec == std::errc() &&
              std::from_chars(cells[1].data(), cells[1].data() + cells[1].size(), j).ec == std::errc();
    for (int c = 0; c < 5 && ok; ++c) {
      const auto& t = cells[2 + c];
      ok = std::from_chars(t.data(), t.data() + t.size(), v[c]).ec == std::errc();
    }
    if (!ok || i < 0 || i >= nx || j < 0 || j >= ny) {
      throw IoError(fmt::format("{}:{}: bad row '{}'", path.string(), row, line));
    }
    const auto k = g.at(i, j);
    g.x[k] = v[0];
    g.y[k] = v[1];
    g.z[k] = v[2];
    g.w1[k] = v[3];
    g.w2[k] = v[4];
    seen[k] = 1;
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (!seen[k]) {
      throw IoError(fmt::format("{}: node ({}, {}) missing", path.string(), k / ny, k % ny));
    }
  }
  return g;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& doc) {
  std::ofstream os(path);
  if (!os) throw IoError(fmt::format("cannot open {} for writing", path.string()));
  os << doc.dump(2) << '\n';
  if (!os) throw IoError(fmt::format("failed writing {}", path.string()));
}

}  // namespace zbench::driver
