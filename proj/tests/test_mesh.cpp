#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "test_util.hpp"
#include "zbench/common.hpp"
#include "zbench/mesh/stencils.hpp"

using namespace zbench;
using namespace zbench::mesh;
using zbench::testing::hash_uniform;
using zbench::transport::Comm;
using zbench::transport::GridShape;
using zbench::transport::spawn_ranks;

namespace {

int floor_mod(int a, int b) { return ((a % b) + b) % b; }

void fill_random(const SurfaceMesh& m, NodeField& f, std::uint64_t seed) {
  const auto& b = m.owned();
  for (int c = 0; c < f.components(); ++c) {
    for (int i = b.i.begin; i < b.i.end; ++i) {
      for (int j = b.j.begin; j < b.j.end; ++j) f(c, i, j) = hash_uniform(seed, c, i, j);
    }
  }
}

}  // namespace

TEST_CASE("decompose") {
  SUBCASE("8x8 on 2x2") {
    auto boxes = decompose(8, 8, {2, 2});
    REQUIRE(boxes.size() == 4);
    for (const auto& b : boxes) {
      CHECK(b.i.size() == 4);
      CHECK(b.j.size() == 4);
    }
    CHECK(boxes[1] == Box2{{0, 4}, {4, 8}});
    CHECK(boxes[2] == Box2{{4, 8}, {0, 4}});
  }
  SUBCASE("identity") {
    auto boxes = decompose(8, 8, {1, 1});
    CHECK(boxes == std::vector<Box2>{{{0, 8}, {0, 8}}});
  }
  SUBCASE("10 on 4 splits 3,3,2,2") {
    auto r = split_balanced(10, 4);
    std::vector<int> sizes;
    for (auto& x : r) sizes.push_back(x.size());
    CHECK(sizes == std::vector<int>{3, 3, 2, 2});
  }
  SUBCASE("grid larger than mesh") { CHECK_THROWS_AS(decompose(4, 4, {8, 1}), ConfigError); }
  SUBCASE("tiling property") {
    for (int nx : {5, 9, 17, 33}) {
      for (GridShape g : {GridShape{1, 1}, GridShape{2, 3}, GridShape{4, 4}, GridShape{5, 1}}) {
        auto boxes = decompose(nx, nx + 3, g);
        std::vector<int> hits(nx * (nx + 3), 0);
        for (const auto& b : boxes) {
          for (int i = b.i.begin; i < b.i.end; ++i) {
            for (int j = b.j.begin; j < b.j.end; ++j) hits[i * (nx + 3) + j]++;
          }
        }
        for (int h : hits) CHECK(h == 1);
        int mn = nx, mx = 0;
        for (int p = 0; p < g.px; ++p) {
          mn = std::min(mn, boxes[p * g.py].i.size());
          mx = std::max(mx, boxes[p * g.py].i.size());
        }
        CHECK(mx - mn <= 1);
      }
    }
  }
}

TEST_CASE("periodic halo on one rank wraps columns and offsets positions") {
  MeshSpec spec{8, 8, -19, 19, -19, 19, BoundaryType::periodic};
  auto res = spawn_ranks(testing::ranks(1), [&](Comm& c) {
    SurfaceMesh m(spec, c.grid(), c.rank());
    auto f = m.make_surface();
    for (int i = 0; i < 8; ++i) {
      for (int j = 0; j < 8; ++j) {
        f.position(0, i, j) = m.u_at(i);
        f.position(1, i, j) = m.v_at(j);
        f.position(2, i, j) = 0.1 * i + 0.01 * j;
        f.vorticity(0, i, j) = i;
        f.vorticity(1, i, j) = j;
      }
    }
    m.update_ghosts(c, f);
    return f;
  });
  const auto& f = res.results[0];
  const double du = 38.0 / 8;
  for (int j = 0; j < 8; ++j) {
    CHECK(f.position(2, -1, j) == f.position(2, 7, j));
    CHECK(f.vorticity(0, -1, j) == 7.0);
    CHECK(f.position(0, -1, j) == doctest::Approx(-19.0 - du));
    CHECK(f.position(0, 8, j) == doctest::Approx(19.0));
    CHECK(f.position(0, 9, j) == doctest::Approx(19.0 + du));
  }
  CHECK(f.position(1, 3, -2) == doctest::Approx(-19.0 - 2 * du));
  CHECK(f.vorticity(1, 3, -2) == 6.0);
  CHECK(f.position(0, -2, -2) == doctest::Approx(-19.0 - 2 * du));
  CHECK(f.position(1, -2, -2) == doctest::Approx(-19.0 - 2 * du));
}

TEST_CASE("interior halo rows match neighbor boundary rows bitwise") {
  MeshSpec spec{8, 8, 0, 1, 0, 1, BoundaryType::free};
  auto res = spawn_ranks(testing::ranks(4), [&](Comm& c) {
    SurfaceMesh m(spec, c.grid(), c.rank());
    auto f = m.make_field(3);
    fill_random(m, f, 11);
    m.halo_exchange(c, f);
    return f;
  });
  const auto& r00 = res.results[0];
  const auto& r01 = res.results[1];
  for (int i = 0; i < 4; ++i) {
    for (int c = 0; c < 3; ++c) {
      CHECK(r00(c, i, 4) == r01(c, i, 4));
      CHECK(r00(c, i, 5) == r01(c, i, 5));
      CHECK(r01(c, i, 3) == r00(c, i, 3));
    }
  }
  // diagonal corner from rank (1,1)
  CHECK(res.results[0](0, 4, 4) == res.results[3](0, 4, 4));
  CHECK(res.results[0](2, 5, 5) == res.results[3](2, 5, 5));
}

TEST_CASE("halo exchange matches a serial gather oracle") {
  const int n = 64;
  for (auto bc : {BoundaryType::periodic, BoundaryType::free}) {
    for (GridShape g : {GridShape{2, 2}, GridShape{4, 2}, GridShape{3, 5}}) {
      MeshSpec spec{n, n, -1, 1, -1, 1, bc};
      auto res = spawn_ranks(testing::ranks(g), [&](Comm& c) {
        SurfaceMesh m(spec, c.grid(), c.rank());
        auto f = m.make_field(2);
        fill_random(m, f, 99);
        m.halo_exchange(c, f);
        return f;
      });
      for (const auto& f : res.results) {
        const Box2 a = f.allocated();
        for (int gi = a.i.begin; gi < a.i.end; ++gi) {
          for (int gj = a.j.begin; gj < a.j.end; ++gj) {
            bool inside = gi >= 0 && gi < n && gj >= 0 && gj < n;
            if (bc == BoundaryType::free && !inside) continue;
            int si = floor_mod(gi, n);
            int sj = floor_mod(gj, n);
            for (int c = 0; c < 2; ++c) REQUIRE(f(c, gi, gj) == hash_uniform(99, c, si, sj));
          }
        }
      }
    }
  }
}

TEST_CASE("halo exchange with blocks thinner than the halo") {
  MeshSpec spec{8, 6, 0, 1, 0, 1, BoundaryType::periodic};
  auto res = spawn_ranks(testing::ranks(GridShape{8, 3}), [&](Comm& c) {
    SurfaceMesh m(spec, c.grid(), c.rank());
    auto f = m.make_field(1);
    fill_random(m, f, 5);
    m.halo_exchange(c, f);
    return f;
  });
  for (const auto& f : res.results) {
    const Box2 a = f.allocated();
    for (int gi = a.i.begin; gi < a.i.end; ++gi) {
      for (int gj = a.j.begin; gj < a.j.end; ++gj) {
        CHECK(f(0, gi, gj) == hash_uniform(5, 0, floor_mod(gi, 8), floor_mod(gj, 6)));
      }
    }
  }
}

TEST_CASE("halo exchange is idempotent and one message per neighbor") {
  MeshSpec spec{16, 16, 0, 1, 0, 1, BoundaryType::periodic};
  auto res = spawn_ranks(testing::ranks(GridShape{3, 3}), [&](Comm& c) {
    SurfaceMesh m(spec, c.grid(), c.rank());
    auto f = m.make_field(2);
    fill_random(m, f, 3);
    m.halo_exchange(c, f);
    auto once = f;
    m.halo_exchange(c, f);
    CHECK(f == once);
    return 0;
  });
  // 3x3 periodic grid: every rank has 8 distinct neighbors, two exchanges.
  CHECK(res.trace.total(transport::Pattern::halo).messages_sent == 9 * 8 * 2);
}

TEST_CASE("periodic correction leaves vorticity and owned nodes untouched") {
  MeshSpec spec{12, 12, -3, 3, -3, 3, BoundaryType::periodic};
  spawn_ranks(testing::ranks(4), [&](Comm& c) {
    SurfaceMesh m(spec, c.grid(), c.rank());
    auto f = m.make_surface();
    fill_random(m, f.position, 1);
    fill_random(m, f.vorticity, 2);
    m.halo_exchange(c, {&f.position, &f.vorticity});
    auto before = f;
    BoundaryCondition(m).apply(f);
    CHECK(f.vorticity == before.vorticity);
    const Box2 a = f.position.allocated();
    for (int gi = a.i.begin; gi < a.i.end; ++gi) {
      for (int gj = a.j.begin; gj < a.j.end; ++gj) {
        if (m.owned().contains(gi, gj)) {
          for (int k = 0; k < 3; ++k) CHECK(f.position(k, gi, gj) == before.position(k, gi, gj));
        }
        CHECK(f.position(2, gi, gj) == before.position(2, gi, gj));
      }
    }
  });
}

TEST_CASE("free boundary linear extrapolation") {
  MeshSpec spec{6, 5, 0, 1, 0, 1, BoundaryType::free};
  auto res = spawn_ranks(testing::ranks(GridShape{2, 1}), [&](Comm& c) {
    SurfaceMesh m(spec, c.grid(), c.rank());
    auto f = m.make_surface();
    const auto& b = m.owned();
    for (int i = b.i.begin; i < b.i.end; ++i) {
      for (int j = b.j.begin; j < b.j.end; ++j) {
        f.position(0, i, j) = 1.0 + 2.0 * i - 3.0 * j;
        f.position(1, i, j) = 7.0;
        f.position(2, i, j) = i * i;
        f.vorticity(0, i, j) = hash_uniform(4, i, j);
        f.vorticity(1, i, j) = -4.5;
      }
    }
    m.update_ghosts(c, f);
    return f;
  });
  const auto& f0 = res.results[0];
  const auto& f1 = res.results[1];
  // ghost at -1 = 2 p0 - p1
  for (int j = 0; j < 5; ++j) {
    CHECK(f0.position(2, -1, j) == doctest::Approx(2 * 0 - 1));
    CHECK(f0.vorticity(0, -1, j) ==
          doctest::Approx(2 * hash_uniform(4, 0, j) - hash_uniform(4, 1, j)));
    CHECK(f1.position(2, 6, j) == doctest::Approx(2 * 25 - 16));
  }
  // linear fields extrapolate exactly, corners included; constants stay constant
  for (const auto* f : {&f0, &f1}) {
    const Box2 a = f->position.allocated();
    for (int gi = a.i.begin; gi < a.i.end; ++gi) {
      for (int gj = a.j.begin; gj < a.j.end; ++gj) {
        CHECK(f->position(0, gi, gj) == doctest::Approx(1.0 + 2.0 * gi - 3.0 * gj));
        CHECK(f->position(1, gi, gj) == 7.0);
        CHECK(f->vorticity(1, gi, gj) == -4.5);
      }
    }
  }
}

TEST_CASE("stencils on a flat sheet") {
  for (auto bc : {BoundaryType::periodic, BoundaryType::free}) {
    MeshSpec spec{16, 16, -2, 2, -2, 2, bc};
    spawn_ranks(testing::ranks(4), [&](Comm& c) {
      SurfaceMesh m(spec, c.grid(), c.rank());
      auto f = m.make_surface();
      const auto& b = m.owned();
      for (int i = b.i.begin; i < b.i.end; ++i) {
        for (int j = b.j.begin; j < b.j.end; ++j) {
          f.position(0, i, j) = m.u_at(i);
          f.position(1, i, j) = m.v_at(j);
        }
      }
      m.update_ghosts(c, f);
      auto g = surface_stencils(m, f);
      for (int i = b.i.begin; i < b.i.end; ++i) {
        for (int j = b.j.begin; j < b.j.end; ++j) {
          CHECK(g.du_z(0, i, j) == doctest::Approx(1.0));
          CHECK(g.du_z(1, i, j) == doctest::Approx(0.0));
          CHECK(g.dv_z(1, i, j) == doctest::Approx(1.0));
          CHECK(g.normal(0, i, j) == doctest::Approx(0.0));
          CHECK(g.normal(1, i, j) == doctest::Approx(0.0));
          CHECK(g.normal(2, i, j) == doctest::Approx(1.0));
          for (int k = 0; k < 3; ++k) CHECK(std::abs(g.lap_z(k, i, j)) < 1e-12);
        }
      }
    });
  }
}

TEST_CASE("9-point Laplacian is exact on quadratics") {
  MeshSpec spec{10, 14, 0, 1, -1, 2, BoundaryType::free};
  spawn_ranks(testing::ranks(GridShape{2, 2}), [&](Comm& c) {
    SurfaceMesh m(spec, c.grid(), c.rank());
    auto f = m.make_field(3);
    const auto& b = m.owned();
    for (int i = b.i.begin; i < b.i.end; ++i) {
      for (int j = b.j.begin; j < b.j.end; ++j) {
        const double u = m.u_at(i);
        const double v = m.v_at(j);
        f(0, i, j) = u * u;
        f(1, i, j) = u * v + 3 * v * v;
        f(2, i, j) = 2 * u - v;
      }
    }
    m.halo_exchange(c, f);
    BoundaryCondition(m).extrapolate(f);
    auto lap = laplacian(m, f);
    // nodes whose 3x3 stencil is inside the domain; boundary nodes see linear ghosts
    for (int i = std::max(b.i.begin, 1); i < std::min(b.i.end, 9); ++i) {
      for (int j = std::max(b.j.begin, 1); j < std::min(b.j.end, 13); ++j) {
        CHECK(lap(0, i, j) == doctest::Approx(2.0).epsilon(1e-9));
        CHECK(lap(1, i, j) == doctest::Approx(6.0).epsilon(1e-9));
        CHECK(std::abs(lap(2, i, j)) < 1e-9);
      }
    }
  });
}

TEST_CASE("equal-spacing Laplacian matches the classic 9-point weights") {
  MeshSpec spec{8, 8, 0, 8, 0, 8, BoundaryType::periodic};
  spawn_ranks(testing::ranks(1), [&](Comm& c) {
    SurfaceMesh m(spec, c.grid(), c.rank());
    auto f = m.make_field(1);
    fill_random(m, f, 8);
    m.halo_exchange(c, f);
    auto lap = laplacian(m, f);
    for (int i = 0; i < 8; ++i) {
      for (int j = 0; j < 8; ++j) {
        double edges = f(0, i + 1, j) + f(0, i - 1, j) + f(0, i, j + 1) + f(0, i, j - 1);
        double corners =
            f(0, i + 1, j + 1) + f(0, i - 1, j + 1) + f(0, i + 1, j - 1) + f(0, i - 1, j - 1);
        double classic = (4 * edges + corners - 20 * f(0, i, j)) / 6.0;
        CHECK(lap(0, i, j) == doctest::Approx(classic).epsilon(1e-12));
      }
    }
  });
}

namespace {

// Dense serial recomputation of the stencils on the gathered global mesh.
struct SerialStencil {
  const testing::Gathered& z;
  double du, dv;
  int nx, ny;
  double at(int c, int i, int j) const {
    return z.at(c, floor_mod(i, nx), floor_mod(j, ny));
  }
  double d_u(int c, int i, int j) const { return (at(c, i + 1, j) - at(c, i - 1, j)) / (2 * du); }
  double d_v(int c, int i, int j) const { return (at(c, i, j + 1) - at(c, i, j - 1)) / (2 * dv); }
  double lap(int c, int i, int j) const {
    auto uu = [&](int jj) { return (at(c, i + 1, jj) - 2 * at(c, i, jj) + at(c, i - 1, jj)) / (du * du); };
    auto vv = [&](int ii) { return (at(c, ii, j + 1) - 2 * at(c, ii, j) + at(c, ii, j - 1)) / (dv * dv); };
    return (uu(j - 1) + 10 * uu(j) + uu(j + 1)) / 12 + (vv(i - 1) + 10 * vv(i) + vv(i + 1)) / 12;
  }
};

}  // namespace

TEST_CASE("stencils match a dense serial recomputation and are decomposition independent") {
  const int n = 24;
  MeshSpec spec{n, n, 0, 1, 0, 1.5, BoundaryType::periodic};
  auto run = [&](GridShape g) {
    return spawn_ranks(testing::ranks(g), [&](Comm& c) {
      SurfaceMesh m(spec, c.grid(), c.rank());
      auto f = m.make_field(3);
      const auto& b = m.owned();
      for (int i = b.i.begin; i < b.i.end; ++i) {
        for (int j = b.j.begin; j < b.j.end; ++j) {
          const double u = 2 * M_PI * i / n;
          const double v = 2 * M_PI * j / n;
          f(0, i, j) = std::sin(u) * std::cos(2 * v);
          f(1, i, j) = std::cos(3 * u + v);
          f(2, i, j) = 0.3 * std::sin(u - v);
        }
      }
      m.halo_exchange(c, f);
      const auto before = c.trace().counters();
      SurfaceField s{f, m.make_field(2)};
      auto g = surface_stencils(m, s);
      CHECK(c.trace().counters() == before);
      return g;
    });
  };
  auto one = run({1, 1});
  auto four = run({2, 2});
  auto six = run({3, 2});

  auto pick = [](auto& res, auto member) {
    std::vector<NodeField> v;
    for (auto& g : res.results) v.push_back(g.*member);
    return v;
  };
  for (auto member : {&SurfaceGeometry::du_z, &SurfaceGeometry::dv_z, &SurfaceGeometry::normal,
                      &SurfaceGeometry::lap_z}) {
    auto a = testing::gather(n, n, pick(one, member));
    auto b = testing::gather(n, n, pick(four, member));
    auto c = testing::gather(n, n, pick(six, member));
    CHECK(testing::max_abs_diff(a, b) == 0.0);
    CHECK(testing::max_abs_diff(a, c) == 0.0);
  }

  // serial oracle built from the gathered owned positions
  std::vector<NodeField> pos;
  for (int r = 0; r < 1; ++r) {
    SurfaceMesh m(spec, {1, 1}, 0);
    auto f = m.make_field(3);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        f(0, i, j) = std::sin(2 * M_PI * i / n) * std::cos(2 * 2 * M_PI * j / n);
        f(1, i, j) = std::cos(3 * 2 * M_PI * i / n + 2 * M_PI * j / n);
        f(2, i, j) = 0.3 * std::sin(2 * M_PI * i / n - 2 * M_PI * j / n);
      }
    }
    pos.push_back(f);
  }
  auto z = testing::gather(n, n, pos);
  SerialStencil ref{z, 1.0 / n, 1.5 / n, n, n};
  auto du_z = testing::gather(n, n, pick(four, &SurfaceGeometry::du_z));
  auto dv_z = testing::gather(n, n, pick(four, &SurfaceGeometry::dv_z));
  auto nrm = testing::gather(n, n, pick(four, &SurfaceGeometry::normal));
  auto lap = testing::gather(n, n, pick(four, &SurfaceGeometry::lap_z));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int c = 0; c < 3; ++c) {
        CHECK(du_z.at(c, i, j) == doctest::Approx(ref.d_u(c, i, j)).epsilon(1e-12));
        CHECK(dv_z.at(c, i, j) == doctest::Approx(ref.d_v(c, i, j)).epsilon(1e-12));
        CHECK(lap.at(c, i, j) == doctest::Approx(ref.lap(c, i, j)).epsilon(1e-12).scale(n * n));
        const int a = (c + 1) % 3, b = (c + 2) % 3;
        double cross = ref.d_u(a, i, j) * ref.d_v(b, i, j) - ref.d_u(b, i, j) * ref.d_v(a, i, j);
        CHECK(nrm.at(c, i, j) == doctest::Approx(cross).epsilon(1e-12));
      }
    }
  }
}
