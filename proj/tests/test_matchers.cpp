#include <algorithm>
#include <set>

#include "doctest.h"
#include "smm/analysis.hpp"
#include "smm/errors.hpp"
#include "smm/matchers.hpp"

using namespace smm;

namespace {

std::vector<Edge> edges(std::initializer_list<std::pair<std::uint32_t, std::uint32_t>> list) {
  std::vector<Edge> out;
  for (auto [a, b] : list) out.emplace_back(a, b);
  std::sort(out.begin(), out.end());
  return out;
}

MarkedConfig interval_marks(std::vector<double> xs, double extent, int degree) {
  return with_constant_degree(PointConfig(Topology::interval(extent), std::move(xs)), degree);
}

}  // namespace

TEST_CASE("scheme names") {
  for (Scheme s : {Scheme::Stable, Scheme::RandomDirection, Scheme::Core, Scheme::CoreFast, Scheme::Iterated,
                   Scheme::Example1, Scheme::Example2})
    CHECK(parse_scheme(to_string(s)) == s);
  CHECK(parse_scheme("directed") == Scheme::RandomDirection);
  CHECK_THROWS_AS(parse_scheme("greedy"), ArgumentError);
}

TEST_CASE("stable: two points with one stub") {
  const auto m = stable_multimatch(interval_marks({0, 1}, 2, 1));
  CHECK(m.edges == edges({{0, 1}}));
  CHECK(m.total_leftover() == 0);
}

TEST_CASE("stable: hand-executed four-point instance") {
  const auto marked = interval_marks({0, 1, 3, 6.5}, 10, 2);
  const auto m = stable_multimatch(marked);
  CHECK(m.edges == edges({{0, 1}, {0, 2}, {1, 2}}));
  CHECK(m.leftover == std::vector<int>{0, 0, 0, 2});
  CHECK(m.rounds == 3);
  CHECK_NOTHROW(check_matching(m, marked));
}

TEST_CASE("stable: empty and single point") {
  CHECK(stable_multimatch(interval_marks({}, 1, 2)).edges.empty());
  const auto one = stable_multimatch(interval_marks({0.5}, 1, 2));
  CHECK(one.edges.empty());
  CHECK(one.leftover == std::vector<int>{2});
}

TEST_CASE("stable: cycle uses circular distance") {
  // 0 and 9 are at distance 1 across the seam.
  const auto marked = with_constant_degree(PointConfig(Topology::cycle(10), {0, 4, 9}), 1);
  const auto m = stable_multimatch(marked);
  CHECK(m.edges == edges({{0, 2}}));
  CHECK(m.leftover == std::vector<int>{0, 1, 0});
}

TEST_CASE("stable: exact ties resolve by index") {
  const auto m = stable_multimatch(interval_marks({0, 1, 2}, 3, 1));
  CHECK(m.edges == edges({{0, 1}}));
  CHECK(m.leftover == std::vector<int>{0, 0, 1});
}

TEST_CASE("iterated: hand-executed four-point instance") {
  const auto marked = interval_marks({0, 1, 3, 6.5}, 10, 2);
  const auto m = iterated_stable_match(marked);
  CHECK(m.edges == edges({{0, 1}, {0, 3}, {1, 2}, {2, 3}}));
  CHECK(m.total_leftover() == 0);
  CHECK(m.rounds == 2);
}

TEST_CASE("iterated equals stable when every degree is one") {
  Rng rng(21);
  for (int t = 0; t < 20; ++t) {
    const auto pts = sample_poisson_interval(200, rng);
    const auto marked = with_constant_degree(pts, 1);
    CHECK(iterated_stable_match(marked).edges == stable_multimatch(marked).edges);
  }
}

TEST_CASE("random direction: hand-executed instance") {
  MarkedConfig marked = interval_marks({0, 1, 3, 6}, 10, 2);
  marked.rights = std::vector<int>{1, 0, 2, 0};
  const auto m = random_direction_match(marked);
  CHECK(m.edges == edges({{0, 1}, {2, 3}}));
  REQUIRE(m.leftover_right);
  REQUIRE(m.leftover_left);
  CHECK(*m.leftover_right == std::vector<int>{0, 0, 1, 0});
  CHECK(*m.leftover_left == std::vector<int>{1, 1, 0, 1});
  CHECK(m.rounds == 1);
  CHECK_NOTHROW(check_matching(m, marked));
}

TEST_CASE("random direction: all stubs pointing right gives no edges") {
  MarkedConfig marked = interval_marks({0, 1, 3, 6}, 10, 2);
  marked.rights = std::vector<int>{2, 2, 2, 2};
  CHECK(random_direction_match(marked).edges.empty());
}

TEST_CASE("random direction: argument errors") {
  CHECK_THROWS_AS(random_direction_match(interval_marks({0, 1}, 2, 2)), ArgumentError);
  MarkedConfig cyc = with_constant_degree(PointConfig(Topology::cycle(10), {0, 1}), 2);
  cyc.rights = std::vector<int>{1, 1};
  CHECK_THROWS_AS(random_direction_match(cyc), ArgumentError);
}

TEST_CASE("core: hand-executed instances") {
  const auto tri = interval_marks({0.4, 0.46, 0.5}, 1, 2);
  for (const Matching& m : {core_match(tri), core_match_fast(tri)}) {
    CHECK(m.edges == edges({{0, 1}, {0, 2}, {1, 2}}));
    CHECK(m.total_leftover() == 0);
  }
  const auto far = interval_marks({0.1, 0.9}, 1, 2);
  CHECK(core_match(far).edges.empty());
  CHECK(core_match_fast(far).edges.empty());
  CHECK(core_match(far).leftover == std::vector<int>{2, 2});
  CHECK(core_match(interval_marks({}, 1, 2)).edges.empty());
  CHECK(core_match_fast(interval_marks({}, 1, 2)).edges.empty());
}

TEST_CASE("core: argument errors and dispatch") {
  const auto cyc = with_constant_degree(PointConfig(Topology::cycle(10), {0, 1}), 2);
  CHECK_THROWS_AS(core_match(cyc), ArgumentError);
  const auto three = interval_marks({1, 2, 3}, 10, 3);
  CHECK_THROWS_AS(core_match_fast(three), ArgumentError);
  CHECK(run_scheme(Scheme::CoreFast, three).edges == core_match(three).edges);
}

TEST_CASE("core window ignores points outside") {
  const auto marked = interval_marks({0.5, 1.4, 1.46, 1.5, 2.7}, 3, 2);
  const auto m = core_match_window(marked, 1.0, 2.0);
  CHECK(m.edges == edges({{1, 2}, {1, 3}, {2, 3}}));
  CHECK(m.leftover[0] == 2);
  CHECK(m.leftover[4] == 2);
  CHECK_THROWS_AS(core_match_window(marked, 2.0, 1.0), ArgumentError);
}

TEST_CASE("example 1: interior points are birds") {
  Rng rng(31);
  const auto pts = sample_poisson_interval(10000, rng);
  const auto marked = with_constant_degree(pts, 2);
  const auto m = example1_scheme(marked);
  CHECK_NOTHROW(check_matching(m, marked));
  REQUIRE(m.rights);
  for (int r : *m.rights) CHECK(r == 1);

  // Count right-edges and left-edges per point from the realised edges.
  std::vector<int> right(pts.size(), 0), left(pts.size(), 0);
  for (const Edge& e : m.edges) {
    ++right[e.u];
    ++left[e.v];
  }
  // Every point whose stubs are both used is a bird. On a finite window a
  // few interior points keep a stub: each new record in the nesting depth of
  // the first-round edges strands one left stub.
  for (std::size_t i = 0; i < pts.size(); ++i) {
    CHECK(right[i] <= 1);
    CHECK(left[i] <= 1);
    CHECK(right[i] + left[i] + (*m.leftover_right)[i] + (*m.leftover_left)[i] == 2);
  }
  const auto interior = trimmed_points(pts, default_margin(pts));
  std::size_t birds = 0;
  for (auto i : interior) birds += (right[i] == 1 && left[i] == 1) ? 1 : 0;
  CHECK(static_cast<double>(birds) >= 0.999 * static_cast<double>(interior.size()));
  CHECK_THROWS_AS(example1_scheme(with_constant_degree(PointConfig(Topology::cycle(10), {1, 2}), 2)),
                  ArgumentError);
  CHECK_THROWS_AS(example1_scheme(interval_marks({1, 2}, 10, 3)), ArgumentError);
}

TEST_CASE("example 2: groups of at least three closed into cycles") {
  Rng rng(32);
  for (Topology topo : {Topology::interval(20000), Topology::cycle(20000)}) {
    const auto pts = topo.is_cycle() ? sample_uniform_cycle(20000, 20000, rng) : sample_poisson_interval(20000, rng);
    const auto marked = with_constant_degree(pts, 2);
    const auto m = example2_scheme(marked);
    CHECK_NOTHROW(check_matching(m, marked));
    const auto comps = components(m);
    const auto deg = m.degrees();
    for (const auto& c : comps.components) {
      if (c.size() == 1 && deg[c[0]] == 0) continue;
      CHECK(c.size() >= 3);
      for (auto v : c) CHECK(deg[v] == 2);
    }
  }
}

TEST_CASE("determinism: identical inputs give identical matchings") {
  for (Scheme s : {Scheme::Stable, Scheme::RandomDirection, Scheme::Core, Scheme::CoreFast, Scheme::Iterated,
                   Scheme::Example1, Scheme::Example2}) {
    Rng a(77), b(77);
    auto ma = assign_directions(with_constant_degree(sample_poisson_interval(300, a), 2), a);
    auto mb = assign_directions(with_constant_degree(sample_poisson_interval(300, b), 2), b);
    const auto x = run_scheme(s, ma);
    const auto y = run_scheme(s, mb);
    CHECK(x.edges == y.edges);
    CHECK(x.leftover == y.leftover);
    CHECK(x.rounds == y.rounds);
  }
}

TEST_CASE("check_matching rejects broken matchings") {
  const auto marked = interval_marks({0, 1, 2}, 3, 1);
  Matching m = stable_multimatch(marked);
  Matching loop = m;
  loop.edges.push_back(Edge{});
  loop.edges.back().u = 2;
  loop.edges.back().v = 2;
  CHECK_THROWS_AS(check_matching(loop, marked), InternalError);
  Matching wrong = m;
  wrong.leftover[2] = 0;
  CHECK_THROWS_AS(check_matching(wrong, marked), InternalError);
  Matching dup = m;
  dup.edges.push_back(dup.edges.front());
  CHECK_THROWS_AS(check_matching(dup, marked), InternalError);
}
