#include "smm/matchers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mutual_engine.hpp"
#include "smm/errors.hpp"

namespace smm {

using detail::Candidate;
using detail::MutualClosestEngine;
using detail::Sentinel;

const char* to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::Stable: return "stable";
    case Scheme::RandomDirection: return "random_direction";
    case Scheme::Core: return "core";
    case Scheme::CoreFast: return "core_fast";
    case Scheme::Iterated: return "iterated";
    case Scheme::Example1: return "example1";
    case Scheme::Example2: return "example2";
  }
  return "unknown";
}

Scheme parse_scheme(std::string_view name) {
  if (name == "stable") return Scheme::Stable;
  if (name == "random_direction" || name == "directed") return Scheme::RandomDirection;
  if (name == "core") return Scheme::Core;
  if (name == "core_fast") return Scheme::CoreFast;
  if (name == "iterated") return Scheme::Iterated;
  if (name == "example1") return Scheme::Example1;
  if (name == "example2") return Scheme::Example2;
  throw ArgumentError("unknown scheme '" + std::string(name) + "'");
}

std::size_t Matching::total_leftover() const {
  return std::accumulate(leftover.begin(), leftover.end(), std::size_t{0});
}

std::vector<int> Matching::degrees() const {
  std::vector<int> deg(n, 0);
  for (const Edge& e : edges) {
    ++deg[e.u];
    ++deg[e.v];
  }
  return deg;
}

bool Matching::has_edge(std::uint32_t a, std::uint32_t b) const {
  return std::binary_search(edges.begin(), edges.end(), Edge(a, b));
}

namespace {

void require_degrees(const MarkedConfig& marked) {
  marked.validate();
}

void require_constant_two(const MarkedConfig& marked, const char* who) {
  require_degrees(marked);
  for (int d : marked.degrees)
    if (d != 2) throw ArgumentError(std::string(who) + " needs D = 2 at every point");
}

std::vector<std::uint32_t> all_indices(std::size_t n) {
  std::vector<std::uint32_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0u);
  return idx;
}

Matching finish(Scheme scheme, const MarkedConfig& marked, std::vector<Edge> edges,
                std::size_t rounds) {
  std::sort(edges.begin(), edges.end());
  Matching m;
  m.scheme = scheme;
  m.n = marked.size();
  m.edges = std::move(edges);
  m.rounds = rounds;
  m.leftover = marked.degrees;
  for (const Edge& e : m.edges) {
    --m.leftover[e.u];
    --m.leftover[e.v];
  }
  return m;
}

// Right-stubs matched to left-stubs in passes of increasing index
// separation. `rem_right`/`rem_left` are consumed in place.
std::size_t directed_passes(std::size_t n, std::vector<int>& rem_right, std::vector<int>& rem_left,
                            std::vector<Edge>& out) {
  std::vector<std::uint32_t> active;
  for (std::uint32_t i = 0; i < n; ++i)
    if (rem_right[i] > 0) active.push_back(i);
  long long left_total = std::accumulate(rem_left.begin(), rem_left.end(), 0LL);

  std::size_t passes = 0;
  std::vector<std::uint32_t> keep;
  for (std::size_t s = 0; s + 1 < n && !active.empty() && left_total > 0; ++s) {
    ++passes;
    keep.clear();
    for (std::uint32_t i : active) {
      const std::size_t j = i + s + 1;
      if (j >= n) continue;
      if (rem_left[j] > 0) {
        out.emplace_back(i, static_cast<std::uint32_t>(j));
        --rem_right[i];
        --rem_left[j];
        --left_total;
      }
      if (rem_right[i] > 0 && j + 1 < n) keep.push_back(i);
    }
    active.swap(keep);
  }
  return passes;
}

}  // namespace

Matching stable_multimatch(const MarkedConfig& marked) {
  require_degrees(marked);
  const auto idx = all_indices(marked.size());
  MutualClosestEngine engine(marked.config, idx, marked.degrees, std::nullopt);
  std::vector<Edge> edges;
  const std::size_t rounds = engine.run(edges);
  return finish(Scheme::Stable, marked, std::move(edges), rounds);
}

Matching random_direction_match(const MarkedConfig& marked) {
  require_degrees(marked);
  if (!marked.has_rights()) throw ArgumentError("random_direction_match needs right-stub marks");
  if (marked.config.topology().is_cycle())
    throw ArgumentError("random_direction_match is defined on an interval only");
  const std::size_t n = marked.size();
  std::vector<int> rem_right = *marked.rights;
  std::vector<int> rem_left(n);
  for (std::size_t i = 0; i < n; ++i) rem_left[i] = marked.left(i);

  std::vector<Edge> edges;
  const std::size_t passes = directed_passes(n, rem_right, rem_left, edges);
  Matching m = finish(Scheme::RandomDirection, marked, std::move(edges), passes);
  m.leftover_right = std::move(rem_right);
  m.leftover_left = std::move(rem_left);
  m.rights = marked.rights;
  return m;
}

namespace {

std::vector<std::uint32_t> window_indices(const PointConfig& config, double a, double b) {
  const auto xs = config.positions();
  const auto lo = std::lower_bound(xs.begin(), xs.end(), a) - xs.begin();
  const auto hi = std::upper_bound(xs.begin(), xs.end(), b) - xs.begin();
  std::vector<std::uint32_t> idx;
  for (auto i = lo; i < hi; ++i) idx.push_back(static_cast<std::uint32_t>(i));
  return idx;
}

void require_interval(const MarkedConfig& marked, const char* who) {
  if (marked.config.topology().is_cycle())
    throw ArgumentError(std::string(who) + " is defined relative to a bounded interval, not a cycle");
}

Matching core_general(const MarkedConfig& marked, double a, double b) {
  const auto idx = window_indices(marked.config, a, b);
  std::vector<int> stubs(marked.size(), 0);
  for (std::uint32_t i : idx) stubs[i] = marked.degrees[i];
  MutualClosestEngine engine(marked.config, idx, std::move(stubs), Sentinel{a, b});
  std::vector<Edge> edges;
  const std::size_t rounds = engine.run(edges);
  return finish(Scheme::Core, marked, std::move(edges), rounds);
}

// Two-stub shortcut: with at most one existing edge per active point, the
// arrow of x targets one of its two nearest active neighbours on each side
// (or an endpoint), and mutual arrows only join active-adjacent points.
Matching core_fast(const MarkedConfig& marked, double a, double b) {
  const auto idx = window_indices(marked.config, a, b);
  const PointConfig& pts = marked.config;
  std::vector<int> stubs(marked.size(), 0);
  for (std::uint32_t i : idx) stubs[i] = 2;
  std::vector<Edge> edges;
  // At most one earlier edge per point that still has a stub.
  std::vector<std::int64_t> partner(marked.size(), -1);

  constexpr std::int64_t kLeftEnd = -1;
  constexpr std::int64_t kRightEnd = -3;
  std::vector<std::int64_t> active;
  std::vector<std::int64_t> arrow;
  std::size_t rounds = 0;
  for (;;) {
    active.assign({kLeftEnd, kLeftEnd});
    for (std::uint32_t i : idx)
      if (stubs[i] > 0) active.push_back(i);
    active.push_back(kRightEnd);
    active.push_back(kRightEnd);
    arrow.assign(active.size(), -1);

    auto where = [&](std::int64_t p) {
      if (p == kLeftEnd) return a;
      if (p == kRightEnd) return b;
      return pts[static_cast<std::size_t>(p)];
    };
    for (std::size_t j = 2; j + 2 < active.size(); ++j) {
      const std::int64_t x = active[j];
      const double px = where(x);
      Candidate best;
      std::size_t best_slot = 0;
      for (std::size_t k : {j - 2, j - 1, j + 1, j + 2}) {
        const std::int64_t y = active[k];
        const bool end = y < 0;
        if (!end && partner[static_cast<std::size_t>(x)] == y) continue;
        const Candidate c{end ? std::abs(px - where(y))
                              : pts.distance(static_cast<std::size_t>(x), static_cast<std::size_t>(y)),
                          end ? detail::kSentinelTarget : y};
        if (!best.valid() || c < best) {
          best = c;
          best_slot = k;
        }
      }
      if (best.valid()) arrow[j] = static_cast<std::int64_t>(best_slot);
    }

    bool added = false;
    for (std::size_t j = 2; j + 3 < active.size(); ++j) {
      if (arrow[j] == static_cast<std::int64_t>(j + 1) && arrow[j + 1] == static_cast<std::int64_t>(j)) {
        const auto x = static_cast<std::uint32_t>(active[j]);
        const auto y = static_cast<std::uint32_t>(active[j + 1]);
        edges.emplace_back(x, y);
        --stubs[x];
        --stubs[y];
        partner[x] = stubs[x] > 0 ? y : -1;
        partner[y] = stubs[y] > 0 ? x : -1;
        added = true;
      }
    }
    if (!added) break;
    ++rounds;
  }
  return finish(Scheme::CoreFast, marked, std::move(edges), rounds);
}

}  // namespace

Matching core_match(const MarkedConfig& marked) {
  require_degrees(marked);
  require_interval(marked, "core_match");
  return core_general(marked, 0.0, marked.config.topology().extent);
}

Matching core_match_fast(const MarkedConfig& marked) {
  require_constant_two(marked, "core_match_fast");
  require_interval(marked, "core_match_fast");
  return core_fast(marked, 0.0, marked.config.topology().extent);
}

Matching core_match_window(const MarkedConfig& marked, double a, double b) {
  require_degrees(marked);
  require_interval(marked, "core_match_window");
  if (!(a < b)) throw ArgumentError("core window needs a < b");
  const bool two = std::all_of(marked.degrees.begin(), marked.degrees.end(), [](int d) { return d == 2; });
  // Points outside the window keep all their stubs as leftovers.
  return two ? core_fast(marked, a, b) : core_general(marked, a, b);
}

Matching iterated_stable_match(const MarkedConfig& marked) {
  require_degrees(marked);
  const std::size_t n = marked.size();
  const auto idx = all_indices(n);
  const long long cap = std::accumulate(marked.degrees.begin(), marked.degrees.end(), 0LL);
  std::vector<int> remaining = marked.degrees;
  std::vector<Edge> edges;
  std::size_t rounds = 0;
  for (;;) {
    std::vector<int> one(n);
    for (std::size_t i = 0; i < n; ++i) one[i] = remaining[i] > 0 ? 1 : 0;
    MutualClosestEngine engine(marked.config, idx, std::move(one), std::nullopt);
    for (const Edge& e : edges) engine.forbid(e);
    std::vector<Edge> fresh;
    engine.run(fresh);
    if (fresh.empty()) break;
    if (static_cast<long long>(++rounds) > cap)
      throw InternalError("iterated stable matching exceeded its round cap");
    for (const Edge& e : fresh) {
      --remaining[e.u];
      --remaining[e.v];
      edges.push_back(e);
    }
  }
  return finish(Scheme::Iterated, marked, std::move(edges), rounds);
}

Matching example1_scheme(const MarkedConfig& marked) {
  require_constant_two(marked, "example1_scheme");
  require_interval(marked, "example1_scheme");
  const std::size_t n = marked.size();
  const auto idx = all_indices(n);

  MutualClosestEngine first(marked.config, idx, std::vector<int>(n, 1), std::nullopt);
  std::vector<Edge> edges;
  const std::size_t rounds = first.run(edges);

  // Second stub points away from the first edge. An unmatched point keeps
  // one stub in each direction.
  std::vector<int> rem_right(n, 1), rem_left(n, 1);
  for (const Edge& e : edges) {
    rem_right[e.u] = 0;  // u's first stub went right; second goes left
    rem_left[e.v] = 0;
  }
  std::vector<int> rights(n, 1);
  const std::size_t passes = directed_passes(n, rem_right, rem_left, edges);

  Matching m = finish(Scheme::Example1, marked, std::move(edges), rounds + passes);
  m.leftover_right = std::move(rem_right);
  m.leftover_left = std::move(rem_left);
  m.rights = std::move(rights);
  return m;
}

Matching example2_scheme(const MarkedConfig& marked) {
  require_constant_two(marked, "example2_scheme");
  const PointConfig& pts = marked.config;
  const std::size_t n = pts.size();
  const bool cycle = pts.topology().is_cycle();
  std::vector<Edge> edges;
  if (n < 3) return finish(Scheme::Example2, marked, std::move(edges), 0);

  auto next = [&](std::size_t i) -> std::size_t { return i + 1 < n ? i + 1 : (cycle ? 0 : n); };
  auto prev = [&](std::size_t i) -> std::size_t { return i > 0 ? i - 1 : (cycle ? n - 1 : n); };

  std::vector<char> seed(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t l = prev(i), r = next(i);
    seed[i] = (l != n && pts.distance(i, l) <= 1.0) || (r != n && pts.distance(i, r) <= 1.0);
  }

  // A seed is good when at least two non-seeds follow it before the next
  // seed. On an interval a seed with no later seed cannot be judged.
  std::vector<char> good(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!seed[i]) continue;
    std::size_t gap = 0;
    std::size_t j = next(i);
    bool found = false;
    for (std::size_t steps = 0; j != n && steps < n; ++steps, j = next(j)) {
      if (seed[j]) {
        found = true;
        break;
      }
      ++gap;
    }
    good[i] = found && gap >= 2;
  }

  std::vector<std::size_t> starts;
  for (std::size_t i = 0; i < n; ++i)
    if (good[i]) starts.push_back(i);

  auto close_group = [&](const std::vector<std::uint32_t>& g) {
    for (std::size_t k = 0; k + 1 < g.size(); ++k) edges.emplace_back(g[k], g[k + 1]);
    if (g.size() >= 3) edges.emplace_back(g.front(), g.back());
  };

  const std::size_t groups = cycle ? starts.size() : (starts.empty() ? 0 : starts.size() - 1);
  for (std::size_t k = 0; k < groups; ++k) {
    const std::size_t from = starts[k];
    const std::size_t to = starts[(k + 1) % starts.size()];
    std::vector<std::uint32_t> g;
    std::size_t i = from;
    do {
      g.push_back(static_cast<std::uint32_t>(i));
      i = next(i);
    } while (i != to && i != n);
    close_group(g);
  }
  return finish(Scheme::Example2, marked, std::move(edges), groups);
}

Matching run_scheme(Scheme scheme, const MarkedConfig& marked) {
  switch (scheme) {
    case Scheme::Stable: return stable_multimatch(marked);
    case Scheme::RandomDirection: return random_direction_match(marked);
    case Scheme::Core: return core_match(marked);
    case Scheme::CoreFast: {
      const bool two = std::all_of(marked.degrees.begin(), marked.degrees.end(), [](int d) { return d == 2; });
      return two ? core_match_fast(marked) : core_match(marked);
    }
    case Scheme::Iterated: return iterated_stable_match(marked);
    case Scheme::Example1: return example1_scheme(marked);
    case Scheme::Example2: return example2_scheme(marked);
  }
  throw ArgumentError("unknown scheme");
}

void check_matching(const Matching& m, const MarkedConfig& marked) {
  if (m.n != marked.size() || m.leftover.size() != m.n) throw InternalError("matching size mismatch");
  for (std::size_t k = 0; k < m.edges.size(); ++k) {
    const Edge& e = m.edges[k];
    if (!(e.u < e.v) || e.v >= m.n) throw InternalError("edge out of range or self-loop");
    if (k > 0 && !(m.edges[k - 1] < e)) throw InternalError("duplicate or unsorted edge");
  }
  const auto deg = m.degrees();
  for (std::size_t i = 0; i < m.n; ++i) {
    if (m.leftover[i] < 0 || deg[i] + m.leftover[i] != marked.degrees[i])
      throw InternalError("stub conservation violated at point " + std::to_string(i));
  }
  if (m.leftover_right && m.leftover_left && m.rights) {
    std::vector<int> right_deg(m.n, 0), left_deg(m.n, 0);
    for (const Edge& e : m.edges) {
      ++right_deg[e.u];
      ++left_deg[e.v];
    }
    for (std::size_t i = 0; i < m.n; ++i) {
      const int r = (*m.rights)[i];
      const int l = marked.degrees[i] - r;
      if (right_deg[i] + (*m.leftover_right)[i] != r || left_deg[i] + (*m.leftover_left)[i] != l)
        throw InternalError("directed stub conservation violated at point " + std::to_string(i));
    }
  }
}

}  // namespace smm
