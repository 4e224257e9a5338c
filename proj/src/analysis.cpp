#include "smm/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "smm/errors.hpp"

namespace smm {

UnionFind::UnionFind(std::size_t n) : parent_(n), size_(n, 1) {
  std::iota(parent_.begin(), parent_.end(), std::size_t{0});
}

std::size_t UnionFind::find(std::size_t x) noexcept {
  std::size_t root = x;
  while (parent_[root] != root) root = parent_[root];
  while (parent_[x] != root) {
    const std::size_t next = parent_[x];
    parent_[x] = root;
    x = next;
  }
  return root;
}

bool UnionFind::unite(std::size_t a, std::size_t b) noexcept {
  a = find(a);
  b = find(b);
  if (a == b) return false;
  if (size_[a] < size_[b]) std::swap(a, b);
  parent_[b] = a;
  size_[a] += size_[b];
  return true;
}

std::size_t ComponentSummary::largest_size() const {
  std::size_t best = 0;
  for (const auto& c : components) best = std::max(best, c.size());
  return best;
}

ComponentSummary components(const Matching& matching) {
  ComponentSummary summary;
  const std::size_t n = matching.n;
  if (n == 0) return summary;
  UnionFind uf(n);
  for (const Edge& e : matching.edges) uf.unite(e.u, e.v);
  std::vector<std::size_t> slot(n, std::numeric_limits<std::size_t>::max());
  for (std::uint32_t i = 0; i < n; ++i) {
    const std::size_t r = uf.find(i);
    if (slot[r] == std::numeric_limits<std::size_t>::max()) {
      slot[r] = summary.components.size();
      summary.components.emplace_back();
    }
    summary.components[slot[r]].push_back(i);
  }
  summary.largest_fraction = static_cast<double>(summary.largest_size()) / static_cast<double>(n);
  return summary;
}

double largest_component_fraction(const Matching& matching) {
  if (matching.n == 0) return 0.0;
  UnionFind uf(matching.n);
  for (const Edge& e : matching.edges) uf.unite(e.u, e.v);
  std::size_t best = 0;
  for (std::size_t i = 0; i < matching.n; ++i) best = std::max(best, uf.size_of(i));
  return static_cast<double>(best) / static_cast<double>(matching.n);
}

namespace {

struct Quarters {
  double first_end;
  double last_start;
};

Quarters quarters(double a, double b) {
  if (!(a < b)) throw ArgumentError("goodness window needs a < b");
  const double q = (b - a) / 4.0;
  return {a + q, b - q};
}

std::vector<std::vector<std::uint32_t>> adjacency(const Matching& matching) {
  std::vector<std::vector<std::uint32_t>> adj(matching.n);
  for (const Edge& e : matching.edges) {
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  for (auto& a : adj) std::sort(a.begin(), a.end());
  return adj;
}

}  // namespace

bool is_good(const Matching& matching, const PointConfig& points, double a, double b) {
  const Quarters q = quarters(a, b);
  if (matching.n != points.size()) throw ArgumentError("matching and points disagree on size");
  UnionFind uf(matching.n);
  for (const Edge& e : matching.edges) uf.unite(e.u, e.v);
  std::vector<char> touches_first(matching.n, 0);
  for (std::size_t i = 0; i < matching.n; ++i) {
    const double x = points[i];
    if (x >= a && x <= q.first_end) touches_first[uf.find(i)] = 1;
  }
  for (std::size_t i = 0; i < matching.n; ++i) {
    const double x = points[i];
    if (x >= q.last_start && x <= b && touches_first[uf.find(i)]) return true;
  }
  return false;
}

namespace {

template <class Visit>
void for_each_crossing(const Matching& matching, Visit&& visit) {
  const auto adj = adjacency(matching);
  for (const Edge& ab : matching.edges) {
    for (std::uint32_t c = ab.u + 1; c < ab.v; ++c) {
      const auto& nb = adj[c];
      for (auto it = std::upper_bound(nb.begin(), nb.end(), ab.v); it != nb.end(); ++it)
        visit(ab, Edge(c, *it));
    }
  }
}

}  // namespace

std::vector<CrossingPair> crossing_pairs(const Matching& matching) {
  std::vector<CrossingPair> out;
  for_each_crossing(matching, [&](const Edge& ab, const Edge& cd) { out.emplace_back(ab, cd); });
  return out;
}

std::size_t count_crossing_pairs(const Matching& matching) {
  std::size_t count = 0;
  for_each_crossing(matching, [&](const Edge&, const Edge&) { ++count; });
  return count;
}

std::vector<CrossingPair> check_cross_closure(const Matching& matching) {
  std::vector<CrossingPair> out;
  for_each_crossing(matching, [&](const Edge& ab, const Edge& cd) {
    if (!matching.has_edge(cd.u, ab.v)) out.emplace_back(ab, cd);
  });
  return out;
}

std::optional<std::vector<std::uint32_t>> spanning_path(const Matching& matching, const PointConfig& points,
                                                        double a, double b) {
  const Quarters q = quarters(a, b);
  const std::size_t n = matching.n;
  if (n != points.size()) throw ArgumentError("matching and points disagree on size");
  const auto adj = adjacency(matching);
  constexpr std::size_t kUnreached = 0;
  // length[v]: vertices on the longest monotone path ending at v that starts
  // in the first quarter.
  std::vector<std::size_t> length(n, kUnreached);
  std::vector<std::int64_t> pred(n, -1);
  for (std::uint32_t v = 0; v < n; ++v) {
    const double x = points[v];
    if (x < a || x > b) continue;
    if (x <= q.first_end) length[v] = 1;
    for (std::uint32_t u : adj[v]) {
      if (u >= v || length[u] == kUnreached) continue;
      if (points[u] < a) continue;
      if (length[u] + 1 > length[v]) {
        length[v] = length[u] + 1;
        pred[v] = u;
      }
    }
  }
  std::int64_t end = -1;
  for (std::uint32_t v = 0; v < n; ++v) {
    const double x = points[v];
    if (x >= q.last_start && x <= b && length[v] >= 2 &&
        (end < 0 || length[v] > length[static_cast<std::size_t>(end)]))
      end = v;
  }
  if (end < 0) return std::nullopt;
  std::vector<std::uint32_t> path;
  for (std::int64_t v = end; v >= 0; v = pred[static_cast<std::size_t>(v)])
    path.push_back(static_cast<std::uint32_t>(v));
  std::reverse(path.begin(), path.end());
  return path;
}

const char* to_string(PointClass cls) {
  switch (cls) {
    case PointClass::Bird: return "bird";
    case PointClass::LeftBeak: return "left-beak";
    case PointClass::RightBeak: return "right-beak";
    case PointClass::Other: return "other";
  }
  return "other";
}

std::vector<PointClass> classify_beaks(const MarkedConfig& marked) {
  if (!marked.has_rights()) throw ArgumentError("classify_beaks needs right-stub marks");
  std::vector<PointClass> cls(marked.size(), PointClass::Other);
  for (std::size_t i = 0; i < cls.size(); ++i) {
    if (marked.degrees[i] != 2) continue;
    switch (marked.right(i)) {
      case 0: cls[i] = PointClass::LeftBeak; break;
      case 1: cls[i] = PointClass::Bird; break;
      case 2: cls[i] = PointClass::RightBeak; break;
    }
  }
  return cls;
}

EdgeStats point_stats(const Matching& matching, const PointConfig& points,
                      const std::vector<PointClass>* classes) {
  const std::size_t n = points.size();
  if (matching.n != n) throw ArgumentError("matching and points disagree on size");
  EdgeStats stats;
  stats.points.resize(n);
  for (const Edge& e : matching.edges) {
    const double len = points.distance(e.u, e.v);
    for (std::uint32_t p : {e.u, e.v}) {
      auto& s = stats.points[p];
      ++s.degree;
      s.longest = std::max(s.longest, len);
      s.mean += len;
    }
  }
  const bool cycle = points.topology().is_cycle();
  for (std::size_t i = 0; i < n; ++i) {
    auto& s = stats.points[i];
    if (s.degree > 0) s.mean /= s.degree;
    // Interval ends only have one neighbour; use the side that exists.
    double gap = 0.0;
    if (n > 1) {
      if (i > 0 || cycle) gap = std::max(gap, points.distance(i, i > 0 ? i - 1 : n - 1));
      if (i + 1 < n || cycle) gap = std::max(gap, points.distance(i, i + 1 < n ? i + 1 : 0));
    }
    s.gap = gap;
    if (classes) s.cls = (*classes)[i];
  }
  return stats;
}

std::size_t desire_count(const Matching& matching, const PointConfig& points, double z) {
  const auto stats = point_stats(matching, points);
  std::size_t count = 0;
  for (std::size_t i = 0; i < points.size(); ++i)
    if (points.topology().distance(z, points[i]) < stats.points[i].longest) ++count;
  return count;
}

std::size_t crossings_at(const Matching& matching, const PointConfig& points, double z) {
  std::size_t count = 0;
  for (const Edge& e : matching.edges)
    if (points[e.u] < z && z < points[e.v]) ++count;
  return count;
}

double mean_desire_over_grid(const Matching& matching, const PointConfig& points, std::size_t sites) {
  if (sites == 0) throw ArgumentError("grid needs at least one site");
  const auto stats = point_stats(matching, points);
  const double extent = points.topology().extent;
  const double step = extent / static_cast<double>(sites);
  const bool cycle = points.topology().is_cycle();
  // Site k sits at (k + 1/2) * step. Each point adds 1 to the sites in the
  // open ball of radius M around it.
  std::vector<long long> diff(sites + 1, 0);
  auto add_range = [&](long long lo, long long hi) {  // inclusive, may wrap on a cycle
    const auto s = static_cast<long long>(sites);
    if (hi < lo) return;
    if (hi - lo + 1 >= s) {
      if (cycle) {
        diff[0] += 1;
        diff[sites] -= 1;
        return;
      }
    }
    if (!cycle) {
      lo = std::max(lo, 0LL);
      hi = std::min(hi, s - 1);
      if (hi < lo) return;
      diff[static_cast<std::size_t>(lo)] += 1;
      diff[static_cast<std::size_t>(hi + 1)] -= 1;
      return;
    }
    auto wrap = [s](long long k) { return ((k % s) + s) % s; };
    const long long a = wrap(lo), b = wrap(hi);
    if (a <= b) {
      diff[static_cast<std::size_t>(a)] += 1;
      diff[static_cast<std::size_t>(b + 1)] -= 1;
    } else {
      diff[static_cast<std::size_t>(a)] += 1;
      diff[sites] -= 1;
      diff[0] += 1;
      diff[static_cast<std::size_t>(b + 1)] -= 1;
    }
  };
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double m = stats.points[i].longest;
    if (!(m > 0.0)) continue;
    const double x = points[i];
    // Sites with |(k + 1/2) step - x| < m.
    long long lo = static_cast<long long>(std::floor((x - m) / step - 0.5)) + 1;
    long long hi = static_cast<long long>(std::ceil((x + m) / step - 0.5)) - 1;
    // Correct floating rounding at the open ends.
    while (lo <= hi && !(std::abs((static_cast<double>(lo) + 0.5) * step - x) < m)) ++lo;
    while (hi >= lo && !(std::abs((static_cast<double>(hi) + 0.5) * step - x) < m)) --hi;
    add_range(lo, hi);
  }
  long long running = 0;
  long double total = 0.0L;
  for (std::size_t k = 0; k < sites; ++k) {
    running += diff[k];
    total += static_cast<long double>(running);
  }
  return static_cast<double>(total / static_cast<long double>(sites));
}

std::vector<std::uint32_t> trimmed_points(const PointConfig& points, double margin) {
  std::vector<std::uint32_t> idx;
  const double extent = points.topology().extent;
  const bool cycle = points.topology().is_cycle();
  for (std::uint32_t i = 0; i < points.size(); ++i) {
    const double x = points[i];
    if (cycle || (x >= margin && x <= extent - margin)) idx.push_back(i);
  }
  return idx;
}

double default_margin(const PointConfig& points) {
  if (points.empty()) return 0.0;
  return 10.0 * points.topology().extent / static_cast<double>(points.size());
}

std::size_t gap_exceedances(const PointConfig& points, double center) {
  const Matching none{Scheme::Stable, points.size(), {}, std::vector<int>(points.size(), 0), {}, {}, {}, 0};
  const auto stats = point_stats(none, points);
  std::size_t count = 0;
  for (std::size_t i = 0; i < points.size(); ++i)
    if (stats.points[i].gap > points.topology().distance(points[i], center)) ++count;
  return count;
}

std::vector<Edge> stability_audit(const Matching& matching, const MarkedConfig& marked, AuditMode mode,
                                  double window_a, double window_b) {
  const PointConfig& pts = marked.config;
  const std::size_t n = pts.size();
  if (matching.n != n) throw ArgumentError("matching and marks disagree on size");
  if (mode == AuditMode::Directed && !(matching.rights && matching.leftover_right && matching.leftover_left))
    throw ArgumentError("directed audit needs a directed matching");
  if (mode == AuditMode::Core && !(window_a < window_b)) throw ArgumentError("core audit needs a window");

  const auto adj = adjacency(matching);
  std::vector<double> longest(n, 0.0), longest_right(n, 0.0), longest_left(n, 0.0);
  for (const Edge& e : matching.edges) {
    const double len = pts.distance(e.u, e.v);
    longest[e.u] = std::max(longest[e.u], len);
    longest[e.v] = std::max(longest[e.v], len);
    longest_right[e.u] = std::max(longest_right[e.u], len);
    longest_left[e.v] = std::max(longest_left[e.v], len);
  }
  auto linked = [&](std::uint32_t x, std::uint32_t y) {
    return std::binary_search(adj[x].begin(), adj[x].end(), y);
  };
  auto in_window = [&](std::size_t i) {
    return mode != AuditMode::Core || (pts[i] >= window_a && pts[i] <= window_b);
  };

  // Core mode: the partner a free point points to after the last round.
  std::vector<std::int64_t> arrow(n, -2);
  if (mode == AuditMode::Core) {
    for (std::uint32_t x = 0; x < n; ++x) {
      if (!in_window(x) || matching.leftover[x] <= 0) continue;
      const double px = pts[x];
      double best_d = std::min(px - window_a, window_b - px);
      std::int64_t best = -1;
      for (std::uint32_t y = 0; y < n; ++y) {
        if (y == x || !in_window(y) || matching.leftover[y] <= 0 || linked(x, y)) continue;
        const double d = pts.distance(x, y);
        if (d < best_d || (d == best_d && static_cast<std::int64_t>(y) < best)) {
          best_d = d;
          best = y;
        }
      }
      arrow[x] = best;
    }
  }

  std::vector<Edge> unstable;
  for (std::uint32_t x = 0; x < n; ++x) {
    if (!in_window(x)) continue;
    for (std::uint32_t y = x + 1; y < n; ++y) {
      if (!in_window(y) || linked(x, y)) continue;
      const double d = pts.distance(x, y);
      bool x_wants = false, y_wants = false;
      switch (mode) {
        case AuditMode::Stable:
          x_wants = matching.leftover[x] > 0 || longest[x] > d;
          y_wants = matching.leftover[y] > 0 || longest[y] > d;
          break;
        case AuditMode::Directed:
          x_wants = (*matching.leftover_right)[x] > 0 || longest_right[x] > d;
          y_wants = (*matching.leftover_left)[y] > 0 || longest_left[y] > d;
          break;
        case AuditMode::Core:
          x_wants = longest[x] > d || arrow[x] == y;
          y_wants = longest[y] > d || arrow[y] == x;
          break;
      }
      if (x_wants && y_wants) unstable.emplace_back(x, y);
    }
  }
  return unstable;
}

}  // namespace smm
