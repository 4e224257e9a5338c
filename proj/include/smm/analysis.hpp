#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "smm/matchers.hpp"

namespace smm {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n);

  std::size_t find(std::size_t x) noexcept;
  bool unite(std::size_t a, std::size_t b) noexcept;
  std::size_t size_of(std::size_t x) noexcept { return size_[find(x)]; }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
};

struct ComponentSummary {
  std::vector<std::vector<std::uint32_t>> components;  // sorted members, ordered by first member
  double largest_fraction = 0.0;
  std::optional<std::vector<std::uint32_t>> spanning_path;

  std::size_t largest_size() const;
};

ComponentSummary components(const Matching& matching);
double largest_component_fraction(const Matching& matching);

// Some component touches both closed quarters [a, a + (b-a)/4] and
// [b - (b-a)/4, b].
bool is_good(const Matching& matching, const PointConfig& points, double a, double b);

// Edges are read in the linear order of positions: (a,b) and (c,d) cross
// when a < c < b < d.
using CrossingPair = std::pair<Edge, Edge>;
std::vector<CrossingPair> crossing_pairs(const Matching& matching);
std::size_t count_crossing_pairs(const Matching& matching);
// Crossing pairs (a,b),(c,d) whose closing edge (c,b) is absent.
std::vector<CrossingPair> check_cross_closure(const Matching& matching);

// Longest strictly increasing path x_1 < ... < x_k along edges from the first
// quarter of [a, b] to the last quarter, if any.
std::optional<std::vector<std::uint32_t>> spanning_path(const Matching& matching, const PointConfig& points,
                                                        double a, double b);

enum class PointClass { Bird, LeftBeak, RightBeak, Other };
const char* to_string(PointClass cls);

struct PointStats {
  int degree = 0;
  double longest = 0.0;  // M: longest incident edge, 0 when isolated
  double mean = 0.0;     // X: mean incident edge length, 0 when isolated
  double gap = 0.0;      // Z: larger of the gaps to the nearest left/right point
  PointClass cls = PointClass::Other;
};

struct EdgeStats {
  std::vector<PointStats> points;
};

// Classes need right-stub marks and D = 2; everything else is Other.
std::vector<PointClass> classify_beaks(const MarkedConfig& marked);

// `classes`, when given, is copied into the per-point records.
EdgeStats point_stats(const Matching& matching, const PointConfig& points,
                      const std::vector<PointClass>* classes = nullptr);

// Number of points x with |z - x| < M_x.
std::size_t desire_count(const Matching& matching, const PointConfig& points, double z);
// Number of edges (x, y) with x < z < y.
std::size_t crossings_at(const Matching& matching, const PointConfig& points, double z);

// Mean desire count over `sites` equally spaced sites of the window, by a
// single sweep.
double mean_desire_over_grid(const Matching& matching, const PointConfig& points, std::size_t sites);

// Indices of points at least `margin` away from both ends of an Interval
// window (all points on a Cycle).
std::vector<std::uint32_t> trimmed_points(const PointConfig& points, double margin);
// Boundary margin for point-averaged estimators: ten mean gaps.
double default_margin(const PointConfig& points);

// Number of points x with Z_x > |x - center|.
std::size_t gap_exceedances(const PointConfig& points, double center);

enum class AuditMode {
  Stable,    // free stubs accept any partner
  Directed,  // right-edges/stubs against left-edges/stubs
  Core,      // free stubs only want their closest compatible partner or the window complement
};

// Unstable pairs: unlinked x, y that would both rather be joined than keep
// what they have. O(n^2).
std::vector<Edge> stability_audit(const Matching& matching, const MarkedConfig& marked, AuditMode mode,
                                  double window_a = 0.0, double window_b = 0.0);

}  // namespace smm
