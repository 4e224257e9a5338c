#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "smm/marks.hpp"

namespace smm {

enum class Scheme {
  Stable,           // stable multi-matching (repeated mutual-closest pairing)
  RandomDirection,  // stubs with prescribed left/right directions
  Core,             // core matching on an interval, complement as sentinel
  CoreFast,         // two-stub core matching, neighbour-window shortcut
  Iterated,         // repeated stable 1-matchings without multi-edges
  Example1,         // stable 1-matching, then opposite-direction stubs
  Example2,         // seed groups closed into cycles
};

const char* to_string(Scheme scheme);
Scheme parse_scheme(std::string_view name);

// Undirected edge between point indices, stored with u < v.
struct Edge {
  std::uint32_t u = 0;
  std::uint32_t v = 0;

  Edge() = default;
  Edge(std::uint32_t a, std::uint32_t b) : u(a < b ? a : b), v(a < b ? b : a) {}

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

struct Matching {
  Scheme scheme = Scheme::Stable;
  std::size_t n = 0;
  std::vector<Edge> edges;           // sorted, unique
  std::vector<int> leftover;         // unmatched stubs per point
  // Directed schemes only: unmatched right/left stubs and the right-stub
  // counts that were actually used to orient the stubs.
  std::optional<std::vector<int>> leftover_right;
  std::optional<std::vector<int>> leftover_left;
  std::optional<std::vector<int>> rights;
  std::size_t rounds = 0;

  std::size_t total_leftover() const;
  std::vector<int> degrees() const;
  bool has_edge(std::uint32_t a, std::uint32_t b) const;
};

Matching stable_multimatch(const MarkedConfig& marked);

// Interval only; rights must be present.
Matching random_direction_match(const MarkedConfig& marked);

// Core matching of the points in the window [a, b] = [0, extent). The
// general algorithm handles any degrees; core_match_fast is the two-stub
// shortcut and rejects other degrees.
Matching core_match(const MarkedConfig& marked);
Matching core_match_fast(const MarkedConfig& marked);

// Core matching restricted to the points inside [a, b] of an Interval
// config, with [a, b] as the window. Indices refer to the full config.
Matching core_match_window(const MarkedConfig& marked, double a, double b);

Matching iterated_stable_match(const MarkedConfig& marked);

// D == 2 at every point. Example 1 needs an Interval.
Matching example1_scheme(const MarkedConfig& marked);
Matching example2_scheme(const MarkedConfig& marked);

// Dispatch by scheme. CoreFast falls back to Core when degrees are not all 2.
Matching run_scheme(Scheme scheme, const MarkedConfig& marked);

// Checks simplicity and stub conservation; throws InternalError on failure.
void check_matching(const Matching& matching, const MarkedConfig& marked);

}  // namespace smm
