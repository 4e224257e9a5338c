#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "smm/matchers.hpp"
#include "smm/procgen.hpp"

namespace smm::detail {

// A window [a, b] whose complement acts as one extra, never-exhausted
// partner at distance min(x - a, b - x).
struct Sentinel {
  double a = 0.0;
  double b = 0.0;
  double distance(double x) const noexcept { return x - a < b - x ? x - a : b - x; }
};

constexpr std::int64_t kSentinelTarget = -1;
constexpr std::int64_t kNoTarget = -2;

// Candidate partner ordered by (distance, index). The sentinel carries index
// -1 so it wins exact ties; equal point distances go to the smaller index.
struct Candidate {
  double distance = std::numeric_limits<double>::infinity();
  std::int64_t index = kNoTarget;

  bool valid() const noexcept { return index != kNoTarget; }
  friend bool operator<(const Candidate& p, const Candidate& q) noexcept {
    if (p.distance != q.distance) return p.distance < q.distance;
    return p.index < q.index;
  }
};

// Synchronous "connect every mutually closest compatible pair" rounds over a
// subset of points. Two points are compatible when both have a stub left and
// no edge joins them. Only points whose arrow can have changed are
// re-examined each round.
class MutualClosestEngine {
 public:
  MutualClosestEngine(const PointConfig& points, std::span<const std::uint32_t> participants,
                      std::vector<int> stubs, std::optional<Sentinel> sentinel);

  // Marks an existing edge; the pair is never compatible again.
  void forbid(Edge e);

  // Runs to the fixpoint, appending new edges. Returns the number of rounds
  // that added at least one edge.
  std::size_t run(std::vector<Edge>& out);

  const std::vector<int>& stubs() const noexcept { return stubs_; }

  // Closest compatible partner of x under the current state.
  Candidate target(std::uint32_t x) const;

 private:
  static constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

  bool adjacent(std::uint32_t x, std::uint32_t y) const;
  void unlink(std::uint32_t x);

  const PointConfig& points_;
  std::vector<std::uint32_t> participants_;
  std::vector<int> stubs_;
  std::optional<Sentinel> sentinel_;
  std::vector<std::vector<std::uint32_t>> adj_;
  std::vector<std::uint32_t> prev_;
  std::vector<std::uint32_t> next_;
  std::size_t active_count_ = 0;
};

}  // namespace smm::detail
