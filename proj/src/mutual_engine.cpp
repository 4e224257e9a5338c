#include "mutual_engine.hpp"

#include <algorithm>

#include "smm/errors.hpp"

namespace smm::detail {

MutualClosestEngine::MutualClosestEngine(const PointConfig& points,
                                         std::span<const std::uint32_t> participants,
                                         std::vector<int> stubs, std::optional<Sentinel> sentinel)
    : points_(points),
      participants_(participants.begin(), participants.end()),
      stubs_(std::move(stubs)),
      sentinel_(sentinel),
      adj_(points.size()),
      prev_(points.size(), kNone),
      next_(points.size(), kNone) {
  if (stubs_.size() != points.size()) throw ArgumentError("stub vector does not match point count");
  std::vector<std::uint32_t> active;
  active.reserve(participants_.size());
  for (std::uint32_t i : participants_)
    if (stubs_[i] > 0) active.push_back(i);
  active_count_ = active.size();
  for (std::size_t k = 0; k < active.size(); ++k) {
    if (k > 0) prev_[active[k]] = active[k - 1];
    if (k + 1 < active.size()) next_[active[k]] = active[k + 1];
  }
  if (points.topology().is_cycle() && !active.empty()) {
    prev_[active.front()] = active.back();
    next_[active.back()] = active.front();
  }
}

void MutualClosestEngine::forbid(Edge e) {
  adj_[e.u].push_back(e.v);
  adj_[e.v].push_back(e.u);
}

bool MutualClosestEngine::adjacent(std::uint32_t x, std::uint32_t y) const {
  const auto& a = adj_[x];
  return std::find(a.begin(), a.end(), y) != a.end();
}

void MutualClosestEngine::unlink(std::uint32_t x) {
  const std::uint32_t p = prev_[x];
  const std::uint32_t q = next_[x];
  if (p != kNone) next_[p] = q == x ? kNone : q;
  if (q != kNone) prev_[q] = p == x ? kNone : p;
  prev_[x] = next_[x] = kNone;
  --active_count_;
  if (active_count_ == 1 && points_.topology().is_cycle()) {
    // A single remaining point must not link to itself.
    const std::uint32_t only = p != kNone ? p : q;
    if (only != kNone) prev_[only] = next_[only] = kNone;
  }
}

Candidate MutualClosestEngine::target(std::uint32_t x) const {
  Candidate best;
  const double px = points_[x];
  if (sentinel_) best = Candidate{sentinel_->distance(px), kSentinelTarget};

  const std::size_t others = active_count_ > 0 ? active_count_ - 1 : 0;
  std::uint32_t l = prev_[x];
  std::uint32_t r = next_[x];
  std::size_t seen = 0;
  while (seen < others) {
    Candidate cl, cr;
    if (l != kNone) cl = Candidate{points_.distance(x, l), l};
    if (r != kNone) cr = Candidate{points_.distance(x, r), r};
    if (!cl.valid() && !cr.valid()) break;
    const bool from_left = cl.valid() && (!cr.valid() || cl < cr);
    const Candidate c = from_left ? cl : cr;
    if (best.valid() && !(c < best)) break;
    const auto y = static_cast<std::uint32_t>(c.index);
    if (y != x && !adjacent(x, y)) return c;
    if (from_left) l = prev_[l];
    else r = next_[r];
    ++seen;
  }
  return best;
}

std::size_t MutualClosestEngine::run(std::vector<Edge>& out) {
  const std::size_t n = points_.size();
  std::vector<std::int64_t> arrow(n, kNoTarget);
  std::vector<std::vector<std::uint32_t>> incoming(n);
  std::vector<char> is_dirty(n, 0);
  std::vector<std::uint32_t> dirty;
  for (std::uint32_t i : participants_) {
    if (stubs_[i] > 0) {
      dirty.push_back(i);
      is_dirty[i] = 1;
    }
  }

  std::size_t rounds = 0;
  std::vector<Edge> pairs;
  std::vector<std::uint32_t> next_dirty;
  while (!dirty.empty()) {
    for (std::uint32_t x : dirty) {
      const Candidate c = target(x);
      arrow[x] = c.index;
      if (c.index >= 0) incoming[static_cast<std::size_t>(c.index)].push_back(x);
    }
    pairs.clear();
    for (std::uint32_t x : dirty) {
      const std::int64_t y = arrow[x];
      if (y < 0 || arrow[static_cast<std::size_t>(y)] != x) continue;
      const auto yy = static_cast<std::uint32_t>(y);
      if (is_dirty[yy] && yy < x) continue;
      pairs.emplace_back(x, yy);
    }
    for (std::uint32_t x : dirty) is_dirty[x] = 0;
    if (pairs.empty()) break;
    ++rounds;

    next_dirty.clear();
    auto mark = [&](std::uint32_t z) {
      if (!is_dirty[z] && stubs_[z] > 0) {
        is_dirty[z] = 1;
        next_dirty.push_back(z);
      }
    };
    std::sort(pairs.begin(), pairs.end());
    for (const Edge& e : pairs) {
      out.push_back(e);
      forbid(e);
      for (std::uint32_t p : {e.u, e.v}) {
        arrow[p] = kNoTarget;
        if (--stubs_[p] == 0) {
          unlink(p);
          for (std::uint32_t z : incoming[p])
            if (arrow[z] == p) mark(z);
          incoming[p].clear();
          incoming[p].shrink_to_fit();
        }
      }
    }
    for (const Edge& e : pairs) {
      mark(e.u);
      mark(e.v);
    }
    dirty.swap(next_dirty);
  }
  return rounds;
}

}  // namespace smm::detail
