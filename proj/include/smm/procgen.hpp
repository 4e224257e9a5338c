#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "smm/rng.hpp"

namespace smm {

enum class TopologyKind { Interval, Cycle };

// Window geometry. An Interval is [0, extent) with free ends; a Cycle has
// circumference `extent`.
struct Topology {
  TopologyKind kind = TopologyKind::Interval;
  double extent = 1.0;

  static Topology interval(double length);
  static Topology cycle(double circumference);

  bool is_cycle() const noexcept { return kind == TopologyKind::Cycle; }

  double distance(double x, double y) const noexcept {
    const double d = x < y ? y - x : x - y;
    if (kind == TopologyKind::Cycle) {
      const double wrap = extent - d;
      return wrap < d ? wrap : d;
    }
    return d;
  }

  friend bool operator==(const Topology&, const Topology&) = default;
};

const char* to_string(TopologyKind kind);

// Sorted, duplicate-free point positions in [0, extent).
class PointConfig {
 public:
  PointConfig() = default;
  // Validates sortedness and range; throws ArgumentError otherwise.
  PointConfig(Topology topology, std::vector<double> positions,
              std::optional<std::uint64_t> seed = std::nullopt);

  const Topology& topology() const noexcept { return topology_; }
  std::span<const double> positions() const noexcept { return positions_; }
  double operator[](std::size_t i) const noexcept { return positions_[i]; }
  std::size_t size() const noexcept { return positions_.size(); }
  bool empty() const noexcept { return positions_.empty(); }
  const std::optional<std::uint64_t>& seed() const noexcept { return seed_; }

  double distance(std::size_t i, std::size_t j) const noexcept {
    return topology_.distance(positions_[i], positions_[j]);
  }

 private:
  Topology topology_;
  std::vector<double> positions_;
  std::optional<std::uint64_t> seed_;
};

// Homogeneous intensity-1 Poisson process on [0, length).
PointConfig sample_poisson_interval(double length, Rng& rng);

// n i.i.d. uniform points on a cycle of the given circumference.
PointConfig sample_uniform_cycle(std::size_t n, double circumference, Rng& rng);

// Perturbed lattice on a cycle of circumference `cells`: `copies` points per
// cell at i + X + U (mod cells), X ~ U[0, 1/3] per point, U ~ U[0, 1] shared.
// copies = 1 and copies = 3 are the two supported processes.
PointConfig gen_perturbed_lattice(std::size_t cells, int copies, Rng& rng);

// Point file: header `topology=<interval|cycle> extent=<real>` followed by one
// position per line in strictly increasing order.
void write_points(std::ostream& out, const PointConfig& config);
PointConfig read_points(std::istream& in);
void save_points(const std::string& path, const PointConfig& config);
PointConfig load_points(const std::string& path);

// Shortest decimal form that parses back to the same double.
std::string format_real(double value);

}  // namespace smm
