#include "smm/procgen.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <system_error>

#include "smm/errors.hpp"

namespace smm {

Topology Topology::interval(double length) {
  if (!(length > 0.0) || !std::isfinite(length))
    throw ArgumentError("interval length must be positive and finite");
  return Topology{TopologyKind::Interval, length};
}

Topology Topology::cycle(double circumference) {
  if (!(circumference > 0.0) || !std::isfinite(circumference))
    throw ArgumentError("cycle circumference must be positive and finite");
  return Topology{TopologyKind::Cycle, circumference};
}

const char* to_string(TopologyKind kind) {
  return kind == TopologyKind::Cycle ? "cycle" : "interval";
}

PointConfig::PointConfig(Topology topology, std::vector<double> positions,
                         std::optional<std::uint64_t> seed)
    : topology_(topology), positions_(std::move(positions)), seed_(seed) {
  if (!(topology_.extent > 0.0)) throw ArgumentError("extent must be positive");
  for (std::size_t i = 0; i < positions_.size(); ++i) {
    const double x = positions_[i];
    if (!(x >= 0.0 && x < topology_.extent))
      throw ArgumentError("position " + std::to_string(i) + " outside [0, extent)");
    if (i > 0 && !(positions_[i - 1] < x))
      throw ArgumentError("positions not strictly increasing at index " + std::to_string(i));
  }
}

namespace {

// Sorts, clamps into [0, extent) and drops exact float duplicates (a
// probability-zero event in the model).
std::vector<double> finish_positions(std::vector<double> xs, double extent) {
  const double top = std::nextafter(extent, 0.0);
  for (double& x : xs) x = std::clamp(x, 0.0, top);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

}  // namespace

PointConfig sample_poisson_interval(double length, Rng& rng) {
  const Topology topo = Topology::interval(length);
  const std::uint64_t count = rng.poisson(length);
  std::vector<double> xs(count);
  for (double& x : xs) x = rng.uniform() * length;
  return PointConfig(topo, finish_positions(std::move(xs), length), rng.seed());
}

PointConfig sample_uniform_cycle(std::size_t n, double circumference, Rng& rng) {
  if (n == 0) throw ArgumentError("cycle sample needs at least one point");
  const Topology topo = Topology::cycle(circumference);
  std::vector<double> xs(n);
  for (double& x : xs) x = rng.uniform() * circumference;
  return PointConfig(topo, finish_positions(std::move(xs), circumference), rng.seed());
}

PointConfig gen_perturbed_lattice(std::size_t cells, int copies, Rng& rng) {
  if (cells < 2) throw ArgumentError("perturbed lattice needs at least 2 cells");
  if (copies != 1 && copies != 3) throw ArgumentError("copies must be 1 or 3");
  const double extent = static_cast<double>(cells);
  const Topology topo = Topology::cycle(extent);
  const double shift = rng.uniform();
  std::vector<double> xs;
  xs.reserve(cells * static_cast<std::size_t>(copies));
  for (std::size_t i = 0; i < cells; ++i) {
    for (int c = 0; c < copies; ++c) {
      const double jitter = rng.uniform() / 3.0;
      xs.push_back(std::fmod(static_cast<double>(i) + jitter + shift, extent));
    }
  }
  return PointConfig(topo, finish_positions(std::move(xs), extent), rng.seed());
}

std::string format_real(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

void write_points(std::ostream& out, const PointConfig& config) {
  out << "topology=" << to_string(config.topology().kind)
      << " extent=" << format_real(config.topology().extent) << '\n';
  for (double x : config.positions()) out << format_real(x) << '\n';
}

namespace {

double parse_real(std::string_view text, std::size_t line) {
  double value = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc{} || res.ptr != last)
    throw ParseError(line, "malformed number '" + std::string(text) + "'");
  return value;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

PointConfig read_points(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(1, "missing header");

  std::optional<TopologyKind> kind;
  std::optional<double> extent;
  {
    std::istringstream header(line);
    std::string token;
    while (header >> token) {
      const auto eq = token.find('=');
      if (eq == std::string::npos) throw ParseError(1, "malformed header token '" + token + "'");
      const std::string key = token.substr(0, eq);
      const std::string value = token.substr(eq + 1);
      if (key == "topology") {
        if (value == "interval") kind = TopologyKind::Interval;
        else if (value == "cycle") kind = TopologyKind::Cycle;
        else throw ParseError(1, "unknown topology '" + value + "'");
      } else if (key == "extent") {
        extent = parse_real(value, 1);
      } else {
        throw ParseError(1, "unknown header key '" + key + "'");
      }
    }
  }
  if (!kind || !extent) throw ParseError(1, "header needs topology= and extent=");
  if (!(*extent > 0.0) || !std::isfinite(*extent)) throw ParseError(1, "extent must be positive");

  std::vector<double> xs;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    const auto text = trim(line);
    if (text.empty()) continue;
    const double x = parse_real(text, lineno);
    if (!(x >= 0.0 && x < *extent)) throw ParseError(lineno, "position out of range [0, extent)");
    if (!xs.empty() && !(xs.back() < x)) throw ParseError(lineno, "not sorted");
    xs.push_back(x);
  }
  return PointConfig(Topology{*kind, *extent}, std::move(xs));
}

void save_points(const std::string& path, const PointConfig& config) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_points(out, config);
  if (!out) throw IoError("write to '" + path + "' failed");
}

PointConfig load_points(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return read_points(in);
}

}  // namespace smm
