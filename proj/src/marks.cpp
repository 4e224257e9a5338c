#include "smm/marks.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "smm/errors.hpp"

namespace smm {

DegreeDistribution::DegreeDistribution(std::map<int, double> pmf) : pmf_(std::move(pmf)) {
  if (pmf_.empty()) throw ArgumentError("degree distribution is empty");
  double total = 0.0;
  for (const auto& [k, p] : pmf_) {
    if (k <= 0) throw ArgumentError("degrees must be positive integers");
    if (!(p >= 0.0) || !std::isfinite(p)) throw ArgumentError("probabilities must be non-negative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) throw ArgumentError("probabilities must sum to 1");
  std::erase_if(pmf_, [](const auto& kv) { return kv.second == 0.0; });
  double acc = 0.0;
  for (const auto& [k, p] : pmf_) {
    acc += p;
    cdf_.emplace_back(acc, k);
  }
  cdf_.back().first = 1.0;
}

DegreeDistribution DegreeDistribution::from_constant(int k) {
  if (k <= 0) throw ArgumentError("constant degree must be positive");
  return DegreeDistribution({{k, 1.0}});
}

DegreeDistribution DegreeDistribution::from_pmf(const std::map<int, double>& pmf) {
  return DegreeDistribution(pmf);
}

DegreeDistribution DegreeDistribution::from_expected_degree(double e) {
  if (!(e >= 1.0) || !std::isfinite(e)) throw ArgumentError("expected degree must be >= 1");
  const double lo = std::floor(e);
  const double frac = e - lo;
  const int k = static_cast<int>(lo);
  if (frac == 0.0) return from_constant(k);
  return DegreeDistribution({{k, 1.0 - frac}, {k + 1, frac}});
}

namespace {

template <class T>
T parse_number(std::string_view text, std::string_view what) {
  T value{};
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
    throw ArgumentError("bad " + std::string(what) + " '" + std::string(text) + "' in degree spec");
  return value;
}

}  // namespace

DegreeDistribution DegreeDistribution::parse(std::string_view spec) {
  if (spec.empty()) throw ArgumentError("empty degree spec");
  if (spec.starts_with("e="))
    return from_expected_degree(parse_number<double>(spec.substr(2), "expected degree"));
  if (spec.find(':') == std::string_view::npos)
    return from_constant(parse_number<int>(spec, "degree"));

  std::map<int, double> pmf;
  while (!spec.empty()) {
    const auto comma = spec.find(',');
    const auto item = spec.substr(0, comma);
    const auto colon = item.find(':');
    if (colon == std::string_view::npos) throw ArgumentError("pmf entries must look like k:p");
    const int k = parse_number<int>(item.substr(0, colon), "degree");
    const double p = parse_number<double>(item.substr(colon + 1), "probability");
    if (!pmf.emplace(k, p).second) throw ArgumentError("duplicate degree in pmf");
    spec = comma == std::string_view::npos ? std::string_view{} : spec.substr(comma + 1);
  }
  return from_pmf(pmf);
}

double DegreeDistribution::probability(int k) const {
  const auto it = pmf_.find(k);
  return it == pmf_.end() ? 0.0 : it->second;
}

double DegreeDistribution::mean() const {
  double m = 0.0;
  for (const auto& [k, p] : pmf_) m += k * p;
  return m;
}

int DegreeDistribution::sample(Rng& rng) const {
  if (cdf_.size() == 1) return cdf_.front().second;
  const double u = rng.uniform();
  for (const auto& [c, k] : cdf_)
    if (u < c) return k;
  return cdf_.back().second;
}

std::string DegreeDistribution::to_string() const {
  if (is_constant()) return std::to_string(pmf_.begin()->first);
  std::ostringstream out;
  bool first = true;
  for (const auto& [k, p] : pmf_) {
    if (!first) out << ',';
    out << k << ':' << format_real(p);
    first = false;
  }
  return out.str();
}

void MarkedConfig::validate() const {
  if (degrees.size() != config.size()) throw ArgumentError("degree count does not match point count");
  for (int d : degrees)
    if (d <= 0) throw ArgumentError("degrees must be positive");
  if (rights) {
    if (rights->size() != config.size()) throw ArgumentError("rights count does not match point count");
    for (std::size_t i = 0; i < rights->size(); ++i)
      if ((*rights)[i] < 0 || (*rights)[i] > degrees[i])
        throw ArgumentError("right-stub count outside [0, D] at index " + std::to_string(i));
  }
}

MarkedConfig assign_degrees(const PointConfig& config, const DegreeDistribution& dist, Rng& rng) {
  MarkedConfig marked{config, std::vector<int>(config.size()), std::nullopt};
  for (int& d : marked.degrees) d = dist.sample(rng);
  return marked;
}

MarkedConfig with_constant_degree(const PointConfig& config, int k) {
  if (k <= 0) throw ArgumentError("constant degree must be positive");
  return MarkedConfig{config, std::vector<int>(config.size(), k), std::nullopt};
}

MarkedConfig assign_directions(MarkedConfig marked, Rng& rng) {
  if (marked.degrees.size() != marked.size()) throw ArgumentError("degrees missing");
  std::vector<int> rights(marked.size());
  for (std::size_t i = 0; i < rights.size(); ++i) rights[i] = rng.fair_binomial(marked.degrees[i]);
  marked.rights = std::move(rights);
  return marked;
}

std::vector<int> f_walk(const MarkedConfig& marked) {
  if (!marked.has_rights()) throw ArgumentError("f_walk needs right-stub marks");
  std::vector<int> steps(marked.size());
  for (std::size_t i = 0; i < steps.size(); ++i) steps[i] = marked.left(i) - marked.right(i);
  return steps;
}

}  // namespace smm
