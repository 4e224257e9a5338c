#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "smm/procgen.hpp"
#include "smm/rng.hpp"

namespace smm {

// Degree law on the strictly positive integers with finite support.
class DegreeDistribution {
 public:
  static DegreeDistribution from_constant(int k);
  static DegreeDistribution from_pmf(const std::map<int, double>& pmf);
  // Mixture of floor(e) and floor(e)+1 with mean exactly e.
  static DegreeDistribution from_expected_degree(double e);
  // CLI grammar: "k", "a:p,b:q,...", or "e=2.5".
  static DegreeDistribution parse(std::string_view spec);

  const std::map<int, double>& pmf() const noexcept { return pmf_; }
  double probability(int k) const;
  double mean() const;
  int max_degree() const { return pmf_.rbegin()->first; }
  int min_degree() const { return pmf_.begin()->first; }
  bool is_constant() const noexcept { return pmf_.size() == 1; }

  int sample(Rng& rng) const;

  std::string to_string() const;

 private:
  explicit DegreeDistribution(std::map<int, double> pmf);

  std::map<int, double> pmf_;
  std::vector<std::pair<double, int>> cdf_;
};

// Points plus per-point stub counts D and optional right-stub counts R.
struct MarkedConfig {
  PointConfig config;
  std::vector<int> degrees;
  std::optional<std::vector<int>> rights;

  std::size_t size() const noexcept { return config.size(); }
  bool has_rights() const noexcept { return rights.has_value(); }
  int right(std::size_t i) const { return (*rights)[i]; }
  int left(std::size_t i) const { return degrees[i] - (*rights)[i]; }

  // Throws ArgumentError when lengths or ranges are inconsistent.
  void validate() const;
};

MarkedConfig assign_degrees(const PointConfig& config, const DegreeDistribution& dist, Rng& rng);
MarkedConfig with_constant_degree(const PointConfig& config, int k);

// Fills R_x ~ Binomial(D_x, 1/2). Existing rights are replaced.
MarkedConfig assign_directions(MarkedConfig marked, Rng& rng);

// Steps of the walk F: (L_x - R_x) at each point, in position order.
std::vector<int> f_walk(const MarkedConfig& marked);

}  // namespace smm
