#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "smm/errors.hpp"
#include "smm/montecarlo.hpp"

using namespace smm;

namespace {

// Direct summation with exact binomial coefficients.
double direct_tail(unsigned n, unsigned k, double p) {
  long double total = 0.0L;
  for (unsigned i = k; i <= n; ++i) {
    long double c = 1.0L;
    for (unsigned j = 1; j <= i; ++j) c = c * (n - i + j) / j;
    total += c * std::pow(static_cast<long double>(p), i) * std::pow(1.0L - p, n - i);
  }
  return static_cast<double>(total);
}

}  // namespace

TEST_CASE("binomial tail against high-precision references") {
  struct Ref {
    std::uint64_t n, k;
    double p, value;
  };
  const Ref refs[] = {
      {1000, 991, 0.968, 1.2778681971311906884e-6}, {1000, 992, 0.968, 3.37307609198643e-7},
      {1000, 990, 0.968, 4.35917577611022e-6},      {1000, 989, 0.968, 1.35267024573701e-5},
      {100, 94, 0.968, 0.95813193082366958129},     {50, 40, 0.7, 0.078850624823056409231},
      {200, 150, 0.8, 0.96550322513427121767},      {1000, 968, 0.968, 0.54683479323259595074},
      {1000, 1000, 0.968, 7.5051142589802607131e-15}, {3, 2, 0.5, 0.5},
  };
  for (const Ref& r : refs) {
    CAPTURE(r.n);
    CAPTURE(r.k);
    CHECK(std::abs(binomial_tail(r.n, r.k, r.p) / r.value - 1.0) < 1e-9);
  }
}

TEST_CASE("binomial tail edge cases") {
  CHECK(binomial_tail(17, 0, 0.3) == 1.0);
  CHECK(binomial_tail(0, 0, 0.3) == 1.0);
  CHECK(binomial_tail(5, 1, 0.0) == 0.0);
  CHECK(binomial_tail(5, 5, 1.0) == 1.0);
  CHECK_THROWS_AS(binomial_tail(5, 6, 0.5), ArgumentError);
  CHECK_THROWS_AS(binomial_tail(5, 2, 1.5), ArgumentError);
  CHECK_THROWS_AS(binomial_tail(5, 2, -0.1), ArgumentError);
}

TEST_CASE("binomial tail matches direct summation for n <= 30") {
  for (unsigned n = 1; n <= 30; ++n)
    for (unsigned k = 0; k <= n; ++k)
      for (double p : {0.01, 0.2, 0.5, 0.77, 0.968, 0.999}) CHECK(std::abs(binomial_tail(n, k, p) - direct_tail(n, k, p)) < 1e-12);
}

TEST_CASE("Clopper-Pearson bounds") {
  const auto zero = clopper_pearson(10, 0, 0.95);
  CHECK(zero.lo == 0.0);
  CHECK(zero.hi == doctest::Approx(1.0 - std::pow(0.025, 0.1)).epsilon(1e-9));
  const auto all = clopper_pearson(10, 10, 0.95);
  CHECK(all.hi == 1.0);
  CHECK(all.lo == doctest::Approx(std::pow(0.025, 0.1)).epsilon(1e-9));
  const auto mid = clopper_pearson(1000, 991, 0.99);
  CHECK(mid.lo < 0.991);
  CHECK(mid.hi > 0.991);
  CHECK(binomial_tail(1000, 991, mid.lo) == doctest::Approx(0.005).epsilon(1e-6));
  CHECK(1.0 - binomial_tail(1000, 992, mid.hi) == doctest::Approx(0.005).epsilon(1e-6));
  CHECK_THROWS_AS(clopper_pearson(0, 0, 0.9), ArgumentError);
  CHECK_THROWS_AS(clopper_pearson(5, 2, 1.0), ArgumentError);
}

TEST_CASE("renormalisation map and threshold") {
  CHECK(renorm_map(0.968) == doctest::Approx(0.96826113008687764991).epsilon(1e-14));
  CHECK(renorm_map(0.968) > 0.968);
  CHECK(std::abs(renorm_threshold() - 0.9676897639012006981) < 1e-12);
  CHECK(0.968 > renorm_threshold());

  const auto up = renorm_iterate(0.968, 50);
  CHECK(up.sequence.size() == 51);
  CHECK(up.converged);
  CHECK(std::isfinite(up.partial_sums.back()));
  for (std::size_t k = 1; k < up.sequence.size(); ++k) CHECK(up.sequence[k] >= up.sequence[k - 1]);

  const auto one = renorm_iterate(1.0, 5);
  for (double p : one.sequence) CHECK(p == 1.0);
  const auto zero = renorm_iterate(0.0, 5);
  for (double p : zero.sequence) CHECK(p == 0.0);
  CHECK_FALSE(zero.converged);
  CHECK_FALSE(renorm_iterate(0.96, 50).converged);

  CHECK_THROWS_AS(renorm_iterate(1.1, 5), ArgumentError);
  CHECK_THROWS_AS(renorm_iterate(0.5, 0), ArgumentError);
}

TEST_CASE("replica runner is independent of the worker count") {
  auto fn = [](std::size_t i) {
    Rng rng(replica_seed(99, i));
    return rng.uniform();
  };
  const auto serial = run_replicas<double>(64, 1, fn);
  const auto parallel = run_replicas<double>(64, 7, fn);
  CHECK(serial == parallel);
  CHECK(replica_seed(99, 0) != replica_seed(99, 1));

  try {
    run_replicas<int>(20, 4, [](std::size_t i) -> int {
      if (i == 5 || i == 12) throw std::runtime_error("replica " + std::to_string(i));
      return 0;
    });
    FAIL("expected a rethrow");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()) == "replica 5");
  }
}

TEST_CASE("summaries") {
  const auto s = summarize({1.0, 2.0, 3.0, 4.0});
  CHECK(s.mean == 2.5);
  CHECK(s.median == 2.5);
  CHECK(s.sd == doctest::Approx(std::sqrt(5.0 / 3.0)));
  CHECK(s.min == 1.0);
  CHECK(s.max == 4.0);
  CHECK(summarize({7.0}).sd == 0.0);
  CHECK(summarize({}).count == 0);
}

TEST_CASE("goodness: single replica is not tested") {
  ReplicaOptions o;
  o.replicas = 1;
  const auto r = run_goodness(100.0, o);
  CHECK_FALSE(r.tested);
  const auto rep = r.to_report().to_json(false);
  CHECK(rep["records"].size() == 1);
  CHECK(rep["verdicts"]["verdict"] == "not-tested");
  CHECK_THROWS_AS(run_goodness(0.0, o), ArgumentError);
}

TEST_CASE("goodness report is deterministic and worker-count independent") {
  ReplicaOptions a{40, 5, 1}, b{40, 5, 4};
  const auto ra = run_goodness(300.0, a).to_report().to_json(false);
  const auto rb = run_goodness(300.0, b).to_report().to_json(false);
  CHECK(ra.dump() == rb.dump());
  CHECK(ra["schema"] == 1);
  CHECK(ra["verdicts"]["verdict"].is_string());
  CHECK(run_goodness(300.0, a, false).good == run_goodness(300.0, a, true).good);
}

TEST_CASE("table1 layout") {
  ReplicaOptions o{3, 1, 0};
  const auto t = run_table1({64, 128}, "2", o);
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0].fractions.size() == 3);
  const auto rep = t.to_report().to_json(false);
  CHECK(rep["aggregates"]["rows"].size() == 2);
  CHECK(rep["records"].size() == 6);
  CHECK(rep["aggregates"]["rows"][0]["mean"].get<double>() == doctest::Approx(t.rows[0].summary.mean));
  CHECK_THROWS_AS(run_table1({}, "2", o), ArgumentError);
  CHECK_THROWS_AS(run_table1({64}, "zz", o), ArgumentError);
}

TEST_CASE("tail grid is geometric from one") {
  CHECK(tail_grid(16) == std::vector<double>{1, 2, 4, 8, 16});
  CHECK(tail_grid(20) == std::vector<double>{1, 2, 4, 8, 16});
}

TEST_CASE("block combination on small and degenerate blocks") {
  ReplicaOptions o{30, 8, 0};
  const auto r = block_combination_check(60.0, o);
  CHECK(r.replicas == 30);
  CHECK(r.violations == 0);
  const auto tiny = block_combination_check(1e-9, o);
  CHECK(tiny.violations == 0);
  CHECK(tiny.premise_held == 0);
}

TEST_CASE("experiments from JSON specs") {
  const auto renorm = run_experiment(ordered_json{{"kind", "renorm"}, {"p0", 0.968}, {"kmax", 10}});
  CHECK(renorm.records.size() == 11);
  CHECK(renorm.verdicts["converges_to_1"] == false);
  CHECK(renorm.verdicts["above_threshold"] == true);
  const auto csv = renorm.to_csv();
  CHECK(csv.rfind("k,p,partial_sum\n", 0) == 0);

  const auto good = run_experiment(ordered_json{{"kind", "goodness"}, {"length", 200.0}, {"replicas", 2}});
  CHECK(good.records.size() == 2);
  CHECK_THROWS_AS(run_experiment(ordered_json{{"kind", "nope"}}), ArgumentError);
  CHECK_THROWS_AS(run_experiment(ordered_json{{"kind", "goodness"}, {"replicas", 0}}), ArgumentError);
  CHECK_THROWS_AS(run_experiment(ordered_json{{"kind", "goodness"}, {"length", "long"}}), ArgumentError);
  CHECK_THROWS_AS(run_experiment(ordered_json::array()), ArgumentError);
}
