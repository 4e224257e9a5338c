#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "smm/matchers.hpp"

namespace smm {

using ordered_json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Exact binomial machinery

// P[Bin(n, p0) >= k], summed in log space.
double binomial_tail(std::uint64_t n, std::uint64_t k, double p0);

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

// Exact two-sided Clopper-Pearson interval at the given confidence.
Interval clopper_pearson(std::uint64_t n, std::uint64_t k, double confidence);

// ---------------------------------------------------------------------------
// Renormalisation map f(p) = p^9 + 9 p^8 (1 - p)

double renorm_map(double p);

struct RenormResult {
  std::vector<double> sequence;     // p_0 .. p_kmax
  std::vector<double> partial_sums; // sum_{j<=k} (1 - p_j)
  bool converged = false;           // 1 - p_k < 1e-12 for some k <= kmax
  std::size_t steps_to_converge = 0;
};

RenormResult renorm_iterate(double p0, std::size_t k_max);
// Largest fixed point of f strictly below 1, by bisection to 1e-12.
double renorm_threshold();

// ---------------------------------------------------------------------------
// Replica plumbing

unsigned default_jobs();

// Runs fn(i) for i in [0, count) on up to `jobs` threads. Results are stored
// by index, so the output does not depend on the worker count. The exception
// of the lowest failing replica is rethrown.
template <class Result, class Fn>
std::vector<Result> run_replicas(std::size_t count, unsigned jobs, Fn&& fn) {
  std::vector<Result> out(count);
  std::vector<std::exception_ptr> errors(count);
  if (jobs == 0) jobs = default_jobs();
  const std::size_t workers = std::min<std::size_t>(jobs, count);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        out[i] = fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

struct Summary {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation (n - 1)
  double median = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::size_t count = 0;
};

Summary summarize(std::vector<double> values);

// ---------------------------------------------------------------------------
// Reports

struct ExperimentReport {
  std::string kind;
  ordered_json params = ordered_json::object();
  std::vector<ordered_json> records;  // per-replica rows, identical keys
  ordered_json aggregates = ordered_json::object();
  ordered_json verdicts = ordered_json::object();
  double elapsed_seconds = 0.0;

  // `schema`, kind, params, aggregates, verdicts, records; runtime metadata
  // only when `with_meta`.
  ordered_json to_json(bool with_meta = true) const;
  // One row per record, columns from the first record's keys.
  std::string to_csv() const;
};

// ---------------------------------------------------------------------------
// Experiments

struct ReplicaOptions {
  std::size_t replicas = 1;
  std::uint64_t seed = 12345;
  unsigned jobs = 0;
};

inline constexpr double kGoodnessNull = 0.968;
inline constexpr double kGoodnessLevel = 1e-6;
inline constexpr std::size_t kMinTestSample = 30;

struct GoodnessResult {
  double length = 0.0;
  std::vector<char> good;         // per replica
  std::vector<std::size_t> points;
  std::size_t good_count = 0;
  double p_hat = 0.0;
  Interval ci99;
  bool tested = false;
  double p_value = 1.0;           // P[Bin(replicas, 0.968) >= good_count]
  bool reject = false;            // p_value < 1e-6

  ExperimentReport to_report() const;
};

// Poisson points on [0, L], D = 2, core matching, goodness of [0, L].
GoodnessResult run_goodness(double length, const ReplicaOptions& opts, bool fast_path = true);

struct Table1Row {
  std::size_t n = 0;
  std::vector<double> fractions;
  Summary summary;
};

struct Table1Result {
  std::string degrees;
  std::vector<Table1Row> rows;
  ExperimentReport to_report() const;
};

// Uniform points on a cycle of circumference n, stable multi-matching,
// largest component fraction.
Table1Result run_table1(const std::vector<std::size_t>& sizes, const std::string& degree_spec,
                        const ReplicaOptions& opts);

struct TailRow {
  double t = 0.0;
  double x_trunc = 0.0;      // E*[X ^ t] / sqrt(t)
  double m_tail = 0.0;       // t * P*(M > t)
  double stub_excess = 0.0;  // E[(R[0,2t] - L[0,2t])^+] / sqrt(t)
};

struct TailResult {
  Scheme scheme = Scheme::Stable;
  std::string degrees;
  std::size_t n = 0;
  std::vector<TailRow> rows;
  double min_x_trunc = 0.0, max_x_trunc = 0.0;  // over the grid
  double max_m_tail = 0.0;

  ExperimentReport to_report() const;
};

// Geometric grid of ratio 2 from the mean gap (1) up to t_max.
std::vector<double> tail_grid(double t_max);

// Poisson points on [0, n] (scheme random_direction or stable), Palm
// averages over points trimmed by ten mean gaps. The stub-excess column is a
// separate marks-only simulation with `clt_samples` draws per t.
TailResult tail_suite(Scheme scheme, const std::string& degree_spec, std::size_t n, const ReplicaOptions& opts,
                      const std::vector<double>& grid, std::size_t clt_samples = 4000);

struct BlockResult {
  double block = 0.0;
  std::size_t replicas = 0;
  std::size_t violations = 0;
  std::size_t premise_held = 0;  // replicas with >= 8 good blocks
  std::size_t all_nine_good = 0;
  std::vector<int> good_blocks;  // per replica
  std::vector<char> whole_good;

  ExperimentReport to_report() const;
};

// Poisson points on [0, 9x]: goodness of the nine blocks vs the whole.
BlockResult block_combination_check(double block, const ReplicaOptions& opts);

struct FractionResult {
  std::vector<double> fractions;
  std::vector<double> leftover_fractions;
  Summary summary;
};

// Largest component fraction of `scheme` on Poisson points on [0, n]
// (Interval) or uniform points on a cycle of circumference n.
FractionResult run_component_fractions(Scheme scheme, const std::string& degree_spec, std::size_t n,
                                       TopologyKind topology, const ReplicaOptions& opts);

struct MassTransportResult {
  std::vector<double> mean_desire;  // per replica, grid estimate of E[N]
  std::vector<double> mean_longest; // per replica, point average of M
  double ratio = 0.0;               // mean(E[N]) / (2 mean(M))
};

// Uniform points on a cycle of circumference n, D = 2 stable matching.
MassTransportResult run_mass_transport(std::size_t n, const ReplicaOptions& opts);

// Number of edges crossing the window centre, stable matching on Poisson
// points on [0, n].
std::vector<double> run_center_crossings(std::size_t n, const std::string& degree_spec, const ReplicaOptions& opts);

// ---------------------------------------------------------------------------
// JSON-described experiments (C API and CLI)

ExperimentReport run_experiment(const ordered_json& spec);

}  // namespace smm
