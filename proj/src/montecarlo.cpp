#include "smm/montecarlo.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "smm/analysis.hpp"
#include "smm/errors.hpp"

namespace smm {

double binomial_tail(std::uint64_t n, std::uint64_t k, double p0) {
  if (!(p0 >= 0.0 && p0 <= 1.0)) throw ArgumentError("binomial_tail needs 0 <= p0 <= 1");
  if (k > n) throw ArgumentError("binomial_tail needs 0 <= k <= n");
  if (k == 0) return 1.0;
  if (p0 == 0.0) return 0.0;
  if (p0 == 1.0) return 1.0;
  const double lp = std::log(p0);
  const double lq = std::log1p(-p0);
  const double lnf = std::lgamma(static_cast<double>(n) + 1.0);
  std::vector<double> terms;
  terms.reserve(n - k + 1);
  double top = -std::numeric_limits<double>::infinity();
  for (std::uint64_t i = k; i <= n; ++i) {
    const double di = static_cast<double>(i);
    const double t = lnf - std::lgamma(di + 1.0) - std::lgamma(static_cast<double>(n - i) + 1.0) + di * lp +
                     static_cast<double>(n - i) * lq;
    terms.push_back(t);
    top = std::max(top, t);
  }
  // Sum from the smallest terms up.
  std::sort(terms.begin(), terms.end());
  long double acc = 0.0L;
  for (double t : terms) acc += std::exp(static_cast<long double>(t - top));
  const double value = std::exp(top) * static_cast<double>(acc);
  return std::min(1.0, value);
}

Interval clopper_pearson(std::uint64_t n, std::uint64_t k, double confidence) {
  if (n == 0) throw ArgumentError("clopper_pearson needs n >= 1");
  if (k > n) throw ArgumentError("clopper_pearson needs k <= n");
  if (!(confidence > 0.0 && confidence < 1.0)) throw ArgumentError("confidence must lie in (0, 1)");
  const double half = (1.0 - confidence) / 2.0;
  // Solves g(p) = target for g increasing in p.
  auto solve = [](auto&& g, double target) {
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
      const double mid = 0.5 * (lo + hi);
      (g(mid) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  Interval ci;
  ci.lo = k == 0 ? 0.0 : solve([&](double p) { return binomial_tail(n, k, p); }, half);
  ci.hi = k == n ? 1.0 : solve([&](double p) { return binomial_tail(n, k + 1, p); }, 1.0 - half);
  return ci;
}

double renorm_map(double p) {
  const double p8 = std::pow(p, 8);
  return p8 * p + 9.0 * p8 * (1.0 - p);
}

RenormResult renorm_iterate(double p0, std::size_t k_max) {
  if (!(p0 >= 0.0 && p0 <= 1.0)) throw ArgumentError("p0 must lie in [0, 1]");
  if (k_max < 1) throw ArgumentError("k_max must be >= 1");
  RenormResult r;
  double p = p0;
  double sum = 0.0;
  for (std::size_t k = 0; k <= k_max; ++k) {
    r.sequence.push_back(p);
    sum += 1.0 - p;
    r.partial_sums.push_back(sum);
    if (!r.converged && 1.0 - p < 1e-12) {
      r.converged = true;
      r.steps_to_converge = k;
    }
    p = renorm_map(p);
  }
  return r;
}

double renorm_threshold() {
  // f(p) - p = p (9 p^7 - 8 p^8 - 1); the bracket is increasing on
  // (0, 63/64), negative at 1/2 and positive at 63/64.
  auto h = [](double p) { return renorm_map(p) - p; };
  double lo = 0.5, hi = 63.0 / 64.0;
  while (hi - lo > 1e-13) {
    const double mid = 0.5 * (lo + hi);
    (h(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

unsigned default_jobs() {
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : hc;
}

Summary summarize(std::vector<double> values) {
  Summary s;
  s.count = values.size();
  if (values.empty()) return s;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  std::sort(values.begin(), values.end());
  s.min = values.front();
  s.max = values.back();
  const std::size_t m = values.size() / 2;
  s.median = values.size() % 2 ? values[m] : 0.5 * (values[m - 1] + values[m]);
  return s;
}

namespace {

ordered_json summary_json(const Summary& s) {
  return ordered_json{{"mean", s.mean}, {"sd", s.sd}, {"median", s.median},
                      {"min", s.min},   {"max", s.max}, {"count", s.count}};
}

std::string csv_cell(const ordered_json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_float()) return format_real(v.get<double>());
  return v.dump();
}

}  // namespace

ordered_json ExperimentReport::to_json(bool with_meta) const {
  ordered_json j;
  j["schema"] = 1;
  j["kind"] = kind;
  j["params"] = params;
  j["aggregates"] = aggregates;
  j["verdicts"] = verdicts;
  j["records"] = records;
  if (with_meta) j["meta"] = ordered_json{{"elapsed_seconds", elapsed_seconds}};
  return j;
}

std::string ExperimentReport::to_csv() const {
  std::ostringstream out;
  if (records.empty()) return "schema=1\n";
  bool first = true;
  for (const auto& [key, _] : records.front().items()) {
    out << (first ? "" : ",") << key;
    first = false;
  }
  out << '\n';
  for (const auto& r : records) {
    first = true;
    for (const auto& [key, value] : r.items()) {
      out << (first ? "" : ",") << csv_cell(value);
      first = false;
    }
    out << '\n';
  }
  return out.str();
}

// --- goodness --------------------------------------------------------------

GoodnessResult run_goodness(double length, const ReplicaOptions& opts, bool fast_path) {
  if (!(length > 0.0)) throw ArgumentError("goodness needs L > 0");
  if (opts.replicas < 1) throw ArgumentError("replicas must be >= 1");
  struct One {
    char good = 0;
    std::size_t points = 0;
  };
  const auto runs = run_replicas<One>(opts.replicas, opts.jobs, [&](std::size_t i) {
    Rng rng(replica_seed(opts.seed, i));
    const PointConfig pts = sample_poisson_interval(length, rng);
    const MarkedConfig marked = with_constant_degree(pts, 2);
    const Matching m = fast_path ? core_match_fast(marked) : core_match(marked);
    return One{static_cast<char>(is_good(m, pts, 0.0, length)), pts.size()};
  });

  GoodnessResult r;
  r.length = length;
  for (const One& o : runs) {
    r.good.push_back(o.good);
    r.points.push_back(o.points);
    r.good_count += o.good ? 1 : 0;
  }
  const auto n = static_cast<std::uint64_t>(opts.replicas);
  r.p_hat = static_cast<double>(r.good_count) / static_cast<double>(n);
  r.ci99 = clopper_pearson(n, r.good_count, 0.99);
  r.tested = opts.replicas >= kMinTestSample;
  if (r.tested) {
    r.p_value = binomial_tail(n, r.good_count, kGoodnessNull);
    r.reject = r.p_value < kGoodnessLevel;
  }
  return r;
}

ExperimentReport GoodnessResult::to_report() const {
  ExperimentReport rep;
  rep.kind = "goodness";
  rep.params["length"] = length;
  rep.params["replicas"] = good.size();
  for (std::size_t i = 0; i < good.size(); ++i)
    rep.records.push_back(ordered_json{{"replica", i}, {"points", points[i]}, {"good", good[i] != 0}});
  rep.aggregates["good_count"] = good_count;
  rep.aggregates["p_hat"] = p_hat;
  rep.aggregates["ci99"] = ordered_json{ci99.lo, ci99.hi};
  rep.verdicts["null_p"] = kGoodnessNull;
  rep.verdicts["level"] = kGoodnessLevel;
  if (tested) {
    rep.verdicts["p_value"] = p_value;
    rep.verdicts["verdict"] = reject ? "reject" : "fail-to-reject";
  } else {
    rep.verdicts["p_value"] = nullptr;
    rep.verdicts["verdict"] = "not-tested";
  }
  return rep;
}

// --- table 1 -----------------------------------------------------------------

Table1Result run_table1(const std::vector<std::size_t>& sizes, const std::string& degree_spec,
                        const ReplicaOptions& opts) {
  if (sizes.empty()) throw ArgumentError("table1 needs at least one size");
  if (opts.replicas < 1) throw ArgumentError("replicas must be >= 1");
  const DegreeDistribution dist = DegreeDistribution::parse(degree_spec);
  Table1Result result;
  result.degrees = degree_spec;
  for (std::size_t s = 0; s < sizes.size(); ++s) {
    const std::size_t n = sizes[s];
    if (n < 1) throw ArgumentError("table1 sizes must be positive");
    Table1Row row;
    row.n = n;
    row.fractions = run_replicas<double>(opts.replicas, opts.jobs, [&](std::size_t i) {
      Rng rng(replica_seed(opts.seed, s * opts.replicas + i));
      const PointConfig pts = sample_uniform_cycle(n, static_cast<double>(n), rng);
      const MarkedConfig marked = assign_degrees(pts, dist, rng);
      return largest_component_fraction(stable_multimatch(marked));
    });
    row.summary = summarize(row.fractions);
    result.rows.push_back(std::move(row));
  }
  return result;
}

ExperimentReport Table1Result::to_report() const {
  ExperimentReport rep;
  rep.kind = "table1";
  rep.params["degrees"] = degrees;
  ordered_json sizes = ordered_json::array();
  ordered_json rows_json = ordered_json::array();
  for (const auto& row : rows) {
    sizes.push_back(row.n);
    ordered_json r = summary_json(row.summary);
    r["n"] = row.n;
    rows_json.push_back(std::move(r));
    for (std::size_t i = 0; i < row.fractions.size(); ++i)
      rep.records.push_back(ordered_json{{"n", row.n}, {"replica", i}, {"largest_fraction", row.fractions[i]}});
  }
  rep.params["sizes"] = sizes;
  rep.params["replicas"] = rows.empty() ? 0 : rows.front().fractions.size();
  rep.aggregates["rows"] = rows_json;
  return rep;
}

// --- tails -------------------------------------------------------------------

std::vector<double> tail_grid(double t_max) {
  std::vector<double> grid;
  for (double t = 1.0; t <= t_max; t *= 2.0) grid.push_back(t);
  return grid;
}

TailResult tail_suite(Scheme scheme, const std::string& degree_spec, std::size_t n, const ReplicaOptions& opts,
                      const std::vector<double>& grid, std::size_t clt_samples) {
  if (scheme != Scheme::Stable && scheme != Scheme::RandomDirection)
    throw ArgumentError("tail suite supports the stable and random_direction schemes");
  if (grid.empty()) throw ArgumentError("tail suite needs a non-empty t-grid");
  const DegreeDistribution dist = DegreeDistribution::parse(degree_spec);
  const std::size_t g = grid.size();

  struct Sums {
    std::vector<double> x_trunc;
    std::vector<double> m_exceed;
    double points = 0.0;
  };
  const auto per_replica = run_replicas<Sums>(opts.replicas, opts.jobs, [&](std::size_t i) {
    Rng rng(replica_seed(opts.seed, i));
    const PointConfig pts = sample_poisson_interval(static_cast<double>(n), rng);
    MarkedConfig marked = assign_degrees(pts, dist, rng);
    if (scheme == Scheme::RandomDirection) marked = assign_directions(std::move(marked), rng);
    const Matching m = run_scheme(scheme, marked);
    const EdgeStats stats = point_stats(m, pts);
    Sums s{std::vector<double>(g, 0.0), std::vector<double>(g, 0.0), 0.0};
    for (std::uint32_t p : trimmed_points(pts, default_margin(pts))) {
      const PointStats& ps = stats.points[p];
      s.points += 1.0;
      for (std::size_t k = 0; k < g; ++k) {
        s.x_trunc[k] += std::min(ps.mean, grid[k]);
        if (ps.longest > grid[k]) s.m_exceed[k] += 1.0;
      }
    }
    return s;
  });

  // Marks-only check of E[(R - L)^+] over windows of length 2t.
  const auto clt = run_replicas<double>(g, opts.jobs, [&](std::size_t k) {
    Rng rng(replica_seed(splitmix64(opts.seed ^ 0x5ca1ab1eULL), k));
    const double t = grid[k];
    double acc = 0.0;
    for (std::size_t s = 0; s < clt_samples; ++s) {
      const std::uint64_t count = rng.poisson(2.0 * t);
      long long excess = 0;
      for (std::uint64_t p = 0; p < count; ++p) {
        const int d = dist.sample(rng);
        excess += 2LL * rng.fair_binomial(d) - d;
      }
      acc += static_cast<double>(std::max(0LL, excess));
    }
    return clt_samples ? acc / static_cast<double>(clt_samples) / std::sqrt(t) : 0.0;
  });

  TailResult r;
  r.scheme = scheme;
  r.degrees = degree_spec;
  r.n = n;
  double points = 0.0;
  std::vector<double> x(g, 0.0), mex(g, 0.0);
  for (const Sums& s : per_replica) {
    points += s.points;
    for (std::size_t k = 0; k < g; ++k) {
      x[k] += s.x_trunc[k];
      mex[k] += s.m_exceed[k];
    }
  }
  for (std::size_t k = 0; k < g; ++k) {
    TailRow row;
    row.t = grid[k];
    row.x_trunc = points > 0 ? x[k] / points / std::sqrt(grid[k]) : 0.0;
    row.m_tail = points > 0 ? grid[k] * mex[k] / points : 0.0;
    row.stub_excess = clt[k];
    r.rows.push_back(row);
  }
  r.min_x_trunc = r.max_x_trunc = r.rows.front().x_trunc;
  for (const TailRow& row : r.rows) {
    r.min_x_trunc = std::min(r.min_x_trunc, row.x_trunc);
    r.max_x_trunc = std::max(r.max_x_trunc, row.x_trunc);
    r.max_m_tail = std::max(r.max_m_tail, row.m_tail);
  }
  return r;
}

ExperimentReport TailResult::to_report() const {
  ExperimentReport rep;
  rep.kind = "tails";
  rep.params["scheme"] = to_string(scheme);
  rep.params["degrees"] = degrees;
  rep.params["n"] = n;
  for (const TailRow& row : rows)
    rep.records.push_back(ordered_json{
        {"t", row.t}, {"x_trunc", row.x_trunc}, {"m_tail", row.m_tail}, {"stub_excess", row.stub_excess}});
  rep.aggregates["min_x_trunc"] = min_x_trunc;
  rep.aggregates["max_x_trunc"] = max_x_trunc;
  rep.aggregates["max_m_tail"] = max_m_tail;
  rep.verdicts["x_trunc_no_decay"] = min_x_trunc >= 0.1 * max_x_trunc;
  return rep;
}

// --- blocks ------------------------------------------------------------------

BlockResult block_combination_check(double block, const ReplicaOptions& opts) {
  if (!(block > 0.0)) throw ArgumentError("block length must be positive");
  if (opts.replicas < 1) throw ArgumentError("replicas must be >= 1");
  struct One {
    int good_blocks = 0;
    char whole = 0;
  };
  const auto runs = run_replicas<One>(opts.replicas, opts.jobs, [&](std::size_t i) {
    Rng rng(replica_seed(opts.seed, i));
    const double whole_len = 9.0 * block;
    const PointConfig pts = sample_poisson_interval(whole_len, rng);
    const MarkedConfig marked = with_constant_degree(pts, 2);
    One o;
    for (int k = 0; k < 9; ++k) {
      const double a = k * block, b = (k + 1) * block;
      if (is_good(core_match_window(marked, a, b), pts, a, b)) ++o.good_blocks;
    }
    o.whole = is_good(core_match_window(marked, 0.0, whole_len), pts, 0.0, whole_len);
    return o;
  });
  BlockResult r;
  r.block = block;
  r.replicas = opts.replicas;
  for (const One& o : runs) {
    r.good_blocks.push_back(o.good_blocks);
    r.whole_good.push_back(o.whole);
    if (o.good_blocks >= 8) {
      ++r.premise_held;
      if (!o.whole) ++r.violations;
    }
    if (o.good_blocks == 9) ++r.all_nine_good;
  }
  return r;
}

ExperimentReport BlockResult::to_report() const {
  ExperimentReport rep;
  rep.kind = "blocks";
  rep.params["block"] = block;
  rep.params["replicas"] = replicas;
  for (std::size_t i = 0; i < good_blocks.size(); ++i)
    rep.records.push_back(
        ordered_json{{"replica", i}, {"good_blocks", good_blocks[i]}, {"whole_good", whole_good[i] != 0}});
  rep.aggregates["premise_held"] = premise_held;
  rep.aggregates["all_nine_good"] = all_nine_good;
  rep.aggregates["violations"] = violations;
  rep.verdicts["combination_holds"] = violations == 0;
  return rep;
}

// --- other trend experiments -----------------------------------------------

FractionResult run_component_fractions(Scheme scheme, const std::string& degree_spec, std::size_t n,
                                       TopologyKind topology, const ReplicaOptions& opts) {
  const DegreeDistribution dist = DegreeDistribution::parse(degree_spec);
  struct One {
    double fraction = 0.0;
    double leftover = 0.0;
  };
  const auto runs = run_replicas<One>(opts.replicas, opts.jobs, [&](std::size_t i) {
    Rng rng(replica_seed(opts.seed, i));
    const PointConfig pts = topology == TopologyKind::Cycle
                                ? sample_uniform_cycle(n, static_cast<double>(n), rng)
                                : sample_poisson_interval(static_cast<double>(n), rng);
    MarkedConfig marked = assign_degrees(pts, dist, rng);
    if (scheme == Scheme::RandomDirection) marked = assign_directions(std::move(marked), rng);
    const Matching m = run_scheme(scheme, marked);
    const double stubs = std::accumulate(marked.degrees.begin(), marked.degrees.end(), 0.0);
    return One{largest_component_fraction(m), stubs > 0 ? static_cast<double>(m.total_leftover()) / stubs : 0.0};
  });
  FractionResult r;
  for (const One& o : runs) {
    r.fractions.push_back(o.fraction);
    r.leftover_fractions.push_back(o.leftover);
  }
  r.summary = summarize(r.fractions);
  return r;
}

MassTransportResult run_mass_transport(std::size_t n, const ReplicaOptions& opts) {
  struct One {
    double desire = 0.0;
    double longest = 0.0;
  };
  const auto runs = run_replicas<One>(opts.replicas, opts.jobs, [&](std::size_t i) {
    Rng rng(replica_seed(opts.seed, i));
    const PointConfig pts = sample_uniform_cycle(n, static_cast<double>(n), rng);
    const Matching m = stable_multimatch(with_constant_degree(pts, 2));
    const EdgeStats stats = point_stats(m, pts);
    double total = 0.0;
    for (const auto& s : stats.points) total += s.longest;
    return One{mean_desire_over_grid(m, pts, 4 * n), total / static_cast<double>(n)};
  });
  MassTransportResult r;
  double d = 0.0, l = 0.0;
  for (const One& o : runs) {
    r.mean_desire.push_back(o.desire);
    r.mean_longest.push_back(o.longest);
    d += o.desire;
    l += o.longest;
  }
  r.ratio = l > 0.0 ? d / (2.0 * l) : 0.0;
  return r;
}

std::vector<double> run_center_crossings(std::size_t n, const std::string& degree_spec, const ReplicaOptions& opts) {
  const DegreeDistribution dist = DegreeDistribution::parse(degree_spec);
  return run_replicas<double>(opts.replicas, opts.jobs, [&](std::size_t i) {
    Rng rng(replica_seed(opts.seed, i));
    const double len = static_cast<double>(n);
    const PointConfig pts = sample_poisson_interval(len, rng);
    const Matching m = stable_multimatch(assign_degrees(pts, dist, rng));
    return static_cast<double>(crossings_at(m, pts, len / 2.0));
  });
}

// --- JSON front door ---------------------------------------------------------

namespace {

template <class T>
T get_or(const ordered_json& spec, const char* key, T fallback) {
  const auto it = spec.find(key);
  if (it == spec.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ArgumentError(std::string("bad value for '") + key + "'");
  }
}

ReplicaOptions replica_options(const ordered_json& spec, std::size_t default_replicas) {
  ReplicaOptions o;
  o.replicas = get_or<std::size_t>(spec, "replicas", default_replicas);
  o.seed = get_or<std::uint64_t>(spec, "seed", 12345);
  o.jobs = get_or<unsigned>(spec, "jobs", 0);
  if (o.replicas < 1) throw ArgumentError("replicas must be >= 1");
  return o;
}

}  // namespace

ExperimentReport run_experiment(const ordered_json& spec) {
  if (!spec.is_object()) throw ArgumentError("experiment spec must be a JSON object");
  const std::string kind = get_or<std::string>(spec, "kind", "");
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport rep;

  if (kind == "goodness") {
    const auto opts = replica_options(spec, 1000);
    const double length = get_or<double>(spec, "length", 13000.0);
    const bool fast = get_or<bool>(spec, "fast_path", true);
    rep = run_goodness(length, opts, fast).to_report();
    rep.params["seed"] = opts.seed;
    rep.params["fast_path"] = fast;
  } else if (kind == "table1") {
    const auto opts = replica_options(spec, 10);
    const auto sizes = get_or<std::vector<std::size_t>>(spec, "sizes", {1024, 4096, 16384});
    const auto degrees = get_or<std::string>(spec, "degrees", "2");
    rep = run_table1(sizes, degrees, opts).to_report();
    rep.params["seed"] = opts.seed;
  } else if (kind == "tails") {
    const auto opts = replica_options(spec, 4);
    const Scheme scheme = parse_scheme(get_or<std::string>(spec, "scheme", "random_direction"));
    const auto degrees = get_or<std::string>(spec, "degrees", "2");
    const auto n = get_or<std::size_t>(spec, "n", std::size_t{1} << 16);
    const double t_max = get_or<double>(spec, "t_max", 4096.0);
    const auto samples = get_or<std::size_t>(spec, "clt_samples", 4000);
    DegreeDistribution::parse(degrees);
    rep = tail_suite(scheme, degrees, n, opts, tail_grid(t_max), samples).to_report();
    rep.params["replicas"] = opts.replicas;
    rep.params["seed"] = opts.seed;
    rep.params["t_max"] = t_max;
    rep.params["clt_samples"] = samples;
  } else if (kind == "renorm") {
    const double p0 = get_or<double>(spec, "p0", kGoodnessNull);
    const auto kmax = get_or<std::size_t>(spec, "kmax", 50);
    const RenormResult r = renorm_iterate(p0, kmax);
    const double threshold = renorm_threshold();
    rep.kind = "renorm";
    rep.params["p0"] = p0;
    rep.params["kmax"] = kmax;
    for (std::size_t k = 0; k < r.sequence.size(); ++k)
      rep.records.push_back(ordered_json{{"k", k}, {"p", r.sequence[k]}, {"partial_sum", r.partial_sums[k]}});
    rep.aggregates["threshold"] = threshold;
    rep.aggregates["f_p0"] = renorm_map(p0);
    rep.aggregates["steps_to_converge"] = r.converged ? ordered_json(r.steps_to_converge) : ordered_json(nullptr);
    rep.verdicts["converges_to_1"] = r.converged;
    rep.verdicts["above_threshold"] = p0 > threshold;
  } else if (kind == "blocks") {
    const auto opts = replica_options(spec, 200);
    const double block = get_or<double>(spec, "block", 500.0);
    rep = block_combination_check(block, opts).to_report();
    rep.params["seed"] = opts.seed;
  } else {
    throw ArgumentError("unknown experiment kind '" + kind + "'");
  }
  rep.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

}  // namespace smm
