#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "smm/smm.h"

namespace {

using json = nlohmann::ordered_json;

constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

struct Failure {
  int code;
  std::string message;
};

void check(smm_status s) {
  if (s == SMM_OK) return;
  throw Failure{s == SMM_ERR_ARGUMENT ? kExitUsage : kExitRuntime, smm_last_error()};
}

struct CString {
  char* p = nullptr;
  ~CString() { smm_free_string(p); }
  std::string str() const { return p ? std::string(p) : std::string(); }
};

struct PointsPtr {
  smm_points* p = nullptr;
  ~PointsPtr() { smm_points_free(p); }
};

struct MatchingPtr {
  smm_matching* p = nullptr;
  ~MatchingPtr() { smm_matching_free(p); }
};

// Collects outputs and publishes them only once every file has been written.
class Outputs {
 public:
  void add(const std::string& path, std::string data) { items_.push_back({path, std::move(data)}); }

  void commit() {
    std::vector<std::filesystem::path> temps;
    auto cleanup = [&] {
      std::error_code ec;
      for (const auto& t : temps) std::filesystem::remove(t, ec);
    };
    for (const auto& [path, data] : items_) {
      if (path.empty() || path == "-") continue;
      std::filesystem::path tmp = path + ".tmp." + std::to_string(::getpid());
      temps.push_back(tmp);
      std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
      f << data;
      f.close();
      if (!f) {
        cleanup();
        throw Failure{kExitRuntime, "cannot write " + path};
      }
    }
    std::size_t k = 0;
    for (const auto& [path, data] : items_) {
      if (path.empty() || path == "-") {
        std::cout << data;
        continue;
      }
      std::error_code ec;
      std::filesystem::rename(temps[k], path, ec);
      if (ec) {
        cleanup();
        throw Failure{kExitRuntime, "cannot write " + path + ": " + ec.message()};
      }
      ++k;
    }
    std::cout.flush();
  }

 private:
  std::vector<std::pair<std::string, std::string>> items_;
};

struct Common {
  std::string config;
  std::uint64_t seed = 12345;
  std::string out;
  std::string format;
  unsigned jobs = 0;
  bool no_meta = false;
};

void add_common(CLI::App* sub, Common& c, const std::string& default_format, std::vector<std::string> formats) {
  sub->add_option("--config", c.config, "TOML file mirroring the flags; flags win on conflict");
  sub->add_option("--seed", c.seed, "Base seed")->capture_default_str();
  sub->add_option("--out", c.out, "Output path (stdout when omitted)");
  c.format = default_format;
  sub->add_option("--format", c.format, "Output format")->check(CLI::IsMember(std::move(formats)))->capture_default_str();
  sub->add_option("--jobs", c.jobs, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
  sub->add_flag("--no-meta", c.no_meta, "Omit runtime metadata");
}

// Fills options that were not given on the command line from a TOML file
// whose keys are the long flag names.
void apply_config(CLI::App* sub, const std::string& path) {
  if (path.empty()) return;
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigTOML().from_file(path);
  } catch (const CLI::FileError& e) {
    throw Failure{kExitUsage, e.what()};
  }
  for (const CLI::ConfigItem& item : items) {
    if (!item.parents.empty() || item.name == "config") throw Failure{kExitUsage, "unknown config key '" + item.fullname() + "'"};
    CLI::Option* opt = sub->get_option_no_throw("--" + item.name);
    if (!opt) throw Failure{kExitUsage, "unknown config key '" + item.name + "'"};
    if (opt->count() > 0) continue;
    try {
      for (const auto& input : item.inputs) opt->add_result(input);
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw Failure{kExitUsage, "config key '" + item.name + "': " + e.what()};
    }
  }
}

// Resolved flags of a subcommand as JSON, excluding options that cannot
// change the data (output routing and parallelism).
json resolved_config(const CLI::App* sub) {
  json cfg = json::object();
  for (const CLI::Option* opt : sub->get_options()) {
    const std::string name = opt->get_single_name();
    if (name.empty() || name == "help" || name == "config" || name == "out" || name == "jobs") continue;
    if (opt->get_type_size() == 0) {
      cfg[name] = opt->count() > 0 && opt->as<bool>();
      continue;
    }
    std::vector<std::string> values = opt->results();
    if (values.empty()) {
      const std::string d = opt->get_default_str();
      if (d.empty()) continue;
      values = {d};
    }
    const bool text = opt->get_type_name().find("TEXT") != std::string::npos;
    auto to_json = [text](const std::string& s) {
      if (text) return json(s);
      json v = json::parse(s, nullptr, false);
      return v.is_discarded() || v.is_object() || v.is_array() ? json(s) : v;
    };
    if (opt->get_items_expected_max() > 1) {
      json arr = json::array();
      for (const auto& v : values)
        for (const auto& piece : CLI::detail::split(v, ',')) arr.push_back(to_json(piece));
      cfg[name] = arr;
    } else {
      cfg[name] = to_json(values.back());
    }
  }
  return cfg;
}

// One JSON line describing the run: to stdout when data went to a file,
// otherwise to stderr so the data stream stays clean.
void emit_record(const Common& c, const json& record) {
  (c.out.empty() || c.out == "-" ? std::cerr : std::cout) << record.dump() << '\n';
}

std::pair<double, double> parse_window(const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos) throw Failure{kExitUsage, "--good expects a:b"};
  try {
    std::size_t used = 0;
    const double a = std::stod(s.substr(0, colon), &used);
    if (used != colon) throw std::invalid_argument(s);
    const std::string rest = s.substr(colon + 1);
    const double b = std::stod(rest, &used);
    if (used != rest.size()) throw std::invalid_argument(s);
    if (!(a < b)) throw Failure{kExitUsage, "--good needs a < b"};
    return {a, b};
  } catch (const std::logic_error&) {
    throw Failure{kExitUsage, "--good expects a:b with real endpoints"};
  }
}

smm_points* load_points(const std::string& path) {
  smm_points* p = nullptr;
  check(smm_points_load(path.c_str(), &p));
  return p;
}

// --- one-shot pipeline -----------------------------------------------------

struct SampleArgs {
  Common c;
  std::string process = "poisson";
  double length = 100.0;
  std::size_t n = 0;
  double circumference = 0.0;
  std::size_t cells = 0;
  int copies = 1;
};

void cmd_sample(const CLI::App* sub, const SampleArgs& a) {
  PointsPtr pts;
  if (a.process == "poisson") {
    check(smm_points_sample_poisson(a.length, a.c.seed, &pts.p));
  } else if (a.process == "cycle") {
    if (a.n == 0) throw Failure{kExitUsage, "--process cycle needs --n > 0"};
    const double circ = a.circumference > 0.0 ? a.circumference : static_cast<double>(a.n);
    check(smm_points_sample_cycle(a.n, circ, a.c.seed, &pts.p));
  } else {
    check(smm_points_perturbed_lattice(a.cells, a.copies, a.c.seed, &pts.p));
  }
  const std::size_t count = smm_points_count(pts.p);
  const json cfg = resolved_config(sub);
  std::string data;
  if (a.c.format == "points") {
    CString s;
    check(smm_points_to_string(pts.p, &s.p));
    data = s.str();
  } else if (a.c.format == "csv") {
    std::ostringstream out;
    CString s;
    out << "index,pos\n";
    check(smm_points_to_string(pts.p, &s.p));
    std::istringstream lines(s.str());
    std::string line;
    std::getline(lines, line);
    for (std::size_t i = 0; std::getline(lines, line); ++i) out << i << ',' << line << '\n';
    data = out.str();
  } else {
    const double* xs = smm_points_data(pts.p);
    json j;
    j["schema"] = 1;
    j["config"] = cfg;
    j["topology"] = smm_points_is_cycle(pts.p) ? "cycle" : "interval";
    j["extent"] = smm_points_extent(pts.p);
    j["positions"] = std::vector<double>(xs, xs + count);
    data = j.dump(2) + "\n";
  }
  Outputs out;
  out.add(a.c.out, std::move(data));
  out.commit();
  emit_record(a.c, json{{"command", "sample"}, {"config", cfg}, {"points", count}});
}

struct MatchArgs {
  Common c;
  std::string in;
  std::string degrees = "2";
  std::string scheme = "stable";
  std::string summary;
};

void cmd_match(const CLI::App* sub, const MatchArgs& a) {
  PointsPtr pts;
  pts.p = load_points(a.in);
  MatchingPtr m;
  check(smm_match(pts.p, a.degrees.c_str(), a.scheme.c_str(), a.c.seed, &m.p));
  const json cfg = resolved_config(sub);
  CString summary_text;
  check(smm_matching_summary_json(m.p, &summary_text.p));
  json summary = json::parse(summary_text.str());
  summary["config"] = cfg;

  Outputs out;
  if (a.c.format == "csv") {
    CString csv;
    check(smm_matching_to_csv(m.p, &csv.p));
    out.add(a.c.out, csv.str());
  } else {
    json j = summary;
    json edges = json::array();
    for (std::size_t k = 0; k < smm_matching_edge_count(m.p); ++k) {
      std::uint32_t u = 0, v = 0;
      check(smm_matching_edge(m.p, k, &u, &v));
      edges.push_back(json{u, v});
    }
    j["edge_list"] = edges;
    out.add(a.c.out, j.dump(2) + "\n");
  }
  if (!a.summary.empty()) out.add(a.summary, summary.dump(2) + "\n");
  out.commit();
  json record{{"command", "match"}};
  record.update(summary);
  emit_record(a.c, record);
}

struct AnalyzeArgs {
  Common c;
  std::string points;
  std::string edges;
  std::string good;
  std::string per_point;
  bool components = false;
};

void cmd_analyze(const CLI::App* sub, const AnalyzeArgs& a) {
  PointsPtr pts;
  pts.p = load_points(a.points);
  MatchingPtr m;
  check(smm_matching_load_csv(pts.p, a.edges.c_str(), &m.p));
  json opts = json::object();
  if (!a.good.empty()) {
    const auto [lo, hi] = parse_window(a.good);
    opts["good"] = json{lo, hi};
  }
  opts["component_lists"] = a.components;
  const std::string opts_text = opts.dump();
  const bool want_csv = a.c.format == "csv" || !a.per_point.empty();
  CString report, per_point;
  check(smm_analyze(m.p, opts_text.c_str(), &report.p, want_csv ? &per_point.p : nullptr));
  json j = json::parse(report.str());
  j["config"] = resolved_config(sub);

  Outputs out;
  if (a.c.format == "csv") out.add(a.c.out, per_point.str());
  else out.add(a.c.out, j.dump(2) + "\n");
  if (!a.per_point.empty()) out.add(a.per_point, per_point.str());
  out.commit();
  if (a.c.format == "csv") emit_record(a.c, json{{"command", "analyze"}, {"config", j["config"]}});
}

struct DrawArgs {
  Common c;
  std::string points;
  std::string edges;
  std::string degrees;
  std::string scheme;
  bool color_stubs = false;
  double width = 1200.0;
};

void cmd_draw(const CLI::App* sub, const DrawArgs& a) {
  PointsPtr pts;
  pts.p = load_points(a.points);
  MatchingPtr m;
  if (!a.edges.empty()) {
    if (!a.scheme.empty() || !a.degrees.empty()) throw Failure{kExitUsage, "--edges excludes --scheme/--degrees"};
    check(smm_matching_load_csv(pts.p, a.edges.c_str(), &m.p));
  } else {
    if (a.scheme.empty()) throw Failure{kExitUsage, "draw needs --edges or --scheme"};
    const std::string degrees = a.degrees.empty() ? "2" : a.degrees;
    check(smm_match(pts.p, degrees.c_str(), a.scheme.c_str(), a.c.seed, &m.p));
  }
  const json opts{{"color_stubs", a.color_stubs}, {"meta", !a.c.no_meta}, {"width", a.width}};
  const std::string opts_text = opts.dump();
  CString svg;
  check(smm_draw_svg(m.p, opts_text.c_str(), &svg.p));
  Outputs out;
  out.add(a.c.out, svg.str());
  out.commit();
  emit_record(a.c, json{{"command", "draw"}, {"config", resolved_config(sub)}, {"edges", smm_matching_edge_count(m.p)}});
}

// --- experiments -----------------------------------------------------------

void run_report(const CLI::App* sub, const Common& c, json spec, const std::string& kind) {
  spec["kind"] = kind;
  spec["seed"] = c.seed;
  spec["jobs"] = c.jobs;
  const std::string text = spec.dump();
  CString report_json, report_csv;
  const bool csv = c.format == "csv";
  check(smm_run_experiment(text.c_str(), c.no_meta ? 0 : 1, &report_json.p, csv ? &report_csv.p : nullptr));
  json report = json::parse(report_json.str());
  const json cfg = resolved_config(sub);
  report["config"] = cfg;

  Outputs out;
  out.add(c.out, csv ? report_csv.str() : report.dump(2) + "\n");
  out.commit();
  json record{{"command", kind}, {"config", cfg}, {"aggregates", report["aggregates"]}, {"verdicts", report["verdicts"]}};
  if (c.format == "csv" || !c.out.empty()) emit_record(c, record);
}

struct GoodnessArgs {
  Common c;
  double length = 13000.0;
  std::size_t replicas = 1000;
  bool general = false;
};

struct Table1Args {
  Common c;
  std::string degrees = "2";
  std::vector<std::size_t> sizes{1024, 4096, 16384};
  std::size_t replicas = 10;
};

struct TailsArgs {
  Common c;
  std::string scheme = "random_direction";
  std::string degrees = "2";
  std::size_t n = std::size_t{1} << 16;
  std::size_t replicas = 4;
  double t_max = 4096.0;
  std::size_t clt_samples = 4000;
};

struct RenormArgs {
  Common c;
  double p0 = 0.968;
  std::size_t kmax = 50;
};

struct BlocksArgs {
  Common c;
  double block = 500.0;
  std::size_t replicas = 200;
};

int run(int argc, char** argv) {
  CLI::App app{"Stable multi-matchings of one-dimensional point processes"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(smm_version()));

  SampleArgs sample;
  auto* s_sample = app.add_subcommand("sample", "Sample a point configuration");
  add_common(s_sample, sample.c, "points", {"points", "json", "csv"});
  s_sample->add_option("--process", sample.process, "poisson | cycle | lattice")
      ->check(CLI::IsMember({"poisson", "cycle", "lattice"}))
      ->capture_default_str();
  s_sample->add_option("--length", sample.length, "Interval length (poisson)")->capture_default_str();
  s_sample->add_option("--n", sample.n, "Number of points (cycle)");
  s_sample->add_option("--circumference", sample.circumference, "Cycle circumference (default n)");
  s_sample->add_option("--cells", sample.cells, "Lattice cells (lattice)");
  s_sample->add_option("--copies", sample.copies, "Points per cell, 1 or 3 (lattice)")->capture_default_str();

  MatchArgs match;
  auto* s_match = app.add_subcommand("match", "Match a point file");
  add_common(s_match, match.c, "csv", {"csv", "json"});
  s_match->add_option("--in", match.in, "Point file")->required();
  s_match->add_option("--degrees", match.degrees, "Degree spec: k, a:p,b:q or e=2.5")->capture_default_str();
  s_match->add_option("--scheme", match.scheme,
                      "stable | random_direction | core | core_fast | iterated | example1 | example2")
      ->capture_default_str();
  s_match->add_option("--summary", match.summary, "Also write the JSON summary here");

  AnalyzeArgs analyze;
  auto* s_analyze = app.add_subcommand("analyze", "Components, crossings, edge statistics and goodness");
  add_common(s_analyze, analyze.c, "json", {"json", "csv"});
  s_analyze->add_option("--points", analyze.points, "Point file")->required();
  s_analyze->add_option("--edges", analyze.edges, "Edge CSV")->required();
  s_analyze->add_option("--good", analyze.good, "Window a:b for the goodness test");
  s_analyze->add_option("--per-point", analyze.per_point, "Per-point statistics CSV");
  s_analyze->add_flag("--components", analyze.components, "List component members");

  DrawArgs draw;
  auto* s_draw = app.add_subcommand("draw", "Arc diagram (SVG)");
  add_common(s_draw, draw.c, "svg", {"svg"});
  s_draw->add_option("--points", draw.points, "Point file")->required();
  s_draw->add_option("--edges", draw.edges, "Edge CSV");
  s_draw->add_option("--scheme", draw.scheme, "Match on the fly with this scheme");
  s_draw->add_option("--degrees", draw.degrees, "Degree spec for on-the-fly matching (default 2)");
  s_draw->add_flag("--color-stubs", draw.color_stubs, "Colour right/left stubs (directed schemes)");
  s_draw->add_option("--width", draw.width, "Width in pixels")->capture_default_str();

  GoodnessArgs goodness;
  auto* s_goodness = app.add_subcommand("goodness", "Goodness probability of [0, L] with an exact test");
  add_common(s_goodness, goodness.c, "json", {"json", "csv"});
  s_goodness->add_option("--length", goodness.length, "Window length L")->capture_default_str();
  s_goodness->add_option("--replicas", goodness.replicas, "Replicas")->check(CLI::PositiveNumber)->capture_default_str();
  s_goodness->add_flag("--general", goodness.general, "Use the general core algorithm instead of the fast path");

  Table1Args table1;
  auto* s_table1 = app.add_subcommand("table1", "Largest component fraction on the cycle");
  add_common(s_table1, table1.c, "json", {"json", "csv"});
  s_table1->add_option("--degrees", table1.degrees, "Degree spec")->capture_default_str();
  s_table1->add_option("--sizes", table1.sizes, "Comma-separated sizes")->delimiter(',')->capture_default_str();
  s_table1->add_option("--replicas", table1.replicas, "Replicas per size")->check(CLI::PositiveNumber)->capture_default_str();

  TailsArgs tails;
  auto* s_tails = app.add_subcommand("tails", "Tail statistics over a geometric t-grid");
  add_common(s_tails, tails.c, "json", {"json", "csv"});
  s_tails->add_option("--scheme", tails.scheme, "random_direction | stable")->capture_default_str();
  s_tails->add_option("--degrees", tails.degrees, "Degree spec")->capture_default_str();
  s_tails->add_option("--n", tails.n, "Interval length")->check(CLI::PositiveNumber)->capture_default_str();
  s_tails->add_option("--replicas", tails.replicas, "Replicas")->check(CLI::PositiveNumber)->capture_default_str();
  s_tails->add_option("--t-max", tails.t_max, "Largest t")->check(CLI::PositiveNumber)->capture_default_str();
  s_tails->add_option("--clt-samples", tails.clt_samples, "Draws per t for the stub excess")->capture_default_str();

  RenormArgs renorm;
  auto* s_renorm = app.add_subcommand("renorm", "Iterate the renormalisation map");
  add_common(s_renorm, renorm.c, "json", {"json", "csv"});
  s_renorm->add_option("--p0", renorm.p0, "Starting probability")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  s_renorm->add_option("--kmax", renorm.kmax, "Iterations")->check(CLI::PositiveNumber)->capture_default_str();

  BlocksArgs blocks;
  auto* s_blocks = app.add_subcommand("blocks", "Nine-block combination check");
  add_common(s_blocks, blocks.c, "json", {"json", "csv"});
  s_blocks->add_option("--block", blocks.block, "Block length x")->capture_default_str();
  s_blocks->add_option("--replicas", blocks.replicas, "Replicas")->check(CLI::PositiveNumber)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    for (auto& [sub, common] : std::initializer_list<std::pair<CLI::App*, Common*>>{
             {s_sample, &sample.c}, {s_match, &match.c}, {s_analyze, &analyze.c}, {s_draw, &draw.c},
             {s_goodness, &goodness.c}, {s_table1, &table1.c}, {s_tails, &tails.c}, {s_renorm, &renorm.c},
             {s_blocks, &blocks.c}})
      if (sub->parsed()) apply_config(sub, common->config);

    if (s_sample->parsed()) cmd_sample(s_sample, sample);
    else if (s_match->parsed()) cmd_match(s_match, match);
    else if (s_analyze->parsed()) cmd_analyze(s_analyze, analyze);
    else if (s_draw->parsed()) cmd_draw(s_draw, draw);
    else if (s_goodness->parsed())
      run_report(s_goodness, goodness.c,
                 json{{"length", goodness.length}, {"replicas", goodness.replicas}, {"fast_path", !goodness.general}},
                 "goodness");
    else if (s_table1->parsed())
      run_report(s_table1, table1.c,
                 json{{"sizes", table1.sizes}, {"degrees", table1.degrees}, {"replicas", table1.replicas}}, "table1");
    else if (s_tails->parsed())
      run_report(s_tails, tails.c,
                 json{{"scheme", tails.scheme}, {"degrees", tails.degrees}, {"n", tails.n},
                      {"replicas", tails.replicas}, {"t_max", tails.t_max}, {"clt_samples", tails.clt_samples}},
                 "tails");
    else if (s_renorm->parsed())
      run_report(s_renorm, renorm.c, json{{"p0", renorm.p0}, {"kmax", renorm.kmax}}, "renorm");
    else if (s_blocks->parsed())
      run_report(s_blocks, blocks.c, json{{"block", blocks.block}, {"replicas", blocks.replicas}}, "blocks");
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << '\n';
    if (f.code == kExitUsage) std::cerr << "Run with --help for usage.\n";
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
