#include "smm/smm.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include "smm/analysis.hpp"
#include "smm/errors.hpp"
#include "smm/montecarlo.hpp"
#include "smm/serialize.hpp"

struct smm_points {
  std::shared_ptr<const smm::PointConfig> config;
};

struct smm_matching {
  smm::MarkedConfig marked;
  smm::Matching matching;
};

namespace {

thread_local std::string g_last_error;

template <class Fn>
smm_status guard(Fn&& fn) noexcept {
  try {
    g_last_error.clear();
    fn();
    return SMM_OK;
  } catch (const smm::ArgumentError& e) {
    g_last_error = e.what();
    return SMM_ERR_ARGUMENT;
  } catch (const smm::ParseError& e) {
    g_last_error = e.what();
    return SMM_ERR_PARSE;
  } catch (const smm::IoError& e) {
    g_last_error = e.what();
    return SMM_ERR_IO;
  } catch (const nlohmann::json::parse_error& e) {
    g_last_error = e.what();
    return SMM_ERR_PARSE;
  } catch (const nlohmann::json::exception& e) {
    g_last_error = e.what();
    return SMM_ERR_ARGUMENT;
  } catch (const std::invalid_argument& e) {
    g_last_error = e.what();
    return SMM_ERR_ARGUMENT;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SMM_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return SMM_ERR_INTERNAL;
  }
}

char* dup_string(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.data(), s.size() + 1);
  return p;
}

void require(bool cond, const char* what) {
  if (!cond) throw smm::ArgumentError(what);
}

smm_points* wrap(smm::PointConfig config) {
  return new smm_points{std::make_shared<const smm::PointConfig>(std::move(config))};
}

smm::ordered_json parse_options(const char* json) {
  if (!json || !*json) return smm::ordered_json::object();
  auto j = smm::ordered_json::parse(json);
  require(j.is_object(), "options must be a JSON object");
  return j;
}

smm::Matching finish_match(smm::Scheme scheme, const smm::MarkedConfig& marked) {
  smm::Matching m = smm::run_scheme(scheme, marked);
  smm::check_matching(m, marked);
  return m;
}

}  // namespace

extern "C" {

const char* smm_last_error(void) { return g_last_error.c_str(); }

const char* smm_version(void) { return "1.0.0"; }

void smm_free_string(char* s) { std::free(s); }

smm_status smm_points_sample_poisson(double length, uint64_t seed, smm_points** out) {
  return guard([&] {
    require(out, "null output");
    smm::Rng rng(seed);
    *out = wrap(smm::sample_poisson_interval(length, rng));
  });
}

smm_status smm_points_sample_cycle(size_t n, double circumference, uint64_t seed, smm_points** out) {
  return guard([&] {
    require(out, "null output");
    smm::Rng rng(seed);
    *out = wrap(smm::sample_uniform_cycle(n, circumference, rng));
  });
}

smm_status smm_points_perturbed_lattice(size_t cells, int copies, uint64_t seed, smm_points** out) {
  return guard([&] {
    require(out, "null output");
    smm::Rng rng(seed);
    *out = wrap(smm::gen_perturbed_lattice(cells, copies, rng));
  });
}

smm_status smm_points_from_array(int is_cycle, double extent, const double* positions, size_t n,
                                 smm_points** out) {
  return guard([&] {
    require(out, "null output");
    require(positions || n == 0, "null positions");
    const smm::Topology topo = is_cycle ? smm::Topology::cycle(extent) : smm::Topology::interval(extent);
    *out = wrap(smm::PointConfig(topo, std::vector<double>(positions, positions + n)));
  });
}

smm_status smm_points_load(const char* path, smm_points** out) {
  return guard([&] {
    require(path && out, "null argument");
    *out = wrap(smm::load_points(path));
  });
}

smm_status smm_points_save(const smm_points* points, const char* path) {
  return guard([&] {
    require(points && path, "null argument");
    smm::save_points(path, *points->config);
  });
}

smm_status smm_points_to_string(const smm_points* points, char** out) {
  return guard([&] {
    require(points && out, "null argument");
    std::ostringstream s;
    smm::write_points(s, *points->config);
    *out = dup_string(s.str());
  });
}

size_t smm_points_count(const smm_points* points) { return points ? points->config->size() : 0; }

double smm_points_extent(const smm_points* points) { return points ? points->config->topology().extent : 0.0; }

int smm_points_is_cycle(const smm_points* points) { return points && points->config->topology().is_cycle() ? 1 : 0; }

const double* smm_points_data(const smm_points* points) {
  return points ? points->config->positions().data() : nullptr;
}

void smm_points_free(smm_points* points) { delete points; }

smm_status smm_match(const smm_points* points, const char* degree_spec, const char* scheme, uint64_t seed,
                     smm_matching** out) {
  return guard([&] {
    require(points && degree_spec && scheme && out, "null argument");
    const smm::Scheme s = smm::parse_scheme(scheme);
    const auto dist = smm::DegreeDistribution::parse(degree_spec);
    smm::Rng rng(seed);
    smm::MarkedConfig marked = smm::assign_degrees(*points->config, dist, rng);
    if (s == smm::Scheme::RandomDirection) marked = smm::assign_directions(std::move(marked), rng);
    smm::Matching m = finish_match(s, marked);
    *out = new smm_matching{std::move(marked), std::move(m)};
  });
}

smm_status smm_match_with_marks(const smm_points* points, const int* degrees, const int* rights, const char* scheme,
                                smm_matching** out) {
  return guard([&] {
    require(points && scheme && out, "null argument");
    const std::size_t n = points->config->size();
    require(degrees || n == 0, "null degrees");
    smm::MarkedConfig marked{*points->config, std::vector<int>(degrees, degrees + n), std::nullopt};
    if (rights) marked.rights = std::vector<int>(rights, rights + n);
    marked.validate();
    smm::Matching m = finish_match(smm::parse_scheme(scheme), marked);
    *out = new smm_matching{std::move(marked), std::move(m)};
  });
}

smm_status smm_matching_load_csv(const smm_points* points, const char* path, smm_matching** out) {
  return guard([&] {
    require(points && path && out, "null argument");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw smm::IoError(std::string("cannot open ") + path);
    std::ostringstream text;
    text << in.rdbuf();
    auto [m, marked] = smm::edges_from_csv(text.str(), *points->config);
    *out = new smm_matching{std::move(marked), std::move(m)};
  });
}

size_t smm_matching_edge_count(const smm_matching* matching) { return matching ? matching->matching.edges.size() : 0; }

smm_status smm_matching_edge(const smm_matching* matching, size_t index, uint32_t* u, uint32_t* v) {
  return guard([&] {
    require(matching && u && v, "null argument");
    require(index < matching->matching.edges.size(), "edge index out of range");
    *u = matching->matching.edges[index].u;
    *v = matching->matching.edges[index].v;
  });
}

size_t smm_matching_leftover(const smm_matching* matching) {
  return matching ? matching->matching.total_leftover() : 0;
}

smm_status smm_matching_to_csv(const smm_matching* matching, char** out) {
  return guard([&] {
    require(matching && out, "null argument");
    *out = dup_string(smm::edges_to_csv(matching->matching, matching->marked.config));
  });
}

smm_status smm_matching_summary_json(const smm_matching* matching, char** out) {
  return guard([&] {
    require(matching && out, "null argument");
    *out = dup_string(smm::matching_summary(matching->matching).dump(2) + "\n");
  });
}

void smm_matching_free(smm_matching* matching) { delete matching; }

smm_status smm_analyze(const smm_matching* matching, const char* options_json, char** json_out,
                       char** per_point_csv) {
  return guard([&] {
    require(matching, "null matching");
    const auto opts = parse_options(options_json);
    smm::AnalyzeOptions ao;
    if (opts.contains("good")) {
      const auto& g = opts["good"];
      require(g.is_array() && g.size() == 2 && g[0].is_number() && g[1].is_number(), "good must be [a, b]");
      const double a = g[0].get<double>(), b = g[1].get<double>();
      require(a < b, "good window needs a < b");
      ao.good_window = std::make_pair(a, b);
    }
    if (opts.contains("component_lists")) ao.component_lists = opts["component_lists"].get<bool>();
    std::string json, csv;
    if (json_out) json = smm::analyze_json(matching->matching, matching->marked, ao).dump(2) + "\n";
    if (per_point_csv) csv = smm::point_stats_csv(matching->matching, matching->marked);
    if (json_out) *json_out = dup_string(json);
    if (per_point_csv) *per_point_csv = dup_string(csv);
  });
}

smm_status smm_audit(const smm_matching* matching, const char* mode, size_t* unstable) {
  return guard([&] {
    require(matching && mode && unstable, "null argument");
    const std::string m = mode;
    smm::AuditMode am;
    if (m == "stable") am = smm::AuditMode::Stable;
    else if (m == "directed") am = smm::AuditMode::Directed;
    else if (m == "core") am = smm::AuditMode::Core;
    else throw smm::ArgumentError("unknown audit mode '" + m + "'");
    smm::MarkedConfig marked = matching->marked;
    if (matching->matching.rights) marked.rights = matching->matching.rights;
    const double extent = marked.config.topology().extent;
    *unstable = smm::stability_audit(matching->matching, marked, am, 0.0, extent).size();
  });
}

smm_status smm_draw_svg(const smm_matching* matching, const char* options_json, char** svg) {
  return guard([&] {
    require(matching && svg, "null argument");
    const auto opts = parse_options(options_json);
    smm::DrawOptions d;
    if (opts.contains("color_stubs")) d.color_stubs = opts["color_stubs"].get<bool>();
    if (opts.contains("meta")) d.meta = opts["meta"].get<bool>();
    if (opts.contains("width")) d.width = opts["width"].get<double>();
    require(d.width > 100.0, "width must exceed 100");
    *svg = dup_string(smm::draw_svg(matching->matching, matching->marked.config, d));
  });
}

smm_status smm_run_experiment(const char* spec_json, int with_meta, char** report_json, char** report_csv) {
  return guard([&] {
    require(spec_json, "null spec");
    const auto spec = smm::ordered_json::parse(spec_json);
    const smm::ExperimentReport rep = smm::run_experiment(spec);
    std::string json, csv;
    if (report_json) json = rep.to_json(with_meta != 0).dump(2) + "\n";
    if (report_csv) csv = rep.to_csv();
    if (report_json) *report_json = dup_string(json);
    if (report_csv) *report_csv = dup_string(csv);
  });
}

smm_status smm_binomial_tail(uint64_t n, uint64_t k, double p0, double* out) {
  return guard([&] {
    require(out, "null output");
    *out = smm::binomial_tail(n, k, p0);
  });
}

double smm_renorm_threshold(void) { return smm::renorm_threshold(); }

}  // extern "C"
