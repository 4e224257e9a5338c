#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "smm/smm.h"

namespace {

struct Str {
  char* p = nullptr;
  ~Str() { smm_free_string(p); }
  std::string s() const { return p ? p : ""; }
};

}  // namespace

TEST_CASE("C API: points") {
  smm_points* pts = nullptr;
  REQUIRE(smm_points_sample_poisson(100.0, 7, &pts) == SMM_OK);
  CHECK(smm_points_count(pts) > 50);
  CHECK(smm_points_extent(pts) == 100.0);
  CHECK(smm_points_is_cycle(pts) == 0);

  Str text;
  REQUIRE(smm_points_to_string(pts, &text.p) == SMM_OK);
  CHECK(text.s().rfind("topology=interval extent=100\n", 0) == 0);

  const auto path = std::filesystem::temp_directory_path() / "smm_capi_points.txt";
  REQUIRE(smm_points_save(pts, path.c_str()) == SMM_OK);
  smm_points* back = nullptr;
  REQUIRE(smm_points_load(path.c_str(), &back) == SMM_OK);
  REQUIRE(smm_points_count(back) == smm_points_count(pts));
  for (size_t i = 0; i < smm_points_count(pts); ++i) CHECK(smm_points_data(back)[i] == smm_points_data(pts)[i]);
  std::filesystem::remove(path);
  smm_points_free(back);
  smm_points_free(pts);

  smm_points* bad = nullptr;
  CHECK(smm_points_sample_poisson(0.0, 1, &bad) == SMM_ERR_ARGUMENT);
  CHECK(std::string(smm_last_error()).size() > 0);
  CHECK(bad == nullptr);
  CHECK(smm_points_load("/nonexistent/file", &bad) == SMM_ERR_IO);
  const double unsorted[] = {2.0, 1.0};
  CHECK(smm_points_from_array(0, 5.0, unsorted, 2, &bad) == SMM_ERR_ARGUMENT);

  const auto broken = std::filesystem::temp_directory_path() / "smm_capi_broken.txt";
  std::ofstream(broken) << "topology=interval extent=5\n3\n1\n";
  CHECK(smm_points_load(broken.c_str(), &bad) == SMM_ERR_PARSE);
  CHECK(std::string(smm_last_error()).find("line 3") != std::string::npos);
  std::filesystem::remove(broken);

  smm_points* cyc = nullptr;
  REQUIRE(smm_points_sample_cycle(64, 64.0, 3, &cyc) == SMM_OK);
  CHECK(smm_points_is_cycle(cyc) == 1);
  CHECK(smm_points_count(cyc) == 64);
  smm_points_free(cyc);
  smm_points* lat = nullptr;
  REQUIRE(smm_points_perturbed_lattice(20, 3, 3, &lat) == SMM_OK);
  CHECK(smm_points_count(lat) == 60);
  smm_points_free(lat);
  smm_points_free(nullptr);
}

TEST_CASE("C API: matching, analysis and drawing") {
  const double xs[] = {0.0, 1.0, 3.0, 6.5};
  smm_points* pts = nullptr;
  REQUIRE(smm_points_from_array(0, 10.0, xs, 4, &pts) == SMM_OK);
  smm_matching* m = nullptr;
  REQUIRE(smm_match(pts, "2", "stable", 1, &m) == SMM_OK);
  CHECK(smm_matching_edge_count(m) == 3);
  CHECK(smm_matching_leftover(m) == 2);
  uint32_t u = 0, v = 0;
  REQUIRE(smm_matching_edge(m, 1, &u, &v) == SMM_OK);
  CHECK(u == 0);
  CHECK(v == 2);
  CHECK(smm_matching_edge(m, 3, &u, &v) == SMM_ERR_ARGUMENT);

  Str csv;
  REQUIRE(smm_matching_to_csv(m, &csv.p) == SMM_OK);
  CHECK(csv.s() == "i,j,length\n0,1,1\n0,2,3\n1,2,2\n");
  Str summary;
  REQUIRE(smm_matching_summary_json(m, &summary.p) == SMM_OK);
  const auto sj = nlohmann::json::parse(summary.s());
  CHECK(sj["scheme"] == "stable");
  CHECK(sj["edges"] == 3);
  CHECK(sj["leftovers"] == 2);
  CHECK(sj["rounds"] == 3);

  Str report, per_point;
  REQUIRE(smm_analyze(m, "{\"good\": [0, 10]}", &report.p, &per_point.p) == SMM_OK);
  const auto rj = nlohmann::json::parse(report.s());
  CHECK(rj["good"] == false);
  CHECK(rj["components"] == 2);
  CHECK(per_point.s().rfind("index,pos,degree,M,X,class\n", 0) == 0);
  CHECK(smm_analyze(m, "{\"good\": [3, 1]}", &report.p, nullptr) == SMM_ERR_ARGUMENT);
  CHECK(smm_analyze(m, "{not json", &report.p, nullptr) == SMM_ERR_PARSE);

  size_t unstable = 99;
  REQUIRE(smm_audit(m, "stable", &unstable) == SMM_OK);
  CHECK(unstable == 0);
  CHECK(smm_audit(m, "sideways", &unstable) == SMM_ERR_ARGUMENT);

  Str svg;
  REQUIRE(smm_draw_svg(m, "{\"meta\": false}", &svg.p) == SMM_OK);
  CHECK(svg.s().find("<svg") != std::string::npos);
  CHECK(svg.s().find("generated") == std::string::npos);

  smm_matching* rd = nullptr;
  const int degrees[] = {2, 2, 2, 2};
  const int rights[] = {1, 0, 2, 0};
  REQUIRE(smm_match_with_marks(pts, degrees, rights, "random_direction", &rd) == SMM_OK);
  CHECK(smm_matching_edge_count(rd) == 2);
  REQUIRE(smm_audit(rd, "directed", &unstable) == SMM_OK);
  CHECK(unstable == 0);
  Str per_rd;
  REQUIRE(smm_analyze(rd, nullptr, nullptr, &per_rd.p) == SMM_OK);
  CHECK(per_rd.s().find(",bird\n") != std::string::npos);
  CHECK(per_rd.s().find(",right-beak\n") != std::string::npos);
  smm_matching_free(rd);

  const int too_many[] = {2, 2, 3, 2};
  CHECK(smm_match_with_marks(pts, degrees, too_many, "random_direction", &rd) == SMM_ERR_ARGUMENT);
  CHECK(smm_match(pts, "2", "nonsense", 1, &rd) == SMM_ERR_ARGUMENT);
  CHECK(smm_match(pts, "q", "stable", 1, &rd) == SMM_ERR_ARGUMENT);

  // Edge list round trip through a file.
  const auto path = std::filesystem::temp_directory_path() / "smm_capi_edges.csv";
  std::ofstream(path) << csv.s();
  smm_matching* loaded = nullptr;
  REQUIRE(smm_matching_load_csv(pts, path.c_str(), &loaded) == SMM_OK);
  CHECK(smm_matching_edge_count(loaded) == 3);
  std::ofstream(path) << "i,j,length\n0,9,1\n";
  CHECK(smm_matching_load_csv(pts, path.c_str(), &loaded) == SMM_ERR_PARSE);
  std::ofstream(path) << "i,j,length\n0,1,1\n1,0,1\n";
  CHECK(smm_matching_load_csv(pts, path.c_str(), &loaded) == SMM_ERR_PARSE);
  std::filesystem::remove(path);
  smm_matching_free(loaded);

  smm_matching_free(m);
  smm_points_free(pts);
}

TEST_CASE("C API: experiments and kernels") {
  Str json, csv;
  REQUIRE(smm_run_experiment("{\"kind\": \"renorm\", \"p0\": 0.968, \"kmax\": 50}", 0, &json.p, &csv.p) == SMM_OK);
  const auto j = nlohmann::json::parse(json.s());
  CHECK(j["schema"] == 1);
  CHECK(j["verdicts"]["converges_to_1"] == true);
  CHECK_FALSE(j.contains("meta"));
  CHECK(csv.s().rfind("k,p,partial_sum", 0) == 0);
  CHECK(smm_run_experiment("{\"kind\": \"bogus\"}", 0, &json.p, nullptr) == SMM_ERR_ARGUMENT);
  CHECK(smm_run_experiment("[1,", 0, &json.p, nullptr) == SMM_ERR_PARSE);

  double tail = 0.0;
  REQUIRE(smm_binomial_tail(3, 2, 0.5, &tail) == SMM_OK);
  CHECK(tail == doctest::Approx(0.5));
  CHECK(smm_binomial_tail(3, 4, 0.5, &tail) == SMM_ERR_ARGUMENT);
  CHECK(smm_renorm_threshold() == doctest::Approx(0.9676897639012007).epsilon(1e-12));
  CHECK(std::string(smm_version()).size() > 0);
}
