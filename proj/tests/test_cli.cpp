#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Sandbox {
  fs::path dir;
  Sandbox() {
    dir = fs::temp_directory_path() / ("smm_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(dir);
  }
  ~Sandbox() {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }
  std::string path(const std::string& name) const { return (dir / name).string(); }
  std::size_t file_count() const {
    return static_cast<std::size_t>(std::distance(fs::directory_iterator(dir), fs::directory_iterator{}));
  }
};

int run(const std::string& args, const std::string& stdout_path = "/dev/null") {
  const std::string cmd = std::string(SMM_CLI_PATH) + " " + args + " >" + stdout_path + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("CLI: sample, match, analyze pipeline") {
  Sandbox box;
  const auto pts = box.path("pts.txt");
  const auto edges = box.path("edges.csv");
  REQUIRE(run("sample --length 100 --seed 7 --out " + pts) == 0);
  CHECK(slurp(pts).rfind("topology=interval extent=100\n", 0) == 0);

  REQUIRE(run("match --in " + pts + " --degrees 2 --scheme stable --out " + edges + " --summary " +
              box.path("summary.json")) == 0);
  CHECK(slurp(edges).rfind("i,j,length\n", 0) == 0);
  const auto summary = nlohmann::json::parse(slurp(box.path("summary.json")));
  CHECK(summary["scheme"] == "stable");
  CHECK(summary["config"]["degrees"] == "2");

  const auto report = box.path("report.json");
  REQUIRE(run("analyze --edges " + edges + " --points " + pts + " --good 0:100 --out " + report) == 0);
  const auto j = nlohmann::json::parse(slurp(report));
  REQUIRE(j.contains("good"));
  CHECK(j["good"].is_boolean());

  REQUIRE(run("analyze --edges " + edges + " --points " + pts + " --format csv --out " + box.path("pp.csv")) == 0);
  CHECK(slurp(box.path("pp.csv")).rfind("index,pos,degree,M,X,class\n", 0) == 0);
}

TEST_CASE("CLI: outputs are reproducible") {
  Sandbox box;
  REQUIRE(run("sample --process cycle --n 300 --seed 3 --out " + box.path("a.txt")) == 0);
  REQUIRE(run("sample --process cycle --n 300 --seed 3 --out " + box.path("b.txt")) == 0);
  CHECK(slurp(box.path("a.txt")) == slurp(box.path("b.txt")));
  REQUIRE(run("goodness --length 500 --replicas 40 --jobs 1 --no-meta --out " + box.path("g1.json")) == 0);
  REQUIRE(run("goodness --length 500 --replicas 40 --jobs 3 --no-meta --out " + box.path("g2.json")) == 0);
  CHECK(slurp(box.path("g1.json")) == slurp(box.path("g2.json")));
  const auto g = nlohmann::json::parse(slurp(box.path("g1.json")));
  const std::string verdict = g["verdicts"]["verdict"];
  CHECK((verdict == "reject" || verdict == "fail-to-reject"));

  // Re-running from the recorded configuration gives the same report.
  std::ofstream(box.path("cfg.toml")) << "length = 500\nreplicas = 40\nseed = " << g["config"]["seed"] << "\n";
  REQUIRE(run("goodness --config " + box.path("cfg.toml") + " --no-meta --out " + box.path("g3.json")) == 0);
  CHECK(slurp(box.path("g3.json")) == slurp(box.path("g1.json")));
  // Flags win over the config file.
  REQUIRE(run("goodness --config " + box.path("cfg.toml") + " --replicas 2 --no-meta --out " + box.path("g4.json")) == 0);
  CHECK(nlohmann::json::parse(slurp(box.path("g4.json")))["records"].size() == 2);
}

TEST_CASE("CLI: experiment subcommands") {
  Sandbox box;
  REQUIRE(run("renorm --p0 0.968 --kmax 50 --out " + box.path("r.json")) == 0);
  const auto r = nlohmann::json::parse(slurp(box.path("r.json")));
  CHECK(r["verdicts"]["converges_to_1"] == true);
  REQUIRE(run("table1 --degrees 2 --sizes 1024,4096 --replicas 10 --out " + box.path("t.json")) == 0);
  const auto t = nlohmann::json::parse(slurp(box.path("t.json")));
  REQUIRE(t["aggregates"]["rows"].size() == 2);
  CHECK(t["aggregates"]["rows"][1]["n"] == 4096);
  CHECK(t["aggregates"]["rows"][0].contains("sd"));
  REQUIRE(run("table1 --degrees 2 --sizes 256 --replicas 3 --format csv --out " + box.path("t.csv")) == 0);
  CHECK(slurp(box.path("t.csv")).rfind("n,replica,largest_fraction\n", 0) == 0);
  REQUIRE(run("blocks --block 40 --replicas 5 --out " + box.path("b.json")) == 0);
  REQUIRE(run("tails --scheme stable --n 2000 --replicas 1 --t-max 64 --clt-samples 100 --out " +
              box.path("tails.json")) == 0);
  CHECK(nlohmann::json::parse(slurp(box.path("tails.json")))["kind"] == "tails");
}

TEST_CASE("CLI: drawing") {
  Sandbox box;
  const double xs[] = {0.5, 1.2, 2.0, 3.1, 4.4, 5.0, 6.3, 7.7, 8.1, 9.6};
  {
    std::ofstream f(box.path("ten.txt"));
    f << "topology=interval extent=10\n";
    for (double x : xs) f << x << "\n";
  }
  REQUIRE(run("match --in " + box.path("ten.txt") + " --out " + box.path("ten.csv")) == 0);
  REQUIRE(run("draw --points " + box.path("ten.txt") + " --edges " + box.path("ten.csv") + " --no-meta --out " +
              box.path("ten.svg")) == 0);
  const std::string svg = slurp(box.path("ten.svg"));
  const std::size_t edges = count(slurp(box.path("ten.csv")), "\n") - 1;
  CHECK(edges > 0);
  CHECK(count(svg, "<path class=\"arc\"") == edges);
  CHECK(svg.find("generated") == std::string::npos);

  REQUIRE(run("draw --points " + box.path("ten.txt") + " --edges " + box.path("ten.csv") + " --out " +
              box.path("meta.svg")) == 0);
  CHECK(slurp(box.path("meta.svg")).find("<!-- generated") != std::string::npos);

  std::ofstream(box.path("none.csv")) << "i,j,length\n";
  REQUIRE(run("draw --points " + box.path("ten.txt") + " --edges " + box.path("none.csv") + " --no-meta --out " +
              box.path("empty.svg")) == 0);
  const std::string empty = slurp(box.path("empty.svg"));
  CHECK(count(empty, "<path") == 0);
  CHECK(empty.find("class=\"axis\"") != std::string::npos);
  CHECK(empty.find("</svg>") != std::string::npos);

  REQUIRE(run("sample --length 500 --seed 11 --out " + box.path("big.txt")) == 0);
  REQUIRE(run("draw --points " + box.path("big.txt") + " --scheme random_direction --color-stubs --no-meta --out " +
              box.path("big.svg")) == 0);
  CHECK(fs::file_size(box.path("big.svg")) < 1000000);
  CHECK(slurp(box.path("big.svg")).find("stub-right") != std::string::npos);
}

TEST_CASE("CLI: usage and runtime errors leave no files behind") {
  Sandbox box;
  const auto out = box.path("out.json");
  CHECK(run("") == 2);
  CHECK(run("frobnicate") == 2);
  CHECK(run("goodness --replicas 0 --out " + out) == 2);
  CHECK(run("goodness --bogus --out " + out) == 2);
  CHECK(run("renorm --format xml --out " + out) == 2);
  CHECK(run("renorm --p0 2 --out " + out) == 2);
  CHECK(run("table1 --degrees zz --sizes 64 --out " + out) == 2);
  CHECK(run("match --in " + box.path("missing.txt") + " --out " + out) == 3);
  std::ofstream(box.path("bad.txt")) << "topology=interval extent=5\n3\n1\n";
  CHECK(run("match --in " + box.path("bad.txt") + " --out " + out) == 3);
  CHECK(run("match --in " + box.path("bad.txt") + " --out " + box.path("nodir/x.csv")) == 3);
  CHECK(run("analyze --points " + box.path("bad.txt") + " --edges x.csv --good 5 --out " + out) != 0);
  CHECK_FALSE(fs::exists(out));
  CHECK(box.file_count() == 1);
  CHECK(run("--help") == 0);
}
