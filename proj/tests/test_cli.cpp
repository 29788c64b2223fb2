#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "doctest.h"
#include "erglab/csv.hpp"

namespace fs = std::filesystem;
using erglab::read_csv;

namespace {

const fs::path& scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("erglab_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int tool(const std::string& args) {
  const std::string cmd = std::string(ERGLAB_TOOL) + " " + args + " > /dev/null 2>> " + (scratch() / "stderr").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

fs::path out(const std::string& name) { return scratch() / name; }

}  // namespace

TEST_CASE("dist table: arc-sine density at one half") {
  REQUIRE(tool("dist --law xi --alpha 0.5 --grid 1001 --out " + out("dist.csv").string()) == 0);
  const auto t = read_csv(out("dist.csv"));
  CHECK(t.command == "dist");
  REQUIRE(t.rows.size() == 1001);
  CHECK(t.number(500, "x") == 0.5);
  CHECK(std::abs(t.number(500, "pdf") - 2.0 / std::numbers::pi) <= 1e-12);
  CHECK(t.number(500, "cdf") == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(t.number(1000, "cdf") == 1.0);
}

TEST_CASE("limitcheck example passes") {
  CHECK(tool("limitcheck --model renewal --tail power:0.5 --stat zn_over_n --law xi:0.5 "
             "--nlist 1e2,1e3,1e4 --samples 1e5 --seed 7 --out " +
             out("lc.csv").string()) == 0);
  const auto t = read_csv(out("lc.csv"));
  CHECK(t.command == "limitcheck");
  CHECK(t.rows.size() == 3);
}

TEST_CASE("usage errors exit with status 2") {
  CHECK(tool("dist --law xi --alpha 0.5 --bogus 1") == 2);
  CHECK(tool("dist --law xi --alpha 1.5") == 2);
  CHECK(tool("simulate --n 0 --seed 1") == 2);
  CHECK(tool("nosuchcommand") == 2);
  CHECK(tool("") == 2);

  std::ofstream(out("bad_key.json")) << R"({"law": "xi", "alphaa": 0.5})";
  CHECK(tool("dist --config " + out("bad_key.json").string()) == 2);
  std::ofstream(out("wrong_cmd.json")) << R"({"command": "ulam", "m": 64})";
  CHECK(tool("dist --config " + out("wrong_cmd.json").string()) == 2);
  CHECK(tool("dist --config " + out("missing.json").string()) == 2);
}

TEST_CASE("flags override the config file") {
  std::ofstream(out("cfg.json")) << R"({"command": "dist", "law": "kacx", "alpha": 0.3, "grid": 11})";
  REQUIRE(tool("--config " + out("cfg.json").string() + " dist --grid 21 --out " + out("cfg.csv").string()) == 0);
  const auto t = read_csv(out("cfg.csv"));
  CHECK(t.rows.size() == 21);
  REQUIRE(tool("dist --law kacx --alpha 0.3 --grid 21 --out " + out("flags.csv").string()) == 0);
  CHECK(slurp(out("cfg.csv")) == slurp(out("flags.csv")));
}

TEST_CASE("every command writes a parseable artifact") {
  const std::pair<const char*, const char*> runs[] = {
      {"simulate", "--model renewal --tail power:0.5 --n 100 --samples 200 --seed 1"},
      {"tail", "--model renewal --tail power:0.5 --k 50 --seed 4"},
      {"limitcheck", "--tail power:0.5 --law xi:0.5 --nlist 10,20,40 --samples 500 --threshold 1 --seed 2"},
      {"ulam", "--model doubling --a 0.5,1 --m 64 --ncesaro 200 --burn 200 --ngrid 50,100,200 --threshold 1 --seed 5"},
      {"regvar", "--diag ktt --seq ones --slist 0.1,0.01,0.001"},
      {"dist", "--law kacy --alpha 0.4 --grid 11"},
      {"laplace", "--tail power:0.5 --slist 1,0.1,0.01 --threshold 1"},
  };
  for (const auto& [cmd, args] : runs) {
    CAPTURE(std::string(cmd));
    const fs::path p = out(std::string(cmd) + ".csv");
    const int rc = tool(std::string(cmd) + " " + args + " --out " + p.string());
    CHECK((rc == 0 || rc == 1));
    const auto t = read_csv(p);
    CHECK(t.command == cmd);
    CHECK(!t.rows.empty());
  }
}

TEST_CASE("same seed gives identical bytes regardless of threads") {
  const std::string base = "limitcheck --tail power:0.5 --law xi:0.5 --nlist 50,100,200 --samples 2000 --threshold 1 --seed 11";
  REQUIRE(tool(base + " --threads 1 --out " + out("t1.csv").string()) == 0);
  REQUIRE(tool(base + " --threads 4 --out " + out("t4.csv").string()) == 0);
  CHECK(slurp(out("t1.csv")) == slurp(out("t4.csv")));
  const std::string sim = "simulate --tail power:0.7 --n 300 --samples 500 --seed 3";
  REQUIRE(tool(sim + " --threads 1 --out " + out("s1.csv").string()) == 0);
  REQUIRE(tool(sim + " --threads 3 --out " + out("s3.csv").string()) == 0);
  CHECK(slurp(out("s1.csv")) == slurp(out("s3.csv")));
}
