#include <doctest.h>

#include "wavemap/cli.hpp"
#include "wavemap/data.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace wavemap;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("wavemap_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

struct Capture {
  std::ostringstream out, err;
  std::streambuf* old_out;
  std::streambuf* old_err;
  Capture() : old_out(std::cout.rdbuf(out.rdbuf())), old_err(std::cerr.rdbuf(err.rdbuf())) {}
  ~Capture() {
    std::cout.rdbuf(old_out);
    std::cerr.rdbuf(old_err);
  }
};

int run(std::vector<std::string> args, std::string* out = nullptr) {
  Capture c;
  const int rc = cli::run(args);
  if (out) *out = c.out.str() + c.err.str();
  return rc;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("help lists every subcommand") {
    std::string out;
    CHECK(run({"--help"}, &out) == 0);
    for (const char* s : {"gen-data", "evolve", "profile", "norms", "perturb", "sweep-eps", "sweep-growth",
                          "convergence", "cascade", "demo-heaviside"})
      CHECK(out.find(s) != std::string::npos);
  }

  TEST_CASE("missing or unknown subcommand is a usage error") {
    CHECK(run({}) == cli::kExitInput);
    CHECK(run({"frobnicate"}) == cli::kExitInput);
    CHECK(run({"gen-data", "--eps", "abc"}) == cli::kExitInput);
  }

  TEST_CASE("norms of a constant slice are zero") {
    const auto dir = scratch("norms");
    SphereSlice s(Grid1D(-2.0, 2.0, 65), 3, 0.0);
    for (std::size_t i = 0; i < s.size(); ++i) s.at(i)[0] = 1.0;
    cli::write_slice(dir / "const.csv", s, {});
    REQUIRE(run({"norms", "--slice", (dir / "const.csv").string(), "--out", dir.string()}) == 0);
    std::ifstream is(dir / "norms.csv");
    std::string line, last;
    while (std::getline(is, line))
      if (!line.empty() && line[0] != '#') last = line;
    CHECK(last.find(",0,0,nan") != std::string::npos);
  }

  TEST_CASE("perturb rejects the circle target") {
    const auto dir = scratch("perturb");
    CHECK(run({"perturb", "-m", "2", "--out", dir.string()}) == cli::kExitInput);
    CHECK(run({"perturb", "--out", dir.string()}) == 0);
    CHECK(slurp(dir / "perturb.txt").find("kappa=0.015625") != std::string::npos);
  }

  TEST_CASE("outputs are reproducible") {
    const auto a = scratch("repro_a");
    const auto b = scratch("repro_b");
    REQUIRE(run({"gen-data", "--cells", "64", "--out", a.string()}) == 0);
    REQUIRE(run({"gen-data", "--cells", "64", "--out", b.string()}) == 0);
    CHECK(slurp(a / "data.csv") == slurp(b / "data.csv"));
    CHECK(slurp(a / "data.txt") == slurp(b / "data.txt"));
    const auto manifest = slurp(a / "manifest_gen-data.txt");
    CHECK(manifest.find("code_version=") != std::string::npos);
    CHECK(manifest.find("param.cells=64") != std::string::npos);
  }

  TEST_CASE("config supplies defaults and flags win") {
    const auto dir = scratch("config");
    {
      std::ofstream cfg(dir / "run.cfg");
      cfg << "# test\neps = 0.2\ncells=32\n";
    }
    REQUIRE(run({"gen-data", "--config", (dir / "run.cfg").string(), "--cells", "16", "--out", dir.string()}) == 0);
    const auto manifest = slurp(dir / "manifest_gen-data.txt");
    CHECK(manifest.find("param.eps=0.2\n") != std::string::npos);
    CHECK(manifest.find("param.cells=16\n") != std::string::npos);
    {
      std::ofstream cfg(dir / "bad.cfg");
      cfg << "nonsense=1\n";
    }
    CHECK(run({"gen-data", "--config", (dir / "bad.cfg").string(), "--out", dir.string()}) == cli::kExitInput);
    CHECK(run({"gen-data", "--config", (dir / "missing.cfg").string()}) == cli::kExitInput);
  }

  TEST_CASE("slice and profile files round trip") {
    const auto dir = scratch("roundtrip");
    REQUIRE(run({"evolve", "--cells", "32", "--t-final", "2", "--out", dir.string()}) == 0);
    std::map<std::string, std::string> meta;
    const auto s = cli::read_slice(dir / "slice_000.csv", &meta);
    CHECK(s.time() == 2.0);
    CHECK(meta.at("bump") == "mollifier-asym");
    cli::write_slice(dir / "copy.csv", s, {{"bump", "mollifier-asym"}, {"C", "1"}});
    const auto t = cli::read_slice(dir / "copy.csv");
    REQUIRE(t.size() == s.size());
    for (std::size_t i = 0; i < s.size(); ++i) CHECK(distance(t.at(i), s.at(i)) == 0.0);
    REQUIRE(run({"profile", "--slice", (dir / "slice_000.csv").string(), "--out", dir.string()}) == 0);
    const auto p = cli::read_profile(dir / "profile.csv");
    CHECK(p.source_time == 2.0);
    CHECK(p.m == 3);
  }

  TEST_CASE("malformed slice files are input errors") {
    const auto dir = scratch("malformed");
    {
      std::ofstream f(dir / "bad.csv");
      f << "x,phi_1,phi_2\n0,1,0\n0.5,1\n";
    }
    CHECK_THROWS_AS(cli::read_slice(dir / "bad.csv"), InputError);
    CHECK(run({"norms", "--slice", (dir / "bad.csv").string(), "--out", dir.string()}) == cli::kExitInput);
  }

  TEST_CASE("unwritable output directory") {
    const auto dir = scratch("unwritable");
    {
      std::ofstream f(dir / "file");
      f << "x";
    }
    CHECK(run({"gen-data", "--cells", "16", "--out", (dir / "file" / "sub").string()}) == cli::kExitOutput);
  }

  TEST_CASE("config parser rejects repeated keys") {
    const auto dir = scratch("cfgparse");
    {
      std::ofstream f(dir / "a.cfg");
      f << "eps=0.1\neps=0.2\n";
    }
    CHECK_THROWS_AS(cli::read_config(dir / "a.cfg"), InputError);
  }
}
