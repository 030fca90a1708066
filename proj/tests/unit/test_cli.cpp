#include <nlohmann/json.hpp>
#include <sstream>

#include "doctest.h"
#include "pancad/cli.hpp"
#include "pancad/drawing.hpp"
#include "tree.hpp"

using testing_support::snapshot;
using testing_support::TempDir;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = pancad::run(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("gen is deterministic and writes a manifest") {
  TempDir a, b;
  REQUIRE(cli({"--seed", "7", "gen", "--out", (a / "g").string(), "--count", "2"}).code == 0);
  REQUIRE(cli({"gen", "--out", (b / "g").string(), "--count", "2", "--seed", "7"}).code == 0);
  auto sa = snapshot(a.path()), sb = snapshot(b.path());
  CHECK(sa == sb);
  CHECK(sa.count("g/drawing_0000.jsonl") == 1);
  CHECK(sa.count("g/drawing_0001.jsonl") == 1);
  auto manifest = nlohmann::json::parse(sa.at("g/manifest.json"));
  CHECK(manifest["command"] == "gen");
  CHECK(manifest["seed"] == 7);
  CHECK(manifest["outputs"].size() == 2);
}

TEST_CASE("panoptic self evaluation scores one") {
  TempDir t;
  REQUIRE(cli({"gen", "--out", (t / "g").string(), "--count", "2"}).code == 0);
  auto r = cli({"eval", "panoptic", "--gt", (t / "g").string(), "--pred", (t / "g").string(), "--out",
                (t / "report.json").string()});
  REQUIRE(r.code == 0);
  auto report = nlohmann::json::parse(testing_support::slurp(t / "report.json"));
  CHECK(report["overall"]["PQ"] == doctest::Approx(1.0));
  CHECK(report["units"]["length"] == "mm");
  CHECK(std::filesystem::exists(t / "report.txt"));
  CHECK(std::filesystem::exists(t / "report.json.manifest.json"));
  CHECK(r.out.find("overall") != std::string::npos);
}

TEST_CASE("pipeline commands") {
  TempDir t;
  const auto g = (t / "g").string();
  REQUIRE(cli({"gen", "--out", g, "--count", "1", "--dxf"}).code == 0);
  CHECK(cli({"graph", "--in", g, "--out", (t / "graphs").string()}).code == 0);
  CHECK(std::filesystem::exists(t / "graphs" / "drawing_0000.graph.json"));
  CHECK(cli({"--scale-ppm", "0.02", "rasterize", "--in", g, "--out", (t / "masks").string()}).code == 0);
  CHECK(std::filesystem::exists(t / "masks" / "drawing_0000.pgm"));
  CHECK(cli({"parse-dxf", "--in", (t / "g" / "drawing_0000.dxf").string(), "--out", (t / "p.jsonl").string()})
            .code == 0);
  auto parsed = pancad::load_drawing(t / "p.jsonl");
  auto original = pancad::load_drawing(t / "g" / "drawing_0000.jsonl");
  CHECK(parsed.size() == original.size());
  auto s = cli({"stats", "--in", g});
  REQUIRE(s.code == 0);
  auto stats = nlohmann::json::parse(s.out);
  CHECK(stats["drawings"] == 1);
  CHECK(stats["histogram"]["counts"].size() == stats["histogram"]["edges_mm"].size() + 1);

  CHECK(cli({"--iters", "5", "--lr", "1e-3", "train", "--data", g, "--out", (t / "m.json").string()}).code == 0);
  CHECK(std::filesystem::exists(t / "m.trace.csv"));
  CHECK(cli({"infer", "--model", (t / "m.json").string(), "--in", g, "--out", (t / "inf").string()}).code == 0);
  CHECK(cli({"assemble", "--in", (t / "inf").string(), "--gt-boxes", g, "--out", (t / "pan").string()}).code ==
        0);
  CHECK(cli({"eval", "semantic", "--gt", g, "--pred", (t / "inf").string()}).code == 0);
  CHECK(cli({"eval", "panoptic", "--gt", g, "--pred", (t / "pan").string()}).code == 0);
}

TEST_CASE("config file sets flags and the command line wins") {
  TempDir a, b, c;
  testing_support::fs::path cfg = a / "run.ini";
  {
    std::ofstream f(cfg);
    f << "seed = 3\n";
  }
  REQUIRE(cli({"--config", cfg.string(), "gen", "--out", (a / "g").string(), "--count", "1"}).code == 0);
  REQUIRE(cli({"--seed", "3", "gen", "--out", (b / "g").string(), "--count", "1"}).code == 0);
  REQUIRE(cli({"--config", cfg.string(), "--seed", "4", "gen", "--out", (c / "g").string(), "--count", "1"}).code ==
          0);
  auto da = testing_support::slurp(a / "g" / "drawing_0000.jsonl");
  CHECK(da == testing_support::slurp(b / "g" / "drawing_0000.jsonl"));
  CHECK(da != testing_support::slurp(c / "g" / "drawing_0000.jsonl"));
}

TEST_CASE("exit codes") {
  CHECK(cli({"--version"}).code == 0);
  CHECK(cli({"--version"}).out.find(pancad::kVersion) != std::string::npos);
  CHECK(cli({"--help"}).code == 0);
  CHECK(cli({}).code == 1);
  CHECK(cli({"gen", "--bogus"}).code == 1);
  CHECK(cli({"--threads", "0", "gen", "--out", "x"}).code == 1);
  auto missing = cli({"stats", "--in", "/nonexistent/pancad"});
  CHECK(missing.code == 1);
  CHECK(missing.err.rfind("error:", 0) == 0);
  TempDir t;
  {
    std::ofstream f(t / "bad.jsonl");
    f << "{\"id\":\"x\",\"classes\":[\"wall\"]}\n{\"kind\":\"line\"\n";
  }
  CHECK(cli({"stats", "--in", (t / "bad.jsonl").string()}).code == 1);
  CHECK(cli({"eval", "bogus", "--gt", (t / "bad.jsonl").string()}).code == 1);
}
