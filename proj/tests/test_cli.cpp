#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "cli.hpp"
#include "mplp/instance_io.hpp"
#include "support.hpp"

using namespace mplp;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string field(const std::string& report, const std::string& key) {
  std::istringstream is(report);
  for (std::string line; std::getline(is, line);)
    if (line.rfind(key + ": ", 0) == 0) return line.substr(key.size() + 2);
  return {};
}

std::string without_timing(const std::string& text, bool csv) {
  std::istringstream is(text);
  std::string out;
  for (std::string line; std::getline(is, line);) {
    if (line.rfind("wall_ms:", 0) == 0) continue;
    if (csv) line = line.substr(0, line.rfind(','));
    out += line + "\n";
  }
  return out;
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "mplp_cli_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("solve on the triangle certifies with one cluster") {
    const auto r = run({"solve", "--input", test::fixture_path("triangle.mrf")});
    CHECK(r.code == cli::kExitCertified);
    CHECK(field(r.out, "status") == "certified");
    CHECK(std::stod(field(r.out, "gap")) <= 1e-4);
    CHECK(field(r.out, "clusters_added") == "1");
    CHECK(field(r.out, "added").rfind("triplet", 0) == 0);
    CHECK(std::stod(field(r.out, "decoded")) == 2.0);
  }

  TEST_CASE("solve on the tree fixture adds nothing") {
    const auto r = run({"solve", "--input", test::fixture_path("tree12.mrf")});
    CHECK(r.code == cli::kExitCertified);
    CHECK(field(r.out, "clusters_added") == "0");
  }

  TEST_CASE("invalid configuration is a usage error") {
    const auto r = run({"solve", "--input", test::fixture_path("triangle.mrf"), "--inner-iters", "0"});
    CHECK(r.code == cli::kExitUsage);
    CHECK(r.err.find("inner") != std::string::npos);
  }

  TEST_CASE("usage errors") {
    CHECK(run({}).code == cli::kExitUsage);
    CHECK(run({"solve"}).code == cli::kExitUsage);
    CHECK(run({"solve", "--input", "/nonexistent/file.mrf"}).code == cli::kExitUsage);
    CHECK(run({"solve", "--input", test::fixture_path("triangle.mrf"), "--candidates", "pentagons"}).code ==
          cli::kExitUsage);
    CHECK(run({"solve", "--input", test::fixture_path("three_var.uai")}).code == cli::kExitUsage);
    CHECK(run({"frobnicate"}).code == cli::kExitUsage);
  }

  TEST_CASE("gap remaining exits 2") {
    const auto r = run({"solve", "--input", test::fixture_path("frustrated_cycle4.mrf"), "--candidates", "triangles"});
    CHECK(r.code == cli::kExitGap);
    CHECK(field(r.out, "status") == "gap-remaining");
    const auto b = run({"solve", "--input", test::fixture_path("triangle.mrf"), "--max-rounds", "0"});
    CHECK(b.code == cli::kExitGap);
    CHECK(field(b.out, "status") == "budget-exhausted");
  }

  TEST_CASE("uai input") {
    const auto r = run({"solve", "--input", test::fixture_path("three_var.uai"), "--format", "uai"});
    CHECK((r.code == cli::kExitCertified || r.code == cli::kExitGap));
    const auto o = run({"oracle", "--input", test::fixture_path("three_var.uai"), "--format", "uai"});
    CHECK(o.code == 0);
    if (r.code == cli::kExitCertified)
      CHECK(std::abs(std::stod(field(r.out, "decoded")) - std::stod(field(o.out, "energy"))) <= 1e-4);
  }

  TEST_CASE("report fields and config echo") {
    const auto r = run({"solve", "--input", test::fixture_path("frustrated_cycle4.mrf"), "--schedule", "random",
                        "--seed", "42", "--clusters-per-round", "3"});
    CHECK(field(r.out, "seed") == "42");
    CHECK(field(r.out, "config").find("clusters_per_round=3") != std::string::npos);
    CHECK(field(r.out, "config").find("schedule=random") != std::string::npos);
    CHECK(std::stod(field(r.out, "gap")) >= -1e-9);
    for (const char* key : {"dual", "decoded", "assignment", "passes", "rounds", "wall_ms", "triplets_registered"})
      CHECK_FALSE(field(r.out, key).empty());
  }

  TEST_CASE("trace csv header and monotone dual") {
    const auto path = scratch("cycle_trace.csv");
    const auto r = run({"solve", "--input", test::fixture_path("frustrated_cycle4.mrf"), "--trace", path.string()});
    CHECK(r.code == cli::kExitCertified);
    std::istringstream is(test::read_file(path.string()));
    std::string line;
    std::getline(is, line);
    CHECK(line == "event,pass,dual,decoded,clusters,d_c,ms");
    bool seen_pass = false, seen_added = false;
    double prev = 0.0;
    while (std::getline(is, line)) {
      std::vector<std::string> cols;
      std::istringstream ls(line);
      for (std::string c; std::getline(ls, c, ',');) cols.push_back(c);
      if (line.back() == ',') cols.emplace_back();
      REQUIRE(cols.size() == 7);
      const double dual = std::stod(cols[2]);
      if (seen_pass) CHECK(dual <= prev + 1e-9);
      if (cols[0] == "pass") seen_pass = true;
      if (cols[0] == "cluster-added") {
        seen_added = true;
        CHECK(std::stod(cols[5]) > 0.0);
      } else {
        CHECK(cols[5].empty());
      }
      prev = dual;
    }
    CHECK(seen_added);
  }

  TEST_CASE("identical invocations give identical reports and traces") {
    GeneratorSpec g;
    g.kind = GeneratorKind::spin_glass_grid;
    g.rows = 4;
    g.cols = 4;
    g.seed = 5;
    const auto input = scratch("glass.mrf");
    {
      std::ofstream(input) << write_native(generate(g));
    }
    for (const char* schedule : {"score", "random"}) {
      const auto t1 = scratch("t1.csv"), t2 = scratch("t2.csv");
      const auto a = run({"solve", "--input", input.string(), "--schedule", schedule, "--seed", "9", "--trace",
                          t1.string()});
      const auto b = run({"solve", "--input", input.string(), "--schedule", schedule, "--seed", "9", "--trace",
                          t2.string()});
      CHECK(a.code == b.code);
      CHECK(without_timing(a.out, false) == without_timing(b.out, false));
      CHECK(without_timing(test::read_file(t1.string()), true) == without_timing(test::read_file(t2.string()), true));
    }
  }

  TEST_CASE("generate is byte-identical for a fixed seed") {
    const std::vector<std::string> args{"generate", "--kind", "grid_potts", "--rows", "3", "--cols", "3",
                                        "--states", "2", "--seed", "1"};
    const auto a = run(args), b = run(args);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    const auto m = parse_native(a.out);
    CHECK(m.num_vars() == 9);
    CHECK(m.num_edges() == 12);

    const auto path = scratch("gen.mrf");
    auto with_output = args;
    with_output.insert(with_output.end(), {"--output", path.string()});
    CHECK(run(with_output).code == 0);
    CHECK(test::read_file(path.string()) == a.out);
  }

  TEST_CASE("generate reproduces the tree fixture") {
    const auto r = run({"generate", "--kind", "tree", "--n", "12", "--states", "2", "--states-max", "4", "--coupling",
                        "-1", "1", "--field", "-1", "1", "--seed", "11"});
    CHECK(r.out == test::read_file(test::fixture_path("tree12.mrf")));
  }

  TEST_CASE("oracle on the triangle") {
    const auto r = run({"oracle", "--input", test::fixture_path("triangle.mrf")});
    CHECK(r.code == 0);
    CHECK(std::stod(field(r.out, "energy")) == 2.0);
    CHECK(field(r.out, "optima") == "6");
    CHECK(field(r.out, "assignment") == "0 0 1");
  }

  TEST_CASE("oracle refuses a 40-variable grid") {
    const auto path = scratch("grid40.mrf");
    CHECK(run({"generate", "--kind", "spin_glass_grid", "--rows", "5", "--cols", "8", "--output", path.string()}).code ==
          0);
    const auto r = run({"oracle", "--input", path.string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("too large") != std::string::npos);
  }
}
