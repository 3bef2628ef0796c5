#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sys/wait.h>

#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "wcl/io.hpp"
#include "wcl/operator.hpp"
#include "wcl/space.hpp"

using namespace wcl;
namespace fs = std::filesystem;

namespace {

const char* kBin = WCL_CLI_BIN;

int run(const std::string& args) {
  const std::string cmd = std::string(kBin) + " " + args;
  const int status = std::system(cmd.c_str());
  if (status == -1) return -1;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path fresh_dir(const char* name) {
  const fs::path dir = fs::path("cli_test_tmp") / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("gallery fixtures are byte-stable and complete") {
  const fs::path dir = fresh_dir("gallery");
  const fs::path a = dir / "a";
  const fs::path b = dir / "b";
  REQUIRE(run("gallery all --out " + a.string() + " > /dev/null") == 0);
  REQUIRE(run("gallery all --out " + b.string() + " > /dev/null") == 0);

  std::vector<fs::path> names;
  for (const auto& entry : fs::recursive_directory_iterator(a))
    if (entry.is_regular_file())
      names.push_back(fs::relative(entry.path(), a));
  CHECK(names.size() == 21);
  for (const fs::path& rel : names) {
    CAPTURE(rel.string());
    CHECK(slurp(a / rel) == slurp(b / rel));
  }

  CHECK(load_json(a / "example5" / "recovery.json").at("verdict") ==
        "recovered");
  CHECK(load_json(a / "example6" / "open_map.json").at("verdict") ==
        "not_open");
  CHECK(load_json(a / "example6" / "quotient.json").at("verdict") ==
        "quotient");
  CHECK(load_json(a / "example9" / "obstruction.json").at("verdict") ==
        "obstructed");
  CHECK(load_json(a / "lemma3-counterexamples" / "properness.json")
            .at("verdict") == "not_proper");
  CHECK(load_json(a / "lemma3-counterexamples" / "rejected_build.json")
            .at("code") == "OutputNotC0");
}

TEST_CASE("check commands follow the exit-code contract") {
  const fs::path dir = fresh_dir("check");
  REQUIRE(run("gallery example9 --out " + dir.string() + " > /dev/null") == 0);
  const std::string op = (dir / "example9" / "operator.json").string();

  CHECK(run("check --mode dp " + op + " > /dev/null") == 0);
  CHECK(run("check --mode isometry " + op + " > /dev/null") == 0);
  CHECK(run("check --mode proper " + op + " > /dev/null") == 0);

  // A matrix with a two-sample row fails dp with a witness and exit 2.
  const SpacePtr d2 = make_discrete_space(2);
  Matrix m(2, 2);
  m.at(0, 0) = 1.0;
  m.at(0, 1) = 1.0;
  m.at(1, 1) = 1.0;
  save_operator(make_matrix_operator(d2, d2, m), dir / "pair.json", "d2",
                "d2");
  const fs::path rep = dir / "pair_report.json";
  CHECK(run("check --mode dp --out " + rep.string() + " " +
            (dir / "pair.json").string() + " > /dev/null") == 2);
  const ordered_json r = load_json(rep);
  CHECK(r.at("verdict") == "not_preserving");
  CHECK(r.at("witnesses")[0].at("row") == 0);
}

TEST_CASE("build accepts good symbols and rejects exploding weights") {
  const fs::path dir = fresh_dir("build");
  const SpacePtr X = make_interval_space(0.0, 16.0, 160, TailSpec::plus_only());
  const SpacePtr Y = make_interval_space(-16.0, 16.0, 320, TailSpec::both());
  save_space(*X, dir / "X.json");
  save_space(*Y, dir / "Y.json");

  Symbol fold;
  fold.phi.resize(Y->size());
  fold.h.assign(Y->size(), 0.8);
  for (std::size_t j = 0; j < Y->size(); ++j)
    fold.phi[j] = PointRef::interior(j >= 160 ? j - 160 : 160 - j);
  save_json(symbol_to_json(fold), dir / "fold.json");

  const std::string inputs = (dir / "X.json").string() + " " +
                             (dir / "Y.json").string() + " ";
  CHECK(run("build " + inputs + (dir / "fold.json").string() + " --out " +
            (dir / "op.json").string() + " > /dev/null") == 0);
  const LinearOperator op = load_operator(dir / "op.json");
  CHECK(op.codomain->size() == Y->size());
  CHECK(run("check --mode dp " + (dir / "op.json").string() +
            " > /dev/null") == 0);

  // Exponentially growing weight over the proper fold: outputs leave the
  // vanishing class, so the build must refuse with a machine-readable
  // reason on stdout and exit 2.
  Symbol exploding = fold;
  for (std::size_t j = 0; j < Y->size(); ++j)
    exploding.h[j] = std::exp(Y->points[j].x);
  save_json(symbol_to_json(exploding), dir / "exploding.json");
  const fs::path out = dir / "rejection.json";
  CHECK(run("build " + inputs + (dir / "exploding.json").string() +
            " > " + out.string()) == 2);
  const ordered_json rejection = load_json(out);
  CHECK(rejection.at("verdict") == "error");
  CHECK(rejection.at("code") == "OutputNotC0");
}

TEST_CASE("recover and extend round-trip through files") {
  const fs::path dir = fresh_dir("recover");
  const SpacePtr d3 = make_discrete_space(3);
  Matrix m(3, 3);
  m.at(0, 2) = 2.0;
  m.at(1, 0) = -1.0;
  m.at(2, 1) = 0.5;
  save_operator(make_matrix_operator(d3, d3, m), dir / "perm.json", "d3",
                "d3");
  const fs::path rep = dir / "bijective.json";
  CHECK(run("recover --mode bijective --out " + rep.string() + " " +
            (dir / "perm.json").string() + " > /dev/null") == 0);
  const ordered_json r = load_json(rep);
  CHECK(r.at("verdict") == "bijective");
  CHECK(r.at("symbol").at("phi") == ordered_json({2, 0, 1}));
  CHECK(r.at("inverse").at("phi") == ordered_json({1, 2, 0}));

  REQUIRE(run("gallery example9 --out " + dir.string() + " > /dev/null") == 0);
  const std::string op = (dir / "example9" / "operator.json").string();
  const fs::path ext = dir / "extension.json";
  CHECK(run("extend --mode dp --out " + ext.string() + " " + op +
            " > /dev/null") == 0);
  const ordered_json e = load_json(ext);
  CHECK(e.at("verdict") == "obstructed");
  CHECK(std::abs(e.at("residuals").at("limit_gap").get<double>() - 2.0) <=
        2e-6);

  const fs::path dec = dir / "decomposition.json";
  CHECK(run("recover --mode dp --out " + dec.string() + " " + op +
            " > /dev/null") == 0);
  CHECK(load_json(dec).at("y3") == ordered_json({1020}));
}

TEST_CASE("io failures and bad invocations exit distinctly") {
  const fs::path dir = fresh_dir("errors");
  {
    std::ofstream bad(dir / "bad.json");
    bad << "{broken";
  }
  CHECK(run("check --mode dp " + (dir / "bad.json").string() +
            " 2> /dev/null > /dev/null") == 1);
  CHECK(run("check --mode dp " + (dir / "missing.json").string() +
            " 2> /dev/null > /dev/null") == 1);
  CHECK(run("frobnicate 2> /dev/null > /dev/null") == 1);
  CHECK(run("check 2> /dev/null > /dev/null") == 1);  // --mode missing
  CHECK(run("gallery nonesuch --out " + dir.string() +
            " 2> /dev/null > /dev/null") == 2);
  CHECK(run("--help > /dev/null") == 0);

  // Verbose logging goes to stderr and leaves the contract alone.
  const fs::path g = dir / "g";
  CHECK(std::system((std::string("WCL_LOG=debug ") + kBin +
                     " gallery example5 --out " + g.string() +
                     " > /dev/null 2> " + (dir / "log.txt").string())
                        .c_str()) == 0);
  CHECK(slurp(dir / "log.txt").find("[wcl]") != std::string::npos);
}
