#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "commands.hpp"
#include "config.hpp"
#include "output.hpp"
#include "semieff/errors.hpp"

using namespace semieff;
using namespace semieff::cli;
namespace fs = std::filesystem;

namespace {

struct Scratch {
  fs::path dir;
  Scratch() {
    dir = fs::temp_directory_path() / ("semieff_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }

  fs::path file(const std::string& name, const std::string& content) const {
    const fs::path p = dir / name;
    std::ofstream(p, std::ios::binary) << content;
    return p;
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct Run {
  int code = -1;
  std::string out, err;
};

Run run_cli(const Scratch& s, const std::string& args) {
  const fs::path o = s.dir / "stdout.txt", e = s.dir / "stderr.txt";
  const std::string cmd = std::string("\"") + SEMIEFF_CLI_PATH + "\" " + args + " >\"" +
                          o.string() + "\" 2>\"" + e.string() + "\"";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(o);
  r.err = slurp(e);
  return r;
}

}  // namespace

TEST_CASE("csv formatting") {
  CsvTable t({"name", "value", "n"});
  t.add_row({std::string("a,b"), 0.1, 3LL});
  t.add_row({std::string("say \"hi\""), 1e300, -1LL});
  CHECK(t.str() ==
        "name,value,n\r\n\"a,b\",0.10000000000000001,3\r\n\"say \"\"hi\"\"\",1.0000000000000001e+300,-1\r\n");
  CHECK(format_double(0.5) == "0.5");
  const auto m = matrix_table((Mat(1, 2) << 1.0, 2.0).finished());
  CHECK(m.str() == "i,j,value\r\n0,0,1\r\n0,1,2\r\n");
}

TEST_CASE("atomic writes leave no temporaries") {
  Scratch s;
  const auto p = (s.dir / "x.txt").string();
  write_atomic(p, "one");
  write_atomic(p, "two");
  CHECK(slurp(p) == "two");
  int files = 0;
  for (const auto& e : fs::directory_iterator(s.dir)) files += e.is_regular_file();
  CHECK(files == 1);
  write_atomic((s.dir / "sub" / "y.txt").string(), "made");
  CHECK(slurp(s.dir / "sub" / "y.txt") == "made");
  // The parent is a regular file, so nothing can be created below it.
  CHECK_THROWS_AS(write_atomic((s.dir / "x.txt" / "z.txt").string(), "z"), std::exception);
}

TEST_CASE("config validation") {
  Scratch s;
  FlagOverrides f;
  f.config_path = s.file("bad.json", R"({"model": "normal-mean", "thetta": [0]})").string();
  try {
    load_config("efficiency", f);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("thetta") != std::string::npos);
  }
  f.config_path = s.file("tol.json", R"({"tolerances": {"orth": -1}})").string();
  CHECK_THROWS_AS(load_config("efficiency", f), ConfigError);
  f.config_path.clear();
  f.model = "no-such-model";
  CHECK_THROWS_AS(load_config("efficiency", f), ConfigError);

  FlagOverrides g;
  g.model = "normal-mean";
  const auto cfg = load_config("mc", g);
  try {
    require_seed(cfg, "mc");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("'seed'") != std::string::npos);
  }
  g.seed = 3;
  CHECK(require_seed(load_config("mc", g), "mc") == 3);
}

TEST_CASE("godambe on the normal model") {
  FlagOverrides f;
  f.model = "normal-mean";
  const auto out = execute(load_config("godambe", f));
  CHECK(out.checks.passed());
  bool found = false;
  for (const auto& e : out.result["members"])
    if (e["name"] == "score") {
      found = true;
      CHECK(e["J"][0][0].get<double>() == doctest::Approx(1.0).epsilon(1e-8));
    }
  CHECK(found);
}

TEST_CASE("exit codes and outputs of the binary") {
  Scratch s;
  auto r = run_cli(s, "efficiency --model normal-mean --out \"" + s.dir.string() + "\"");
  CHECK(r.code == 0);
  const auto doc = json::parse(r.out);
  CHECK(doc["command"] == "efficiency");
  CHECK(doc["invariants"]["passed"] == true);
  CHECK(json::parse(slurp(s.dir / "efficiency.json")) == doc);
  CHECK(slurp(s.dir / "efficiency_J_E.csv").rfind("i,j,value\r\n", 0) == 0);

  r = run_cli(s, "mc --model normal-mean");
  CHECK(r.code == 1);
  CHECK(r.err.find("'seed'") != std::string::npos);

  r = run_cli(s, "efficiency --config \"" + s.file("c.json", R"({"bogus": 1})").string() + "\"");
  CHECK(r.code == 1);
  CHECK(r.err.find("bogus") != std::string::npos);

  r = run_cli(s, "conditioning-demo --model normal-mean");
  CHECK(r.code == 1);

  r = run_cli(s, "no-such-command");
  CHECK(r.code == 1);

  r = run_cli(s, "check-path --model normal-mean --out \"" + s.dir.string() + "\"");
  CHECK(r.code == 0);
  const std::string csv = slurp(s.dir / "check-path.csv");
  CHECK(csv.rfind("t,l1,l2,sup,weak1,weak2", 0) == 0);
  CHECK(csv.find("\r\n") != std::string::npos);
}
