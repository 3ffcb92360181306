#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dsieve/cli.hpp"
#include "dsieve/config.hpp"
#include "dsieve/errors.hpp"
#include "dsieve/serialize.hpp"

using namespace dsieve;
namespace fs = std::filesystem;

namespace {

const fs::path kSource = DSIEVE_SOURCE_DIR;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "dsieve_test_cli" / name;
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Json read_json(const fs::path& p) { return Json::parse(slurp(p)); }

int run(std::vector<std::string> args, std::string* err_text = nullptr) {
  args.insert(args.begin(), "dsieve");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream err;
  const int rc = run_cli(static_cast<int>(argv.size()), argv.data(), err);
  if (err_text) *err_text = err.str();
  return rc;
}

std::string cfg(const std::string& name) { return (kSource / "configs" / name).string(); }

}  // namespace

TEST_CASE("config parsing") {
  const Config c = Config::parse(
      "# comment\n[sequence]\nkind = geometric\nq = \"4\"   # trailing\n\n[schedule]\n; other comment\neta=1/2\n", "t.cfg");
  CHECK(c.get("sequence.kind") == "geometric");
  CHECK(c.rational("sequence.q") == 4);
  CHECK(c.rational("schedule.eta") == mpq_class(1, 2));
  CHECK(c.integer_or("run.N", 7) == 7);
  CHECK_FALSE(c.has("run.N"));
}

TEST_CASE("config errors carry file and line") {
  auto message = [](const std::string& text) -> std::string {
    try {
      Config::parse(text, "x.cfg");
    } catch (const ConfigError& e) {
      return e.what();
    }
    return "";
  };
  CHECK(message("[sequence]\nkind = smooth\ncolour = red\n").find("x.cfg:3") != std::string::npos);
  CHECK(message("[sequence]\nkind = smooth\ncolour = red\n").find("sequence.colour") != std::string::npos);
  CHECK(message("[run\n").find("x.cfg:1") != std::string::npos);
  CHECK(message("[run]\nN\n").find("x.cfg:2") != std::string::npos);
  CHECK(message("[run]\nN = 1\nN = 2\n").find("duplicate") != std::string::npos);
  const Config c = Config::parse("[run]\nN = ten\n", "y.cfg");
  try {
    run_settings(c);
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("y.cfg:2") != std::string::npos);
  }
}

TEST_CASE("typed settings") {
  Config c = Config::parse("[run]\npick = random:17\nmode = path\n");
  const RunSettings rs = run_settings(c);
  CHECK(rs.pick == PickPolicy::random);
  CHECK(rs.seed == 17);
  CHECK(rs.mode == "path");
  c.set("run.mode", "sideways");
  CHECK_THROWS_AS(run_settings(c), ConfigError);
  CHECK_THROWS_AS(c.set("run.colour", "red"), ConfigError);
  CHECK_THROWS_AS(sequence_from(Config::parse("[sequence]\nkind = geometric\nq = 1\n")), ConfigError);
  CHECK_THROWS_AS(sequence_from(Config::parse("[sequence]\nkind = spiral\n")), ConfigError);
}

TEST_CASE("fingerprint is order independent") {
  const Config a = Config::parse("[run]\nN = 5\n[sequence]\nkind = smooth\n");
  Config b = Config::parse("[sequence]\nkind = smooth\n[run]\nN = 5\n");
  CHECK(a.fingerprint() == b.fingerprint());
  CHECK(a.fingerprint() == sha256_hex("run.N=5\nsequence.kind=smooth\n"));
  b.set("output.dir", "elsewhere");
  CHECK(a.fingerprint() == b.fingerprint());
  b.set("run.N", "6");
  CHECK(a.fingerprint() != b.fingerprint());
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("toy check passes") {
  const fs::path out = scratch("toy_check");
  CHECK(run({"check", "--config", cfg("toy.cfg"), "--output.dir=" + out.string()}) == kExitOk);
  const Json r = read_json(out / "report.json");
  CHECK(r["exit_code"] == 0);
  CHECK(r["check"]["conditions"]["all_pass"] == true);
}

TEST_CASE("bad delta names the failing condition") {
  const fs::path out = scratch("bad_delta");
  std::string err;
  CHECK(run({"check", "--config", cfg("bad-delta.cfg"), "--output.dir", out.string()}, &err) == kExitConditionViolated);
  CHECK(err.find("block-sum") != std::string::npos);
  CHECK(err.find("1/4 <= 1/16") != std::string::npos);
  const Json r = read_json(out / "report.json");
  CHECK(r["exit_code"] == 1);
  const Json& cond = r["check"]["conditions"];
  CHECK(cond["binding"] == "block-sum");
  CHECK(cond["conditions"][1]["lhs"] == "1/4");
  CHECK(cond["conditions"][1]["rhs"] == "1/16");
  CHECK(run({"sieve", "--config", cfg("bad-delta.cfg"), "--output.dir", out.string()}) == kExitConditionViolated);
  CHECK_FALSE(fs::exists(out / "trace.json"));
}

TEST_CASE("overrides and exit codes") {
  const fs::path out = scratch("overrides");
  const std::string dir = "--output.dir=" + out.string();
  CHECK(run({"check", "--config", cfg("toy.cfg"), dir, "--schedule.delta.const=1/16"}) == kExitConditionViolated);
  CHECK(run({"check", "--config", cfg("toy.cfg"), dir, "--N", "20"}) == kExitOk);
  CHECK(read_json(out / "report.json")["N"] == 20);
  CHECK(run({"check", "--config", cfg("toy.cfg"), dir, "--run.colour=red"}) == kExitConfigError);
  CHECK(run({"check", "--config", cfg("toy.cfg"), dir, "--schedule.eta=3/2"}) == kExitConfigError);
  CHECK(run({"check", "--config", "/nonexistent.cfg"}) == kExitConfigError);
  CHECK(run({"frobnicate"}) == kExitConfigError);
  CHECK(run({}) == kExitConfigError);
  CHECK(run({"sieve", "--config", cfg("toy.cfg"), dir, "--schedule.delta.const=3/4"}) == kExitConditionViolated);
}

TEST_CASE("toy sieve writes a trace") {
  const fs::path out = scratch("toy_sieve");
  CHECK(run({"sieve", "--config", cfg("toy.cfg"), "--output.dir=" + out.string()}) == kExitOk);
  const Json t = read_json(out / "trace.json");
  CHECK(t["final_measure"] == "14798457/16777216");
  CHECK(t.contains("config_fingerprint"));
}

TEST_CASE("smooth witness is deterministic across threads and directories") {
  const fs::path a = scratch("smooth_a"), b = scratch("smooth_b");
  CHECK(run({"witness", "--config", cfg("smooth.cfg"), "--output.dir=" + a.string(), "--N", "300"}) == kExitOk);
  CHECK(run({"witness", "--config", cfg("smooth.cfg"), "--output.dir=" + b.string(), "--N", "300", "--threads", "4"}) ==
        kExitOk);
  CHECK(slurp(a / "certificate.json") == slurp(b / "certificate.json"));
  const Json c = read_json(a / "certificate.json");
  CHECK(c["margins"]["verdict"] == "pass");
  CHECK(c["schedule"]["preset"] == "custom-kappa");
}

TEST_CASE("sequence dump") {
  const fs::path out = scratch("sequence");
  CHECK(run({"sequence", "--config", cfg("smooth.cfg"), "--output.dir=" + out.string(), "--N", "8",
             "--sequence.tau=10"}) == kExitOk);
  const Json r = read_json(out / "report.json");
  REQUIRE(r["terms"].size() == 8);
  CHECK(r["terms"][4]["H"] == 12);
}

TEST_CASE("eggleston dimension run") {
  const fs::path out = scratch("eggleston");
  CHECK(run({"dimension", "--config", cfg("eggleston.cfg"), "--output.dir=" + out.string()}) == kExitOk);
  const Json r = read_json(out / "report.json");
  const mpq_class nu(r["dimension"]["lower_bound"]["nu_star"].get<std::string>());
  CHECK(nu < mpq_class(1, 2));
  CHECK(nu >= mpq_class(1, 2) - mpq_class(1, 4096));
  CHECK(fs::exists(out / "series.csv"));
  CHECK(run({"dimension", "--config", cfg("eggleston.cfg"), "--output.dir=" + out.string(), "--dimension.nu=1/2"}) == kExitOk);
  CHECK(read_json(out / "report.json")["dimension"]["series"]["verdict"] == "certified-divergent");
  CHECK(run({"dimension", "--config", cfg("smooth.cfg"), "--output.dir=" + out.string(), "--N", "200",
             "--dimension.nu=1/2"}) == kExitInconclusive);
}
