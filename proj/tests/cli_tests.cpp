#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;
};

const fs::path& work_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "mdskit_cli_tests";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

RunResult run_cli(const std::string& args) {
  const fs::path log = work_dir() / "last_output.txt";
  const std::string cmd =
      std::string(MDSKIT_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  RunResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(log);
  std::stringstream ss;
  ss << in.rdbuf();
  result.output = ss.str();
  return result;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("gen prints the optimal rate and writes a scheme") {
  const fs::path out = work_dir() / "k3.json";
  const auto r = run_cli("gen --k 3 --q 10007 --seed 7 --out " + out.string());
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("11/6") != std::string::npos);
  CHECK(fs::exists(out));

  const auto r1 = run_cli("gen --k 1 --q 5");
  CHECK(r1.exit_code == 0);
  CHECK(r1.output.find("rate: 1 (1.000000)") != std::string::npos);

  // Summation-shaped configuration through the level/block flags.
  const auto r2 = run_cli("gen --k 4 --levels 1 2 3 --block 6 --q 10007");
  CHECK(r2.exit_code == 0);
  CHECK(r2.output.find("rate: 11/6") != std::string::npos);
}

TEST_CASE("gen rejects a field below the bound") {
  const auto r = run_cli("gen --k 3 --q 5");
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("72") != std::string::npos);
}

TEST_CASE("usage errors exit with 2") {
  CHECK(run_cli("gen").exit_code == 2);           // missing --k
  CHECK(run_cli("no-such-command").exit_code == 2);
}

TEST_CASE("verify passes on a fresh scheme and fails on a mutated one") {
  const fs::path scheme = work_dir() / "verify_me.json";
  REQUIRE(run_cli("gen --k 3 --q 10007 --seed 9 --out " + scheme.string())
              .exit_code == 0);

  const fs::path report = work_dir() / "verify_report.json";
  const auto ok = run_cli("verify --in " + scheme.string() + " --out " +
                          report.string());
  CHECK(ok.exit_code == 0);
  CHECK(slurp(report).find("\"overall\": true") != std::string::npos);

  // Hand-edit the scheme: zero the first row of user 1's level-1 generator.
  auto doc = nlohmann::ordered_json::parse(slurp(scheme));
  for (auto& entry : doc["H"]) {
    if (entry["k"] == 1 && entry["n"] == 1) {
      for (int j = 0; j < 6; ++j) entry["data"][j] = 0;
    }
  }
  const fs::path mutated = work_dir() / "mutated.json";
  std::ofstream(mutated) << doc.dump(2) << "\n";

  const auto bad = run_cli("verify --in " + mutated.string());
  CHECK(bad.exit_code == 1);
  CHECK(bad.output.find("FAIL") != std::string::npos);
  CHECK(bad.output.find("n=1") != std::string::npos);
}

TEST_CASE("verify handles the vandermonde baseline and bad files") {
  const auto r = run_cli("verify --vandermonde --k 5 --q 11");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("rate: 5 (5.000000)") != std::string::npos);

  const fs::path garbage = work_dir() / "garbage.json";
  std::ofstream(garbage) << "{ not json";
  CHECK(run_cli("verify --in " + garbage.string()).exit_code == 3);
  CHECK(run_cli("verify --in " + (work_dir() / "missing.json").string())
            .exit_code == 3);
  CHECK(run_cli("verify").exit_code == 2);
}

TEST_CASE("sum-demo runs every selection") {
  const auto r4 = run_cli("sum-demo --k 4 --q 10007 --seed 1");
  CHECK(r4.exit_code == 0);
  CHECK(r4.output.find("key rate: 11/6") != std::string::npos);
  // 11 subsets of size >= 2.
  std::size_t lines = 0, pos = 0;
  while ((pos = r4.output.find("decode ok", pos)) != std::string::npos) {
    ++lines;
    pos += 1;
  }
  CHECK(lines == 11);

  const auto rt = run_cli("sum-demo --k 3 --table2 --q 5 --seed 2");
  CHECK(rt.exit_code == 0);
  CHECK(rt.output.find("key rate: 3/2") != std::string::npos);

  const auto r2 = run_cli("sum-demo --k 2 --q 101 --seed 3");
  CHECK(r2.exit_code == 0);
  CHECK(r2.output.find("key rate: 1 (1.000000)") != std::string::npos);

  CHECK(run_cli("sum-demo --k 4 --table2 --q 5").exit_code == 2);
}

TEST_CASE("bounds reports targets and bound-battery outcomes") {
  const auto r = run_cli("bounds --k 3 --q 10007 --seed 4");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("achieved rate 11/6") != std::string::npos);
  CHECK(r.output.find("optimal 3/2") != std::string::npos);  // summation side
  CHECK(r.output.find("1 3/2 11/6 25/12 137/60") != std::string::npos);

  // Same battery over a scheme loaded from disk.
  const fs::path scheme = work_dir() / "bounds_in.json";
  REQUIRE(run_cli("gen --k 3 --q 10007 --seed 4 --out " + scheme.string())
              .exit_code == 0);
  const auto rl = run_cli("bounds --in " + scheme.string() + " --seed 4");
  CHECK(rl.exit_code == 0);
  CHECK(rl.output.find("achieved rate 11/6") != std::string::npos);

  // Four-user keys hit the same 11/6 target on the summation side.
  const auto r4 = run_cli("bounds --k 4 --q 10007 --seed 4");
  CHECK(r4.exit_code == 0);
  CHECK(r4.output.find("variable generation: achieved rate 25/12 (2.083333), "
                       "optimal 25/12") != std::string::npos);
  CHECK(r4.output.find("summation keys: achieved rate 11/6 (1.833333), "
                       "optimal 11/6") != std::string::npos);
}

TEST_CASE("gen reports sampling exhaustion") {
  // Seed 0 over the minimal K=3 field fails certification on its first draw.
  const auto r = run_cli("gen --k 3 --q 73 --seed 0 --max-attempts 1");
  CHECK(r.exit_code == 1);
  CHECK(r.output.find("1 attempts") != std::string::npos);
}

TEST_CASE("selftest passes") {
  const auto r = run_cli("selftest --seed 5");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("FAIL") == std::string::npos);
}

TEST_CASE("identical seeds give byte-identical outputs") {
  const fs::path a = work_dir() / "det_a.json";
  const fs::path b = work_dir() / "det_b.json";
  REQUIRE(run_cli("gen --k 3 --q 73 --seed 11 --out " + a.string()).exit_code ==
          0);
  REQUIRE(run_cli("gen --k 3 --q 73 --seed 11 --out " + b.string()).exit_code ==
          0);
  CHECK(slurp(a) == slurp(b));

  const fs::path ta = work_dir() / "sum_a.json";
  const fs::path tb = work_dir() / "sum_b.json";
  const fs::path ka = work_dir() / "keys_a.json";
  const fs::path kb = work_dir() / "keys_b.json";
  REQUIRE(run_cli("sum-demo --k 3 --q 101 --seed 11 --out " + ta.string() +
                  " --keys-out " + ka.string())
              .exit_code == 0);
  REQUIRE(run_cli("sum-demo --k 3 --q 101 --seed 11 --out " + tb.string() +
                  " --keys-out " + kb.string())
              .exit_code == 0);
  CHECK(slurp(ta) == slurp(tb));
  CHECK(slurp(ka) == slurp(kb));

  const fs::path seed12 = work_dir() / "det_c.json";
  REQUIRE(run_cli("gen --k 3 --q 73 --seed 12 --out " + seed12.string())
              .exit_code == 0);
  CHECK(slurp(a) != slurp(seed12));
}
