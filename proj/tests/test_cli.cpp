// Copyright 2026 The rdeq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
};

RunResult run_cli(const std::string& args, bool merge_stderr = false) {
  const std::string cmd = std::string(RDEQ_CLI_BIN) + " " + args +
                          (merge_stderr ? " 2>&1" : " 2>/dev/null");
  RunResult res;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  size_t got;
  while ((got = fread(buf, 1, sizeof(buf), pipe)) > 0) res.out.append(buf, got);
  const int status = pclose(pipe);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

std::vector<std::string> lines_of(const std::string& s) {
  std::vector<std::string> lines;
  std::istringstream in(s);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string temp_path(const std::string& name) {
  return "/tmp/rdeq_cli_test_" + name;
}

}  // namespace

TEST_CASE("curve sweep output") {
  const RunResult res =
      run_cli("curve --p 0.25 --d2 0.125 --d1 0:0.5:0.01");
  CHECK(res.exit_code == 0);
  const auto lines = lines_of(res.out);
  REQUIRE(lines.size() == 52);
  CHECK(lines[0] == "d1,d2,p,region,rate_bits,equivocation_bits,clamped");
  CHECK(lines[1] == "0,0.125,0.25,L3,1,0.811278124459,0");
  CHECK(lines[51].substr(0, 4) == "0.5,");
  // deterministic output
  const RunResult again =
      run_cli("curve --p 0.25 --d2 0.125 --d1 0:0.5:0.01");
  CHECK(again.out == res.out);
}

TEST_CASE("curve clamps out-of-range distortions") {
  const RunResult res = run_cli("curve --p 0.25 --d2 0.6 --d1 0:0.5:0.25");
  CHECK(res.exit_code == 0);
  const auto lines = lines_of(res.out);
  REQUIRE(lines.size() == 4);
  for (size_t i = 1; i < lines.size(); ++i) {
    CHECK(lines[i].back() == '1');  // clamped flag set on every row
  }
}

TEST_CASE("regions grid") {
  const RunResult res =
      run_cli("regions --p 0.25 --d1 0:0.5:0.25 --d2 0:0.125:0.0625");
  CHECK(res.exit_code == 0);
  const auto lines = lines_of(res.out);
  REQUIRE(lines.size() == 10);
  CHECK(lines[0] == "d1,d2,labels");
  CHECK(lines[1] == "0,0,L3");
  CHECK(lines[7] == "0.5,0,L2");
  CHECK(lines[9] == "0.5,0.125,L1");
}

TEST_CASE("frontier tight and achievable-only regimes") {
  const RunResult g4 = run_cli("frontier --p 0.4 --d1 0.2 --d2 0.3 --alpha 0:0.5:0.05");
  CHECK(g4.exit_code == 0);
  const auto g4_lines = lines_of(g4.out);
  REQUIRE(g4_lines.size() == 12);
  CHECK(g4_lines[0] == "alpha,beta,rate_bits,equivocation_bits,regime,optimality");
  CHECK(g4_lines[1] == "0,0.333333333333,0.449022499567,1.52192809489,G4,tight");
  CHECK(g4_lines[5] ==
        "0.2,0.2,0.278071905113,1.40410745139,G4,tight");
  CHECK(g4_lines[11] == "0.5,0,0.6,0.970950594455,G4,tight");

  // tighter d2 forces the achievable-only parametrization on a shorter range
  const RunResult g5 = run_cli("frontier --p 0.4 --d1 0.2 --d2 0.1 --alpha 0:0.25:0.05");
  CHECK(g5.exit_code == 0);
  const auto g5_lines = lines_of(g5.out);
  REQUIRE(g5_lines.size() == 7);
  for (size_t i = 1; i < g5_lines.size(); ++i) {
    CHECK(g5_lines[i].find(",G5,achievable-only") != std::string::npos);
  }

  // outside both overlapping regimes there is no frontier
  const RunResult bad = run_cli("frontier --p 0.4 --d1 0.9 --d2 0.3 --alpha 0:0.1:0.05");
  CHECK(bad.exit_code == 2);
}

TEST_CASE("verify command") {
  const RunResult all = run_cli("verify");
  CHECK(all.exit_code == 0);
  const auto j = nlohmann::json::parse(all.out);
  for (const char* suite : {"L2", "L3", "L4", "G3", "G4"}) {
    REQUIRE(j.contains(suite));
    CHECK(j[suite]["pass"] == true);
    CHECK(j[suite]["points"] == 11);
    CHECK(j[suite]["max_abs_error"].get<double>() <= 1e-9);
  }

  const RunResult only = run_cli("verify --only L2");
  CHECK(only.exit_code == 0);
  const auto j2 = nlohmann::json::parse(only.out);
  CHECK(j2.size() == 1);
  CHECK(j2.contains("L2"));

  // an impossibly tight tolerance reports failure through the exit code
  const RunResult tight = run_cli("verify --tol 1e-20");
  CHECK(tight.exit_code == 1);
  const auto j3 = nlohmann::json::parse(tight.out);
  CHECK(j3["L2"]["pass"] == false);
}

TEST_CASE("search command") {
  const RunResult res = run_cli(
      "search --case uninformed --p 0.25 --d1 0.1 --d2 0.02 "
      "--restarts 4 --steps 150 --seed 3");
  CHECK(res.exit_code == 0);
  const auto j = nlohmann::json::parse(res.out);
  CHECK(j["found"] == true);
  CHECK(j["feasible"].get<int>() >= 1);
  CHECK(j["best"]["rate_bits"].get<double>() >=
        j["bound"]["rate_bits"].get<double>() - 1e-9);
  CHECK(j["best"]["d1"].get<double>() <= 0.1 + 1e-9);
  CHECK(j["best"]["d2"].get<double>() <= 0.02 + 1e-9);
  REQUIRE(j.contains("channel"));
  CHECK(j["channel"].size() == 2);  // one row per source symbol

  // deterministic for a fixed seed
  const RunResult again = run_cli(
      "search --case uninformed --p 0.25 --d1 0.1 --d2 0.02 "
      "--restarts 4 --steps 150 --seed 3");
  CHECK(again.out == res.out);
}

TEST_CASE("simulate command") {
  const RunResult res = run_cli(
      "simulate --scheme sw --p 0.25 --n 4 --seeds 0,0,1 --epsilon 0.2");
  CHECK(res.exit_code == 0);
  const auto lines = lines_of(res.out);
  REQUIRE(lines.size() == 4);
  CHECK(lines[0] ==
        "scheme,n,seed,rate_bits_used,equiv_rate_bits,limit_bits,gap_bits,"
        "distortion1,distortion2,encoding_failure,decode_failure,"
        "bin_uniformity,exact,mc_samples");
  CHECK(lines[1] == lines[2]);  // duplicated seed, identical row
  CHECK(lines[1] != lines[3]);

  const RunResult empty = run_cli("simulate --scheme sw --p 0.25 --seeds \"\"");
  CHECK(empty.exit_code == 2);

  const RunResult bad_scheme = run_cli("simulate --scheme bogus --p 0.25");
  CHECK(bad_scheme.exit_code == 2);
}

TEST_CASE("symmetry command") {
  const RunResult res = run_cli("symmetry --samples 50 --seed 1");
  CHECK(res.exit_code == 0);
  const auto j = nlohmann::json::parse(res.out);
  CHECK(j["samples"] == 50);
  CHECK(j["failures"] == 0);
  CHECK(j["first_failure"].is_null());
}

TEST_CASE("manifest and replay") {
  const std::string out = temp_path("curve.csv");
  const std::string replay_out = temp_path("curve_replay.csv");
  std::remove(out.c_str());
  std::remove(replay_out.c_str());

  const RunResult first =
      run_cli("curve --p 0.25 --d2 0.03125 --d1 0:0.5:0.05 --out " + out);
  CHECK(first.exit_code == 0);
  const std::string manifest_path = out + ".manifest.json";
  const auto manifest = nlohmann::json::parse(slurp(manifest_path));
  CHECK(manifest["command"] == "curve");
  CHECK(manifest["tool_version"] == "0.1.0");
  CHECK(manifest.contains("timestamp"));
  CHECK(manifest["parameters"]["p"] == "0.25");

  const RunResult replayed =
      run_cli("replay --manifest " + manifest_path + " --out " + replay_out);
  CHECK(replayed.exit_code == 0);
  CHECK(slurp(replay_out) == slurp(out));

  std::remove(out.c_str());
  std::remove(manifest_path.c_str());
  std::remove((replay_out + ".manifest.json").c_str());
  std::remove(replay_out.c_str());
}

TEST_CASE("config file splicing") {
  const std::string cfg = temp_path("curve.cfg");
  {
    std::ofstream f(cfg);
    f << "# sweep defaults\n";
    f << "p = 0.25\n";
    f << "d2 = 0.125\n";
    f << "d1 = 0:0.5:0.25\n";
  }
  const RunResult from_cfg = run_cli("curve --config " + cfg);
  CHECK(from_cfg.exit_code == 0);
  const RunResult direct = run_cli("curve --p 0.25 --d2 0.125 --d1 0:0.5:0.25");
  CHECK(from_cfg.out == direct.out);

  // explicit flags override config values
  const RunResult overridden = run_cli("curve --config " + cfg + " --d2 0.0625");
  const RunResult expected = run_cli("curve --p 0.25 --d2 0.0625 --d1 0:0.5:0.25");
  CHECK(overridden.out == expected.out);

  // unknown keys are rejected
  const std::string bad = temp_path("bad.cfg");
  {
    std::ofstream f(bad);
    f << "nonsense = 1\n";
  }
  CHECK(run_cli("curve --config " + bad).exit_code == 2);
  std::remove(cfg.c_str());
  std::remove(bad.c_str());
}

TEST_CASE("exit codes for bad usage") {
  CHECK(run_cli("curve --p 0.25 --bogus 1").exit_code == 2);
  CHECK(run_cli("no-such-command").exit_code == 2);
  CHECK(run_cli("curve --p 0.25").exit_code == 2);  // no grid chosen
  CHECK(run_cli("--help", true).exit_code == 0);
  CHECK(run_cli("curve --help", true).exit_code == 0);
}
