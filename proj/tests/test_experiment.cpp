#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "aoilab/experiment.hpp"

using namespace aoilab;
namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::current_path() / "experiment_out";

struct Run {
  int code;
  std::string err;
};

Run cli(const std::string& args) {
  const char* exe = std::getenv("AOILAB_CLI");
  REQUIRE_MESSAGE(exe != nullptr, "AOILAB_CLI must point at the command-line tool");
  fs::create_directories(kWork);
  const auto err_path = kWork / "stderr.txt";
  const std::string cmd = std::string(exe) + " " + args + " 2> " + err_path.string() + " > /dev/null";
  const int status = std::system(cmd.c_str());
  std::ifstream in(err_path);
  std::stringstream ss;
  ss << in.rdbuf();
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  for (std::string line; std::getline(in, line);) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

std::string out_dir(const std::string& name) {
  const auto p = kWork / name;
  fs::remove_all(p);
  return p.string();
}

}  // namespace

TEST_CASE("sweep parsing and labels") {
  const auto sweep = default_sweep();
  REQUIRE(sweep.size() == 12);
  CHECK(sweep[0].label == "A");
  CHECK(sweep[0].eta == 0.9);
  CHECK(sweep[0].c2 == 0.0);
  CHECK(sweep[1].eta == 0.8);
  CHECK(sweep[4].label == "E");
  CHECK(sweep[4].eta == doctest::Approx(0.5));
  CHECK(sweep[6].label == "G");
  CHECK(sweep[6].eta == 0.9);
  CHECK(sweep[6].c2 == -1.0);
  CHECK(sweep[10].label == "K");
  CHECK(sweep[10].eta == doctest::Approx(0.5));
  CHECK(sweep[11].label == "L");

  const auto custom = parse_sweep("0.7:0,0.6:-1");
  REQUIRE(custom.size() == 2);
  CHECK(custom[1].label == "B");
  CHECK(custom[1].c2 == -1.0);
  CHECK(parse_sweep("").empty());
  CHECK_THROWS_AS(parse_sweep("0.7"), ValidationError);
  CHECK_THROWS_AS(parse_sweep("x:0"), ValidationError);
}

TEST_CASE("manifest overrides") {
  Manifest m;
  m.seed = 17;
  m.horizon = 40;
  m.eta = 0.6;
  m.penalty = -1.0;
  const auto c = resolve_config(m);
  CHECK(c.master_seed == 17);
  CHECK(c.sim.episode_length == 40);
  CHECK(c.reward.sync_discount == 0.6);
  CHECK(c.reward.delay_penalty == -1.0);
  m.config_path = "/nonexistent/config.yaml";
  CHECK_THROWS_AS(resolve_config(m), ValidationError);
}

TEST_CASE("fmt_num round-trips") {
  CHECK(fmt_num(0.1) == "0.1");
  CHECK(fmt_num(35000.0) == "35000");
  CHECK(std::stod(fmt_num(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("simulate writes one row per episode") {
  const auto dir = out_dir("sim");
  const auto r = cli("simulate --split 0.3,0.4 --episodes 100 --out " + dir);
  REQUIRE(r.code == 0);
  const auto episodes = read_csv(fs::path(dir) / "episodes.csv");
  CHECK(episodes.size() == 101);
  CHECK(episodes[0][0] == "episode");
  CHECK(read_csv(fs::path(dir) / "steps.csv").size() == 1 + 100 * 100);
  CHECK(fs::exists(fs::path(dir) / "run_manifest.yaml"));
}

TEST_CASE("exit codes for bad input") {
  const auto missing = cli("simulate --config /nonexistent/cfg.yaml --split 0.3,0.4 --out " +
                           out_dir("bad"));
  CHECK(missing.code == 2);
  CHECK(missing.err.find("/nonexistent/cfg.yaml") != std::string::npos);
  CHECK(cli("report --sweep \"\" --out " + out_dir("bad")).code == 2);
  CHECK(cli("simulate --out " + out_dir("bad")).code == 2);
  CHECK(cli("simulate --split 2,0 --out " + out_dir("bad")).code == 2);
  CHECK(cli("eval --out " + out_dir("bad")).code == 2);
  CHECK(cli("frobnicate").code == 2);

  const auto cfg = kWork / "bad_cfg.yaml";
  std::ofstream(cfg) << "ue_request_prob: 1.5\n";
  const auto invalid = cli("grid --config " + cfg.string() + " --out " + out_dir("bad"));
  CHECK(invalid.code == 2);
  CHECK(invalid.err.find("ue_request_prob") != std::string::npos);
}

TEST_CASE("identical manifests give byte-identical outputs") {
  const std::string common = " --episodes 3 --horizon 30 --seed 5 --trace";
  const auto a = out_dir("det_a"), b = out_dir("det_b");
  REQUIRE(cli("simulate --split 0.4,0.4" + common + " --out " + a).code == 0);
  REQUIRE(cli("simulate --split 0.4,0.4" + common + " --out " + b).code == 0);
  for (const char* f : {"episodes.csv", "steps.csv", "trace.jsonl", "ledger.csv"}) {
    CHECK_MESSAGE(slurp(fs::path(a) / f) == slurp(fs::path(b) / f), f);
  }
}

TEST_CASE("trace and ledger exports agree") {
  const auto dir = out_dir("trace");
  REQUIRE(cli("simulate --split 0.5,0.5 --episodes 2 --horizon 15 --trace --out " + dir).code == 0);
  std::ifstream in(fs::path(dir) / "trace.jsonl");
  std::size_t completes = 0, sensors = 0, ue_gens_with_pos = 0, ue_gens = 0;
  for (std::string line; std::getline(in, line);) {
    const auto j = nlohmann::json::parse(line);
    const auto ev = j.at("event").get<std::string>();
    if (ev == "complete") ++completes;
    if (ev == "sensor_position") ++sensors;
    if (ev == "gen" && j.at("kind") == "ue") {
      ++ue_gens;
      ue_gens_with_pos += j.contains("x") && j.contains("y");
    }
  }
  CHECK(sensors == 2 * 15);
  CHECK(ue_gens > 0);
  CHECK(ue_gens_with_pos == ue_gens);
  CHECK(read_csv(fs::path(dir) / "ledger.csv").size() == completes + 1);
}

TEST_CASE("train, eval and checkpoint replay") {
  const auto dir = out_dir("train");
  REQUIRE(cli("train --steps 2048 --eta 0.9 --penalty 0 --episodes 2 --horizon 20 --out " + dir)
              .code == 0);
  const auto policy = (fs::path(dir) / "policy.json").string();
  CHECK(fs::exists(policy));
  CHECK(read_csv(fs::path(dir) / "training_log.csv").size() == 2);

  const auto ev = out_dir("eval");
  REQUIRE(cli("eval --checkpoint " + policy + " --episodes 2 --horizon 20 --out " + ev).code == 0);
  const auto rows = read_csv(fs::path(ev) / "drl_points.csv");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == std::vector<std::string>{"label", "eta", "c2", "mean_aosi", "sd_aosi",
                                            "mean_aori", "sd_aori", "served_mbit", "served_pct"});

  const auto sim = out_dir("sim_ckpt");
  CHECK(cli("simulate --checkpoint " + policy + " --episodes 2 --horizon 20 --out " + sim).code ==
        0);
  CHECK(cli("eval --checkpoint /nonexistent/p.json --out " + out_dir("bad")).code == 2);
}

TEST_CASE("report annotations agree with the frontier routine") {
  const auto dir = out_dir("report");
  REQUIRE(cli("report --steps 2048 --sweep 0.9:0,0.5:-1 --episodes 2 --horizon 20 --out " + dir)
              .code == 0);
  const auto drl = read_csv(fs::path(dir) / "drl_points.csv");
  REQUIRE(drl.size() == 3);
  CHECK(drl[1][0] == "A");
  CHECK(drl[2][0] == "B");
  CHECK(drl[2][2] == "-1");
  CHECK(read_csv(fs::path(dir) / "grid.csv").size() == 122);
  CHECK(fs::exists(fs::path(dir) / "table1.csv"));
  CHECK(fs::exists(fs::path(dir) / "policy_A.json"));

  const auto rows = read_csv(fs::path(dir) / "pareto.csv");
  REQUIRE(rows.size() == 1 + 121 + 2);
  std::vector<ObjectivePoint> thr_aosi, aosi_aori;
  std::vector<std::size_t> idx;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i][4].empty() || rows[i][5].empty()) {
      CHECK(rows[i][6] == "0");
      continue;
    }
    idx.push_back(i);
    thr_aosi.push_back({std::stod(rows[i][3]), std::stod(rows[i][4])});
    aosi_aori.push_back({-std::stod(rows[i][5]), std::stod(rows[i][4])});
  }
  std::vector<std::string> f1(rows.size(), "0"), f2(rows.size(), "0");
  for (auto k : pareto_frontier(thr_aosi)) f1[idx[k]] = "1";
  for (auto k : pareto_frontier(aosi_aori)) f2[idx[k]] = "1";
  for (auto i : idx) {
    CHECK(rows[i][6] == f1[i]);
    CHECK(rows[i][7] == f2[i]);
  }
}
