#include <CLI11.hpp>

#include <iostream>

#include "aoilab/config.hpp"
#include "aoilab/experiment.hpp"

namespace {

void add_shared(CLI::App* cmd, aoilab::Manifest& m, std::optional<std::uint64_t>& seed,
                std::optional<int>& horizon) {
  cmd->add_option("--config", m.config_path, "Scenario config (flat key: value)");
  cmd->add_option("--seed", seed, "Master seed (overrides the config)");
  cmd->add_option("--out", m.out_dir, "Output directory")->capture_default_str();
  cmd->add_option("--episodes", m.episodes, "Evaluation episodes")->capture_default_str();
  cmd->add_option("--horizon", horizon, "Steps per episode (overrides episode_length)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sub-metaverse AoI laboratory: simulation, split baseline and PPO agent"};
  app.require_subcommand(1);

  aoilab::Manifest m;
  std::optional<std::uint64_t> seed;
  std::optional<int> horizon;
  std::vector<double> split;
  std::optional<std::string> sweep_text;
  std::string phase = "all";

  auto* simulate = app.add_subcommand("simulate", "Run fixed-split or checkpoint episodes");
  add_shared(simulate, m, seed, horizon);
  simulate->add_option("--split", split, "Fixed action: comm,comp")
      ->delimiter(',')
      ->expected(2)
      ->check(CLI::Range(0.0, 1.0));
  simulate->add_option("--checkpoint", m.checkpoint, "Trained policy to drive the episodes");
  simulate->add_flag("--trace", m.trace, "Also write trace.jsonl and ledger.csv");

  auto* grid = app.add_subcommand("grid", "Exhaustive fixed-split evaluation");
  add_shared(grid, m, seed, horizon);

  auto* train = app.add_subcommand("train", "Train a PPO policy for one reward setting");
  add_shared(train, m, seed, horizon);
  train->add_option("--eta", m.eta, "Synchronisation discount");
  train->add_option("--penalty", m.penalty, "Delay penalty c2 (<= 0)");
  train->add_option("--steps", m.steps, "Total environment steps");

  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint deterministically");
  add_shared(eval, m, seed, horizon);
  eval->add_option("--checkpoint", m.checkpoint, "Policy checkpoint")->required();

  auto* report = app.add_subcommand("report", "Reward sweep, grid and comparison tables");
  add_shared(report, m, seed, horizon);
  report->add_option("--steps", m.steps, "Training steps per sweep point");
  report->add_option("--sweep", sweep_text, "Custom sweep: eta:c2,eta:c2,...");
  report->add_option("--phase", phase, "Default sweep subset: 1, 2 or all")
      ->check(CLI::IsMember({"1", "2", "all"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  m.command = app.get_subcommands().front()->get_name();
  m.seed = seed;
  m.horizon = horizon;
  if (split.size() == 2) m.split = aoilab::Action{split[0], split[1]};

  try {
    if (m.command == "report") {
      if (sweep_text) {
        m.sweep = aoilab::parse_sweep(*sweep_text);
      } else {
        for (const auto& p : aoilab::default_sweep()) {
          const bool phase1 = p.c2 == 0.0;
          if (phase == "all" || (phase == "1" && phase1) || (phase == "2" && !phase1)) {
            m.sweep.push_back(p);
          }
        }
      }
    }
    if (m.command == "simulate") aoilab::run_simulate(m);
    if (m.command == "grid") aoilab::run_grid(m);
    if (m.command == "train") aoilab::run_train(m);
    if (m.command == "eval") aoilab::run_eval(m);
    if (m.command == "report") aoilab::run_report(m);
  } catch (const aoilab::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const aoilab::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
