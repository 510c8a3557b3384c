#include "aoilab/experiment.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace aoilab {
namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

fs::path prepare_out_dir(const Manifest& m) {
  fs::path dir(m.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw ValidationError("output directory is not writable: " + m.out_dir);
  }
  return dir;
}

std::string opt_mean(const std::optional<Stat>& s) { return s ? fmt_num(s->mean) : ""; }
std::string opt_sd(const std::optional<Stat>& s) { return s ? fmt_num(s->sd) : ""; }

const char* kind_name(SourceKind k) { return k == SourceKind::kUe ? "ue" : "sensor"; }

void write_manifest_echo(const fs::path& dir, const Manifest& m, const ExperimentConfig& config) {
  auto out = open_out(dir / "run_manifest.yaml");
  out << "command: " << m.command << '\n';
  out << "config_path: \"" << m.config_path << "\"\n";
  out << "episodes: " << m.episodes << '\n';
  if (m.split) out << "split: [" << fmt_num(m.split->comm_split) << ", " << fmt_num(m.split->comp_split) << "]\n";
  if (!m.checkpoint.empty()) out << "checkpoint: \"" << m.checkpoint << "\"\n";
  if (m.steps) out << "steps: " << *m.steps << '\n';
  if (!m.sweep.empty()) {
    out << "sweep:\n";
    for (const auto& p : m.sweep) {
      out << "  - {label: " << p.label << ", eta: " << fmt_num(p.eta) << ", c2: " << fmt_num(p.c2) << "}\n";
    }
  }
  out << "config:\n";
  std::istringstream lines(to_text(config));
  for (std::string line; std::getline(lines, line);) out << "  " << line << '\n';
}

PPOConfig ppo_for(const Manifest& m, const ExperimentConfig& config) {
  PPOConfig p = m.ppo;
  p.gamma = config.reward.gamma;
  if (m.steps) p.total_steps = *m.steps;
  return p;
}

Evaluator make_evaluator(const ExperimentConfig& config, int episodes) {
  return [config, episodes](const PolicyNet& net) {
    double mean_return = 0.0;
    const auto r = evaluate_network(net, config, episodes, &mean_return);
    EvalMetrics e;
    e.mean_return = mean_return;
    e.mean_aosi = r.aosi ? r.aosi->mean : 0.0;
    e.mean_aori = r.aori ? r.aori->mean : 0.0;
    e.served_pct = 100.0 * r.served_fraction;
    return e;
  };
}

std::string drl_row(const SweepPoint& p, const std::optional<SplitResult>& r) {
  std::string s = p.label + "," + fmt_num(p.eta) + "," + fmt_num(p.c2) + ",";
  if (!r) return s + ",,,,,";
  return s + opt_mean(r->aosi) + "," + opt_sd(r->aosi) + "," + opt_mean(r->aori) + "," +
         opt_sd(r->aori) + "," + fmt_num(r->served_mbit) + "," +
         fmt_num(100.0 * r->served_fraction);
}

struct TrainedPoint {
  SweepPoint point;
  std::optional<SplitResult> result;
};

TrainingResult train_point(const ExperimentConfig& config, const PPOConfig& ppo, int eval_episodes) {
  const auto sim = config.sim;
  const auto reward = config.reward;
  return train([sim, reward] { return std::make_unique<MetaverseTask>(sim, reward); }, ppo,
               config.master_seed, make_evaluator(config, eval_episodes));
}

}  // namespace

void TraceWriter::attach(SubMetaverseEnv& env) {
  env.set_trace(
      [this](const TraceEvent& e) {
        nlohmann::ordered_json j{{"episode", episode_},          {"step", e.step},
                                 {"event", event_name(e.event)}, {"id", e.id},
                                 {"kind", kind_name(e.kind)},    {"source", e.source_id}};
        if (e.event == EventKind::kGenerated && e.kind == SourceKind::kUe) {
          const auto it = gen_positions_.find(e.id);
          if (it != gen_positions_.end()) {
            j["x"] = it->second.x;
            j["y"] = it->second.y;
            gen_positions_.erase(it);
          }
        }
        out_ << j.dump() << '\n';
      },
      [this](const SubMetaverseEnv::PositionEvent& p) {
        if (p.unit_id != 0) {
          gen_positions_[p.unit_id] = p.position;
          return;
        }
        nlohmann::ordered_json j{{"episode", episode_},          {"step", p.step},
                                 {"event", "sensor_position"}, {"source", p.device_id},
                                 {"x", p.position.x},          {"y", p.position.y}};
        out_ << j.dump() << '\n';
      });
}

std::string fmt_num(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, end);
}

std::vector<SweepPoint> default_sweep() {
  std::vector<SweepPoint> sweep;
  const double etas[] = {0.9, 0.8, 0.7, 0.6, 0.5, 0.4};
  char label = 'A';
  for (double c2 : {0.0, -1.0}) {
    for (double eta : etas) sweep.push_back({std::string(1, label++), eta, c2});
  }
  return sweep;
}

std::vector<SweepPoint> parse_sweep(const std::string& text) {
  std::vector<SweepPoint> sweep;
  std::istringstream in(text);
  char label = 'A';
  for (std::string item; std::getline(in, item, ',');) {
    if (item.empty()) continue;
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw ValidationError("sweep entry must be eta:c2, got '" + item + "'");
    SweepPoint p;
    try {
      p.eta = std::stod(item.substr(0, colon));
      p.c2 = std::stod(item.substr(colon + 1));
    } catch (const std::exception&) {
      throw ValidationError("sweep entry is not numeric: '" + item + "'");
    }
    p.label = label <= 'Z' ? std::string(1, label) : "P" + std::to_string(sweep.size());
    ++label;
    sweep.push_back(p);
  }
  return sweep;
}

ExperimentConfig resolve_config(const Manifest& m) {
  ExperimentConfig config;
  if (!m.config_path.empty()) {
    if (!fs::exists(m.config_path)) throw ValidationError("config file not found: " + m.config_path);
    config = load_config_file(m.config_path);
  }
  if (m.seed) config.master_seed = *m.seed;
  if (m.horizon) config.sim.episode_length = *m.horizon;
  if (m.eta) config.reward.sync_discount = *m.eta;
  if (m.penalty) config.reward.delay_penalty = *m.penalty;
  if (m.episodes < 1) throw ValidationError("--episodes must be >= 1");
  try {
    validate(config.sim);
    validate(config.reward);
  } catch (const ConfigError& e) {
    throw ValidationError(e.what());
  }
  return config;
}

std::string ledger_line(const CompletionRecord& r) {
  std::string s = std::to_string(r.id) + "," + kind_name(r.kind) + "," +
                   std::to_string(r.source_id) + "," + std::to_string(r.gen_time) + "," +
                   std::to_string(r.tx_start) + "," + std::to_string(r.bs_arrival) + "," +
                   std::to_string(r.proc_start) + "," + std::to_string(r.completion) + "," +
                   fmt_num(r.aori) + ",";
  if (r.kind == SourceKind::kUe) s += fmt_num(r.aosi);
  s += ",";
  if (r.reference_update_id) s += std::to_string(*r.reference_update_id);
  s += r.flagged ? ",1" : ",0";
  return s;
}

void write_grid_csv(const std::string& path, std::span<const SplitResult> results) {
  auto out = open_out(path);
  out << kGridHeader << '\n';
  for (const auto& r : results) {
    out << fmt_num(r.comm_split) << ',' << fmt_num(r.comp_split) << ',' << opt_mean(r.aosi) << ','
        << opt_sd(r.aosi) << ',' << opt_mean(r.aori) << ',' << opt_sd(r.aori) << ','
        << fmt_num(r.served_mbit) << ',' << fmt_num(100.0 * r.served_fraction) << ','
        << r.episodes << '\n';
  }
}

SplitResult evaluate_network(const PolicyNet& net, const ExperimentConfig& config, int episodes,
                             double* mean_return) {
  const double cap = config.sim.obs_norm_cap;
  const auto eps = evaluate_policy(
      config.sim, config.reward,
      [&net, cap](const Observation& obs) {
        const auto a = deterministic_action(net, obs.normalized(cap));
        return Action{a[0], a[1]};
      },
      episodes, config.master_seed);
  if (mean_return) {
    double total = 0.0;
    for (const auto& e : eps) total += e.episode_return;
    *mean_return = eps.empty() ? 0.0 : total / static_cast<double>(eps.size());
  }
  return aggregate(std::nan(""), std::nan(""), eps);
}

void run_simulate(const Manifest& m) {
  const auto config = resolve_config(m);
  if (!m.split && m.checkpoint.empty()) {
    throw ValidationError("simulate needs --split C,P or --checkpoint PATH");
  }
  std::optional<PolicyNet> net;
  if (!m.checkpoint.empty()) {
    if (!fs::exists(m.checkpoint)) throw ValidationError("checkpoint not found: " + m.checkpoint);
    net = load_checkpoint(m.checkpoint).first;
  }
  const auto dir = prepare_out_dir(m);
  write_manifest_echo(dir, m, config);

  auto episodes_csv = open_out(dir / "episodes.csv");
  auto steps_csv = open_out(dir / "steps.csv");
  episodes_csv << "episode,seed,episode_return,generated_ue_mbit,served_mbit,served_pct,completed,"
                  "flagged,mean_aosi,sd_aosi,mean_aori,sd_aori\n";
  steps_csv << "episode,step,comm_split,comp_split,ue_queue_len,sensor_queue_len,reward,"
               "sync_reward,delay_penalty,ue_completions\n";
  std::ofstream trace_out, ledger_out;
  if (m.trace) {
    trace_out = open_out(dir / "trace.jsonl");
    ledger_out = open_out(dir / "ledger.csv");
    ledger_out << "episode," << kLedgerHeader << '\n';
  }

  SubMetaverseEnv env(config.sim, config.reward);
  int episode = 0;
  TraceWriter tracer(trace_out);
  if (m.trace) tracer.attach(env);

  const double cap = config.sim.obs_norm_cap;
  for (auto seed : evaluation_seeds(config.master_seed, m.episodes)) {
    tracer.set_episode(episode);
    Observation obs = env.reset(seed);
    double ret = 0.0;
    while (!env.done()) {
      Action a = m.split ? *m.split : Action{};
      if (net) {
        const auto v = deterministic_action(*net, obs.normalized(cap));
        a = {v[0], v[1]};
      }
      a = a.clamped();
      const Step t = env.time();
      const auto out = env.step(a);
      ret += out.reward;
      std::size_t ue_done = 0;
      for (const auto& c : out.completions) ue_done += c.kind == SourceKind::kUe;
      steps_csv << episode << ',' << t << ',' << fmt_num(a.comm_split) << ','
                << fmt_num(a.comp_split) << ',' << fmt_num(out.observation.ue_queue_len) << ','
                << fmt_num(out.observation.sensor_queue_len) << ',' << fmt_num(out.reward) << ','
                << fmt_num(out.sync_reward) << ',' << fmt_num(out.delay_penalty) << ','
                << ue_done << '\n';
      obs = out.observation;
    }
    const auto s = throughput_summary(env.ledger(), config.sim, env.time());
    episodes_csv << episode << ',' << seed << ',' << fmt_num(ret) << ','
                 << fmt_num(env.generated_ue_mbit()) << ',' << fmt_num(s.served_mbit) << ','
                 << fmt_num(100.0 * s.served_fraction) << ',' << s.completed << ',' << s.flagged
                 << ',' << opt_mean(s.aosi) << ',' << opt_sd(s.aosi) << ',' << opt_mean(s.aori)
                 << ',' << opt_sd(s.aori) << '\n';
    if (m.trace) {
      for (const auto& r : env.ledger()) ledger_out << episode << ',' << ledger_line(r) << '\n';
    }
    ++episode;
  }
}

void run_grid(const Manifest& m) {
  const auto config = resolve_config(m);
  const auto dir = prepare_out_dir(m);
  write_manifest_echo(dir, m, config);
  const auto grid = default_grid();
  const auto results = grid_search(config.sim, config.reward, grid, m.episodes, config.master_seed);
  write_grid_csv((dir / "grid.csv").string(), results);

  std::vector<ObjectivePoint> thr_aosi, aosi_aori;
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (!results[i].aosi || !results[i].aori) continue;
    idx.push_back(i);
    thr_aosi.push_back({results[i].served_mbit, results[i].aosi->mean});
    aosi_aori.push_back({-results[i].aori->mean, results[i].aosi->mean});
  }
  std::vector<bool> f1(results.size()), f2(results.size());
  if (!idx.empty()) {
    for (auto k : pareto_frontier(thr_aosi)) f1[idx[k]] = true;
    for (auto k : pareto_frontier(aosi_aori)) f2[idx[k]] = true;
  }
  auto out = open_out(dir / "pareto.csv");
  out << "source,comm_split,comp_split,served_mbit,mean_aosi,mean_aori,frontier_throughput_aosi,"
         "frontier_aosi_aori\n";
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    out << "grid," << fmt_num(r.comm_split) << ',' << fmt_num(r.comp_split) << ','
        << fmt_num(r.served_mbit) << ',' << opt_mean(r.aosi) << ',' << opt_mean(r.aori) << ','
        << int(f1[i]) << ',' << int(f2[i]) << '\n';
  }
}

void run_train(const Manifest& m) {
  const auto config = resolve_config(m);
  const auto ppo = ppo_for(m, config);
  try {
    validate(ppo);
  } catch (const std::invalid_argument& e) {
    throw ValidationError(e.what());
  }
  const auto dir = prepare_out_dir(m);
  write_manifest_echo(dir, m, config);
  const auto result = train_point(config, ppo, m.episodes);
  save_checkpoint((dir / "policy.json").string(), result.net, ppo);
  write_training_log((dir / "training_log.csv").string(), result.log);
}

void run_eval(const Manifest& m) {
  const auto config = resolve_config(m);
  if (m.checkpoint.empty()) throw ValidationError("eval needs --checkpoint PATH");
  if (!fs::exists(m.checkpoint)) throw ValidationError("checkpoint not found: " + m.checkpoint);
  const auto net = load_checkpoint(m.checkpoint).first;
  const auto dir = prepare_out_dir(m);
  write_manifest_echo(dir, m, config);
  const auto r = evaluate_network(net, config, m.episodes);
  auto out = open_out(dir / "drl_points.csv");
  out << kDrlHeader << '\n';
  out << drl_row({"eval", config.reward.sync_discount, config.reward.delay_penalty}, r) << '\n';
}

void run_report(const Manifest& m) {
  if (m.sweep.empty()) throw ValidationError("report needs a non-empty sweep");
  auto config = resolve_config(m);
  for (const auto& p : m.sweep) {
    RewardParams r = config.reward;
    r.sync_discount = p.eta;
    r.delay_penalty = p.c2;
    try {
      validate(r);
    } catch (const ConfigError& e) {
      throw ValidationError("sweep point " + p.label + ": " + e.what());
    }
  }
  const auto ppo = ppo_for(m, config);
  try {
    validate(ppo);
  } catch (const std::invalid_argument& e) {
    throw ValidationError(e.what());
  }
  const auto dir = prepare_out_dir(m);
  write_manifest_echo(dir, m, config);

  std::vector<TrainedPoint> trained;
  for (const auto& p : m.sweep) {
    auto point_config = config;
    point_config.reward.sync_discount = p.eta;
    point_config.reward.delay_penalty = p.c2;
    TrainedPoint tp{p, std::nullopt};
    try {
      const auto result = train_point(point_config, ppo, m.episodes);
      save_checkpoint((dir / ("policy_" + p.label + ".json")).string(), result.net, ppo);
      write_training_log((dir / ("training_log_" + p.label + ".csv")).string(), result.log);
      tp.result = evaluate_network(result.net, point_config, m.episodes);
    } catch (const TrainingDiverged& e) {
      std::cerr << "sweep point " << p.label << " diverged: " << e.what() << '\n';
    }
    trained.push_back(tp);
  }

  const auto grid = grid_search(config.sim, config.reward, default_grid(), m.episodes,
                                config.master_seed);
  write_grid_csv((dir / "grid.csv").string(), grid);
  {
    auto out = open_out(dir / "drl_points.csv");
    out << kDrlHeader << '\n';
    for (const auto& tp : trained) out << drl_row(tp.point, tp.result) << '\n';
  }

  // Frontier annotations over the grid cloud plus every DRL point.
  struct Entry {
    std::string source;
    std::string comm, comp;
    const SplitResult* r;
  };
  std::vector<Entry> entries;
  for (const auto& g : grid) entries.push_back({"grid", fmt_num(g.comm_split), fmt_num(g.comp_split), &g});
  for (const auto& tp : trained) {
    if (tp.result) entries.push_back({tp.point.label, "", "", &*tp.result});
  }
  std::vector<ObjectivePoint> thr_aosi, aosi_aori;
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto* r = entries[i].r;
    if (!r->aosi || !r->aori) continue;
    idx.push_back(i);
    thr_aosi.push_back({r->served_mbit, r->aosi->mean});
    aosi_aori.push_back({-r->aori->mean, r->aosi->mean});
  }
  std::vector<bool> f1(entries.size()), f2(entries.size());
  if (!idx.empty()) {
    for (auto k : pareto_frontier(thr_aosi)) f1[idx[k]] = true;
    for (auto k : pareto_frontier(aosi_aori)) f2[idx[k]] = true;
  }
  {
    auto out = open_out(dir / "pareto.csv");
    out << "source,comm_split,comp_split,served_mbit,mean_aosi,mean_aori,frontier_throughput_aosi,"
           "frontier_aosi_aori\n";
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const auto& e = entries[i];
      out << e.source << ',' << e.comm << ',' << e.comp << ',' << fmt_num(e.r->served_mbit) << ','
          << opt_mean(e.r->aosi) << ',' << opt_mean(e.r->aori) << ',' << int(f1[i]) << ','
          << int(f2[i]) << '\n';
    }
  }
  {
    auto out = open_out(dir / "table1.csv");
    out << "policy,eta,c2,mean_aosi,sd_aosi,mean_aori,sd_aori,served_pct\n";
    for (const auto& g : grid) {
      const bool selected = (g.comm_split == 0.3 || g.comm_split == 0.4) &&
                            (g.comp_split == 0.3 || g.comp_split == 0.4) &&
                            !(g.comm_split == 0.4 && g.comp_split == 0.3);
      if (!selected) continue;
      out << "\"(" << fmt_num(g.comm_split) << ", " << fmt_num(g.comp_split) << ")\",,,"
          << opt_mean(g.aosi) << ',' << opt_sd(g.aosi) << ',' << opt_mean(g.aori) << ','
          << opt_sd(g.aori) << ',' << fmt_num(100.0 * g.served_fraction) << '\n';
    }
    for (const auto& tp : trained) {
      out << tp.point.label << ',' << fmt_num(tp.point.eta) << ',' << fmt_num(tp.point.c2) << ',';
      if (tp.result) {
        out << opt_mean(tp.result->aosi) << ',' << opt_sd(tp.result->aosi) << ','
            << opt_mean(tp.result->aori) << ',' << opt_sd(tp.result->aori) << ','
            << fmt_num(100.0 * tp.result->served_fraction);
      } else {
        out << ",,,,";
      }
      out << '\n';
    }
  }
}

}  // namespace aoilab
