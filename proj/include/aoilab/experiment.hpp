#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "aoilab/baseline.hpp"
#include "aoilab/config.hpp"
#include "aoilab/ppo.hpp"

namespace aoilab {

/// Bad user input: unreadable config, bad flag values, empty sweep. The
/// command-line tool maps it to exit code 2.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SweepPoint {
  std::string label;
  double eta = 0.9;
  double c2 = 0.0;
};

/// Phase 1 (c2 = 0) then phase 2 (c2 = -1), eta descending 0.9 -> 0.4,
/// labelled A-F and G-L.
std::vector<SweepPoint> default_sweep();

/// Parses "eta:c2,eta:c2,..."; labels are assigned A, B, ... in order.
std::vector<SweepPoint> parse_sweep(const std::string& text);

struct Manifest {
  std::string command;
  std::string config_path;  // empty: built-in defaults
  std::optional<std::uint64_t> seed;
  std::string out_dir = "out";
  int episodes = 100;
  std::optional<int> horizon;
  std::optional<Action> split;  // simulate with a fixed action
  std::string checkpoint;       // simulate/eval with a trained policy
  std::optional<double> eta;
  std::optional<double> penalty;
  std::optional<std::int64_t> steps;
  std::vector<SweepPoint> sweep;
  bool trace = false;
  PPOConfig ppo;
};

/// Config with manifest overrides (seed, horizon, eta, penalty) applied.
ExperimentConfig resolve_config(const Manifest& manifest);

/// Per-episode metrics (episodes.csv), per-step rows (steps.csv) and, with
/// `trace`, the event trace (trace.jsonl) and completion ledger (ledger.csv).
void run_simulate(const Manifest& manifest);

/// grid.csv over the 11 x 11 split grid plus pareto.csv.
void run_grid(const Manifest& manifest);

/// policy.json checkpoint and training_log.csv.
void run_train(const Manifest& manifest);

/// Deterministic evaluation of a checkpoint over the baseline seeds;
/// writes drl_points.csv with a single row.
void run_eval(const Manifest& manifest);

/// Trains one policy per sweep point and writes drl_points.csv, grid.csv,
/// pareto.csv and table1.csv.
void run_report(const Manifest& manifest);

/// Shortest round-trip decimal rendering used in every CSV.
std::string fmt_num(double value);

/// Column header of grid.csv.
inline constexpr const char* kGridHeader =
    "comm_split,comp_split,mean_aosi,sd_aosi,mean_aori,sd_aori,served_mbit,served_pct,episodes";
inline constexpr const char* kDrlHeader =
    "label,eta,c2,mean_aosi,sd_aosi,mean_aori,sd_aori,served_mbit,served_pct";
inline constexpr const char* kLedgerHeader =
    "id,kind,source,gen,tx_start,bs_arrival,proc_start,completion,aori,aosi,reference_update_id,"
    "flagged";

void write_grid_csv(const std::string& path, std::span<const SplitResult> results);
std::string ledger_line(const CompletionRecord& record);

/// Streams an environment's lifecycle events as JSON lines: one
/// `sensor_position` line per sensor at reset, then one line per
/// transition (`gen`, `tx_start`, `bs_arrival`, `proc_start`, `complete`).
/// UE `gen` lines carry the device position at generation.
class TraceWriter {
 public:
  explicit TraceWriter(std::ostream& out) : out_(out) {}
  TraceWriter(const TraceWriter&) = delete;
  TraceWriter& operator=(const TraceWriter&) = delete;

  /// Installs the writer on `env`; it must outlive the env's use.
  void attach(SubMetaverseEnv& env);
  void set_episode(int episode) { episode_ = episode; }

 private:
  std::ostream& out_;
  int episode_ = 0;
  std::map<UnitId, Vec2> gen_positions_;
};

/// Deterministic evaluation of a trained net over the shared seed set.
SplitResult evaluate_network(const PolicyNet& net, const ExperimentConfig& config, int episodes,
                             double* mean_return = nullptr);

}  // namespace aoilab
