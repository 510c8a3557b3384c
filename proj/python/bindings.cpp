#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "aoilab/baseline.hpp"
#include "aoilab/config.hpp"
#include "aoilab/env.hpp"
#include "aoilab/experiment.hpp"
#include "aoilab/ppo.hpp"
#include "aoilab/radio.hpp"

namespace py = pybind11;
using namespace aoilab;

namespace {

py::object stat_tuple(const std::optional<Stat>& s) {
  if (!s) return py::none();
  return py::make_tuple(s->mean, s->sd);
}

}  // namespace

PYBIND11_MODULE(_aoilab, m) {
  m.doc() = "Sub-metaverse AoI simulator, fixed-split baseline and PPO agent";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<EpisodeFinished>(m, "EpisodeFinished", PyExc_RuntimeError);
  py::register_exception<TrainingDiverged>(m, "TrainingDiverged", PyExc_RuntimeError);

  py::class_<SimConfig>(m, "SimConfig")
      .def(py::init<>())
      .def_readwrite("num_ues", &SimConfig::num_ues)
      .def_readwrite("num_sensors", &SimConfig::num_sensors)
      .def_readwrite("bandwidth_mhz", &SimConfig::bandwidth_mhz)
      .def_readwrite("compute_units", &SimConfig::compute_units)
      .def_readwrite("ue_request_prob", &SimConfig::ue_request_prob)
      .def_readwrite("ue_comm_mean_mbit", &SimConfig::ue_comm_mean_mbit)
      .def_readwrite("ue_comp_mean_units", &SimConfig::ue_comp_mean_units)
      .def_readwrite("sensor_interval_steps", &SimConfig::sensor_interval_steps)
      .def_readwrite("sensor_comm_mean_mbit", &SimConfig::sensor_comm_mean_mbit)
      .def_readwrite("sensor_comp_mean_units", &SimConfig::sensor_comp_mean_units)
      .def_readwrite("episode_length", &SimConfig::episode_length)
      .def_readwrite("obs_norm_cap", &SimConfig::obs_norm_cap);

  py::class_<RewardParams>(m, "RewardParams")
      .def(py::init<>())
      .def_readwrite("sync_base", &RewardParams::sync_base)
      .def_readwrite("sync_discount", &RewardParams::sync_discount)
      .def_readwrite("delay_penalty", &RewardParams::delay_penalty)
      .def_readwrite("delay_threshold_steps", &RewardParams::delay_threshold_steps)
      .def_readwrite("gamma", &RewardParams::gamma);

  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def(py::init<>())
      .def_readwrite("sim", &ExperimentConfig::sim)
      .def_readwrite("reward", &ExperimentConfig::reward)
      .def_readwrite("master_seed", &ExperimentConfig::master_seed)
      .def("to_text", [](const ExperimentConfig& c) { return to_text(c); });

  m.def("load_config", &load_config, py::arg("document"),
        "Parse a flat key: value document; missing keys keep their defaults.");

  py::class_<Action>(m, "Action")
      .def(py::init<double, double>(), py::arg("comm_split"), py::arg("comp_split"))
      .def_readwrite("comm_split", &Action::comm_split)
      .def_readwrite("comp_split", &Action::comp_split);

  py::class_<Observation>(m, "Observation")
      .def_readonly("ue_queue_len", &Observation::ue_queue_len)
      .def_readonly("sensor_queue_len", &Observation::sensor_queue_len)
      .def("normalized", &Observation::normalized)
      .def("__iter__", [](const Observation& o) {
        return py::iter(py::make_tuple(o.ue_queue_len, o.sensor_queue_len));
      });

  py::class_<CompletionRecord>(m, "CompletionRecord")
      .def_readonly("id", &CompletionRecord::id)
      .def_property_readonly("kind", [](const CompletionRecord& r) {
        return r.kind == SourceKind::kUe ? "ue" : "sensor";
      })
      .def_readonly("source_id", &CompletionRecord::source_id)
      .def_readonly("gen_time", &CompletionRecord::gen_time)
      .def_readonly("tx_start", &CompletionRecord::tx_start)
      .def_readonly("bs_arrival", &CompletionRecord::bs_arrival)
      .def_readonly("proc_start", &CompletionRecord::proc_start)
      .def_readonly("completion", &CompletionRecord::completion)
      .def_readonly("comm_size", &CompletionRecord::comm_size)
      .def_readonly("aori", &CompletionRecord::aori)
      .def_readonly("aosi", &CompletionRecord::aosi)
      .def_readonly("reference_update_id", &CompletionRecord::reference_update_id)
      .def_readonly("flagged", &CompletionRecord::flagged);

  py::class_<StepOutcome>(m, "StepOutcome")
      .def_readonly("observation", &StepOutcome::observation)
      .def_readonly("reward", &StepOutcome::reward)
      .def_readonly("sync_reward", &StepOutcome::sync_reward)
      .def_readonly("delay_penalty", &StepOutcome::delay_penalty)
      .def_readonly("done", &StepOutcome::done)
      .def_readonly("completions", &StepOutcome::completions);

  py::class_<SubMetaverseEnv>(m, "SubMetaverseEnv")
      .def(py::init<SimConfig, RewardParams>(), py::arg("config") = SimConfig{},
           py::arg("reward") = RewardParams{})
      .def("reset", &SubMetaverseEnv::reset, py::arg("seed"))
      .def("step", &SubMetaverseEnv::step, py::arg("action"))
      .def("step", [](SubMetaverseEnv& e, double c, double p) { return e.step({c, p}); })
      .def_property_readonly("time", &SubMetaverseEnv::time)
      .def_property_readonly("done", &SubMetaverseEnv::done)
      .def_property_readonly("ledger", &SubMetaverseEnv::ledger)
      .def_property_readonly("generated_ue_mbit", &SubMetaverseEnv::generated_ue_mbit);

  m.def("compute_reward",
        [](const std::vector<CompletionRecord>& recs, const RewardParams& p) {
          const auto r = compute_reward(recs, p);
          return py::make_tuple(r.reward, r.sync_reward, r.delay_penalty);
        });
  m.def("reward_for",
        [](double aosi, double aori, const RewardParams& p) {
          CompletionRecord r;
          r.aosi = aosi;
          r.aori = aori;
          const auto b = compute_reward(std::span<const CompletionRecord>(&r, 1), p);
          return py::make_tuple(b.reward, b.sync_reward, b.delay_penalty);
        },
        py::arg("aosi"), py::arg("aori"), py::arg("params"),
        "Reward of a single completed UE request.");

  m.def("path_loss_db",
        [](double d, double ref, double exponent) { return path_loss_db(d, {ref, exponent}); },
        py::arg("distance_m"), py::arg("reference_loss_db") = 43.3, py::arg("exponent") = 3.0);
  m.def("data_rate", &data_rate, py::arg("bandwidth_mhz"), py::arg("pathloss_db"),
        py::arg("tx_power_dbm") = 40.0, py::arg("noise_dbm_per_hz") = -174.0);

  py::class_<SplitResult>(m, "SplitResult")
      .def_readonly("comm_split", &SplitResult::comm_split)
      .def_readonly("comp_split", &SplitResult::comp_split)
      .def_property_readonly("aosi", [](const SplitResult& r) { return stat_tuple(r.aosi); })
      .def_property_readonly("aori", [](const SplitResult& r) { return stat_tuple(r.aori); })
      .def_readonly("served_mbit", &SplitResult::served_mbit)
      .def_readonly("served_fraction", &SplitResult::served_fraction)
      .def_readonly("mean_return", &SplitResult::mean_return)
      .def_readonly("episodes", &SplitResult::episodes);

  m.def("default_grid", &default_grid);
  m.def("grid_search",
        [](const SimConfig& c, const RewardParams& r, const std::vector<double>& grid,
           int episodes, std::uint64_t seed) { return grid_search(c, r, grid, episodes, seed); },
        py::arg("config"), py::arg("reward"), py::arg("grid"), py::arg("episodes"),
        py::arg("master_seed"));
  m.def(
      "pareto_frontier",
      [](const std::vector<std::pair<double, double>>& pts) {
        std::vector<ObjectivePoint> p;
        for (const auto& [g, c] : pts) p.push_back({g, c});
        return pareto_frontier(p);
      },
      py::arg("points"), "Indices of points not dominated in (maximise first, minimise second).");

  m.def(
      "compute_gae",
      [](const std::vector<double>& rewards, const std::vector<double>& values,
         const std::vector<bool>& dones, double bootstrap, double gamma, double lam) {
        Trajectory tr;
        tr.rewards = rewards;
        tr.values = values;
        tr.dones = dones;
        tr.bootstrap_value = bootstrap;
        if (values.size() != rewards.size() || dones.size() != rewards.size()) {
          throw std::invalid_argument("rewards, values and dones must have equal length");
        }
        compute_gae(tr, gamma, lam);
        return py::make_tuple(tr.advantages, tr.returns);
      },
      py::arg("rewards"), py::arg("values"), py::arg("dones"), py::arg("bootstrap_value"),
      py::arg("gamma"), py::arg("gae_lambda"));

  py::class_<PPOConfig>(m, "PPOConfig")
      .def(py::init<>())
      .def_readwrite("clip_epsilon", &PPOConfig::clip_epsilon)
      .def_readwrite("value_coef", &PPOConfig::value_coef)
      .def_readwrite("entropy_coef", &PPOConfig::entropy_coef)
      .def_readwrite("gae_lambda", &PPOConfig::gae_lambda)
      .def_readwrite("gamma", &PPOConfig::gamma)
      .def_readwrite("learning_rate", &PPOConfig::learning_rate)
      .def_readwrite("epochs_per_update", &PPOConfig::epochs_per_update)
      .def_readwrite("minibatch_size", &PPOConfig::minibatch_size)
      .def_readwrite("rollout_length", &PPOConfig::rollout_length)
      .def_readwrite("total_steps", &PPOConfig::total_steps)
      .def_readwrite("reward_scale", &PPOConfig::reward_scale)
      .def_readwrite("eval_interval", &PPOConfig::eval_interval);

  py::class_<PolicyNet>(m, "PolicyNet")
      .def("act",
           [](const PolicyNet& n, double l, double lhat) {
             const auto a = deterministic_action(n, {l, lhat});
             return py::make_tuple(a[0], a[1]);
           },
           py::arg("ue_feature"), py::arg("sensor_feature"),
           "Deterministic (mean) action for normalised queue features.")
      .def_property_readonly("num_params", &PolicyNet::num_params)
      .def("save", [](const PolicyNet& n, const std::string& path, const PPOConfig& c) {
        save_checkpoint(path, n, c);
      });

  m.def(
      "train_policy",
      [](const ExperimentConfig& config, const PPOConfig& ppo) {
        const auto sim = config.sim;
        const auto reward = config.reward;
        auto result = train([sim, reward] { return std::make_unique<MetaverseTask>(sim, reward); },
                            ppo, config.master_seed);
        py::list returns;
        for (const auto& row : result.log) {
          returns.append(row.mean_return ? py::cast(*row.mean_return) : py::none());
        }
        return py::make_tuple(std::move(result.net), returns);
      },
      py::arg("config"), py::arg("ppo"),
      "Train on the sub-metaverse task; returns (policy, per-update mean returns).");

  m.def(
      "evaluate_policy",
      [](const PolicyNet& net, const ExperimentConfig& config, int episodes) {
        return evaluate_network(net, config, episodes);
      },
      py::arg("policy"), py::arg("config"), py::arg("episodes"));
}
