#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "aoilab/policy_env.hpp"
#include "aoilab/rng.hpp"

namespace aoilab {

struct PPOConfig {
  double clip_epsilon = 0.2;
  double value_coef = 0.5;
  double entropy_coef = 0.0;
  double gae_lambda = 1.0;
  double gamma = 0.99;
  double learning_rate = 3e-4;
  int epochs_per_update = 10;
  int minibatch_size = 64;
  int rollout_length = 2048;
  std::int64_t total_steps = 200'000;
  double max_grad_norm = 0.5;
  double reward_scale = 0.01;  // rewards are multiplied by this before GAE
  bool normalize_advantages = true;
  int hidden_units = 64;
  int num_envs = 1;
  int eval_interval = 10;  // updates between deterministic evaluations; 0 disables

  friend bool operator==(const PPOConfig&, const PPOConfig&) = default;
};

void validate(const PPOConfig& config);

/// Thrown when a forward pass or loss produces a non-finite number.
class TrainingDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parameters of the two independent Beta distributions plus the value.
struct PolicyOutput {
  std::array<double, 2> alpha{};
  std::array<double, 2> beta{};
  double value = 0.0;

  std::array<double, 2> mean() const;
  double log_prob(const ActionVec& action) const;
  double entropy() const;
};

double beta_log_prob(double x, double alpha, double beta);
double beta_entropy(double alpha, double beta);

/// Actor MLP (2 -> h -> h -> 4, tanh) parameterising Beta(softplus + 1)
/// per action dimension, and a critic MLP (2 -> h -> h -> 1). All weights
/// live in one flat vector: actor first, then critic.
class PolicyNet {
 public:
  explicit PolicyNet(int hidden_units = 64);

  /// Orthogonal initialisation: gain sqrt(2) on hidden layers, 0.01 on the
  /// policy head, 1 on the value head; zero biases.
  void initialize(Rng& rng);

  PolicyOutput forward(const Features& obs) const;

  /// Adds the gradient of `d_out . outputs` w.r.t. the parameters into
  /// `grad`, where d_out holds dL/d(raw actor outputs) and dL/dvalue.
  void backward(const Features& obs, const std::array<double, 4>& d_actor, double d_value,
                std::span<double> grad) const;

  int hidden_units() const { return hidden_; }
  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }
  std::size_t num_params() const { return params_.size(); }
  std::size_t actor_size() const { return actor_size_; }

 private:
  int hidden_;
  std::size_t actor_size_;
  std::vector<double> params_;
};

/// One stored transition as consumed by the loss.
struct Sample {
  Features obs{};
  ActionVec action{};
  double old_log_prob = 0.0;
  double advantage = 0.0;
  double return_target = 0.0;
};

/// Rollout buffer for one environment in collection order.
struct Trajectory {
  std::vector<Features> observations;
  std::vector<ActionVec> actions;
  std::vector<double> log_probs;
  std::vector<double> rewards;
  std::vector<double> values;
  std::vector<bool> dones;  // dones[t]: the episode ended after step t
  double bootstrap_value = 0.0;
  std::vector<double> advantages;
  std::vector<double> returns;

  std::size_t size() const { return rewards.size(); }
};

/// Fills trajectory.advantages / returns:
/// delta_t = r_t + gamma V(s_{t+1}) (1 - done_t) - V(s_t),
/// A_t = delta_t + gamma lambda (1 - done_t) A_{t+1}, target = A_t + V(s_t).
void compute_gae(Trajectory& trajectory, double gamma, double gae_lambda);

struct LossTerms {
  double total = 0.0;
  double clip = 0.0;     // L^CLIP (maximised)
  double value = 0.0;    // L^VF
  double entropy = 0.0;  // L^S
  double clip_fraction = 0.0;
  std::vector<double> ratios;
};

/// total = -L^CLIP + value_coef L^VF - entropy_coef L^S, minimised. When
/// `grad` is non-empty it receives dTotal/dtheta (overwritten).
LossTerms ppo_loss(const PolicyNet& net, std::span<const Sample> batch, const PPOConfig& config,
                   std::span<double> grad = {});

/// Adam with bias correction.
class Adam {
 public:
  Adam(std::size_t n, double learning_rate, double beta1 = 0.9, double beta2 = 0.999,
       double eps = 1e-8);
  void step(std::span<double> params, std::span<const double> grad);

 private:
  double lr_, b1_, b2_, eps_;
  std::int64_t t_ = 0;
  std::vector<double> m_, v_;
};

/// Draws an action from the policy's Beta distributions.
ActionVec sample_action(const PolicyOutput& out, Rng& rng);

struct EvalMetrics {
  double mean_return = 0.0;
  double mean_aosi = 0.0;
  double mean_aori = 0.0;
  double served_pct = 0.0;
};

struct TrainingLogRow {
  int update = 0;
  std::int64_t steps = 0;
  std::optional<double> mean_return;  // mean over episodes finished in this rollout
  double clip_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  std::optional<EvalMetrics> eval;
};

using EnvFactory = std::function<std::unique_ptr<PolicyEnv>()>;
using Evaluator = std::function<EvalMetrics(const PolicyNet&)>;

struct TrainingResult {
  PolicyNet net;
  std::vector<TrainingLogRow> log;
};

/// Alternates rollout collection with `epochs_per_update` passes of
/// minibatch Adam steps until `total_steps` transitions are collected.
/// Bit-reproducible for a fixed seed.
TrainingResult train(const EnvFactory& make_env, const PPOConfig& config, std::uint64_t seed,
                     const Evaluator& evaluate = {});

/// Deterministic action: the mean of each Beta.
ActionVec deterministic_action(const PolicyNet& net, const Features& obs);

/// Versioned JSON checkpoint holding the parameters and the PPOConfig.
void save_checkpoint(const std::string& path, const PolicyNet& net, const PPOConfig& config);
std::pair<PolicyNet, PPOConfig> load_checkpoint(const std::string& path);

void write_training_log(const std::string& path, std::span<const TrainingLogRow> log);

}  // namespace aoilab
