#include "aoilab/ppo.hpp"

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

namespace aoilab {
namespace {

using boost::math::digamma;
using boost::math::trigamma;

constexpr int kObsDim = 2;
constexpr int kActorOut = 4;  // (alpha~, beta~) per action dimension
constexpr double kActionEdge = 1e-9;

std::size_t mlp_size(int in, int h, int out) {
  return static_cast<std::size_t>(h * in + h + h * h + h + out * h + out);
}

double softplus(double x) { return x > 20.0 ? x : std::log1p(std::exp(x)); }
double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Activations of one 2-hidden-layer tanh MLP, kept for the backward pass.
struct MlpCache {
  std::vector<double> a1, a2;
  explicit MlpCache(int h) : a1(h), a2(h) {}
};

// Layer order in the flat block: W1 (h x in), b1, W2 (h x h), b2, W3 (out x h), b3.
void mlp_forward(const double* p, int in, int h, int out, const double* x, MlpCache& cache,
                 double* y) {
  const double* w1 = p;
  const double* b1 = w1 + h * in;
  const double* w2 = b1 + h;
  const double* b2 = w2 + h * h;
  const double* w3 = b2 + h;
  const double* b3 = w3 + out * h;
  for (int i = 0; i < h; ++i) {
    double z = b1[i];
    for (int j = 0; j < in; ++j) z += w1[i * in + j] * x[j];
    cache.a1[i] = std::tanh(z);
  }
  for (int i = 0; i < h; ++i) {
    double z = b2[i];
    const double* row = w2 + i * h;
    for (int j = 0; j < h; ++j) z += row[j] * cache.a1[j];
    cache.a2[i] = std::tanh(z);
  }
  for (int i = 0; i < out; ++i) {
    double z = b3[i];
    const double* row = w3 + i * h;
    for (int j = 0; j < h; ++j) z += row[j] * cache.a2[j];
    y[i] = z;
  }
}

void mlp_backward(const double* p, int in, int h, int out, const double* x,
                  const MlpCache& cache, const double* dy, double* g, std::vector<double>& dz2,
                  std::vector<double>& dz1) {
  const double* w2 = p + h * in + h;
  const double* w3 = w2 + h * h + h;
  double* gw1 = g;
  double* gb1 = gw1 + h * in;
  double* gw2 = gb1 + h;
  double* gb2 = gw2 + h * h;
  double* gw3 = gb2 + h;
  double* gb3 = gw3 + out * h;

  std::fill(dz2.begin(), dz2.end(), 0.0);
  for (int i = 0; i < out; ++i) {
    if (dy[i] == 0.0) continue;
    gb3[i] += dy[i];
    double* grow = gw3 + i * h;
    const double* row = w3 + i * h;
    for (int j = 0; j < h; ++j) {
      grow[j] += dy[i] * cache.a2[j];
      dz2[j] += row[j] * dy[i];
    }
  }
  for (int j = 0; j < h; ++j) dz2[j] *= 1.0 - cache.a2[j] * cache.a2[j];

  std::fill(dz1.begin(), dz1.end(), 0.0);
  for (int i = 0; i < h; ++i) {
    const double d = dz2[i];
    if (d == 0.0) continue;
    gb2[i] += d;
    double* grow = gw2 + i * h;
    const double* row = w2 + i * h;
    for (int j = 0; j < h; ++j) {
      grow[j] += d * cache.a1[j];
      dz1[j] += row[j] * d;
    }
  }
  for (int i = 0; i < h; ++i) {
    const double d = dz1[i] * (1.0 - cache.a1[i] * cache.a1[i]);
    gb1[i] += d;
    for (int j = 0; j < in; ++j) gw1[i * in + j] += d * x[j];
  }
}

PolicyOutput head(const double* raw, double value) {
  PolicyOutput out;
  for (int d = 0; d < 2; ++d) {
    out.alpha[d] = softplus(raw[2 * d]) + 1.0;
    out.beta[d] = softplus(raw[2 * d + 1]) + 1.0;
  }
  out.value = value;
  return out;
}

// Orthogonal rows (rows <= cols) or columns (rows > cols) via Gram-Schmidt.
void orthogonal_fill(double* w, int rows, int cols, double gain, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const bool by_rows = rows <= cols;
  const int count = by_rows ? rows : cols;
  const int len = by_rows ? cols : rows;
  std::vector<std::vector<double>> vecs(count, std::vector<double>(len));
  for (auto& v : vecs) {
    for (auto& e : v) e = normal(rng);
  }
  for (int i = 0; i < count; ++i) {
    for (int j = 0; j < i; ++j) {
      const double dot = std::inner_product(vecs[i].begin(), vecs[i].end(), vecs[j].begin(), 0.0);
      for (int k = 0; k < len; ++k) vecs[i][k] -= dot * vecs[j][k];
    }
    const double norm =
        std::sqrt(std::inner_product(vecs[i].begin(), vecs[i].end(), vecs[i].begin(), 0.0));
    for (auto& e : vecs[i]) e /= norm;
  }
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      w[r * cols + c] = gain * (by_rows ? vecs[r][c] : vecs[c][r]);
    }
  }
}

void init_mlp(double* p, int in, int h, int out, double out_gain, Rng& rng) {
  std::fill(p, p + mlp_size(in, h, out), 0.0);
  double* w1 = p;
  double* w2 = w1 + h * in + h;
  double* w3 = w2 + h * h + h;
  orthogonal_fill(w1, h, in, std::sqrt(2.0), rng);
  orthogonal_fill(w2, h, h, std::sqrt(2.0), rng);
  orthogonal_fill(w3, out, h, out_gain, rng);
}

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

void validate(const PPOConfig& c) {
  auto fail = [](const std::string& what) { throw std::invalid_argument("PPOConfig: " + what); };
  if (!(c.clip_epsilon > 0 && c.clip_epsilon < 1)) fail("clip_epsilon must lie in (0, 1)");
  if (c.value_coef < 0 || c.entropy_coef < 0) fail("coefficients must be >= 0");
  if (c.gae_lambda < 0 || c.gae_lambda > 1) fail("gae_lambda must lie in [0, 1]");
  if (c.gamma < 0 || c.gamma > 1) fail("gamma must lie in [0, 1]");
  if (!(c.learning_rate > 0)) fail("learning_rate must be > 0");
  if (c.epochs_per_update < 1 || c.minibatch_size < 1 || c.rollout_length < 1) {
    fail("epochs, minibatch size and rollout length must be >= 1");
  }
  if (c.total_steps < 0) fail("total_steps must be >= 0");
  if (c.hidden_units < 1 || c.num_envs < 1) fail("hidden_units and num_envs must be >= 1");
  if (c.eval_interval < 0) fail("eval_interval must be >= 0");
  if (!(c.reward_scale > 0)) fail("reward_scale must be > 0");
}

double beta_log_prob(double x, double a, double b) {
  return (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) -
         (std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

double beta_entropy(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b) - (a - 1.0) * digamma(a) -
         (b - 1.0) * digamma(b) + (a + b - 2.0) * digamma(a + b);
}

std::array<double, 2> PolicyOutput::mean() const {
  return {alpha[0] / (alpha[0] + beta[0]), alpha[1] / (alpha[1] + beta[1])};
}

double PolicyOutput::log_prob(const ActionVec& action) const {
  return beta_log_prob(action[0], alpha[0], beta[0]) + beta_log_prob(action[1], alpha[1], beta[1]);
}

double PolicyOutput::entropy() const {
  return beta_entropy(alpha[0], beta[0]) + beta_entropy(alpha[1], beta[1]);
}

PolicyNet::PolicyNet(int hidden_units)
    : hidden_(hidden_units),
      actor_size_(mlp_size(kObsDim, hidden_units, kActorOut)),
      params_(actor_size_ + mlp_size(kObsDim, hidden_units, 1), 0.0) {}

void PolicyNet::initialize(Rng& rng) {
  init_mlp(params_.data(), kObsDim, hidden_, kActorOut, 0.01, rng);
  init_mlp(params_.data() + actor_size_, kObsDim, hidden_, 1, 1.0, rng);
}

PolicyOutput PolicyNet::forward(const Features& obs) const {
  MlpCache cache(hidden_);
  double raw[kActorOut];
  double value = 0.0;
  mlp_forward(params_.data(), kObsDim, hidden_, kActorOut, obs.data(), cache, raw);
  mlp_forward(params_.data() + actor_size_, kObsDim, hidden_, 1, obs.data(), cache, &value);
  auto out = head(raw, value);
  if (!std::isfinite(value) || !std::isfinite(out.alpha[0] + out.alpha[1] + out.beta[0] + out.beta[1])) {
    throw TrainingDiverged("policy forward produced non-finite outputs");
  }
  return out;
}

void PolicyNet::backward(const Features& obs, const std::array<double, 4>& d_actor,
                         double d_value, std::span<double> grad) const {
  MlpCache cache(hidden_);
  std::vector<double> dz2(hidden_), dz1(hidden_);
  double raw[kActorOut];
  double value = 0.0;
  mlp_forward(params_.data(), kObsDim, hidden_, kActorOut, obs.data(), cache, raw);
  mlp_backward(params_.data(), kObsDim, hidden_, kActorOut, obs.data(), cache, d_actor.data(),
               grad.data(), dz2, dz1);
  mlp_forward(params_.data() + actor_size_, kObsDim, hidden_, 1, obs.data(), cache, &value);
  mlp_backward(params_.data() + actor_size_, kObsDim, hidden_, 1, obs.data(), cache, &d_value,
               grad.data() + actor_size_, dz2, dz1);
}

void compute_gae(Trajectory& tr, double gamma, double lambda) {
  const std::size_t n = tr.size();
  tr.advantages.assign(n, 0.0);
  tr.returns.assign(n, 0.0);
  double next_adv = 0.0;
  double next_value = tr.bootstrap_value;
  for (std::size_t i = n; i-- > 0;) {
    const double live = tr.dones[i] ? 0.0 : 1.0;
    const double delta = tr.rewards[i] + gamma * next_value * live - tr.values[i];
    next_adv = delta + gamma * lambda * live * next_adv;
    tr.advantages[i] = next_adv;
    tr.returns[i] = next_adv + tr.values[i];
    next_value = tr.values[i];
  }
}

LossTerms ppo_loss(const PolicyNet& net, std::span<const Sample> batch, const PPOConfig& config,
                   std::span<double> grad) {
  LossTerms terms;
  const std::size_t n = batch.size();
  if (n == 0) return terms;
  const bool want_grad = !grad.empty();
  if (want_grad) std::fill(grad.begin(), grad.end(), 0.0);

  double adv_mean = 0.0;
  double adv_scale = 1.0;
  if (config.normalize_advantages && n > 1) {
    for (const auto& s : batch) adv_mean += s.advantage;
    adv_mean /= static_cast<double>(n);
    double var = 0.0;
    for (const auto& s : batch) var += (s.advantage - adv_mean) * (s.advantage - adv_mean);
    adv_scale = 1.0 / (std::sqrt(var / static_cast<double>(n)) + 1e-8);
  }

  const int h = net.hidden_units();
  const auto params = net.params();
  const double* actor = params.data();
  const double* critic = params.data() + net.actor_size();
  MlpCache actor_cache(h), critic_cache(h);
  std::vector<double> dz2(h), dz1(h);
  const double inv_n = 1.0 / static_cast<double>(n);
  const double eps = config.clip_epsilon;
  terms.ratios.reserve(n);
  std::size_t clipped = 0;

  for (const auto& s : batch) {
    double raw[kActorOut];
    double value = 0.0;
    mlp_forward(actor, kObsDim, h, kActorOut, s.obs.data(), actor_cache, raw);
    mlp_forward(critic, kObsDim, h, 1, s.obs.data(), critic_cache, &value);
    const auto out = head(raw, value);

    const double adv = config.normalize_advantages && n > 1 ? (s.advantage - adv_mean) * adv_scale
                                                            : s.advantage;
    const double logp = out.log_prob(s.action);
    const double ratio = std::exp(logp - s.old_log_prob);
    const double unclipped = ratio * adv;
    const double clipped_term = std::clamp(ratio, 1.0 - eps, 1.0 + eps) * adv;
    const bool unclipped_active = unclipped <= clipped_term;
    if (!unclipped_active) ++clipped;
    const double entropy = out.entropy();
    const double verr = value - s.return_target;

    terms.ratios.push_back(ratio);
    terms.clip += std::min(unclipped, clipped_term) * inv_n;
    terms.value += verr * verr * inv_n;
    terms.entropy += entropy * inv_n;

    if (!want_grad) continue;
    // dTotal/dlogp from -L^CLIP; zero where the clipped branch is the min.
    const double d_logp = unclipped_active ? -ratio * adv * inv_n : 0.0;
    const double d_ent = -config.entropy_coef * inv_n;
    std::array<double, kActorOut> d_raw{};
    for (int d = 0; d < 2; ++d) {
      const double a = out.alpha[d];
      const double b = out.beta[d];
      const double x = s.action[d];
      const double psi_ab = digamma(a + b);
      const double tri_ab = trigamma(a + b);
      const double dlogp_da = std::log(x) - digamma(a) + psi_ab;
      const double dlogp_db = std::log1p(-x) - digamma(b) + psi_ab;
      const double dh_da = -(a - 1.0) * trigamma(a) + (a + b - 2.0) * tri_ab;
      const double dh_db = -(b - 1.0) * trigamma(b) + (a + b - 2.0) * tri_ab;
      d_raw[2 * d] = (d_logp * dlogp_da + d_ent * dh_da) * sigmoid(raw[2 * d]);
      d_raw[2 * d + 1] = (d_logp * dlogp_db + d_ent * dh_db) * sigmoid(raw[2 * d + 1]);
    }
    const double d_value = config.value_coef * 2.0 * verr * inv_n;
    mlp_backward(actor, kObsDim, h, kActorOut, s.obs.data(), actor_cache, d_raw.data(),
                 grad.data(), dz2, dz1);
    mlp_backward(critic, kObsDim, h, 1, s.obs.data(), critic_cache, &d_value,
                 grad.data() + net.actor_size(), dz2, dz1);
  }

  terms.total = -terms.clip + config.value_coef * terms.value - config.entropy_coef * terms.entropy;
  terms.clip_fraction = static_cast<double>(clipped) * inv_n;
  return terms;
}

Adam::Adam(std::size_t n, double learning_rate, double beta1, double beta2, double eps)
    : lr_(learning_rate), b1_(beta1), b2_(beta2), eps_(eps), m_(n, 0.0), v_(n, 0.0) {}

void Adam::step(std::span<double> params, std::span<const double> grad) {
  ++t_;
  const double c1 = 1.0 - std::pow(b1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = b1_ * m_[i] + (1.0 - b1_) * grad[i];
    v_[i] = b2_ * v_[i] + (1.0 - b2_) * grad[i] * grad[i];
    params[i] -= lr_ * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + eps_);
  }
}

ActionVec sample_action(const PolicyOutput& out, Rng& rng) {
  ActionVec a{};
  for (int d = 0; d < 2; ++d) {
    std::gamma_distribution<double> ga(out.alpha[d], 1.0);
    std::gamma_distribution<double> gb(out.beta[d], 1.0);
    const double x = ga(rng);
    const double y = gb(rng);
    a[d] = std::clamp(x / (x + y), kActionEdge, 1.0 - kActionEdge);
  }
  return a;
}

ActionVec deterministic_action(const PolicyNet& net, const Features& obs) {
  return net.forward(obs).mean();
}

TrainingResult train(const EnvFactory& make_env, const PPOConfig& config, std::uint64_t seed,
                     const Evaluator& evaluate) {
  validate(config);
  const RngHub hub(seed);
  TrainingResult result{PolicyNet(config.hidden_units), {}};
  PolicyNet& net = result.net;
  Rng init_rng = hub.derive(Stream::kPolicyInit);
  net.initialize(init_rng);
  if (config.total_steps == 0) return result;

  Rng sampling = hub.derive(Stream::kPolicySampling);
  std::vector<std::unique_ptr<PolicyEnv>> envs;
  std::vector<Features> current(config.num_envs);
  std::vector<double> running_return(config.num_envs, 0.0);
  std::uint64_t episode_counter = 0;
  const RngHub episode_hub(mix64(seed) ^ 0x5851f42d4c957f2dULL);
  for (int i = 0; i < config.num_envs; ++i) {
    envs.push_back(make_env());
    current[i] = envs.back()->reset(episode_hub.episode_seed(episode_counter++));
  }

  Adam adam(net.num_params(), config.learning_rate);
  std::vector<double> grad(net.num_params());
  std::int64_t collected = 0;
  int update = 0;
  const std::int64_t per_env =
      (config.rollout_length + config.num_envs - 1) / config.num_envs;

  while (collected < config.total_steps) {
    ++update;
    const std::int64_t budget = std::min<std::int64_t>(per_env * config.num_envs,
                                                       config.total_steps - collected);
    const std::int64_t steps_this_env = (budget + config.num_envs - 1) / config.num_envs;
    std::vector<double> finished_returns;
    std::vector<Sample> samples;

    for (int e = 0; e < config.num_envs; ++e) {
      Trajectory tr;
      for (std::int64_t k = 0; k < steps_this_env; ++k) {
        const auto out = net.forward(current[e]);
        const auto action = sample_action(out, sampling);
        const auto step = envs[e]->step(action);
        tr.observations.push_back(current[e]);
        tr.actions.push_back(action);
        tr.log_probs.push_back(out.log_prob(action));
        tr.values.push_back(out.value);
        tr.rewards.push_back(step.reward * config.reward_scale);
        tr.dones.push_back(step.done);
        running_return[e] += step.reward;
        if (step.done) {
          finished_returns.push_back(running_return[e]);
          running_return[e] = 0.0;
          current[e] = envs[e]->reset(episode_hub.episode_seed(episode_counter++));
        } else {
          current[e] = step.features;
        }
      }
      tr.bootstrap_value = tr.dones.back() ? 0.0 : net.forward(current[e]).value;
      compute_gae(tr, config.gamma, config.gae_lambda);
      for (std::size_t i = 0; i < tr.size(); ++i) {
        samples.push_back({tr.observations[i], tr.actions[i], tr.log_probs[i], tr.advantages[i],
                           tr.returns[i]});
      }
    }
    collected += static_cast<std::int64_t>(samples.size());

    std::vector<std::size_t> order(samples.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<Sample> minibatch;
    TrainingLogRow row;
    row.update = update;
    row.steps = collected;
    double sum_clip = 0.0, sum_value = 0.0, sum_entropy = 0.0;
    int batches = 0;
    int batch_index = 0;
    for (int epoch = 0; epoch < config.epochs_per_update; ++epoch) {
      std::shuffle(order.begin(), order.end(), sampling);
      for (std::size_t start = 0; start < order.size();
           start += static_cast<std::size_t>(config.minibatch_size)) {
        const std::size_t end =
            std::min(order.size(), start + static_cast<std::size_t>(config.minibatch_size));
        minibatch.clear();
        for (std::size_t i = start; i < end; ++i) minibatch.push_back(samples[order[i]]);
        const auto terms = ppo_loss(net, minibatch, config, grad);
        if (!std::isfinite(terms.total) || !all_finite(grad)) {
          throw TrainingDiverged("non-finite PPO loss at update " + std::to_string(update) +
                                 ", minibatch " + std::to_string(batch_index));
        }
        ++batch_index;
        double norm = std::sqrt(std::inner_product(grad.begin(), grad.end(), grad.begin(), 0.0));
        if (config.max_grad_norm > 0.0 && norm > config.max_grad_norm) {
          const double scale = config.max_grad_norm / norm;
          for (auto& g : grad) g *= scale;
        }
        adam.step(net.params(), grad);
        sum_clip += terms.clip;
        sum_value += terms.value;
        sum_entropy += terms.entropy;
        ++batches;
      }
    }
    row.clip_loss = sum_clip / batches;
    row.value_loss = sum_value / batches;
    row.entropy = sum_entropy / batches;
    if (!finished_returns.empty()) {
      row.mean_return = std::accumulate(finished_returns.begin(), finished_returns.end(), 0.0) /
                        static_cast<double>(finished_returns.size());
    }
    const bool last = collected >= config.total_steps;
    if (evaluate && config.eval_interval > 0 && (update % config.eval_interval == 0 || last)) {
      row.eval = evaluate(net);
    }
    result.log.push_back(row);
  }
  return result;
}

void save_checkpoint(const std::string& path, const PolicyNet& net, const PPOConfig& c) {
  nlohmann::json j;
  j["format"] = "aoilab-policy";
  j["version"] = 1;
  j["hidden_units"] = net.hidden_units();
  j["ppo"] = {{"clip_epsilon", c.clip_epsilon},   {"value_coef", c.value_coef},
              {"entropy_coef", c.entropy_coef},   {"gae_lambda", c.gae_lambda},
              {"gamma", c.gamma},                 {"learning_rate", c.learning_rate},
              {"epochs_per_update", c.epochs_per_update},
              {"minibatch_size", c.minibatch_size}, {"rollout_length", c.rollout_length},
              {"total_steps", c.total_steps},     {"max_grad_norm", c.max_grad_norm},
              {"reward_scale", c.reward_scale},
              {"normalize_advantages", c.normalize_advantages},
              {"hidden_units", c.hidden_units},   {"num_envs", c.num_envs},
              {"eval_interval", c.eval_interval}};
  j["params"] = std::vector<double>(net.params().begin(), net.params().end());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out << j.dump(1) << '\n';
}

std::pair<PolicyNet, PPOConfig> load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read checkpoint: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("malformed checkpoint " + path + ": " + e.what());
  }
  if (j.value("format", "") != "aoilab-policy" || j.value("version", 0) != 1) {
    throw std::runtime_error("unsupported checkpoint format in " + path);
  }
  PPOConfig c;
  const auto& p = j.at("ppo");
  c.clip_epsilon = p.at("clip_epsilon");
  c.value_coef = p.at("value_coef");
  c.entropy_coef = p.at("entropy_coef");
  c.gae_lambda = p.at("gae_lambda");
  c.gamma = p.at("gamma");
  c.learning_rate = p.at("learning_rate");
  c.epochs_per_update = p.at("epochs_per_update");
  c.minibatch_size = p.at("minibatch_size");
  c.rollout_length = p.at("rollout_length");
  c.total_steps = p.at("total_steps");
  c.max_grad_norm = p.at("max_grad_norm");
  c.reward_scale = p.at("reward_scale");
  c.normalize_advantages = p.at("normalize_advantages");
  c.hidden_units = p.at("hidden_units");
  c.num_envs = p.at("num_envs");
  c.eval_interval = p.at("eval_interval");
  PolicyNet net(j.at("hidden_units").get<int>());
  const auto params = j.at("params").get<std::vector<double>>();
  if (params.size() != net.num_params()) {
    throw std::runtime_error("checkpoint parameter count mismatch in " + path);
  }
  std::copy(params.begin(), params.end(), net.params().begin());
  return {std::move(net), c};
}

void write_training_log(const std::string& path, std::span<const TrainingLogRow> log) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write training log: " + path);
  out.precision(10);
  out << "update,steps,mean_return,clip_loss,value_loss,entropy,eval_aosi,eval_aori,"
         "eval_throughput_pct\n";
  for (const auto& r : log) {
    out << r.update << ',' << r.steps << ',';
    if (r.mean_return) out << *r.mean_return;
    out << ',' << r.clip_loss << ',' << r.value_loss << ',' << r.entropy << ',';
    if (r.eval) out << r.eval->mean_aosi << ',' << r.eval->mean_aori << ',' << r.eval->served_pct;
    else out << ",,";
    out << '\n';
  }
}

}  // namespace aoilab
