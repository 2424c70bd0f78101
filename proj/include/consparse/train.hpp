#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "consparse/autodiff.hpp"
#include "consparse/gates.hpp"
#include "consparse/nets.hpp"
#include "json.hpp"

namespace consparse {

// A fitting problem owns its data. It builds a suitably shaped network and
// evaluates the data part of the loss; gating and optimisation live here.
class Problem {
 public:
  virtual ~Problem() = default;
  virtual std::string kind() const = 0;
  virtual NetKind default_arch() const = 0;
  virtual Network make_network(const std::vector<int>& hidden, NetKind arch, std::mt19937_64& rng) const = 0;
  virtual Var data_loss(Tape& tape, const Network& net, std::span<const Var> theta,
                        const std::vector<char>* dead) const = 0;
  virtual double train_loss(const Network& net, std::span<const double> theta) const = 0;
  // NaN when the problem has no held-out data
  virtual double val_loss(const Network& net, std::span<const double> theta) const = 0;
  virtual nlohmann::json metrics(const Network& net) const = 0;
  virtual nlohmann::json describe() const = 0;
};

struct TrainConfig {
  double lambda = 0.0;
  int epochs = 20000;
  double lr = 1e-3;
  std::vector<std::uint64_t> seeds{0};
  int mc_samples = 1;
  double split = 0.8;
  std::uint64_t split_seed = 0;
  std::vector<int> hidden{30};
  NetKind arch = NetKind::Icnn;
  bool arch_set = false;  // false: use the problem default
  int log_every = 100;
  GateConstants gates;
  bool gates_open = false;  // plain regression, no gate sampling
  int threads = 0;          // 0: hardware concurrency, capped by CONSPARSE_THREADS

  void validate() const;
  nlohmann::json to_json() const;
};

struct LogRow {
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  std::size_t active = 0;
  double penalty = 0.0;
};

struct RunRecord {
  std::uint64_t seed = 0;
  double final_train_loss = 0.0;
  double final_val_loss = 0.0;
  std::vector<std::size_t> active_history;
  std::vector<double> loss_history;  // sampled objective per epoch
  std::vector<LogRow> log;
};

struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  long t = 0;
  std::vector<double> m;
  std::vector<double> v;
};

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state, double lr);

struct LossTerms {
  Var total;
  Var data;
  double penalty = 0.0;  // sum of expected-L0 penalties, unweighted
};

// Monte Carlo objective (1/L) sum_l data(theta_bar * z_l) + lambda sum_j penalty_j.
// rng == nullptr selects deterministic test gates.
LossTerms total_loss(Tape& tape, const Problem& prob, const Network& net, std::span<const Var> theta_bar,
                     std::span<const Var> log_alpha, double lambda, int mc_samples, std::mt19937_64* rng,
                     bool gates_open = false);

RunRecord train_run(const TrainConfig& cfg, const Problem& prob, std::uint64_t seed, Network& out);

struct ExperimentResult {
  std::vector<RunRecord> runs;
  std::vector<Network> models;
  std::size_t selected = 0;
};

// lower-middle element for even counts; ties broken by position
std::size_t median_index(const std::vector<double>& losses);

ExperimentResult run_experiment(const TrainConfig& cfg, const Problem& prob);

template <class T>
struct Split {
  std::vector<T> train;
  std::vector<T> val;
};

std::vector<std::size_t> split_indices(std::size_t n, double ratio, std::uint64_t seed);

template <class T>
Split<T> split_dataset(const std::vector<T>& data, double ratio, std::uint64_t seed) {
  auto idx = split_indices(data.size(), ratio, seed);
  std::size_t n_train = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(data.size())));
  Split<T> s;
  for (std::size_t i = 0; i < idx.size(); ++i) (i < n_train ? s.train : s.val).push_back(data[idx[i]]);
  return s;
}

int worker_count(int requested, std::size_t jobs);

}  // namespace consparse
