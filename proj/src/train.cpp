#include "consparse/train.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <numeric>
#include <thread>

namespace consparse {

void TrainConfig::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw Error(ErrorKind::InvalidArgument, "lambda must be >= 0");
  if (epochs < 1) throw Error(ErrorKind::InvalidArgument, "epochs must be >= 1");
  if (!(lr > 0.0)) throw Error(ErrorKind::InvalidArgument, "learning rate must be positive");
  if (seeds.empty()) throw Error(ErrorKind::InvalidArgument, "need at least one seed");
  if (mc_samples < 1) throw Error(ErrorKind::InvalidArgument, "mc samples must be >= 1");
  if (!(split > 0.0 && split < 1.0)) throw Error(ErrorKind::InvalidArgument, "split must lie in (0,1)");
  if (log_every < 1) throw Error(ErrorKind::InvalidArgument, "log interval must be >= 1");
  for (int h : hidden)
    if (h < 1) throw Error(ErrorKind::InvalidArgument, "hidden widths must be positive");
  gates.validate();
}

nlohmann::json TrainConfig::to_json() const {
  nlohmann::json j;
  j["lambda"] = lambda;
  j["epochs"] = epochs;
  j["lr"] = lr;
  j["seeds"] = seeds;
  j["mc_samples"] = mc_samples;
  j["split"] = split;
  j["split_seed"] = split_seed;
  j["hidden"] = hidden;
  j["arch"] = net_kind_name(arch);
  j["log_every"] = log_every;
  j["gates"] = {{"gamma", gates.gamma}, {"zeta", gates.zeta}, {"beta", gates.beta}};
  j["gates_open"] = gates_open;
  return j;
}

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& st, double lr) {
  if (params.size() != grads.size()) throw Error(ErrorKind::ShapeError, "params/grads size mismatch");
  for (std::size_t i = 0; i < grads.size(); ++i)
    if (!std::isfinite(grads[i])) throw Error(ErrorKind::NonFiniteGradient, "parameter index " + std::to_string(i));
  if (st.m.size() != params.size()) {
    st.m.assign(params.size(), 0.0);
    st.v.assign(params.size(), 0.0);
    st.t = 0;
  }
  ++st.t;
  const double c1 = 1.0 - std::pow(st.beta1, static_cast<double>(st.t));
  const double c2 = 1.0 - std::pow(st.beta2, static_cast<double>(st.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    st.m[i] = st.beta1 * st.m[i] + (1.0 - st.beta1) * g;
    st.v[i] = st.beta2 * st.v[i] + (1.0 - st.beta2) * g * g;
    const double mh = st.m[i] / c1, vh = st.v[i] / c2;
    params[i] -= lr * mh / (std::sqrt(vh) + st.eps);
  }
}

LossTerms total_loss(Tape& tape, const Problem& prob, const Network& net, std::span<const Var> tb,
                     std::span<const Var> la, double lambda, int mc, std::mt19937_64* rng, bool gates_open) {
  const std::size_t P = net.size();
  if (tb.size() != P || la.size() != P) throw Error(ErrorKind::ShapeError, "leaf count mismatch");
  const GateConstants& gc = net.gates;
  std::vector<Var> eff(P);
  std::vector<char> dead(P, 0);
  Var data;
  const int samples = (rng == nullptr || gates_open) ? 1 : mc;
  for (int l = 0; l < samples; ++l) {
    for (std::size_t i = 0; i < P; ++i) {
      dead[i] = 0;
      if (gates_open) {
        eff[i] = tb[i];
        continue;
      }
      if (rng == nullptr) {
        double z = test_gate(net.params[i], gc);
        if (z == 0.0) {
          dead[i] = 1;
          eff[i] = tape.constant(0.0);
        } else {
          eff[i] = tb[i] * z;
        }
        continue;
      }
      const double u = draw_noise(*rng);
      // a clamped gate has zero gradient w.r.t. log alpha, so skip its nodes
      const double zd = gate_from_noise<double>(la[i].value(), u, gc);
      if (zd == 0.0) {
        dead[i] = 1;
        eff[i] = tape.constant(0.0);
      } else if (zd == 1.0) {
        eff[i] = tb[i];
      } else {
        eff[i] = tb[i] * gate_from_noise<Var>(la[i], u, gc);
      }
    }
    Var d = prob.data_loss(tape, net, eff, &dead);
    data = l == 0 ? d : data + d;
  }
  if (samples > 1) data = data * (1.0 / samples);

  LossTerms out;
  out.data = data;
  double pen = 0.0;
  for (std::size_t i = 0; i < P; ++i) pen += l0_penalty(la[i].value(), gc);
  out.penalty = pen;
  if (lambda > 0.0 && !gates_open) {
    Var s = l0_penalty(la[0], gc);
    for (std::size_t i = 1; i < P; ++i) s = s + l0_penalty(la[i], gc);
    out.total = data + s * lambda;
  } else {
    out.total = data;
  }
  return out;
}

RunRecord train_run(const TrainConfig& cfg, const Problem& prob, std::uint64_t seed, Network& net) {
  cfg.validate();
  std::mt19937_64 rng(seed);
  NetKind arch = cfg.arch_set ? cfg.arch : prob.default_arch();
  net = prob.make_network(cfg.hidden, arch, rng);
  net.gates = cfg.gates;
  const std::size_t P = net.size();
  // open gates: the test gate must be exactly 1 so evaluation sees theta_bar
  if (cfg.gates_open)
    for (auto& p : net.params) p.log_alpha = 10.0;

  RunRecord rec;
  rec.seed = seed;
  rec.active_history.reserve(cfg.epochs);
  rec.loss_history.reserve(cfg.epochs);

  Tape tape;
  AdamState adam;
  std::vector<double> flat(2 * P), grads(2 * P), adj;
  std::vector<Var> tb(P), la(P);

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    tape.clear();
    for (std::size_t i = 0; i < P; ++i) {
      tb[i] = tape.variable(net.params[i].theta_bar);
      la[i] = tape.variable(net.params[i].log_alpha);
    }
    LossTerms lt = total_loss(tape, prob, net, tb, la, cfg.lambda, cfg.mc_samples, &rng, cfg.gates_open);
    tape.adjoints(lt.total, adj);
    for (std::size_t i = 0; i < P; ++i) {
      flat[i] = net.params[i].theta_bar;
      flat[P + i] = net.params[i].log_alpha;
      grads[i] = adj[tb[i].id()];
      grads[P + i] = adj[la[i].id()];
    }
    adam_step(flat, grads, adam, cfg.lr);
    for (std::size_t i = 0; i < P; ++i) {
      net.params[i].theta_bar = flat[i];
      net.params[i].log_alpha = flat[P + i];
    }
    project_constraints(net);

    std::size_t active = active_count(net.params, net.gates);
    rec.active_history.push_back(active);
    rec.loss_history.push_back(lt.total.value());
    if (epoch % cfg.log_every == 0 || epoch == cfg.epochs) {
      std::vector<double> th = test_parameters(net);
      LogRow row;
      row.epoch = epoch;
      row.train_loss = prob.train_loss(net, th);
      row.val_loss = prob.val_loss(net, th);
      row.active = active;
      row.penalty = cfg.gates_open ? 0.0 : cfg.lambda * lt.penalty;
      rec.log.push_back(row);
    }
  }
  std::vector<double> th = test_parameters(net);
  rec.final_train_loss = prob.train_loss(net, th);
  rec.final_val_loss = prob.val_loss(net, th);
  return rec;
}

std::size_t median_index(const std::vector<double>& losses) {
  if (losses.empty()) throw Error(ErrorKind::InvalidArgument, "no runs to select from");
  std::vector<std::size_t> order(losses.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return losses[a] < losses[b]; });
  return order[(order.size() - 1) / 2];
}

int worker_count(int requested, std::size_t jobs) {
  int n = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
  if (n < 1) n = 1;
  if (const char* env = std::getenv("CONSPARSE_THREADS")) {
    int cap = std::atoi(env);
    if (cap >= 1) n = std::min(n, cap);
  }
  return std::max(1, std::min<int>(n, static_cast<int>(jobs)));
}

ExperimentResult run_experiment(const TrainConfig& cfg, const Problem& prob) {
  cfg.validate();
  const std::size_t n = cfg.seeds.size();
  ExperimentResult res;
  res.runs.resize(n);
  res.models.resize(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t k = next++; k < n; k = next++) {
      try {
        res.runs[k] = train_run(cfg, prob, cfg.seeds[k], res.models[k]);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  int nw = worker_count(cfg.threads, n);
  if (nw == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < nw; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<double> losses(n);
  for (std::size_t k = 0; k < n; ++k) losses[k] = res.runs[k].final_train_loss;
  res.selected = median_index(losses);
  return res;
}

std::vector<std::size_t> split_indices(std::size_t n, double ratio, std::uint64_t seed) {
  if (n < 5) throw Error(ErrorKind::TooFewPoints, "need at least 5 points to split, got " + std::to_string(n));
  if (!(ratio > 0.0 && ratio < 1.0)) throw Error(ErrorKind::InvalidArgument, "split ratio must lie in (0,1)");
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  for (std::size_t i = n - 1; i > 0; --i) {
    std::size_t j = static_cast<std::size_t>(rng() % (i + 1));
    std::swap(idx[i], idx[j]);
  }
  return idx;
}

}  // namespace consparse
