#include "consparse/nets.hpp"

#include <cmath>

namespace consparse {

const char* net_kind_name(NetKind k) {
  switch (k) {
    case NetKind::Icnn: return "icnn";
    case NetKind::Monotone: return "monotone";
    case NetKind::Mlp: return "mlp";
  }
  return "?";
}

NetKind parse_net_kind(const std::string& s) {
  if (s == "icnn") return NetKind::Icnn;
  if (s == "monotone") return NetKind::Monotone;
  if (s == "mlp") return NetKind::Mlp;
  throw Error(ErrorKind::InvalidArgument, "unknown network kind '" + s + "'");
}

const char* activation_name(Activation a) { return a == Activation::Softplus ? "softplus" : "sigmoid"; }

void Network::build_layout() {
  if (widths.size() < 2) throw Error(ErrorKind::ShapeError, "need at least input and output widths");
  for (int w : widths)
    if (w < 1) throw Error(ErrorKind::ShapeError, "layer widths must be positive");
  layers_.clear();
  std::size_t off = 0;
  const int n0 = widths.front();
  for (std::size_t l = 1; l < widths.size(); ++l) {
    LayerLayout L;
    L.in = widths[l - 1];
    L.out = widths[l];
    L.passthrough = kind == NetKind::Icnn && l >= 2;
    L.hidden = l + 1 < widths.size();
    L.w = off;
    off += static_cast<std::size_t>(L.in) * L.out;
    if (L.passthrough) {
      L.p = off;
      off += static_cast<std::size_t>(n0) * L.out;
    }
    L.b = off;
    off += L.out;
    layers_.push_back(L);
  }
  if (!params.empty() && params.size() != off) throw Error(ErrorKind::ShapeError, "parameter vector does not match widths");
  if (params.empty()) params.resize(off);
  constrained.assign(off, 0);
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const LayerLayout& L = layers_[l];
    const std::size_t end = L.b + L.out;
    for (std::size_t i = L.w; i < end; ++i) {
      if (kind == NetKind::Monotone) constrained[i] = 1;
      if (kind == NetKind::Icnn && l >= 1 && i < L.w + static_cast<std::size_t>(L.in) * L.out) constrained[i] = 1;
    }
  }
  if (input_offset.empty()) input_offset.assign(n0, 0.0);
  if (input_scale.empty()) input_scale.assign(n0, 1.0);
  if (input_offset.size() != static_cast<std::size_t>(n0) || input_scale.size() != static_cast<std::size_t>(n0))
    throw Error(ErrorKind::ShapeError, "input transform width mismatch");
}

Network make_network(NetKind kind, const std::vector<int>& widths, std::mt19937_64& rng) {
  Network net;
  net.kind = kind;
  net.activation = kind == NetKind::Monotone ? Activation::Sigmoid : Activation::Softplus;
  net.widths = widths;
  net.build_layout();
  const int n0 = widths.front();
  for (const LayerLayout& L : net.layers()) {
    const int fan_in = L.in + (L.passthrough ? n0 : 0);
    std::normal_distribution<double> nd(0.0, 1.0 / std::sqrt(static_cast<double>(fan_in)));
    auto draw = [&](std::size_t i) {
      double v = nd(rng);
      if (net.constrained[i]) v = std::abs(v);
      net.params[i] = init_gated(v, rng);
    };
    for (std::size_t i = L.w; i < L.w + static_cast<std::size_t>(L.in) * L.out; ++i) draw(i);
    if (L.passthrough)
      for (std::size_t i = L.p; i < L.p + static_cast<std::size_t>(n0) * L.out; ++i) draw(i);
    for (std::size_t i = L.b; i < L.b + static_cast<std::size_t>(L.out); ++i) net.params[i] = init_gated(0.0, rng);
  }
  return net;
}

Network make_icnn(const std::vector<int>& widths, std::mt19937_64& rng) { return make_network(NetKind::Icnn, widths, rng); }
Network make_monotone(const std::vector<int>& widths, std::mt19937_64& rng) {
  return make_network(NetKind::Monotone, widths, rng);
}
Network make_mlp(const std::vector<int>& widths, std::mt19937_64& rng) { return make_network(NetKind::Mlp, widths, rng); }

void project_constraints(Network& net) {
  for (std::size_t i = 0; i < net.params.size(); ++i)
    if (net.constrained[i] && net.params[i].theta_bar < 0.0) net.params[i].theta_bar = 0.0;
}

std::vector<double> test_parameters(const Network& net) {
  std::vector<double> t(net.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = net.params[i].theta_bar * test_gate(net.params[i], net.gates);
  return t;
}

std::vector<double> raw_parameters(const Network& net) {
  std::vector<double> t(net.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = net.params[i].theta_bar;
  return t;
}

double evaluate(const Network& net, std::span<const double> x) {
  std::vector<double> th = test_parameters(net);
  return forward_scalar<double>(net, th, x);
}

nlohmann::json to_json(const Network& net) {
  nlohmann::json j;
  j["kind"] = net_kind_name(net.kind);
  j["activation"] = activation_name(net.activation);
  j["widths"] = net.widths;
  j["gates"] = {{"gamma", net.gates.gamma}, {"zeta", net.gates.zeta}, {"beta", net.gates.beta}};
  j["input_offset"] = net.input_offset;
  j["input_scale"] = net.input_scale;
  std::vector<int> cons(net.constrained.begin(), net.constrained.end());
  j["constrained"] = cons;
  nlohmann::json tb = nlohmann::json::array(), la = nlohmann::json::array();
  for (const auto& p : net.params) {
    tb.push_back(p.theta_bar);
    la.push_back(p.log_alpha);
  }
  j["theta_bar"] = tb;
  j["log_alpha"] = la;
  return j;
}

Network network_from_json(const nlohmann::json& j) {
  try {
    Network net;
    net.kind = parse_net_kind(j.at("kind").get<std::string>());
    std::string act = j.at("activation").get<std::string>();
    if (act == "softplus")
      net.activation = Activation::Softplus;
    else if (act == "sigmoid")
      net.activation = Activation::Sigmoid;
    else
      throw Error(ErrorKind::CorruptCheckpoint, "unknown activation " + act);
    net.widths = j.at("widths").get<std::vector<int>>();
    const auto& g = j.at("gates");
    net.gates = GateConstants{g.at("gamma").get<double>(), g.at("zeta").get<double>(), g.at("beta").get<double>()};
    net.gates.validate();
    net.input_offset = j.at("input_offset").get<std::vector<double>>();
    net.input_scale = j.at("input_scale").get<std::vector<double>>();
    auto tb = j.at("theta_bar").get<std::vector<double>>();
    auto la = j.at("log_alpha").get<std::vector<double>>();
    if (tb.size() != la.size()) throw Error(ErrorKind::CorruptCheckpoint, "theta_bar/log_alpha length mismatch");
    net.params.resize(tb.size());
    for (std::size_t i = 0; i < tb.size(); ++i) net.params[i] = GatedParam{tb[i], la[i]};
    net.build_layout();
    auto cons = j.at("constrained").get<std::vector<int>>();
    for (std::size_t i = 0; i < cons.size() && i < net.constrained.size(); ++i)
      if ((cons[i] != 0) != (net.constrained[i] != 0))
        throw Error(ErrorKind::CorruptCheckpoint, "constraint flags disagree with network kind");
    return net;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::CorruptCheckpoint, e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::CorruptCheckpoint) throw;
    throw Error(ErrorKind::CorruptCheckpoint, e.what());
  }
}

}  // namespace consparse
