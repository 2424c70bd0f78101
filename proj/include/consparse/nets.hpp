#pragma once

#include <random>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "consparse/autodiff.hpp"
#include "consparse/gates.hpp"
#include "json.hpp"

namespace consparse {

enum class NetKind { Icnn, Monotone, Mlp };
enum class Activation { Softplus, Sigmoid };

const char* net_kind_name(NetKind k);
NetKind parse_net_kind(const std::string& s);
const char* activation_name(Activation a);

struct LayerLayout {
  int in = 0;
  int out = 0;
  std::size_t w = 0;  // out x in, row-major
  std::size_t p = 0;  // out x n0 passthrough (ICNN, layer >= 2)
  std::size_t b = 0;
  bool passthrough = false;
  bool hidden = true;
};

// One parameter vector for all three network families. Hidden layers use the
// activation, the last layer is affine.
class Network {
 public:
  NetKind kind = NetKind::Icnn;
  Activation activation = Activation::Softplus;
  std::vector<int> widths;
  std::vector<GatedParam> params;
  std::vector<char> constrained;
  GateConstants gates;
  // inputs enter as (x - offset) * scale
  std::vector<double> input_offset;
  std::vector<double> input_scale;

  int n_inputs() const { return widths.front(); }
  int n_outputs() const { return widths.back(); }
  std::size_t size() const { return params.size(); }
  const std::vector<LayerLayout>& layers() const { return layers_; }

  void build_layout();  // recomputes layers_ from kind and widths

 private:
  std::vector<LayerLayout> layers_;
};

using IcnnModel = Network;
using MonotoneModel = Network;
using MlpModel = Network;

Network make_network(NetKind kind, const std::vector<int>& widths, std::mt19937_64& rng);
Network make_icnn(const std::vector<int>& widths, std::mt19937_64& rng);
Network make_monotone(const std::vector<int>& widths, std::mt19937_64& rng);
Network make_mlp(const std::vector<int>& widths, std::mt19937_64& rng);

void project_constraints(Network& net);

// theta_bar * test_gate for each parameter
std::vector<double> test_parameters(const Network& net);
std::vector<double> raw_parameters(const Network& net);

// For doubles an exactly-zero weight is skipped. For Vars only entries flagged
// in `dead` are skipped (a clamped-shut gate), since theta_bar = 0 with an open
// gate still has a gradient.
template <class S>
std::vector<S> forward(const Network& net, std::span<const S> theta, std::span<const S> x,
                       const std::vector<char>* dead = nullptr) {
  if (theta.size() != net.size()) throw Error(ErrorKind::ShapeError, "parameter count mismatch");
  if (x.size() != static_cast<std::size_t>(net.n_inputs())) throw Error(ErrorKind::ShapeError, "input width mismatch");
  const std::size_t n0 = x.size();
  std::vector<S> x0(x.begin(), x.end());
  for (std::size_t i = 0; i < n0; ++i) {
    if (!net.input_offset.empty() && net.input_offset[i] != 0.0) x0[i] = x0[i] - net.input_offset[i];
    if (!net.input_scale.empty() && net.input_scale[i] != 1.0) x0[i] = x0[i] * net.input_scale[i];
  }
  auto skip = [&](std::size_t i) {
    if constexpr (std::is_same_v<S, double>)
      return theta[i] == 0.0;
    else
      return dead != nullptr && (*dead)[i] != 0;
  };
  std::vector<S> cur = x0, next;
  for (const LayerLayout& L : net.layers()) {
    next.clear();
    next.reserve(L.out);
    for (int o = 0; o < L.out; ++o) {
      S z = theta[L.b + o];
      const std::size_t row = L.w + static_cast<std::size_t>(o) * L.in;
      for (int k = 0; k < L.in; ++k) {
        if (skip(row + k)) continue;
        z = z + theta[row + k] * cur[k];
      }
      if (L.passthrough) {
        const std::size_t prow = L.p + static_cast<std::size_t>(o) * n0;
        for (std::size_t m = 0; m < n0; ++m) {
          if (skip(prow + m)) continue;
          z = z + theta[prow + m] * x0[m];
        }
      }
      if (L.hidden) z = net.activation == Activation::Softplus ? softplus(z) : sigmoid(z);
      next.push_back(z);
    }
    std::swap(cur, next);
  }
  return cur;
}

template <class S>
S forward_scalar(const Network& net, std::span<const S> theta, std::span<const S> x) {
  return forward<S>(net, theta, x)[0];
}

// test-mode convenience
double evaluate(const Network& net, std::span<const double> x);

nlohmann::json to_json(const Network& net);
Network network_from_json(const nlohmann::json& j);

}  // namespace consparse
