#pragma once
// helpers shared by the unit tests and the acceptance runner

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "consparse/autodiff.hpp"
#include "consparse/nets.hpp"

namespace testsupport {

using consparse::Tape;
using consparse::Var;

// A random expression over n inputs, evaluable on doubles or Vars. Ops are
// restricted so the value stays finite on inputs in [-1, 1].
struct RandomExpr {
  struct Node {
    int op;  // 0 leaf, 1 add, 2 mul, 3 neg, 4 recip(1+a^2), 5 exp(tanh-ish), 6 ln(1+a^2), 7 pow, 8 sigmoid, 9 softplus
    int a = -1, b = -1;
    int leaf = 0;
    double c = 0.0;
  };
  std::vector<Node> nodes;
  int n_inputs = 1;

  template <class S>
  S eval(const std::vector<S>& x) const {
    std::vector<S> v;
    v.reserve(nodes.size());
    for (const Node& n : nodes) {
      switch (n.op) {
        case 0: v.push_back(x[n.leaf]); break;
        case 1: v.push_back(v[n.a] + v[n.b]); break;
        case 2: v.push_back(v[n.a] * v[n.b]); break;
        case 3: v.push_back(-v[n.a]); break;
        case 4: v.push_back(consparse::recip(v[n.a] * v[n.a] + 1.0)); break;
        case 5: v.push_back(consparse::exp(consparse::sigmoid(v[n.a]) * 2.0)); break;
        case 6: v.push_back(consparse::log(v[n.a] * v[n.a] + 1.0)); break;
        case 7: v.push_back(consparse::pow(consparse::softplus(v[n.a]) + 0.5, n.c)); break;
        case 8: v.push_back(consparse::sigmoid(v[n.a])); break;
        default: v.push_back(consparse::softplus(v[n.a])); break;
      }
    }
    return v.back();
  }
};

inline RandomExpr random_expr(std::mt19937_64& rng, int n_inputs, int max_depth = 6) {
  RandomExpr e;
  e.n_inputs = n_inputs;
  std::uniform_int_distribution<int> op(1, 9), leaf(0, n_inputs - 1);
  std::uniform_real_distribution<double> pw(-1.5, 2.5);
  // keep trees modest: stop early with some probability
  std::bernoulli_distribution stop(0.35);
  std::function<int(int)> grow = [&](int depth) -> int {
    bool leaf_now = depth >= max_depth || (depth > 0 && stop(rng));
    RandomExpr::Node n;
    if (leaf_now) {
      n.op = 0;
      n.leaf = leaf(rng);
    } else {
      n.op = op(rng);
      n.a = grow(depth + 1);
      if (n.op == 1 || n.op == 2) n.b = grow(depth + 1);
      if (n.op == 7) n.c = pw(rng);
    }
    e.nodes.push_back(n);
    return static_cast<int>(e.nodes.size()) - 1;
  };
  grow(0);
  return e;
}

inline bool close_rel(double a, double b, double rel, double abs_floor) {
  double d = std::abs(a - b);
  return d <= abs_floor || d <= rel * std::max(std::abs(a), std::abs(b));
}

// random parameters with nonzero gates, then projected
inline consparse::Network random_network(consparse::NetKind kind, const std::vector<int>& widths,
                                         std::mt19937_64& rng, double scale = 1.0) {
  consparse::Network net = consparse::make_network(kind, widths, rng);
  std::normal_distribution<double> nd(0.0, scale);
  for (auto& p : net.params) {
    p.theta_bar = nd(rng);
    p.log_alpha = 10.0;
  }
  consparse::project_constraints(net);
  return net;
}

}  // namespace testsupport
