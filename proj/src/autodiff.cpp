#include "consparse/autodiff.hpp"

#include <algorithm>

namespace consparse {

const char* op_name(Op op) {
  switch (op) {
    case Op::Leaf: return "leaf";
    case Op::Const: return "const";
    case Op::Add: return "add";
    case Op::Sub: return "sub";
    case Op::Mul: return "mul";
    case Op::Neg: return "neg";
    case Op::Recip: return "recip";
    case Op::Exp: return "exp";
    case Op::Ln: return "ln";
    case Op::PowConst: return "pow-const";
    case Op::Sigmoid: return "sigmoid";
    case Op::Softplus: return "softplus";
    case Op::MaxConst: return "max-const";
    case Op::MinConst: return "min-const";
    case Op::AddConst: return "add-const";
    case Op::MulConst: return "mul-const";
  }
  return "?";
}

std::int32_t Tape::push(Op op, double value, std::int32_t a, std::int32_t b, double payload) {
  if (!std::isfinite(value)) throw Error(ErrorKind::NonFiniteValue, op_name(op));
  nodes_.push_back(Node{value, payload, a, b, op});
  return static_cast<std::int32_t>(nodes_.size() - 1);
}

void Tape::check_same(Var a) const {
  if (a.tape() != this) throw Error(ErrorKind::TapeMismatch, "operand belongs to another tape");
}

Var Tape::variable(double v) { return Var(this, push(Op::Leaf, v, -1, -1, 0.0)); }
Var Tape::constant(double v) { return Var(this, push(Op::Const, v, -1, -1, 0.0)); }

Var Tape::unary(Op op, Var a, double c) {
  check_same(a);
  double x = value(a.id());
  double v = 0.0;
  switch (op) {
    case Op::Neg: v = -x; break;
    case Op::Recip: v = 1.0 / x; break;
    case Op::Exp: v = std::exp(x); break;
    case Op::Ln: v = std::log(x); break;
    case Op::PowConst: v = std::pow(x, c); break;
    case Op::Sigmoid: v = consparse::sigmoid(x); break;
    case Op::Softplus: v = consparse::softplus(x); break;
    case Op::MaxConst: v = x > c ? x : c; break;
    case Op::MinConst: v = x < c ? x : c; break;
    case Op::AddConst: v = x + c; break;
    case Op::MulConst: v = x * c; break;
    default: throw Error(ErrorKind::InvalidArgument, std::string("not a unary op: ") + op_name(op));
  }
  return Var(this, push(op, v, a.id(), -1, c));
}

Var Tape::binary(Op op, Var a, Var b) {
  check_same(a);
  check_same(b);
  double x = value(a.id()), y = value(b.id());
  double v = 0.0;
  switch (op) {
    case Op::Add: v = x + y; break;
    case Op::Sub: v = x - y; break;
    case Op::Mul: v = x * y; break;
    default: throw Error(ErrorKind::InvalidArgument, std::string("not a binary op: ") + op_name(op));
  }
  return Var(this, push(op, v, a.id(), b.id(), 0.0));
}

Var Tape::record(Op op, std::span<const Var> in, double payload) {
  switch (op) {
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
      if (in.size() != 2) throw Error(ErrorKind::ShapeError, "binary op needs 2 inputs");
      return binary(op, in[0], in[1]);
    case Op::Leaf: return variable(payload);
    case Op::Const: return constant(payload);
    default:
      if (in.size() != 1) throw Error(ErrorKind::ShapeError, "unary op needs 1 input");
      return unary(op, in[0], payload);
  }
}

void Tape::adjoints(Var output, std::vector<double>& adj, std::int32_t lowest) const {
  check_same(output);
  const std::int32_t hi = output.id();
  adj.assign(static_cast<std::size_t>(hi) + 1, 0.0);
  adj[hi] = 1.0;
  for (std::int32_t k = hi; k >= lowest; --k) {
    const double g = adj[k];
    if (g == 0.0) continue;
    const Node& n = nodes_[k];
    switch (n.op) {
      case Op::Leaf:
      case Op::Const: break;
      case Op::Add: adj[n.a] += g; adj[n.b] += g; break;
      case Op::Sub: adj[n.a] += g; adj[n.b] -= g; break;
      case Op::Mul:
        adj[n.a] += g * nodes_[n.b].value;
        adj[n.b] += g * nodes_[n.a].value;
        break;
      case Op::Neg: adj[n.a] -= g; break;
      case Op::Recip: adj[n.a] -= g * n.value * n.value; break;
      case Op::Exp: adj[n.a] += g * n.value; break;
      case Op::Ln: adj[n.a] += g / nodes_[n.a].value; break;
      case Op::PowConst: adj[n.a] += g * n.payload * std::pow(nodes_[n.a].value, n.payload - 1.0); break;
      case Op::Sigmoid: adj[n.a] += g * n.value * (1.0 - n.value); break;
      case Op::Softplus: adj[n.a] += g * consparse::sigmoid(nodes_[n.a].value); break;
      case Op::MaxConst:
        if (nodes_[n.a].value > n.payload) adj[n.a] += g;
        break;
      case Op::MinConst:
        if (nodes_[n.a].value < n.payload) adj[n.a] += g;
        break;
      case Op::AddConst: adj[n.a] += g; break;
      case Op::MulConst: adj[n.a] += g * n.payload; break;
    }
  }
}

std::vector<double> Tape::gradient(Var output, std::span<const Var> wrt) const {
  std::int32_t lo = output.id();
  for (const Var& w : wrt) {
    check_same(w);
    lo = std::min(lo, w.id());
  }
  std::vector<double> adj;
  adjoints(output, adj, lo);
  std::vector<double> out(wrt.size(), 0.0);
  for (std::size_t i = 0; i < wrt.size(); ++i)
    if (wrt[i].id() <= output.id()) out[i] = adj[wrt[i].id()];
  for (double g : out)
    if (!std::isfinite(g)) throw Error(ErrorKind::NonFiniteValue, "adjoint");
  return out;
}

std::vector<Var> Tape::gradient_graph(Var output, std::span<const Var> wrt) {
  check_same(output);
  const std::int32_t hi = output.id();
  std::int32_t lo = hi;
  for (const Var& w : wrt) {
    check_same(w);
    lo = std::min(lo, w.id());
  }
  const std::size_t span_n = static_cast<std::size_t>(hi - lo) + 1;

  // only nodes that depend on some wrt entry carry a nonzero adjoint
  std::vector<char>& dep = dep_scratch_;
  dep.assign(span_n, 0);
  for (const Var& w : wrt)
    if (w.id() <= hi) dep[w.id() - lo] = 1;
  for (std::int32_t k = lo; k <= hi; ++k) {
    if (dep[k - lo]) continue;
    const Node& n = nodes_[k];
    bool d = (n.a >= lo && dep[n.a - lo]) || (n.b >= lo && dep[n.b - lo]);
    dep[k - lo] = d ? 1 : 0;
  }

  std::vector<std::int32_t>& adj = adj_scratch_;
  adj.assign(span_n, -1);
  std::vector<Var> out(wrt.size());
  if (!dep[hi - lo]) {
    for (auto& o : out) o = constant(0.0);
    return out;
  }
  const std::int32_t one = constant(1.0).id();
  adj[hi - lo] = one;

  auto accumulate = [&](std::int32_t parent, Var contrib) {
    std::int32_t& slot = adj[parent - lo];
    if (slot < 0)
      slot = contrib.id();
    else
      slot = binary(Op::Add, Var(this, slot), contrib).id();
  };
  auto live = [&](std::int32_t p) { return p >= lo && dep[p - lo]; };

  for (std::int32_t k = hi; k >= lo; --k) {
    if (!dep[k - lo] || adj[k - lo] < 0) continue;
    const Node n = nodes_[k];  // copy: recording below may reallocate
    if (n.op == Op::Leaf || n.op == Op::Const) continue;
    Var g(this, adj[k - lo]);
    const bool unit = adj[k - lo] == one;
    auto scaled = [&](Var partial) { return unit ? partial : binary(Op::Mul, g, partial); };
    Var self(this, k);
    Var a(this, n.a);
    switch (n.op) {
      case Op::Add:
        if (live(n.a)) accumulate(n.a, g);
        if (live(n.b)) accumulate(n.b, g);
        break;
      case Op::Sub:
        if (live(n.a)) accumulate(n.a, g);
        if (live(n.b)) accumulate(n.b, unary(Op::Neg, g));
        break;
      case Op::Mul:
        if (live(n.a)) accumulate(n.a, scaled(Var(this, n.b)));
        if (live(n.b)) accumulate(n.b, scaled(a));
        break;
      case Op::Neg:
        if (live(n.a)) accumulate(n.a, unary(Op::Neg, g));
        break;
      case Op::Recip:
        if (live(n.a)) accumulate(n.a, unary(Op::Neg, scaled(binary(Op::Mul, self, self))));
        break;
      case Op::Exp:
        if (live(n.a)) accumulate(n.a, scaled(self));
        break;
      case Op::Ln:
        if (live(n.a)) accumulate(n.a, scaled(unary(Op::Recip, a)));
        break;
      case Op::PowConst:
        if (live(n.a)) {
          Var d = n.payload == 1.0 ? constant(1.0)
                                   : unary(Op::MulConst, unary(Op::PowConst, a, n.payload - 1.0), n.payload);
          accumulate(n.a, scaled(d));
        }
        break;
      case Op::Sigmoid:
        if (live(n.a)) {
          Var one_minus = unary(Op::AddConst, unary(Op::Neg, self), 1.0);
          accumulate(n.a, scaled(binary(Op::Mul, self, one_minus)));
        }
        break;
      case Op::Softplus:
        if (live(n.a)) accumulate(n.a, scaled(unary(Op::Sigmoid, a)));
        break;
      case Op::MaxConst:
        if (live(n.a) && nodes_[n.a].value > n.payload) accumulate(n.a, g);
        break;
      case Op::MinConst:
        if (live(n.a) && nodes_[n.a].value < n.payload) accumulate(n.a, g);
        break;
      case Op::AddConst:
        if (live(n.a)) accumulate(n.a, g);
        break;
      case Op::MulConst:
        if (live(n.a)) accumulate(n.a, unary(Op::MulConst, g, n.payload));
        break;
      default: break;
    }
  }

  for (std::size_t i = 0; i < wrt.size(); ++i) {
    std::int32_t id = wrt[i].id();
    if (id > hi || adj[id - lo] < 0)
      out[i] = constant(0.0);
    else
      out[i] = Var(this, adj[id - lo]);
  }
  return out;
}

std::vector<double> Tape::gradient_of_gradient(Var output, Var inner, std::span<const Var> outer) {
  Var g = gradient_graph(output, std::span<const Var>(&inner, 1))[0];
  return gradient(g, outer);
}

// operators

Var operator+(Var a, Var b) { return a.tape()->binary(Op::Add, a, b); }
Var operator-(Var a, Var b) { return a.tape()->binary(Op::Sub, a, b); }
Var operator*(Var a, Var b) { return a.tape()->binary(Op::Mul, a, b); }
Var operator/(Var a, Var b) { return a * recip(b); }
Var operator-(Var a) { return a.tape()->unary(Op::Neg, a); }
Var operator+(Var a, double c) { return a.tape()->unary(Op::AddConst, a, c); }
Var operator+(double c, Var a) { return a + c; }
Var operator-(Var a, double c) { return a + (-c); }
Var operator-(double c, Var a) { return (-a) + c; }
Var operator*(Var a, double c) { return a.tape()->unary(Op::MulConst, a, c); }
Var operator*(double c, Var a) { return a * c; }
Var operator/(Var a, double c) { return a * (1.0 / c); }
Var operator/(double c, Var a) { return recip(a) * c; }

Var exp(Var a) { return a.tape()->unary(Op::Exp, a); }
Var log(Var a) { return a.tape()->unary(Op::Ln, a); }
Var pow(Var a, double c) { return a.tape()->unary(Op::PowConst, a, c); }
Var sigmoid(Var a) { return a.tape()->unary(Op::Sigmoid, a); }
Var softplus(Var a) { return a.tape()->unary(Op::Softplus, a); }
Var max_const(Var a, double c) { return a.tape()->unary(Op::MaxConst, a, c); }
Var min_const(Var a, double c) { return a.tape()->unary(Op::MinConst, a, c); }
Var recip(Var a) { return a.tape()->unary(Op::Recip, a); }

}  // namespace consparse
