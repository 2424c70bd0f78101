#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "consparse/errors.hpp"

namespace consparse {

// Add/Mul/... are the public op kinds. Sub, AddConst, MulConst and Const are
// internal shortcuts that save nodes.
enum class Op : std::uint8_t {
  Leaf,
  Const,
  Add,
  Sub,
  Mul,
  Neg,
  Recip,
  Exp,
  Ln,
  PowConst,
  Sigmoid,
  Softplus,
  MaxConst,
  MinConst,
  AddConst,
  MulConst,
};

const char* op_name(Op op);

inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

inline double softplus(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

inline double max_const(double x, double c) { return x > c ? x : c; }
inline double min_const(double x, double c) { return x < c ? x : c; }
inline double recip(double x) { return 1.0 / x; }
// plain overloads so templated code can call exp/log/pow unqualified
inline double exp(double x) { return std::exp(x); }
inline double log(double x) { return std::log(x); }
inline double pow(double x, double c) { return std::pow(x, c); }

class Tape;

class Var {
 public:
  Var() = default;
  Var(Tape* t, std::int32_t id) : tape_(t), id_(id) {}

  double value() const;
  std::int32_t id() const { return id_; }
  Tape* tape() const { return tape_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  Tape* tape_ = nullptr;
  std::int32_t id_ = -1;
};

class Tape {
 public:
  struct Node {
    double value;
    double payload;
    std::int32_t a;
    std::int32_t b;
    Op op;
  };

  Tape() { nodes_.reserve(1024); }
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var variable(double v);
  Var constant(double v);

  // Generic entry point; payload is the constant for pow/max/min/addc/mulc.
  Var record(Op op, std::span<const Var> inputs, double payload = 0.0);

  Var unary(Op op, Var a, double payload = 0.0);
  Var binary(Op op, Var a, Var b);

  std::vector<double> gradient(Var output, std::span<const Var> wrt) const;
  // Fills adj[id] for every id <= output.id(); cheaper when many leaves are wanted.
  void adjoints(Var output, std::vector<double>& adj, std::int32_t lowest = 0) const;

  // The backward sweep recorded as new tape nodes, so the result can be
  // differentiated again.
  std::vector<Var> gradient_graph(Var output, std::span<const Var> wrt);

  std::vector<double> gradient_of_gradient(Var output, Var inner, std::span<const Var> outer);

  void clear() { nodes_.clear(); }
  std::size_t size() const { return nodes_.size(); }
  void reserve(std::size_t n) { nodes_.reserve(n); }
  double value(std::int32_t id) const { return nodes_[static_cast<std::size_t>(id)].value; }
  const Node& node(std::int32_t id) const { return nodes_[static_cast<std::size_t>(id)]; }

 private:
  std::int32_t push(Op op, double value, std::int32_t a, std::int32_t b, double payload);
  void check_same(Var a) const;

  std::vector<Node> nodes_;
  std::vector<char> dep_scratch_;
  std::vector<std::int32_t> adj_scratch_;
};

inline double Var::value() const { return tape_->value(id_); }

// arithmetic
Var operator+(Var a, Var b);
Var operator-(Var a, Var b);
Var operator*(Var a, Var b);
Var operator/(Var a, Var b);
Var operator-(Var a);
Var operator+(Var a, double c);
Var operator+(double c, Var a);
Var operator-(Var a, double c);
Var operator-(double c, Var a);
Var operator*(Var a, double c);
Var operator*(double c, Var a);
Var operator/(Var a, double c);
Var operator/(double c, Var a);
inline Var& operator+=(Var& a, Var b) { return a = a + b; }
inline Var& operator-=(Var& a, Var b) { return a = a - b; }
inline Var& operator*=(Var& a, Var b) { return a = a * b; }
inline Var& operator+=(Var& a, double c) { return a = a + c; }
inline Var& operator*=(Var& a, double c) { return a = a * c; }

Var exp(Var a);
Var log(Var a);
Var pow(Var a, double c);
Var sigmoid(Var a);
Var softplus(Var a);
Var max_const(Var a, double c);
Var min_const(Var a, double c);
Var recip(Var a);

// value extraction that works for both scalar kinds
inline double value_of(double x) { return x; }
inline double value_of(Var x) { return x.value(); }

}  // namespace consparse
