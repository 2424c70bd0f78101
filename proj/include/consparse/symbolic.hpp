#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "consparse/nets.hpp"
#include "json.hpp"

namespace consparse {

enum class ExprKind { Const, Symbol, Add, Mul, Pow, Exp, Log, Sigmoid };
const char* expr_kind_name(ExprKind k);

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
  ExprKind kind = ExprKind::Const;
  double value = 0.0;
  std::string name;
  std::vector<ExprPtr> children;
};

namespace ex {
ExprPtr num(double v);
ExprPtr sym(const std::string& name);
ExprPtr add(std::vector<ExprPtr> terms);
ExprPtr mul(std::vector<ExprPtr> factors);
ExprPtr pow(ExprPtr base, ExprPtr exponent);
ExprPtr exp(ExprPtr x);
ExprPtr log(ExprPtr x);
ExprPtr sigmoid(ExprPtr x);
}  // namespace ex

using Bindings = std::map<std::string, double>;

double evaluate(const ExprPtr& e, const Bindings& b);
bool is_const(const ExprPtr& e, double* v = nullptr);
std::size_t node_count(const ExprPtr& e);
void collect_symbols(const ExprPtr& e, std::vector<std::string>& out);

// value-preserving rewrite: constant folding, zero pruning, like-term merging,
// log(exp(x)) = x, exp(a + w log A) = e^a A^w
ExprPtr simplify(const ExprPtr& e);

enum class RenderFormat { Plain, Latex };
// decimals < 0 prints every constant with full round-trip precision
std::string render(const ExprPtr& e, RenderFormat fmt = RenderFormat::Plain, int decimals = 3);
ExprPtr parse_plain(const std::string& text);

nlohmann::json expr_to_json(const ExprPtr& e);
ExprPtr expr_from_json(const nlohmann::json& j);

// ---- extraction from trained models (test-time gates)

ExprPtr network_expression(const Network& net, const std::vector<double>& theta,
                           const std::vector<std::string>& input_names);

enum class Wrapper { Raw, Compressible, Incompressible, Yield, Hardening };
Wrapper parse_wrapper(const std::string& problem_kind);
std::vector<std::string> wrapper_inputs(Wrapper w);

// includes the normalisation terms of the physics wrapper; incompressible
// forms keep the literal -p(J - 1) with p and J free symbols
ExprPtr extract_expression(const Network& net, Wrapper w);

// family checks used for reporting
bool is_softplus_sum_family(const ExprPtr& e);
bool is_sigmoid_rational_family(const ExprPtr& e);

}  // namespace consparse
