#include "consparse/symbolic.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <unordered_map>

#include "consparse/errors.hpp"
#include "consparse/hyper.hpp"

namespace consparse {

const char* expr_kind_name(ExprKind k) {
  switch (k) {
    case ExprKind::Const: return "const";
    case ExprKind::Symbol: return "symbol";
    case ExprKind::Add: return "add";
    case ExprKind::Mul: return "mul";
    case ExprKind::Pow: return "pow";
    case ExprKind::Exp: return "exp";
    case ExprKind::Log: return "log";
    case ExprKind::Sigmoid: return "sigmoid";
  }
  return "?";
}

namespace {

ExprPtr make(ExprKind k, std::vector<ExprPtr> ch) {
  auto n = std::make_shared<ExprNode>();
  n->kind = k;
  n->children = std::move(ch);
  return n;
}

}  // namespace

namespace ex {
ExprPtr num(double v) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprKind::Const;
  n->value = v;
  return n;
}
ExprPtr sym(const std::string& name) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprKind::Symbol;
  n->name = name;
  return n;
}
ExprPtr add(std::vector<ExprPtr> terms) { return make(ExprKind::Add, std::move(terms)); }
ExprPtr mul(std::vector<ExprPtr> factors) { return make(ExprKind::Mul, std::move(factors)); }
ExprPtr pow(ExprPtr base, ExprPtr exponent) { return make(ExprKind::Pow, {std::move(base), std::move(exponent)}); }
ExprPtr exp(ExprPtr x) { return make(ExprKind::Exp, {std::move(x)}); }
ExprPtr log(ExprPtr x) { return make(ExprKind::Log, {std::move(x)}); }
ExprPtr sigmoid(ExprPtr x) { return make(ExprKind::Sigmoid, {std::move(x)}); }
}  // namespace ex

bool is_const(const ExprPtr& e, double* v) {
  if (e->kind != ExprKind::Const) return false;
  if (v) *v = e->value;
  return true;
}

double evaluate(const ExprPtr& e, const Bindings& b) {
  switch (e->kind) {
    case ExprKind::Const: return e->value;
    case ExprKind::Symbol: {
      auto it = b.find(e->name);
      if (it == b.end()) throw Error(ErrorKind::InvalidArgument, "unbound symbol " + e->name);
      return it->second;
    }
    case ExprKind::Add: {
      double s = 0.0;
      for (const auto& c : e->children) s += evaluate(c, b);
      return s;
    }
    case ExprKind::Mul: {
      double p = 1.0;
      for (const auto& c : e->children) p *= evaluate(c, b);
      return p;
    }
    case ExprKind::Pow: return std::pow(evaluate(e->children[0], b), evaluate(e->children[1], b));
    case ExprKind::Exp: return std::exp(evaluate(e->children[0], b));
    case ExprKind::Log: return std::log(evaluate(e->children[0], b));
    case ExprKind::Sigmoid: return sigmoid(evaluate(e->children[0], b));
  }
  return 0.0;
}

std::size_t node_count(const ExprPtr& e) {
  std::size_t n = 1;
  for (const auto& c : e->children) n += node_count(c);
  return n;
}

void collect_symbols(const ExprPtr& e, std::vector<std::string>& out) {
  if (e->kind == ExprKind::Symbol) {
    if (std::find(out.begin(), out.end(), e->name) == out.end()) out.push_back(e->name);
    return;
  }
  for (const auto& c : e->children) collect_symbols(c, out);
}

// ---------------------------------------------------------------- simplify

namespace {

std::string key_of(const ExprPtr& e) { return render(e, RenderFormat::Plain, -1); }

ExprPtr simp(const ExprPtr& e);

// split c * rest
std::pair<double, ExprPtr> split_coef(const ExprPtr& t) {
  if (t->kind == ExprKind::Mul && !t->children.empty() && t->children[0]->kind == ExprKind::Const) {
    std::vector<ExprPtr> rest(t->children.begin() + 1, t->children.end());
    if (rest.size() == 1) return {t->children[0]->value, rest[0]};
    return {t->children[0]->value, ex::mul(std::move(rest))};
  }
  return {1.0, t};
}

ExprPtr scaled(double c, const ExprPtr& rest) {
  if (c == 0.0) return ex::num(0.0);
  // unit coefficients are kept on bare symbols so linear forms print uniformly
  if (c == 1.0 && rest->kind != ExprKind::Symbol) return rest;
  std::vector<ExprPtr> f{ex::num(c)};
  if (rest->kind == ExprKind::Mul)
    f.insert(f.end(), rest->children.begin(), rest->children.end());
  else
    f.push_back(rest);
  return ex::mul(std::move(f));
}

ExprPtr simp_add(std::vector<ExprPtr> raw) {
  std::vector<ExprPtr> flat;
  for (auto& t : raw) {
    ExprPtr s = simp(t);
    if (s->kind == ExprKind::Add)
      flat.insert(flat.end(), s->children.begin(), s->children.end());
    else
      flat.push_back(s);
  }
  double c = 0.0;
  std::vector<std::string> order;
  std::unordered_map<std::string, std::pair<double, ExprPtr>> groups;
  for (auto& t : flat) {
    if (t->kind == ExprKind::Const) {
      c += t->value;
      continue;
    }
    auto [w, rest] = split_coef(t);
    std::string k = key_of(rest);
    auto it = groups.find(k);
    if (it == groups.end()) {
      order.push_back(k);
      groups.emplace(k, std::make_pair(w, rest));
    } else {
      it->second.first += w;
    }
  }
  std::vector<ExprPtr> terms;
  for (const auto& k : order) {
    const auto& g = groups[k];
    if (g.first == 0.0) continue;
    terms.push_back(scaled(g.first, g.second));
  }
  if (terms.empty()) return ex::num(c);
  if (c != 0.0) terms.push_back(ex::num(c));
  if (terms.size() == 1) return terms[0];
  return ex::add(std::move(terms));
}

ExprPtr simp_exp(const ExprPtr& arg);

ExprPtr simp_mul(std::vector<ExprPtr> raw) {
  std::vector<ExprPtr> flat;
  for (auto& f : raw) {
    ExprPtr s = simp(f);
    if (s->kind == ExprKind::Mul)
      flat.insert(flat.end(), s->children.begin(), s->children.end());
    else
      flat.push_back(s);
  }
  double c = 1.0;
  std::vector<ExprPtr> exps, rest;
  for (auto& f : flat) {
    if (f->kind == ExprKind::Const)
      c *= f->value;
    else if (f->kind == ExprKind::Exp)
      exps.push_back(f->children[0]);
    else
      rest.push_back(f);
  }
  if (c == 0.0) return ex::num(0.0);
  if (exps.size() == 1) {
    rest.push_back(ex::exp(exps[0]));
  } else if (exps.size() > 1) {
    ExprPtr merged = simp_exp(simp_add(exps));
    if (merged->kind == ExprKind::Const) {
      c *= merged->value;
    } else if (merged->kind == ExprKind::Mul) {
      for (const auto& f : merged->children) {
        if (f->kind == ExprKind::Const)
          c *= f->value;
        else
          rest.push_back(f);
      }
    } else {
      rest.push_back(merged);
    }
  }
  if (rest.empty()) return ex::num(c);
  if (rest.size() == 1 && rest[0]->kind == ExprKind::Add && c != 1.0) {
    std::vector<ExprPtr> dist;
    for (const auto& t : rest[0]->children) dist.push_back(ex::mul({ex::num(c), t}));
    return simp_add(std::move(dist));
  }
  if (rest.size() == 1) return scaled(c, rest[0]);
  if (c == 1.0) return ex::mul(std::move(rest));
  rest.insert(rest.begin(), ex::num(c));
  return ex::mul(std::move(rest));
}

ExprPtr fold(double v, ExprPtr fallback) {
  if (std::isfinite(v)) return ex::num(v);
  return fallback;
}

// exp(c + sum w_i log A_i + rest) = e^c * prod A_i^w_i * exp(rest)
ExprPtr simp_exp(const ExprPtr& a) {
  double v;
  if (is_const(a, &v)) return fold(std::exp(v), ex::exp(a));
  if (a->kind == ExprKind::Log) return a->children[0];
  std::vector<ExprPtr> terms;
  if (a->kind == ExprKind::Add)
    terms = a->children;
  else
    terms = {a};
  double c = 0.0;
  std::vector<ExprPtr> factors, rest;
  bool any_log = false;
  for (const auto& t : terms) {
    if (t->kind == ExprKind::Const) {
      c += t->value;
      continue;
    }
    auto [w, r] = split_coef(t);
    if (r->kind == ExprKind::Log) {
      any_log = true;
      ExprPtr base = r->children[0];
      factors.push_back(w == 1.0 ? base : ex::pow(base, ex::num(w)));
    } else {
      rest.push_back(t);
    }
  }
  if (!any_log && (c == 0.0 || rest.empty())) return ex::exp(a);
  std::vector<ExprPtr> out;
  if (c != 0.0) {
    const double ec = std::exp(c);
    out.push_back(std::isfinite(ec) && ec > 0.0 ? ex::num(ec) : ex::exp(ex::num(c)));
  }
  out.insert(out.end(), factors.begin(), factors.end());
  if (!rest.empty()) out.push_back(ex::exp(rest.size() == 1 ? rest[0] : ex::add(rest)));
  if (out.size() == 1) return out[0];
  // factors are already simplified; only merge constants and keep order
  double k = 1.0;
  std::vector<ExprPtr> f;
  for (auto& x : out) {
    if (x->kind == ExprKind::Const)
      k *= x->value;
    else
      f.push_back(x);
  }
  if (f.empty()) return ex::num(k);
  if (k != 1.0) f.insert(f.begin(), ex::num(k));
  if (f.size() == 1) return f[0];
  return ex::mul(std::move(f));
}

ExprPtr simp(const ExprPtr& e) {
  switch (e->kind) {
    case ExprKind::Const:
    case ExprKind::Symbol: return e;
    case ExprKind::Add: return simp_add(e->children);
    case ExprKind::Mul: return simp_mul(e->children);
    case ExprKind::Pow: {
      ExprPtr b = simp(e->children[0]), x = simp(e->children[1]);
      double bv, xv;
      bool bc = is_const(b, &bv), xc = is_const(x, &xv);
      if (xc && xv == 0.0) return ex::num(1.0);
      if (xc && xv == 1.0) return b;
      if (bc && bv == 1.0) return ex::num(1.0);
      if (bc && xc) return fold(std::pow(bv, xv), ex::pow(b, x));
      return ex::pow(b, x);
    }
    case ExprKind::Exp: return simp_exp(simp(e->children[0]));
    case ExprKind::Log: {
      ExprPtr a = simp(e->children[0]);
      double v;
      if (is_const(a, &v) && v > 0.0) return ex::num(std::log(v));
      if (a->kind == ExprKind::Exp) return a->children[0];
      return ex::log(a);
    }
    case ExprKind::Sigmoid: {
      ExprPtr a = simp(e->children[0]);
      double v;
      if (is_const(a, &v)) return ex::num(sigmoid(v));
      return ex::sigmoid(a);
    }
  }
  return e;
}

}  // namespace

ExprPtr simplify(const ExprPtr& e) { return simp(e); }

// ---------------------------------------------------------------- render

namespace {

std::string fmt_num(double v, int decimals) {
  char buf[64];
  if (decimals < 0) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
  } else {
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    std::string s = buf;
    if (s[0] == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
    return s;
  }
  return buf;
}

struct Renderer {
  RenderFormat f;
  int d;

  bool latex() const { return f == RenderFormat::Latex; }

  std::string symbol(const std::string& n) const {
    if (!latex()) return n;
    if (n == "pi1") return "\\pi_{1}";
    if (n == "pi2") return "\\pi_{2}";
    if (n.size() >= 2 && std::isalpha(static_cast<unsigned char>(n[0])) &&
        std::all_of(n.begin() + 1, n.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); }))
      return n.substr(0, 1) + "_{" + n.substr(1) + "}";
    return n;
  }

  static bool negative_lead(const ExprPtr& t) {
    if (t->kind == ExprKind::Const) return t->value < 0.0;
    if (t->kind == ExprKind::Mul && !t->children.empty() && t->children[0]->kind == ExprKind::Const)
      return t->children[0]->value < 0.0;
    return false;
  }

  static ExprPtr negated(const ExprPtr& t) {
    if (t->kind == ExprKind::Const) return ex::num(-t->value);
    auto ch = t->children;
    ch[0] = ex::num(-ch[0]->value);
    return ex::mul(std::move(ch));
  }

  std::string paren(const std::string& s) const { return latex() ? "\\left(" + s + "\\right)" : "(" + s + ")"; }

  std::string add(const ExprPtr& e) const {
    std::vector<ExprPtr> terms = e->children;
    // a lone unit constant goes first: 1 + e^{...}
    bool unit_first = false;
    if (terms.size() == 2 && terms[1]->kind == ExprKind::Const && terms[1]->value == 1.0) {
      std::swap(terms[0], terms[1]);
      unit_first = true;
    }
    std::string s;
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const ExprPtr& t = terms[i];
      if (i == 0) {
        s += unit_first ? "1" : go(t);
      } else if (negative_lead(t)) {
        s += " - " + go(negated(t));
      } else {
        s += " + " + go(t);
      }
    }
    return s;
  }

  // 1/(1 + C e^{-rest}) pieces for sigmoid(c + rest)
  std::pair<std::string, std::string> sigmoid_parts(const ExprPtr& arg) const {
    double c = 0.0;
    std::vector<ExprPtr> rest;
    if (arg->kind == ExprKind::Add) {
      for (const auto& t : arg->children) {
        if (t->kind == ExprKind::Const)
          c += t->value;
        else
          rest.push_back(t);
      }
    } else if (arg->kind == ExprKind::Const) {
      c = arg->value;
    } else {
      rest.push_back(arg);
    }
    std::string den = "1";
    if (rest.empty()) {
      den += " + " + go(ex::num(std::exp(-c)));
      return {den, ""};
    }
    ExprPtr neg = simplify(ex::mul({ex::num(-1.0), rest.size() == 1 ? rest[0] : ex::add(rest)}));
    std::string e = "e^{" + go(neg) + "}";
    if (c != 0.0) e = go(ex::num(std::exp(-c))) + (latex() ? " " : "·") + e;
    den += " + " + e;
    return {den, ""};
  }

  std::string fraction(const std::string& num, const ExprPtr& sig) const {
    auto [den, unused] = sigmoid_parts(sig->children[0]);
    (void)unused;
    if (latex()) return "\\frac{" + num + "}{" + den + "}";
    return num + "/(" + den + ")";
  }

  std::string factor(const ExprPtr& x) const {
    if (x->kind == ExprKind::Add) return paren(go(x));
    if (x->kind == ExprKind::Sigmoid) return paren(go(x));
    if (x->kind == ExprKind::Const && x->value < 0.0) return paren(go(x));
    return go(x);
  }

  std::string mul(const ExprPtr& e) const {
    const auto& ch = e->children;
    std::size_t i = 0;
    std::string lead;
    double c = 1.0;
    if (ch[0]->kind == ExprKind::Const) {
      c = ch[0]->value;
      i = 1;
    }
    if (ch.size() - i == 1 && ch[i]->kind == ExprKind::Sigmoid) {
      if (c < 0.0) return "-" + fraction(go(ex::num(-c)), ch[i]);
      return fraction(go(ex::num(c)), ch[i]);
    }
    const std::string sep = latex() ? " " : "·";
    std::string s;
    if (i == 1) {
      if (c == -1.0)
        s = "-";
      else if (c == 1.0 && !(ch.size() == 2 && ch[1]->kind == ExprKind::Symbol))
        s = "";
      else if (c < 0.0)
        s = "-" + go(ex::num(-c)) + sep;
      else
        s = go(ex::num(c)) + sep;
    }
    for (std::size_t k = i; k < ch.size(); ++k) {
      if (k > i) s += sep;
      s += factor(ch[k]);
    }
    return s;
  }

  std::string go(const ExprPtr& e) const {
    switch (e->kind) {
      case ExprKind::Const: return fmt_num(e->value, d);
      case ExprKind::Symbol: return symbol(e->name);
      case ExprKind::Add: return add(e);
      case ExprKind::Mul: return mul(e);
      case ExprKind::Pow: {
        const ExprPtr& b = e->children[0];
        std::string base = go(b);
        bool atomic = b->kind == ExprKind::Symbol || (b->kind == ExprKind::Const && b->value >= 0.0);
        if (!atomic) base = paren(base);
        return base + "^{" + go(e->children[1]) + "}";
      }
      case ExprKind::Exp: return "e^{" + go(e->children[0]) + "}";
      case ExprKind::Log: return (latex() ? "\\log" : "log") + paren(go(e->children[0]));
      case ExprKind::Sigmoid: return fraction("1", e);
    }
    return "";
  }
};

}  // namespace

std::string render(const ExprPtr& e, RenderFormat fmt, int decimals) { return Renderer{fmt, decimals}.go(e); }

// ---------------------------------------------------------------- parse

namespace {

struct Parser {
  const std::string& s;
  std::size_t i = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorKind::ParseError, what + " at offset " + std::to_string(i));
  }

  void ws() {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  }

  bool eat(const char* tok) {
    ws();
    std::size_t n = std::char_traits<char>::length(tok);
    if (s.compare(i, n, tok) == 0) {
      i += n;
      return true;
    }
    return false;
  }

  void expect(const char* tok) {
    if (!eat(tok)) fail(std::string("expected '") + tok + "'");
  }

  ExprPtr expr() {
    std::vector<ExprPtr> terms{term()};
    for (;;) {
      if (eat("+"))
        terms.push_back(term());
      else if (eat("-"))
        terms.push_back(ex::mul({ex::num(-1.0), term()}));
      else
        break;
    }
    return terms.size() == 1 ? terms[0] : ex::add(std::move(terms));
  }

  ExprPtr term() {
    std::vector<ExprPtr> f{unary()};
    for (;;) {
      if (eat("·") || eat("*"))
        f.push_back(unary());
      else if (eat("/"))
        f.push_back(ex::pow(unary(), ex::num(-1.0)));
      else
        break;
    }
    return f.size() == 1 ? f[0] : ex::mul(std::move(f));
  }

  ExprPtr unary() {
    if (eat("-")) return ex::mul({ex::num(-1.0), unary()});
    if (eat("+")) return unary();
    return power();
  }

  ExprPtr power() {
    ExprPtr base = atom();
    if (eat("^")) {
      ExprPtr x;
      if (eat("{")) {
        x = expr();
        expect("}");
      } else {
        x = unary();
      }
      if (base->kind == ExprKind::Symbol && base->name == "e") return ex::exp(x);
      return ex::pow(base, x);
    }
    return base;
  }

  ExprPtr number() {
    std::size_t st = i;
    while (i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '.')) ++i;
    if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
      std::size_t j = i + 1;
      if (j < s.size() && (s[j] == '+' || s[j] == '-')) ++j;
      if (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) {
        i = j;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
      }
    }
    std::string tok = s.substr(st, i - st);
    char* end = nullptr;
    double v = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size()) fail("bad number '" + tok + "'");
    return ex::num(v);
  }

  ExprPtr atom() {
    ws();
    if (i >= s.size()) fail("unexpected end");
    char ch = s[i];
    if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') return number();
    if (ch == '(') {
      ++i;
      ExprPtr e = expr();
      expect(")");
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      std::size_t st = i;
      while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
      std::string id = s.substr(st, i - st);
      ws();
      if (i < s.size() && s[i] == '(') {
        ++i;
        ExprPtr a = expr();
        expect(")");
        if (id == "log" || id == "ln") return ex::log(a);
        if (id == "exp") return ex::exp(a);
        if (id == "sigmoid") return ex::sigmoid(a);
        fail("unknown function " + id);
      }
      return ex::sym(id);
    }
    fail(std::string("unexpected character '") + ch + "'");
  }
};

}  // namespace

ExprPtr parse_plain(const std::string& text) {
  Parser p{text};
  ExprPtr e = p.expr();
  p.ws();
  if (p.i != text.size()) p.fail("trailing input");
  return e;
}

// ---------------------------------------------------------------- json

nlohmann::json expr_to_json(const ExprPtr& e) {
  nlohmann::json j;
  j["kind"] = expr_kind_name(e->kind);
  if (e->kind == ExprKind::Const)
    j["value"] = e->value;
  else if (e->kind == ExprKind::Symbol)
    j["name"] = e->name;
  else {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& c : e->children) a.push_back(expr_to_json(c));
    j["args"] = a;
  }
  return j;
}

ExprPtr expr_from_json(const nlohmann::json& j) {
  try {
    std::string k = j.at("kind").get<std::string>();
    if (k == "const") return ex::num(j.at("value").get<double>());
    if (k == "symbol") return ex::sym(j.at("name").get<std::string>());
    std::vector<ExprPtr> ch;
    for (const auto& c : j.at("args")) ch.push_back(expr_from_json(c));
    auto need = [&](std::size_t n) {
      if (ch.size() != n) throw Error(ErrorKind::ParseError, k + " takes " + std::to_string(n) + " arguments");
    };
    if (k == "add") return ex::add(std::move(ch));
    if (k == "mul") return ex::mul(std::move(ch));
    if (k == "pow") {
      need(2);
      return ex::pow(ch[0], ch[1]);
    }
    need(1);
    if (k == "exp") return ex::exp(ch[0]);
    if (k == "log") return ex::log(ch[0]);
    if (k == "sigmoid") return ex::sigmoid(ch[0]);
    throw Error(ErrorKind::ParseError, "unknown node kind " + k);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, e.what());
  }
}

// ---------------------------------------------------------------- extraction

ExprPtr network_expression(const Network& net, const std::vector<double>& theta,
                           const std::vector<std::string>& input_names) {
  if (theta.size() != net.size()) throw Error(ErrorKind::ShapeError, "parameter count mismatch");
  const int n0 = net.n_inputs();
  if (static_cast<int>(input_names.size()) != n0) throw Error(ErrorKind::ShapeError, "input name count mismatch");
  if (net.n_outputs() != 1) throw Error(ErrorKind::ShapeError, "expression export needs a scalar network");

  // scaled inputs as linear forms a_m * x_m + c_m
  std::vector<double> sc(n0, 1.0), off(n0, 0.0);
  for (int m = 0; m < n0; ++m) {
    if (!net.input_scale.empty()) sc[m] = net.input_scale[m];
    if (!net.input_offset.empty()) off[m] = net.input_offset[m];
  }
  std::vector<ExprPtr> syms;
  for (const auto& n : input_names) syms.push_back(ex::sym(n));

  auto add_input = [&](std::vector<ExprPtr>& terms, double& c, double w, int m) {
    terms.push_back(ex::mul({ex::num(w * sc[m]), syms[m]}));
    c -= w * sc[m] * off[m];
  };

  std::vector<ExprPtr> cur;
  bool first = true;
  for (const LayerLayout& L : net.layers()) {
    std::vector<ExprPtr> next;
    for (int o = 0; o < L.out; ++o) {
      double c = theta[L.b + o];
      std::vector<ExprPtr> terms;
      const std::size_t row = L.w + static_cast<std::size_t>(o) * L.in;
      for (int k = 0; k < L.in; ++k) {
        double w = theta[row + k];
        if (w == 0.0) continue;
        if (first)
          add_input(terms, c, w, k);
        else
          terms.push_back(ex::mul({ex::num(w), cur[k]}));
      }
      if (L.passthrough) {
        const std::size_t prow = L.p + static_cast<std::size_t>(o) * n0;
        for (int m = 0; m < n0; ++m)
          if (theta[prow + m] != 0.0) add_input(terms, c, theta[prow + m], m);
      }
      terms.push_back(ex::num(c));
      ExprPtr z = simplify(ex::add(std::move(terms)));
      if (L.hidden) {
        if (net.activation == Activation::Softplus)
          z = simplify(ex::log(ex::add({ex::num(1.0), ex::exp(z)})));
        else
          z = simplify(ex::sigmoid(z));
      }
      next.push_back(z);
    }
    cur = std::move(next);
    first = false;
  }
  return cur[0];
}

Wrapper parse_wrapper(const std::string& k) {
  if (k == "raw") return Wrapper::Raw;
  if (k == "hyper-compressible" || k == "compressible") return Wrapper::Compressible;
  if (k == "hyper-incompressible" || k == "incompressible") return Wrapper::Incompressible;
  if (k == "yield") return Wrapper::Yield;
  if (k == "hardening") return Wrapper::Hardening;
  throw Error(ErrorKind::InvalidArgument, "unknown problem kind " + k);
}

std::vector<std::string> wrapper_inputs(Wrapper w) {
  switch (w) {
    case Wrapper::Compressible: return {"I1", "I2", "J"};
    case Wrapper::Incompressible: return {"I1", "I2"};
    case Wrapper::Yield: return {"pi1", "pi2"};
    case Wrapper::Hardening: return {"r"};
    case Wrapper::Raw: break;
  }
  return {};
}

ExprPtr extract_expression(const Network& net, Wrapper w) {
  std::vector<std::string> names = wrapper_inputs(w);
  if (w == Wrapper::Raw)
    for (int m = 0; m < net.n_inputs(); ++m) names.push_back("x" + std::to_string(m + 1));
  std::vector<double> theta = test_parameters(net);
  ExprPtr nn = network_expression(net, theta, names);
  const ExprPtr J = ex::sym("J");
  auto jm1 = [&] { return ex::add({J, ex::num(-1.0)}); };
  if (w == Wrapper::Compressible) {
    CompressiblePotential pot(net);
    return simplify(ex::add({nn, ex::num(-pot.reference_energy()), ex::mul({ex::num(-pot.slope()), jm1()})}));
  }
  if (w == Wrapper::Incompressible) {
    IncompressiblePotential pot(net);
    ExprPtr body = simplify(ex::add({nn, ex::num(-pot.reference_energy()), ex::mul({ex::num(-pot.slope()), jm1()})}));
    // kept outside simplify so the pressure term stays literal
    ExprPtr pressure = ex::mul({ex::num(-1.0), ex::sym("p"), jm1()});
    if (is_const(body) && body->value == 0.0) return pressure;
    std::vector<ExprPtr> t;
    if (body->kind == ExprKind::Add)
      t = body->children;
    else
      t = {body};
    t.push_back(pressure);
    return ex::add(std::move(t));
  }
  return nn;
}

// ---------------------------------------------------------------- families

namespace {

bool is_linear(const ExprPtr& e) {
  auto lin_term = [](const ExprPtr& t) {
    if (t->kind == ExprKind::Const || t->kind == ExprKind::Symbol) return true;
    return t->kind == ExprKind::Mul && t->children.size() == 2 && t->children[0]->kind == ExprKind::Const &&
           t->children[1]->kind == ExprKind::Symbol;
  };
  if (e->kind == ExprKind::Add) return std::all_of(e->children.begin(), e->children.end(), lin_term);
  return lin_term(e);
}

bool is_softplus_log(const ExprPtr& e);

// factor inside a softplus argument: e^{lin}, (1 + ...)^{w}, positive constant, log terms of deeper layers
bool softplus_factor(const ExprPtr& f) {
  if (f->kind == ExprKind::Const) return f->value > 0.0;
  if (f->kind == ExprKind::Exp) return is_linear(f->children[0]);
  if (f->kind == ExprKind::Pow) {
    const ExprPtr& b = f->children[0];
    return f->children[1]->kind == ExprKind::Const && b->kind == ExprKind::Add &&
           is_softplus_log(ex::log(b));
  }
  if (f->kind == ExprKind::Add) return is_softplus_log(ex::log(f));
  return false;
}

bool is_softplus_log(const ExprPtr& e) {
  if (e->kind != ExprKind::Log) return false;
  const ExprPtr& a = e->children[0];
  if (a->kind != ExprKind::Add || a->children.size() != 2) return false;
  const ExprPtr* one = nullptr;
  const ExprPtr* other = nullptr;
  for (const auto& c : a->children) {
    if (c->kind == ExprKind::Const && c->value == 1.0)
      one = &c;
    else
      other = &c;
  }
  if (!one || !other) return false;
  const ExprPtr& p = *other;
  if (p->kind == ExprKind::Mul) return std::all_of(p->children.begin(), p->children.end(), softplus_factor);
  return softplus_factor(p);
}

}  // namespace

bool is_softplus_sum_family(const ExprPtr& e) {
  auto ok = [](const ExprPtr& t) {
    if (is_linear(t)) return true;
    auto [w, r] = split_coef(t);
    (void)w;
    if (is_softplus_log(r)) return true;
    // -p (J - 1)
    if (r->kind == ExprKind::Mul && r->children.size() == 2 && r->children[0]->kind == ExprKind::Symbol &&
        r->children[0]->name == "p")
      return true;
    return false;
  };
  if (e->kind == ExprKind::Add) return std::all_of(e->children.begin(), e->children.end(), ok);
  return ok(e);
}

bool is_sigmoid_rational_family(const ExprPtr& e) {
  auto ok = [](const ExprPtr& t) {
    if (t->kind == ExprKind::Const) return true;
    auto [w, r] = split_coef(t);
    (void)w;
    return r->kind == ExprKind::Sigmoid && is_linear(r->children[0]);
  };
  if (e->kind == ExprKind::Add) return std::all_of(e->children.begin(), e->children.end(), ok);
  return ok(e);
}

}  // namespace consparse
