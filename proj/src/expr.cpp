#include "lipforge/expr.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

namespace lipforge {

namespace detail {

enum class Op { Const, Var, Add, Sub, Mul, Div, Neg, Sin, Cos, Exp, Abs, Min, Max };

struct Node {
  Op op = Op::Const;
  double value = 0.0;  // Const
  int var = 0;         // Var
  std::shared_ptr<const Node> a, b;
  std::size_t pos = 0;  // source offset, for error messages
};

namespace {

constexpr double kKinkTol = 1e-9;

using NodePtr = std::shared_ptr<const Node>;

NodePtr make(Op op, NodePtr a = nullptr, NodePtr b = nullptr, std::size_t pos = 0) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  n->pos = pos;
  return n;
}

double eval_node(const Node& n, const Vec& x) {
  switch (n.op) {
    case Op::Const: return n.value;
    case Op::Var:
      if (n.var >= x.size()) throw ExprError("variable index exceeds dimension", n.pos);
      return x[n.var];
    case Op::Add: return eval_node(*n.a, x) + eval_node(*n.b, x);
    case Op::Sub: return eval_node(*n.a, x) - eval_node(*n.b, x);
    case Op::Mul: return eval_node(*n.a, x) * eval_node(*n.b, x);
    case Op::Div: {
      double den = eval_node(*n.b, x);
      if (den == 0.0) throw ExprError("division by zero", n.pos);
      return eval_node(*n.a, x) / den;
    }
    case Op::Neg: return -eval_node(*n.a, x);
    case Op::Sin: return std::sin(eval_node(*n.a, x));
    case Op::Cos: return std::cos(eval_node(*n.a, x));
    case Op::Exp: return std::exp(eval_node(*n.a, x));
    case Op::Abs: return std::abs(eval_node(*n.a, x));
    case Op::Min: return std::min(eval_node(*n.a, x), eval_node(*n.b, x));
    case Op::Max: return std::max(eval_node(*n.a, x), eval_node(*n.b, x));
  }
  return 0.0;
}

struct Dual {
  double v = 0.0;
  Vec g;
  bool kink = false;
};

Dual grad_node(const Node& n, const Vec& x) {
  const int d = static_cast<int>(x.size());
  Dual r;
  r.g = Vec::Zero(d);
  switch (n.op) {
    case Op::Const:
      r.v = n.value;
      return r;
    case Op::Var:
      if (n.var >= d) throw ExprError("variable index exceeds dimension", n.pos);
      r.v = x[n.var];
      r.g[n.var] = 1.0;
      return r;
    case Op::Add: {
      Dual a = grad_node(*n.a, x), b = grad_node(*n.b, x);
      r.v = a.v + b.v;
      r.g = a.g + b.g;
      r.kink = a.kink || b.kink;
      return r;
    }
    case Op::Sub: {
      Dual a = grad_node(*n.a, x), b = grad_node(*n.b, x);
      r.v = a.v - b.v;
      r.g = a.g - b.g;
      r.kink = a.kink || b.kink;
      return r;
    }
    case Op::Mul: {
      Dual a = grad_node(*n.a, x), b = grad_node(*n.b, x);
      r.v = a.v * b.v;
      r.g = a.v * b.g + b.v * a.g;
      r.kink = a.kink || b.kink;
      return r;
    }
    case Op::Div: {
      Dual a = grad_node(*n.a, x), b = grad_node(*n.b, x);
      if (b.v == 0.0) throw ExprError("division by zero", n.pos);
      r.v = a.v / b.v;
      r.g = (a.g - r.v * b.g) / b.v;
      r.kink = a.kink || b.kink;
      return r;
    }
    case Op::Neg: {
      Dual a = grad_node(*n.a, x);
      r.v = -a.v;
      r.g = -a.g;
      r.kink = a.kink;
      return r;
    }
    case Op::Sin: {
      Dual a = grad_node(*n.a, x);
      r.v = std::sin(a.v);
      r.g = std::cos(a.v) * a.g;
      r.kink = a.kink;
      return r;
    }
    case Op::Cos: {
      Dual a = grad_node(*n.a, x);
      r.v = std::cos(a.v);
      r.g = -std::sin(a.v) * a.g;
      r.kink = a.kink;
      return r;
    }
    case Op::Exp: {
      Dual a = grad_node(*n.a, x);
      r.v = std::exp(a.v);
      r.g = r.v * a.g;
      r.kink = a.kink;
      return r;
    }
    case Op::Abs: {
      Dual a = grad_node(*n.a, x);
      r.v = std::abs(a.v);
      // One-sided from the positive direction at the kink.
      r.g = (a.v >= 0.0 ? 1.0 : -1.0) * a.g;
      r.kink = a.kink || std::abs(a.v) < kKinkTol;
      return r;
    }
    case Op::Min: {
      Dual a = grad_node(*n.a, x), b = grad_node(*n.b, x);
      bool pick_a = a.v <= b.v;
      r.v = pick_a ? a.v : b.v;
      r.g = pick_a ? a.g : b.g;
      r.kink = a.kink || b.kink || std::abs(a.v - b.v) < kKinkTol;
      return r;
    }
    case Op::Max: {
      Dual a = grad_node(*n.a, x), b = grad_node(*n.b, x);
      bool pick_a = a.v >= b.v;
      r.v = pick_a ? a.v : b.v;
      r.g = pick_a ? a.g : b.g;
      r.kink = a.kink || b.kink || std::abs(a.v - b.v) < kKinkTol;
      return r;
    }
  }
  return r;
}

int max_var(const Node& n) {
  int m = -1;
  if (n.op == Op::Var) m = n.var;
  if (n.a) m = std::max(m, max_var(*n.a));
  if (n.b) m = std::max(m, max_var(*n.b));
  return m;
}

void print_node(const Node& n, std::ostream& os) {
  switch (n.op) {
    case Op::Const: {
      std::ostringstream tmp;
      tmp.precision(17);
      tmp << n.value;
      std::string s = tmp.str();
      if (n.value < 0.0) {
        os << "(" << s << ")";
      } else {
        os << s;
      }
      return;
    }
    case Op::Var: os << "x" << (n.var + 1); return;
    case Op::Add: os << "("; print_node(*n.a, os); os << " + "; print_node(*n.b, os); os << ")"; return;
    case Op::Sub: os << "("; print_node(*n.a, os); os << " - "; print_node(*n.b, os); os << ")"; return;
    case Op::Mul: os << "("; print_node(*n.a, os); os << " * "; print_node(*n.b, os); os << ")"; return;
    case Op::Div: os << "("; print_node(*n.a, os); os << " / "; print_node(*n.b, os); os << ")"; return;
    case Op::Neg: os << "(-"; print_node(*n.a, os); os << ")"; return;
    case Op::Sin: os << "sin("; print_node(*n.a, os); os << ")"; return;
    case Op::Cos: os << "cos("; print_node(*n.a, os); os << ")"; return;
    case Op::Exp: os << "exp("; print_node(*n.a, os); os << ")"; return;
    case Op::Abs: os << "abs("; print_node(*n.a, os); os << ")"; return;
    case Op::Min: os << "min("; print_node(*n.a, os); os << ", "; print_node(*n.b, os); os << ")"; return;
    case Op::Max: os << "max("; print_node(*n.a, os); os << ", "; print_node(*n.b, os); os << ")"; return;
  }
}

// Recursive-descent parser for the grammar:
//   expr   := term (("+"|"-") term)*
//   term   := factor (("*"|"/") factor)*
//   factor := number | var | func "(" expr ("," expr)? ")" | "(" expr ")" | "-" factor
class Parser {
 public:
  explicit Parser(const std::string& text) : text_(text) {}

  NodePtr run() {
    NodePtr e = parse_expr();
    skip_ws();
    if (pos_ != text_.size()) throw ExprError("trailing input", pos_);
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool consume(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr parse_expr() {
    NodePtr e = parse_term();
    while (true) {
      std::size_t p = pos_;
      if (consume('+')) {
        e = make(Op::Add, e, parse_term(), p);
      } else if (consume('-')) {
        e = make(Op::Sub, e, parse_term(), p);
      } else {
        return e;
      }
    }
  }

  NodePtr parse_term() {
    NodePtr e = parse_factor();
    while (true) {
      std::size_t p = pos_;
      if (consume('*')) {
        e = make(Op::Mul, e, parse_factor(), p);
      } else if (consume('/')) {
        e = make(Op::Div, e, parse_factor(), p);
      } else {
        return e;
      }
    }
  }

  NodePtr parse_factor() {
    skip_ws();
    if (pos_ >= text_.size()) throw ExprError("unexpected end of expression", pos_);
    std::size_t start = pos_;
    char c = text_[pos_];
    if (c == '-') {
      ++pos_;
      return make(Op::Neg, parse_factor(), nullptr, start);
    }
    if (c == '(') {
      ++pos_;
      NodePtr e = parse_expr();
      if (!consume(')')) throw ExprError("expected ')'", pos_);
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_ident();
    throw ExprError(std::string("unexpected character '") + c + "'", pos_);
  }

  NodePtr parse_number() {
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
      ++pos_;
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t mark = pos_++;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      } else {
        pos_ = mark;  // not an exponent after all
      }
    }
    try {
      auto n = std::make_shared<Node>();
      n->op = Op::Const;
      n->value = std::stod(text_.substr(start, pos_ - start));
      n->pos = start;
      return n;
    } catch (const std::exception&) {
      throw ExprError("malformed number", start);
    }
  }

  NodePtr parse_ident() {
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_]))))
      ++pos_;
    std::string name = text_.substr(start, pos_ - start);
    auto var = [&](int idx) {
      auto n = std::make_shared<Node>();
      n->op = Op::Var;
      n->var = idx;
      n->pos = start;
      return n;
    };
    if (name == "x") return var(0);
    if (name == "y") return var(1);
    if (name == "z") return var(2);
    if (name.size() == 2 && name[0] == 'x' && name[1] >= '1' && name[1] <= '9')
      return var(name[1] - '1');

    Op op;
    bool binary = false;
    if (name == "sin") op = Op::Sin;
    else if (name == "cos") op = Op::Cos;
    else if (name == "exp") op = Op::Exp;
    else if (name == "abs") op = Op::Abs;
    else if (name == "min") { op = Op::Min; binary = true; }
    else if (name == "max") { op = Op::Max; binary = true; }
    else throw ExprError("unknown identifier '" + name + "'", start);

    if (!consume('(')) throw ExprError("expected '(' after function name", pos_);
    NodePtr a = parse_expr();
    NodePtr b;
    if (binary) {
      if (!consume(',')) throw ExprError("expected ',' in two-argument function", pos_);
      b = parse_expr();
    }
    if (!consume(')')) throw ExprError("expected ')'", pos_);
    return make(op, a, b, start);
  }

  const std::string& text_;
  std::size_t pos_ = 0;
};

}  // namespace
}  // namespace detail

ScalarExpr ScalarExpr::parse(const std::string& text) {
  return ScalarExpr(detail::Parser(text).run());
}

ScalarExpr ScalarExpr::constant(double c) {
  auto n = std::make_shared<detail::Node>();
  n->op = detail::Op::Const;
  n->value = c;
  return ScalarExpr(n);
}

int ScalarExpr::min_dim() const { return root_ ? detail::max_var(*root_) + 1 : 0; }

double ScalarExpr::eval(const Vec& x) const { return detail::eval_node(*root_, x); }

EvalResult ScalarExpr::eval_grad(const Vec& x) const {
  detail::Dual d = detail::grad_node(*root_, x);
  return EvalResult{d.v, d.g, d.kink};
}

std::string ScalarExpr::to_string() const {
  std::ostringstream os;
  detail::print_node(*root_, os);
  return os.str();
}

ScalarExpr max_combine(const ScalarExpr& f, const ScalarExpr& g) {
  return ScalarExpr(detail::make(detail::Op::Max, f.root_, g.root_));
}

ScalarExpr min_combine(const ScalarExpr& f, const ScalarExpr& g) {
  return ScalarExpr(detail::make(detail::Op::Min, f.root_, g.root_));
}

ScalarExpr operator+(const ScalarExpr& f, const ScalarExpr& g) {
  return ScalarExpr(detail::make(detail::Op::Add, f.root_, g.root_));
}

ScalarExpr operator*(double c, const ScalarExpr& f) {
  auto k = std::make_shared<detail::Node>();
  k->op = detail::Op::Const;
  k->value = c;
  return ScalarExpr(detail::make(detail::Op::Mul, k, f.root_));
}

MapExpr MapExpr::zero(int out_dim) {
  std::vector<ScalarExpr> comps(out_dim, ScalarExpr::constant(0.0));
  return MapExpr(std::move(comps));
}

Vec MapExpr::eval(const Vec& x) const {
  Vec out(out_dim());
  for (int k = 0; k < out_dim(); ++k) out[k] = components_[k].eval(x);
  return out;
}

Mat MapExpr::jacobian(const Vec& x, bool* kink) const {
  Mat j(out_dim(), x.size());
  bool any_kink = false;
  for (int k = 0; k < out_dim(); ++k) {
    EvalResult r = components_[k].eval_grad(x);
    j.row(k) = r.grad.transpose();
    any_kink = any_kink || r.kink;
  }
  if (kink) *kink = any_kink;
  return j;
}

}  // namespace lipforge
