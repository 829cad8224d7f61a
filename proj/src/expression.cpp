#include "pvi/expression.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "pvi/errors.hpp"

namespace pvi {

struct Expression::Node {
  enum class Kind { Number, T, Y, X, Z, Neg, Binary, Call };
  Kind kind = Kind::Number;
  double value = 0.0;
  int index = 0;   // 1-based for X / Z
  char op = 0;     // + - * / ^ for Binary
  std::string fn;  // for Call
  std::vector<std::shared_ptr<const Node>> kids;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Kind = Expression::Node::Kind;

constexpr std::size_t kMaxStack = 64;

const std::vector<std::string>& function_names() {
  static const std::vector<std::string> names{"sin", "cos", "exp", "sqrt", "abs", "tanh", "min", "max"};
  return names;
}

bool is_function(const std::string& s) {
  for (const auto& n : function_names())
    if (n == s) return true;
  return false;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  NodePtr parse() {
    auto e = expr();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected trailing input", {"operator", "end of input"});
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg, std::vector<std::string> expected) const {
    throw ParseError("parse error: " + msg, pos_, std::move(expected));
  }

  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\n' || s_[pos_] == '\r'))
      ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  static NodePtr make_binary(char op, NodePtr a, NodePtr b) {
    auto n = std::make_shared<Expression::Node>();
    n->kind = Kind::Binary;
    n->op = op;
    n->kids = {std::move(a), std::move(b)};
    return n;
  }

  NodePtr expr() {
    auto lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = make_binary('+', lhs, term());
      } else if (accept('-')) {
        lhs = make_binary('-', lhs, term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    auto lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = make_binary('*', lhs, unary());
      } else if (accept('/')) {
        lhs = make_binary('/', lhs, unary());
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (accept('-')) {
      auto n = std::make_shared<Expression::Node>();
      n->kind = Kind::Neg;
      n->kids = {unary()};
      return n;
    }
    return power();
  }

  NodePtr power() {
    auto base = atom();
    if (accept('^')) return make_binary('^', base, unary());
    return base;
  }

  NodePtr atom() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of input", {"number", "variable", "function", "("});
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      auto e = expr();
      if (!accept(')')) fail("missing closing parenthesis", {")"});
      return e;
    }
    if ((c >= '0' && c <= '9') || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    fail(std::string("unexpected character '") + c + "'", {"number", "variable", "function", "("});
  }

  NodePtr number() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < s_.size() && (s_[p] == '+' || s_[p] == '-')) ++p;
      if (p < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p]))) {
        pos_ = p;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      }
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s_.data() + start, s_.data() + pos_, v);
    if (ec != std::errc() || ptr != s_.data() + pos_) {
      pos_ = start;
      fail("malformed number", {"number"});
    }
    auto n = std::make_shared<Expression::Node>();
    n->kind = Kind::Number;
    n->value = v;
    return n;
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    const std::string id(s_.substr(start, pos_ - start));
    auto n = std::make_shared<Expression::Node>();
    if (id == "t") {
      n->kind = Kind::T;
      return n;
    }
    if (id == "y") {
      n->kind = Kind::Y;
      return n;
    }
    if (id == "pi") {
      n->kind = Kind::Number;
      n->value = std::numbers::pi;
      return n;
    }
    if ((id[0] == 'x' || id[0] == 'z') && id.size() > 1) {
      int idx = 0;
      auto [ptr, ec] = std::from_chars(id.data() + 1, id.data() + id.size(), idx);
      if (ec == std::errc() && ptr == id.data() + id.size() && idx >= 1 && id[1] != '0') {
        n->kind = id[0] == 'x' ? Kind::X : Kind::Z;
        n->index = idx;
        return n;
      }
    }
    if (is_function(id)) {
      if (!accept('(')) fail("expected '(' after function name", {"("});
      n->kind = Kind::Call;
      n->fn = id;
      n->kids.push_back(expr());
      while (accept(',')) n->kids.push_back(expr());
      if (!accept(')')) fail("missing closing parenthesis in call", {")", ","});
      const bool binary = (id == "min" || id == "max");
      if (binary && n->kids.size() < 2) fail(id + " needs at least two arguments", {","});
      if (!binary && n->kids.size() != 1) fail(id + " takes one argument", {")"});
      return n;
    }
    pos_ = start;
    std::vector<std::string> expected{"t", "y", "x<i>", "z<i>", "pi"};
    for (const auto& f : function_names()) expected.push_back(f);
    fail("unknown identifier '" + id + "'", std::move(expected));
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

std::string render_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string render(const Expression::Node& n) {
  switch (n.kind) {
    case Kind::Number: return render_number(n.value);
    case Kind::T: return "t";
    case Kind::Y: return "y";
    case Kind::X: return "x" + std::to_string(n.index);
    case Kind::Z: return "z" + std::to_string(n.index);
    case Kind::Neg: return "(-" + render(*n.kids[0]) + ")";
    case Kind::Binary: return "(" + render(*n.kids[0]) + n.op + render(*n.kids[1]) + ")";
    case Kind::Call: {
      std::string out = n.fn + "(";
      for (std::size_t i = 0; i < n.kids.size(); ++i) {
        if (i) out += ",";
        out += render(*n.kids[i]);
      }
      return out + ")";
    }
  }
  return {};
}

}  // namespace

Expression::Expression() {
  auto n = std::make_shared<Node>();
  tree_ = n;
  source_ = "0";
  code_.push_back({Op::Push, 0, 0.0});
}

Expression Expression::constant(double value) {
  Expression e;
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Number;
  n->value = value;
  e.tree_ = n;
  e.source_ = render_number(value);
  e.code_.clear();
  e.compile(*n);
  e.analyse();
  return e;
}

Expression Expression::parse(std::string_view text) {
  Expression e;
  e.source_ = std::string(text);
  e.tree_ = Parser(text).parse();
  e.code_.clear();
  e.compile(*e.tree_);
  e.analyse();
  return e;
}

void Expression::compile(const Node& node) {
  switch (node.kind) {
    case Node::Kind::Number: code_.push_back({Op::Push, 0, node.value}); return;
    case Node::Kind::T: code_.push_back({Op::LoadT}); return;
    case Node::Kind::Y: code_.push_back({Op::LoadY}); return;
    case Node::Kind::X: code_.push_back({Op::LoadX, static_cast<std::uint32_t>(node.index - 1)}); return;
    case Node::Kind::Z: code_.push_back({Op::LoadZ, static_cast<std::uint32_t>(node.index - 1)}); return;
    case Node::Kind::Neg:
      compile(*node.kids[0]);
      code_.push_back({Op::Neg});
      return;
    case Node::Kind::Binary: {
      compile(*node.kids[0]);
      compile(*node.kids[1]);
      Op op = Op::Add;
      switch (node.op) {
        case '+': op = Op::Add; break;
        case '-': op = Op::Sub; break;
        case '*': op = Op::Mul; break;
        case '/': op = Op::Div; break;
        default: op = Op::Pow; break;
      }
      code_.push_back({op});
      return;
    }
    case Node::Kind::Call: {
      compile(*node.kids[0]);
      if (node.fn == "min" || node.fn == "max") {
        for (std::size_t i = 1; i < node.kids.size(); ++i) {
          compile(*node.kids[i]);
          code_.push_back({node.fn == "min" ? Op::Min : Op::Max});
        }
        return;
      }
      Op op = Op::Sin;
      if (node.fn == "cos") op = Op::Cos;
      else if (node.fn == "exp") op = Op::Exp;
      else if (node.fn == "sqrt") op = Op::Sqrt;
      else if (node.fn == "abs") op = Op::Abs;
      else if (node.fn == "tanh") op = Op::Tanh;
      code_.push_back({op});
      return;
    }
  }
}

void Expression::analyse() {
  std::size_t depth = 0;
  max_stack_ = 0;
  uses_t_ = uses_y_ = false;
  max_x_index_ = max_z_index_ = 0;
  for (const auto& ins : code_) {
    switch (ins.op) {
      case Op::Push: case Op::LoadT: case Op::LoadY: case Op::LoadX: case Op::LoadZ:
        ++depth;
        break;
      case Op::Add: case Op::Sub: case Op::Mul: case Op::Div: case Op::Pow: case Op::Min: case Op::Max:
        --depth;
        break;
      default:
        break;
    }
    if (ins.op == Op::LoadT) uses_t_ = true;
    if (ins.op == Op::LoadY) uses_y_ = true;
    if (ins.op == Op::LoadX) max_x_index_ = std::max(max_x_index_, static_cast<int>(ins.index) + 1);
    if (ins.op == Op::LoadZ) max_z_index_ = std::max(max_z_index_, static_cast<int>(ins.index) + 1);
    max_stack_ = std::max(max_stack_, depth);
  }
  if (max_stack_ > kMaxStack) throw ParseError("expression nested too deeply", 0, {});
  is_constant_ = !uses_t_ && !uses_y_ && max_x_index_ == 0 && max_z_index_ == 0;
  if (is_constant_) {
    is_constant_ = false;  // force evaluation through the interpreter once
    constant_value_ = (*this)(EvalArgs{});
    is_constant_ = true;
  }
}

double Expression::operator()(const EvalArgs& a) const {
  if (is_constant_) return constant_value_;
  std::array<double, kMaxStack> st;
  std::size_t sp = 0;
  for (const auto& ins : code_) {
    switch (ins.op) {
      case Op::Push: st[sp++] = ins.value; break;
      case Op::LoadT: st[sp++] = a.t; break;
      case Op::LoadY: st[sp++] = a.y; break;
      case Op::LoadX:
        if (ins.index >= a.x.size()) throw EvalError("x" + std::to_string(ins.index + 1) + " is not defined in this dimension");
        st[sp++] = a.x[ins.index];
        break;
      case Op::LoadZ:
        if (ins.index >= a.z.size()) throw EvalError("z" + std::to_string(ins.index + 1) + " is not defined in this dimension");
        st[sp++] = a.z[ins.index];
        break;
      case Op::Neg: st[sp - 1] = -st[sp - 1]; break;
      case Op::Add: --sp; st[sp - 1] += st[sp]; break;
      case Op::Sub: --sp; st[sp - 1] -= st[sp]; break;
      case Op::Mul: --sp; st[sp - 1] *= st[sp]; break;
      case Op::Div: --sp; st[sp - 1] /= st[sp]; break;
      case Op::Pow: --sp; st[sp - 1] = std::pow(st[sp - 1], st[sp]); break;
      case Op::Min: --sp; st[sp - 1] = std::min(st[sp - 1], st[sp]); break;
      case Op::Max: --sp; st[sp - 1] = std::max(st[sp - 1], st[sp]); break;
      case Op::Sin: st[sp - 1] = std::sin(st[sp - 1]); break;
      case Op::Cos: st[sp - 1] = std::cos(st[sp - 1]); break;
      case Op::Exp: st[sp - 1] = std::exp(st[sp - 1]); break;
      case Op::Sqrt: st[sp - 1] = std::sqrt(st[sp - 1]); break;
      case Op::Abs: st[sp - 1] = std::abs(st[sp - 1]); break;
      case Op::Tanh: st[sp - 1] = std::tanh(st[sp - 1]); break;
    }
  }
  return st[0];
}

std::string Expression::pretty() const { return tree_ ? render(*tree_) : render_number(0.0); }

}  // namespace pvi
