#include "fracsource/expression.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fracsource::expr {

struct Expression::Node {
  enum class Op { number, variable, neg, add, sub, mul, div, pow, call };
  Op op = Op::number;
  double value = 0.0;
  std::size_t var = 0;
  double (*fn)(double) = nullptr;
  std::shared_ptr<const Node> lhs, rhs;

  double eval(const double* v) const {
    switch (op) {
      case Op::number: return value;
      case Op::variable: return v[var];
      case Op::neg: return -lhs->eval(v);
      case Op::add: return lhs->eval(v) + rhs->eval(v);
      case Op::sub: return lhs->eval(v) - rhs->eval(v);
      case Op::mul: return lhs->eval(v) * rhs->eval(v);
      case Op::div: return lhs->eval(v) / rhs->eval(v);
      case Op::pow: return std::pow(lhs->eval(v), rhs->eval(v));
      case Op::call: return fn(lhs->eval(v));
    }
    return 0.0;
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

struct FnEntry {
  const char* name;
  double (*fn)(double);
};

double f_sin(double x) { return std::sin(x); }
double f_cos(double x) { return std::cos(x); }
double f_tan(double x) { return std::tan(x); }
double f_exp(double x) { return std::exp(x); }
double f_log(double x) { return std::log(x); }
double f_sqrt(double x) { return std::sqrt(x); }
double f_abs(double x) { return std::abs(x); }

constexpr FnEntry kFunctions[] = {{"sin", f_sin},   {"cos", f_cos},   {"tan", f_tan}, {"exp", f_exp},
                                  {"log", f_log},   {"sqrt", f_sqrt}, {"abs", f_abs}};

}  // namespace

// Recursive descent over
//   sum   := prod (('+'|'-') prod)*
//   prod  := unary (('*'|'/') unary)*
//   unary := '-' unary | '+' unary | power
//   power := atom ('^' unary)?
class Parser {
 public:
  using Node = Expression::Node;
  Parser(const std::string& s, const std::vector<std::string>& vars) : s_(s), vars_(vars) {}

  NodePtr parse() {
    auto n = sum();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return n;
  }

 private:
  const std::string& s_;
  const std::vector<std::string>& vars_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw std::invalid_argument("expression '" + s_ + "': " + msg + " at position " + std::to_string(pos_));
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  static NodePtr binary(Node::Op op, NodePtr l, NodePtr r) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->lhs = std::move(l);
    n->rhs = std::move(r);
    return n;
  }
  NodePtr sum() {
    auto n = prod();
    for (;;) {
      if (accept('+')) n = binary(Node::Op::add, n, prod());
      else if (accept('-')) n = binary(Node::Op::sub, n, prod());
      else return n;
    }
  }
  NodePtr prod() {
    auto n = unary();
    for (;;) {
      if (accept('*')) n = binary(Node::Op::mul, n, unary());
      else if (accept('/')) n = binary(Node::Op::div, n, unary());
      else return n;
    }
  }
  NodePtr unary() {
    if (accept('-')) return binary(Node::Op::neg, unary(), nullptr);
    if (accept('+')) return unary();
    return power();
  }
  NodePtr power() {
    auto n = atom();
    if (accept('^')) return binary(Node::Op::pow, n, unary());
    return n;
  }
  NodePtr atom() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end");
    if (accept('(')) {
      auto n = sum();
      if (!accept(')')) fail("expected ')'");
      return n;
    }
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(s_.substr(pos_), &used);
      } catch (const std::exception&) {
        fail("bad number");
      }
      pos_ += used;
      auto n = std::make_shared<Node>();
      n->value = v;
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      const std::string name = s_.substr(start, pos_ - start);
      for (std::size_t i = 0; i < vars_.size(); ++i) {
        if (vars_[i] == name) {
          auto n = std::make_shared<Node>();
          n->op = Node::Op::variable;
          n->var = i;
          return n;
        }
      }
      if (name == "pi" || name == "e") {
        auto n = std::make_shared<Node>();
        n->value = name == "pi" ? std::numbers::pi : std::numbers::e;
        return n;
      }
      for (const auto& f : kFunctions) {
        if (name == f.name) {
          if (!accept('(')) fail("expected '(' after " + name);
          auto n = std::make_shared<Node>();
          n->op = Node::Op::call;
          n->fn = f.fn;
          n->lhs = sum();
          if (!accept(')')) fail("expected ')'");
          return n;
        }
      }
      fail("unknown name '" + name + "'");
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }
};

Expression::Expression(const std::string& text, std::vector<std::string> variables)
    : text_(text), vars_(std::move(variables)) {
  root_ = Parser(text_, vars_).parse();
}

Expression::~Expression() = default;
Expression::Expression(const Expression&) = default;
Expression& Expression::operator=(const Expression&) = default;
Expression::Expression(Expression&&) noexcept = default;
Expression& Expression::operator=(Expression&&) noexcept = default;

double Expression::eval(const double* values) const { return root_->eval(values); }

}  // namespace fracsource::expr
