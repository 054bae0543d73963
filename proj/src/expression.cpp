#include "ncv/expression.hpp"

#include "ncv/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>

namespace ncv {

struct Expression::Node {
  enum class Op { kNumber, kVariable, kAdd, kSub, kMul, kDiv, kPow, kNeg, kAbs, kMin, kMax };
  Op op;
  double number = 0.0;
  std::size_t variable = 0;
  int exponent = 0;
  std::vector<std::shared_ptr<const Node>> args;

  bool constant() const {
    if (op == Op::kVariable) return false;
    return std::all_of(args.begin(), args.end(), [](const auto& a) { return a->constant(); });
  }

  double eval(const std::vector<double>& x) const {
    switch (op) {
      case Op::kNumber:
        return number;
      case Op::kVariable:
        return x[variable];
      case Op::kAdd:
        return args[0]->eval(x) + args[1]->eval(x);
      case Op::kSub:
        return args[0]->eval(x) - args[1]->eval(x);
      case Op::kMul:
        return args[0]->eval(x) * args[1]->eval(x);
      case Op::kDiv:
        return args[0]->eval(x) / args[1]->eval(x);
      case Op::kPow: {
        const double b = args[0]->eval(x);
        double r = 1.0;
        for (int k = 0; k < exponent; ++k) r *= b;
        return r;
      }
      case Op::kNeg:
        return -args[0]->eval(x);
      case Op::kAbs:
        return std::abs(args[0]->eval(x));
      case Op::kMin: {
        double r = args[0]->eval(x);
        for (std::size_t k = 1; k < args.size(); ++k) r = std::min(r, args[k]->eval(x));
        return r;
      }
      case Op::kMax: {
        double r = args[0]->eval(x);
        for (std::size_t k = 1; k < args.size(); ++k) r = std::max(r, args[k]->eval(x));
        return r;
      }
    }
    return 0.0;
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Op = Expression::Node::Op;

class Parser {
 public:
  Parser(const std::string& text, const std::vector<std::string>& vars) : s_(text), vars_(vars) {}

  NodePtr parse() {
    NodePtr n = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected character '" + std::string(1, s_[pos_]) + "'");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorKind::kInvalidInput,
                "expression '" + s_ + "' at offset " + std::to_string(pos_) + ": " + what);
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

  static NodePtr make(Op op, std::vector<NodePtr> args) {
    auto n = std::make_shared<Expression::Node>();
    n->op = op;
    n->args = std::move(args);
    return n;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = make(Op::kAdd, {lhs, term()});
      } else if (accept('-')) {
        lhs = make(Op::kSub, {lhs, term()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = make(Op::kMul, {lhs, unary()});
      } else if (accept('/')) {
        const std::size_t at = pos_;
        NodePtr rhs = unary();
        if (!rhs->constant()) {
          pos_ = at;
          fail("division is only allowed by constant subexpressions");
        }
        lhs = make(Op::kDiv, {lhs, rhs});
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Op::kNeg, {unary()});
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (!accept('^')) return base;
    skip();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) fail("exponent must be a non-negative integer literal");
    auto n = std::make_shared<Expression::Node>();
    n->op = Op::kPow;
    n->exponent = std::stoi(s_.substr(start, pos_ - start));
    n->args = {base};
    return n;
  }

  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of expression");
    const char c = s_[pos_];
    if (accept('(')) {
      NodePtr n = expr();
      if (!accept(')')) fail("expected ')'");
      return n;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("malformed number");
      pos_ += static_cast<std::size_t>(end - begin);
      auto n = std::make_shared<Expression::Node>();
      n->op = Op::kNumber;
      n->number = v;
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
        ++pos_;
      }
      const std::string name = s_.substr(start, pos_ - start);
      if (name == "abs" || name == "min" || name == "max") {
        if (!accept('(')) fail("expected '(' after " + name);
        std::vector<NodePtr> args{expr()};
        while (accept(',')) args.push_back(expr());
        if (!accept(')')) fail("expected ')' closing " + name);
        if (name == "abs") {
          if (args.size() != 1) fail("abs takes one argument");
          return make(Op::kAbs, std::move(args));
        }
        return make(name == "min" ? Op::kMin : Op::kMax, std::move(args));
      }
      auto it = std::find(vars_.begin(), vars_.end(), name);
      if (it == vars_.end()) {
        pos_ = start;
        fail("identifier '" + name + "' is not in the whitelist");
      }
      auto n = std::make_shared<Expression::Node>();
      n->op = Op::kVariable;
      n->variable = static_cast<std::size_t>(std::distance(vars_.begin(), it));
      return n;
    }
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  const std::string& s_;
  const std::vector<std::string>& vars_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression Expression::parse(const std::string& text, const std::vector<std::string>& variables) {
  Expression e;
  e.root_ = Parser(text, variables).parse();
  e.text_ = text;
  return e;
}

double Expression::operator()(const std::vector<double>& args) const { return root_->eval(args); }

}  // namespace ncv
