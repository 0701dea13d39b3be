#include "hdg/expr.hpp"

#include <cmath>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace hdg {

struct Expr::Node {
  enum Kind { number, var_x, var_y, var_t, unary, binary } kind;
  double value = 0;
  std::function<double(double)> f1;
  std::function<double(double, double)> f2;
  std::shared_ptr<const Node> a, b;

  double eval(double x, double y, double t) const {
    switch (kind) {
      case number: return value;
      case var_x: return x;
      case var_y: return y;
      case var_t: return t;
      case unary: return f1(a->eval(x, y, t));
      case binary: return f2(a->eval(x, y, t), b->eval(x, y, t));
    }
    return 0;
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

NodePtr make_num(double v) {
  auto n = std::make_shared<Expr::Node>();
  n->kind = Expr::Node::number;
  n->value = v;
  return n;
}

NodePtr make_un(std::function<double(double)> f, NodePtr a) {
  auto n = std::make_shared<Expr::Node>();
  n->kind = Expr::Node::unary;
  n->f1 = std::move(f);
  n->a = std::move(a);
  return n;
}

NodePtr make_bin(std::function<double(double, double)> f, NodePtr a, NodePtr b) {
  auto n = std::make_shared<Expr::Node>();
  n->kind = Expr::Node::binary;
  n->f2 = std::move(f);
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

class Parser {
public:
  explicit Parser(const std::string& s) : s_(s) {}

  NodePtr parse() {
    NodePtr e = sum();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected trailing input");
    return e;
  }

private:
  const std::string& s_;
  size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw std::runtime_error("expression error at position " + std::to_string(pos_) + " in '" +
                             s_ + "': " + msg);
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  NodePtr sum() {
    NodePtr e = term();
    for (;;) {
      if (accept('+'))
        e = make_bin(std::plus<double>(), e, term());
      else if (accept('-'))
        e = make_bin(std::minus<double>(), e, term());
      else
        return e;
    }
  }

  NodePtr term() {
    NodePtr e = factor();
    for (;;) {
      if (accept('*'))
        e = make_bin(std::multiplies<double>(), e, factor());
      else if (accept('/'))
        e = make_bin(std::divides<double>(), e, factor());
      else
        return e;
    }
  }

  NodePtr factor() {
    if (accept('-')) return make_un(std::negate<double>(), factor());
    if (accept('+')) return factor();
    NodePtr base = primary();
    if (accept('^')) // right associative
      return make_bin([](double a, double b) { return std::pow(a, b); }, base, factor());
    return base;
  }

  NodePtr primary() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = sum();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      char* end = nullptr;
      const double v = std::strtod(s_.c_str() + pos_, &end);
      if (end == s_.c_str() + pos_) fail("bad number");
      pos_ = end - s_.c_str();
      return make_num(v);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const size_t start = pos_;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
        ++pos_;
      const std::string name = s_.substr(start, pos_ - start);
      return identifier(name);
    }
    fail("unexpected character");
  }

  NodePtr identifier(const std::string& name) {
    auto leaf = [](Expr::Node::Kind k) {
      auto n = std::make_shared<Expr::Node>();
      n->kind = k;
      return NodePtr(n);
    };
    if (name == "x") return leaf(Expr::Node::var_x);
    if (name == "y") return leaf(Expr::Node::var_y);
    if (name == "t") return leaf(Expr::Node::var_t);
    if (name == "pi") return make_num(std::numbers::pi);

    static const std::pair<const char*, double (*)(double)> fns1[] = {
        {"sin", std::sin}, {"cos", std::cos},   {"tan", std::tan},
        {"exp", std::exp}, {"log", std::log},   {"sqrt", std::sqrt},
        {"abs", std::fabs}, {"tanh", std::tanh},
    };
    for (const auto& [fn, fp] : fns1)
      if (name == fn) {
        expect('(');
        NodePtr a = sum();
        expect(')');
        return make_un(fp, a);
      }
    static const std::pair<const char*, double (*)(double, double)> fns2[] = {
        {"min", [](double a, double b) { return std::min(a, b); }},
        {"max", [](double a, double b) { return std::max(a, b); }},
        {"pow", std::pow},
    };
    for (const auto& [fn, fp] : fns2)
      if (name == fn) {
        expect('(');
        NodePtr a = sum();
        expect(',');
        NodePtr b = sum();
        expect(')');
        return make_bin(fp, a, b);
      }
    fail("unknown identifier '" + name + "'");
  }
};

} // namespace

Expr Expr::parse(const std::string& text) {
  Expr e;
  e.root_ = Parser(text).parse();
  e.text_ = text;
  return e;
}

double Expr::operator()(double x, double y, double t) const {
  if (!root_) throw std::runtime_error("evaluating an empty expression");
  return root_->eval(x, y, t);
}

} // namespace hdg
