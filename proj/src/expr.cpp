#include "semieff/expr.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <numbers>
#include <string>

#include "semieff/errors.hpp"

namespace semieff {

class ExpressionParser {
 public:
  explicit ExpressionParser(std::string_view src) : src_(src) {}

  Expression run() {
    expr();
    skip_ws();
    if (pos_ != src_.size()) fail("unexpected '" + std::string(1, src_[pos_]) + "'");
    out_.source_ = std::string(src_);
    out_.max_depth_ = max_depth_;
    return std::move(out_);
  }

 private:
  using Op = Expression::Op;

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("expression error at column " + std::to_string(pos_ + 1) + ": " + what +
                      " in \"" + std::string(src_) + "\"");
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  void emit(Op op, double value = 0.0, int index = 0) {
    out_.program_.push_back({op, value, index});
    switch (op) {
      case Op::constant:
      case Op::x:
      case Op::theta:
      case Op::z: ++depth_; break;
      case Op::add:
      case Op::sub:
      case Op::mul:
      case Op::div:
      case Op::pow: --depth_; break;
      default: break;
    }
    max_depth_ = std::max(max_depth_, depth_);
  }

  void expr() {
    term();
    for (;;) {
      if (accept('+')) {
        term();
        emit(Op::add);
      } else if (accept('-')) {
        term();
        emit(Op::sub);
      } else {
        return;
      }
    }
  }

  void term() {
    unary();
    for (;;) {
      if (accept('*')) {
        unary();
        emit(Op::mul);
      } else if (accept('/')) {
        unary();
        emit(Op::div);
      } else {
        return;
      }
    }
  }

  void unary() {
    if (accept('-')) {
      unary();
      emit(Op::neg);
    } else if (accept('+')) {
      unary();
    } else {
      primary();
    }
  }

  void primary() {
    skip_ws();
    if (pos_ >= src_.size()) fail("unexpected end of input");
    const char c = src_[pos_];
    if (accept('(')) {
      expr();
      expect(')');
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      number();
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        ++pos_;
      identifier(src_.substr(start, pos_ - start));
      return;
    }
    fail(std::string("unexpected '") + c + "'");
  }

  void number() {
    const std::string rest(src_.substr(pos_));
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(rest, &used);
    } catch (const std::exception&) {
      fail("malformed number");
    }
    pos_ += used;
    emit(Op::constant, v);
  }

  static int parse_index(std::string_view digits) {
    if (digits.empty()) return 1;
    int v = 0;
    for (char d : digits) {
      if (!std::isdigit(static_cast<unsigned char>(d))) return -1;
      v = 10 * v + (d - '0');
    }
    return v;
  }

  void call1(Op op) {
    expect('(');
    expr();
    expect(')');
    emit(op);
  }

  void identifier(std::string_view id) {
    if (id == "x") return emit(Op::x);
    if (id == "pi") return emit(Op::constant, std::numbers::pi);
    if (id == "exp") return call1(Op::exp);
    if (id == "log") return call1(Op::log);
    if (id == "pow") {
      expect('(');
      expr();
      expect(',');
      expr();
      expect(')');
      return emit(Op::pow);
    }
    if (id.starts_with("theta")) {
      const int k = parse_index(id.substr(5));
      if (k < 1) fail("bad parameter name '" + std::string(id) + "'");
      out_.max_theta_ = std::max(out_.max_theta_, k);
      return emit(Op::theta, 0.0, k - 1);
    }
    if (id.starts_with("z")) {
      const int k = parse_index(id.substr(1));
      if (k < 1) fail("bad parameter name '" + std::string(id) + "'");
      out_.max_z_ = std::max(out_.max_z_, k);
      return emit(Op::z, 0.0, k - 1);
    }
    fail("unknown identifier '" + std::string(id) + "'");
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int depth_ = 0;
  int max_depth_ = 0;
  Expression out_;
};

Expression Expression::parse(std::string_view source) { return ExpressionParser(source).run(); }

double Expression::eval(double x, const Vec& theta, const Vec& z) const {
  if (theta.size() < max_theta_ || z.size() < max_z_)
    throw ConfigError("expression \"" + source_ + "\" references missing parameters");
  constexpr int kMaxStack = 64;
  if (max_depth_ > kMaxStack) throw ConfigError("expression too deeply nested");
  std::array<double, kMaxStack> st{};
  int top = -1;
  for (const auto& in : program_) {
    switch (in.op) {
      case Op::constant: st[++top] = in.value; break;
      case Op::x: st[++top] = x; break;
      case Op::theta: st[++top] = theta[in.index]; break;
      case Op::z: st[++top] = z[in.index]; break;
      case Op::add: st[top - 1] += st[top]; --top; break;
      case Op::sub: st[top - 1] -= st[top]; --top; break;
      case Op::mul: st[top - 1] *= st[top]; --top; break;
      case Op::div: st[top - 1] /= st[top]; --top; break;
      case Op::pow: st[top - 1] = std::pow(st[top - 1], st[top]); --top; break;
      case Op::neg: st[top] = -st[top]; break;
      case Op::exp: st[top] = std::exp(st[top]); break;
      case Op::log: st[top] = std::log(st[top]); break;
    }
  }
  return st[0];
}

}  // namespace semieff
