#ifndef GEOLAB_EXPR_HPP
#define GEOLAB_EXPR_HPP

// Tiny arithmetic-expression evaluator for exact constants in data files,
// e.g. "sqrt(2)*sqrt(3)" or "(149+18*sqrt(2)*sqrt(3))/9".  Grammar:
//   expr   := term (('+'|'-') term)*
//   term   := unary (('*'|'/') unary)*
//   unary  := ('+'|'-')* primary
//   primary:= number | 'pi' | 'sqrt' '(' expr ')' | '(' expr ')'

#include <cctype>
#include <cmath>
#include <stdexcept>
#include <string>

namespace geolab {

namespace detail {

class ExprParser {
public:
  explicit ExprParser(const std::string& s) : s_(s) {}

  double parse() {
    double v = expr();
    skip_ws();
    if (pos_ != s_.size()) fail("trailing input");
    return v;
  }

private:
  const std::string& s_;
  size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("expression \"" + s_ + "\": " + what +
                                " at offset " + std::to_string(pos_));
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) { ++pos_; return true; }
    return false;
  }

  double expr() {
    double v = term();
    for (;;) {
      if (eat('+')) v += term();
      else if (eat('-')) v -= term();
      else return v;
    }
  }

  double term() {
    double v = unary();
    for (;;) {
      if (eat('*')) v *= unary();
      else if (eat('/')) {
        double d = unary();
        if (d == 0.0) fail("division by zero");
        v /= d;
      } else return v;
    }
  }

  double unary() {
    if (eat('-')) return -unary();
    if (eat('+')) return unary();
    return primary();
  }

  double primary() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end");
    char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) {
      size_t start = pos_;
      while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      std::string name = s_.substr(start, pos_ - start);
      if (name == "pi") return 3.14159265358979323846;
      if (name == "sqrt") {
        if (!eat('(')) fail("expected '(' after sqrt");
        double a = expr();
        if (!eat(')')) fail("expected ')'");
        if (a < 0.0) fail("sqrt of negative value");
        return std::sqrt(a);
      }
      pos_ = start;
      fail("unknown identifier \"" + name + "\"");
    }
    if (eat('(')) {
      double v = expr();
      if (!eat(')')) fail("expected ')'");
      return v;
    }
    fail("unexpected character");
  }

  double number() {
    size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      ++pos_;
      if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    try {
      return std::stod(s_.substr(start, pos_ - start));
    } catch (const std::exception&) {
      fail("bad numeric literal");
    }
  }
};

}  // namespace detail

// Evaluates an exact-constant expression string to double.
inline double parse_expr(const std::string& s) { return detail::ExprParser(s).parse(); }

}  // namespace geolab

#endif
