#include "plab/polynomial.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

namespace plab {

template <typename T>
Polynomial<T> Polynomial<T>::constant(int num_vars, T value) {
  Polynomial p(num_vars);
  p.add_term(Exponents(num_vars, 0), value);
  return p;
}

template <typename T>
Polynomial<T> Polynomial<T>::variable(int num_vars, int index) {
  if (index < 0 || index >= num_vars) throw std::out_of_range("polynomial: variable index");
  Polynomial p(num_vars);
  Exponents e(num_vars, 0);
  e[index] = 1;
  p.add_term(e, T(1));
  return p;
}

template <typename T>
int Polynomial<T>::degree() const {
  int d = 0;
  for (const auto& [e, c] : terms_) {
    int s = 0;
    for (int k : e) s += k;
    d = std::max(d, s);
  }
  return d;
}

template <typename T>
void Polynomial<T>::add_term(const Exponents& e, T coeff) {
  if (static_cast<int>(e.size()) != nvars_) throw std::invalid_argument("polynomial: exponent arity");
  auto it = terms_.find(e);
  if (it == terms_.end()) {
    if (coeff != T(0)) terms_.emplace(e, coeff);
    return;
  }
  it->second += coeff;
  if (it->second == T(0)) terms_.erase(it);
}

template <typename T>
void Polynomial<T>::check_vars(const Polynomial& o) const {
  if (o.nvars_ != nvars_) throw std::invalid_argument("polynomial: variable count mismatch");
}

template <typename T>
Polynomial<T> Polynomial<T>::derivative(int var) const {
  Polynomial d(nvars_);
  for (const auto& [e, c] : terms_) {
    if (e[var] == 0) continue;
    Exponents f = e;
    f[var] -= 1;
    d.add_term(f, c * T(e[var]));
  }
  return d;
}

template <typename T>
Polynomial<T>& Polynomial<T>::operator+=(const Polynomial& o) {
  check_vars(o);
  for (const auto& [e, c] : o.terms_) add_term(e, c);
  return *this;
}

template <typename T>
Polynomial<T>& Polynomial<T>::operator-=(const Polynomial& o) {
  check_vars(o);
  for (const auto& [e, c] : o.terms_) add_term(e, -c);
  return *this;
}

template <typename T>
Polynomial<T>& Polynomial<T>::operator*=(T s) {
  if (s == T(0)) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, c] : terms_) c *= s;
  return *this;
}

template <typename T>
Polynomial<T> Polynomial<T>::multiply(const Polynomial& o) const {
  check_vars(o);
  Polynomial r(nvars_);
  for (const auto& [e1, c1] : terms_)
    for (const auto& [e2, c2] : o.terms_) {
      Exponents e(nvars_);
      for (int k = 0; k < nvars_; ++k) e[k] = e1[k] + e2[k];
      r.add_term(e, c1 * c2);
    }
  return r;
}

template <typename T>
Polynomial<T> Polynomial<T>::pow(int k) const {
  if (k < 0) throw std::invalid_argument("polynomial: negative power");
  Polynomial r = constant(nvars_, T(1));
  Polynomial base = *this;
  while (k > 0) {
    if (k & 1) r = r * base;
    k >>= 1;
    if (k) base = base * base;
  }
  return r;
}

template <typename T>
std::string Polynomial<T>::to_string(const std::vector<std::string>& names) const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  os.precision(17);
  bool first = true;
  for (const auto& [e, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    if constexpr (std::is_same_v<T, double>) {
      os << c;
    } else {
      os << "(" << c.real() << (c.imag() < 0 ? "-" : "+") << std::abs(c.imag()) << "*i)";
    }
    for (int k = 0; k < nvars_; ++k)
      if (e[k] > 0) {
        os << "*" << names.at(k);
        if (e[k] > 1) os << "^" << e[k];
      }
  }
  return os.str();
}

template class Polynomial<double>;
template class Polynomial<Complex>;

namespace {

template <typename T>
class ExpressionParser {
public:
  ExpressionParser(std::string_view text, const std::vector<std::string>& vars)
      : text_(text), vars_(vars) {}

  Polynomial<T> parse() {
    auto p = parse_sum();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return p;
  }

private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("polynomial parse error at offset " + std::to_string(pos_) + ": " + msg);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  int nvars() const { return static_cast<int>(vars_.size()); }

  Polynomial<T> parse_sum() {
    Polynomial<T> acc = parse_product();
    for (;;) {
      if (accept('+'))
        acc += parse_product();
      else if (accept('-'))
        acc -= parse_product();
      else
        return acc;
    }
  }

  Polynomial<T> parse_product() {
    Polynomial<T> acc = parse_unary();
    for (;;) {
      if (accept('*')) {
        acc = acc * parse_unary();
      } else if (accept('/')) {
        auto d = parse_unary();
        if (d.degree() != 0 || d.is_zero()) fail("division by a non-constant or zero");
        acc *= T(1) / d.terms().begin()->second;
      } else {
        return acc;
      }
    }
  }

  Polynomial<T> parse_unary() {
    if (accept('-')) return -parse_unary();
    if (accept('+')) return parse_unary();
    return parse_power();
  }

  Polynomial<T> parse_power() {
    Polynomial<T> base = parse_atom();
    if (accept('^')) {
      skip_space();
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (start == pos_) fail("expected integer exponent");
      base = base.pow(std::stoi(std::string(text_.substr(start, pos_ - start))));
    }
    return base;
  }

  Polynomial<T> parse_atom() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    if (accept('(')) {
      auto p = parse_sum();
      if (!accept(')')) fail("expected ')'");
      return p;
    }
    char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t used = 0;
      double v = std::stod(std::string(text_.substr(pos_)), &used);
      pos_ += used;
      return Polynomial<T>::constant(nvars(), T(v));
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        ++pos_;
      std::string name(text_.substr(start, pos_ - start));
      for (int k = 0; k < nvars(); ++k)
        if (vars_[k] == name) return Polynomial<T>::variable(nvars(), k);
      if constexpr (!std::is_same_v<T, double>) {
        if (name == "i") return Polynomial<T>::constant(nvars(), T(0.0, 1.0));
      }
      pos_ = start;
      fail("unknown identifier '" + name + "'");
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  std::string_view text_;
  const std::vector<std::string>& vars_;
  std::size_t pos_ = 0;
};

}  // namespace

RealPolynomial parse_real_polynomial(std::string_view text, const std::vector<std::string>& vars) {
  return ExpressionParser<double>(text, vars).parse();
}

ComplexPolynomial parse_complex_polynomial(std::string_view text,
                                           const std::vector<std::string>& vars) {
  return ExpressionParser<Complex>(text, vars).parse();
}

std::vector<std::string> real_coordinate_names(int n) {
  std::vector<std::string> names;
  for (int j = 1; j <= n; ++j) {
    names.push_back("x" + std::to_string(j));
    names.push_back("y" + std::to_string(j));
  }
  return names;
}

}  // namespace plab
