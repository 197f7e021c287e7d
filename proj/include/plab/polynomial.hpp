#pragma once

#include <complex>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace plab {

using Complex = std::complex<double>;

/// Sparse multivariate polynomial over double or std::complex<double>.
/// Terms are keyed by exponent vectors of length `num_vars()`.
template <typename T>
class Polynomial {
public:
  using Exponents = std::vector<int>;

  Polynomial() = default;
  explicit Polynomial(int num_vars) : nvars_(num_vars) {}

  static Polynomial constant(int num_vars, T value);
  static Polynomial variable(int num_vars, int index);

  int num_vars() const { return nvars_; }
  const std::map<Exponents, T>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int degree() const;

  void add_term(const Exponents& e, T coeff);

  template <typename V>
  auto operator()(std::span<const V> x) const;

  Polynomial derivative(int var) const;

  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator-=(const Polynomial& o);
  Polynomial& operator*=(T s);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, T s) { return a *= s; }
  friend Polynomial operator*(T s, Polynomial a) { return a *= s; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) { return a.multiply(b); }
  Polynomial operator-() const { return *this * T(-1); }
  Polynomial pow(int k) const;

  std::string to_string(const std::vector<std::string>& names) const;

private:
  Polynomial multiply(const Polynomial& o) const;
  void check_vars(const Polynomial& o) const;

  int nvars_ = 0;
  std::map<Exponents, T> terms_;
};

using RealPolynomial = Polynomial<double>;
using ComplexPolynomial = Polynomial<Complex>;

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Parses `+ - * / ^ ( )`, decimal literals and the given variable names.
/// Division is only allowed by constants; `^` takes a non-negative integer.
/// For the complex overload the identifier `i` denotes the imaginary unit
/// unless it is also a variable name.
RealPolynomial parse_real_polynomial(std::string_view text, const std::vector<std::string>& vars);
ComplexPolynomial parse_complex_polynomial(std::string_view text,
                                           const std::vector<std::string>& vars);

/// Variable names x1, y1, ..., xn, yn in that order (real coordinates of C^n).
std::vector<std::string> real_coordinate_names(int n);

template <typename T>
template <typename V>
auto Polynomial<T>::operator()(std::span<const V> x) const {
  using R = decltype(T{} * V{});
  if (static_cast<int>(x.size()) != nvars_) throw std::invalid_argument("polynomial: wrong arity");
  R acc{};
  for (const auto& [e, c] : terms_) {
    R m = R(c);
    for (int k = 0; k < nvars_; ++k)
      for (int j = 0; j < e[k]; ++j) m *= x[k];
    acc += m;
  }
  return acc;
}

}  // namespace plab
