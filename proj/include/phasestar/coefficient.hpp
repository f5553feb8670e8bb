#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace phasestar {

using Rational = mpq_class;

// Exact complex rational re + i*im.
struct GaussRational {
  Rational re{0};
  Rational im{0};

  GaussRational() = default;
  GaussRational(Rational r) : re(std::move(r)) {}
  GaussRational(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}
  GaussRational(long v) : re(v) {}

  bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }
  bool is_real() const { return sgn(im) == 0; }
  GaussRational conj() const { return {re, -im}; }
  GaussRational inverse() const;  // throws on zero

  friend bool operator==(const GaussRational& a, const GaussRational& b) { return a.re == b.re && a.im == b.im; }
  friend GaussRational operator+(const GaussRational& a, const GaussRational& b) { return {a.re + b.re, a.im + b.im}; }
  friend GaussRational operator-(const GaussRational& a, const GaussRational& b) { return {a.re - b.re, a.im - b.im}; }
  friend GaussRational operator-(const GaussRational& a) { return {-a.re, -a.im}; }
  friend GaussRational operator*(const GaussRational& a, const GaussRational& b);
  GaussRational& operator+=(const GaussRational& b);
};

// Interned names of coefficient-ring generators. Id 0 is always hbar.
class ParamNames {
 public:
  static std::uint32_t intern(std::string_view name);
  static const std::string& name(std::uint32_t id);
  static constexpr std::uint32_t hbar = 0;
};

// Laurent monomial in the generators: sorted (id, nonzero exponent) pairs.
class ParamMonomial {
 public:
  ParamMonomial() = default;
  static ParamMonomial generator(std::uint32_t id, int exponent = 1);

  const std::vector<std::pair<std::uint32_t, int>>& factors() const { return f_; }
  bool is_one() const { return f_.empty(); }
  int exponent(std::uint32_t id) const;
  ParamMonomial without(std::uint32_t id) const;

  friend ParamMonomial operator*(const ParamMonomial& a, const ParamMonomial& b);
  ParamMonomial inverse() const;
  friend bool operator==(const ParamMonomial& a, const ParamMonomial& b) { return a.f_ == b.f_; }
  friend bool operator<(const ParamMonomial& a, const ParamMonomial& b) { return a.f_ < b.f_; }
  std::size_t hash() const;

 private:
  std::vector<std::pair<std::uint32_t, int>> f_;
};

// Element of Q(i)[hbar^{+-1}, generators^{+-1}]: sum of GaussRational * ParamMonomial.
class Coefficient {
 public:
  struct Term {
    ParamMonomial mono;
    GaussRational value;
  };

  Coefficient() = default;
  Coefficient(long v);
  Coefficient(Rational r);
  Coefficient(GaussRational g);
  Coefficient(GaussRational g, ParamMonomial m);

  static Coefficient i();
  static Coefficient hbar(int power = 1);
  static Coefficient param(std::string_view name, int power = 1);

  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_single_term() const { return terms_.size() == 1; }
  bool is_rational() const;  // a plain element of Q (possibly zero)
  bool is_gauss_rational() const;
  Rational rational_value() const;  // requires is_rational()
  GaussRational gauss_value() const;

  // Only single-term coefficients are invertible in this ring.
  bool invertible() const { return is_single_term(); }
  Coefficient inverse() const;

  Coefficient conj() const;
  int min_hbar_power() const;  // 0 for the zero coefficient
  int max_hbar_power() const;
  Coefficient hbar_part(int power) const;  // terms with hbar^power, hbar factor kept
  Coefficient with_hbar_sign_flipped() const;  // hbar -> -hbar
  int degree_in(std::uint32_t id) const;  // max exponent (may be negative)
  int low_degree_in(std::uint32_t id) const;
  bool contains(std::uint32_t id) const;
  Coefficient substitute(std::uint32_t id, const Coefficient& value) const;  // id must appear with exponent >= 0

  friend Coefficient operator+(const Coefficient& a, const Coefficient& b);
  friend Coefficient operator-(const Coefficient& a, const Coefficient& b);
  friend Coefficient operator-(const Coefficient& a);
  friend Coefficient operator*(const Coefficient& a, const Coefficient& b);
  Coefficient& operator+=(const Coefficient& b);
  Coefficient& operator-=(const Coefficient& b);
  friend bool operator==(const Coefficient& a, const Coefficient& b);
  friend bool operator!=(const Coefficient& a, const Coefficient& b) { return !(a == b); }
  std::size_t hash() const;

  // Evaluate with numeric generator values (hbar included); missing generators throw.
  std::pair<double, double> evaluate(const std::map<std::string, double>& values) const;

 private:
  void normalize();
  std::vector<Term> terms_;
};

Coefficient pow(const Coefficient& c, int n);

}  // namespace phasestar
