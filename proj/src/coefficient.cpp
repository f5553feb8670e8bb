#include "phasestar/coefficient.hpp"

#include "phasestar/errors.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <unordered_map>

namespace phasestar {

GaussRational operator*(const GaussRational& a, const GaussRational& b) {
  if (a.is_real() && b.is_real()) return GaussRational(Rational(a.re * b.re));
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}

GaussRational& GaussRational::operator+=(const GaussRational& b) {
  re += b.re;
  if (sgn(b.im) != 0) im += b.im;
  return *this;
}

GaussRational GaussRational::inverse() const {
  if (is_zero()) throw InputError("division by zero");
  if (is_real()) return GaussRational(Rational(1 / re));
  Rational n = re * re + im * im;
  return {re / n, -im / n};
}

namespace {

struct NameTable {
  std::mutex mu;
  std::vector<std::string> names{"hbar"};
  std::unordered_map<std::string, std::uint32_t> ids{{"hbar", 0}};
};

NameTable& table() {
  static NameTable t;
  return t;
}

}  // namespace

std::uint32_t ParamNames::intern(std::string_view name) {
  auto& t = table();
  std::lock_guard lock(t.mu);
  auto it = t.ids.find(std::string(name));
  if (it != t.ids.end()) return it->second;
  auto id = static_cast<std::uint32_t>(t.names.size());
  t.names.emplace_back(name);
  t.ids.emplace(std::string(name), id);
  return id;
}

const std::string& ParamNames::name(std::uint32_t id) {
  auto& t = table();
  std::lock_guard lock(t.mu);
  return t.names.at(id);
}

ParamMonomial ParamMonomial::generator(std::uint32_t id, int exponent) {
  ParamMonomial m;
  if (exponent != 0) m.f_.emplace_back(id, exponent);
  return m;
}

int ParamMonomial::exponent(std::uint32_t id) const {
  for (const auto& [k, e] : f_)
    if (k == id) return e;
  return 0;
}

ParamMonomial ParamMonomial::without(std::uint32_t id) const {
  ParamMonomial m;
  for (const auto& p : f_)
    if (p.first != id) m.f_.push_back(p);
  return m;
}

ParamMonomial operator*(const ParamMonomial& a, const ParamMonomial& b) {
  if (a.f_.empty()) return b;
  if (b.f_.empty()) return a;
  ParamMonomial r;
  r.f_.reserve(a.f_.size() + b.f_.size());
  auto i = a.f_.begin(), j = b.f_.begin();
  while (i != a.f_.end() || j != b.f_.end()) {
    if (j == b.f_.end() || (i != a.f_.end() && i->first < j->first)) {
      r.f_.push_back(*i++);
    } else if (i == a.f_.end() || j->first < i->first) {
      r.f_.push_back(*j++);
    } else {
      int e = i->second + j->second;
      if (e != 0) r.f_.emplace_back(i->first, e);
      ++i;
      ++j;
    }
  }
  return r;
}

ParamMonomial ParamMonomial::inverse() const {
  ParamMonomial r = *this;
  for (auto& p : r.f_) p.second = -p.second;
  return r;
}

std::size_t ParamMonomial::hash() const {
  std::size_t h = 0x9e3779b97f4a7c15ULL;
  for (const auto& [k, e] : f_) h = (h ^ (k * 0x100000001b3ULL + static_cast<unsigned>(e))) * 0x9e3779b97f4a7c15ULL;
  return h;
}

Coefficient::Coefficient(long v) : Coefficient(GaussRational(v)) {}
Coefficient::Coefficient(Rational r) : Coefficient(GaussRational(std::move(r))) {}
Coefficient::Coefficient(GaussRational g) {
  if (!g.is_zero()) terms_.push_back({ParamMonomial{}, std::move(g)});
}
Coefficient::Coefficient(GaussRational g, ParamMonomial m) {
  if (!g.is_zero()) terms_.push_back({std::move(m), std::move(g)});
}

Coefficient Coefficient::i() { return Coefficient(GaussRational(Rational(0), Rational(1))); }
Coefficient Coefficient::hbar(int power) { return Coefficient(GaussRational(1), ParamMonomial::generator(ParamNames::hbar, power)); }
Coefficient Coefficient::param(std::string_view name, int power) {
  return Coefficient(GaussRational(1), ParamMonomial::generator(ParamNames::intern(name), power));
}

bool Coefficient::is_rational() const {
  return terms_.empty() || (terms_.size() == 1 && terms_[0].mono.is_one() && terms_[0].value.is_real());
}

bool Coefficient::is_gauss_rational() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].mono.is_one()); }

Rational Coefficient::rational_value() const {
  if (!is_rational()) throw InputError("coefficient is not a rational number");
  return terms_.empty() ? Rational(0) : terms_[0].value.re;
}

GaussRational Coefficient::gauss_value() const {
  if (!is_gauss_rational()) throw InputError("coefficient depends on parameters");
  return terms_.empty() ? GaussRational() : terms_[0].value;
}

Coefficient Coefficient::inverse() const {
  if (!invertible()) throw InputError("coefficient is not invertible (not a single monomial)");
  return Coefficient(terms_[0].value.inverse(), terms_[0].mono.inverse());
}

Coefficient Coefficient::conj() const {
  Coefficient r = *this;
  for (auto& t : r.terms_) t.value = t.value.conj();
  return r;
}

int Coefficient::min_hbar_power() const {
  if (terms_.empty()) return 0;
  int m = terms_[0].mono.exponent(ParamNames::hbar);
  for (const auto& t : terms_) m = std::min(m, t.mono.exponent(ParamNames::hbar));
  return m;
}

int Coefficient::max_hbar_power() const {
  if (terms_.empty()) return 0;
  int m = terms_[0].mono.exponent(ParamNames::hbar);
  for (const auto& t : terms_) m = std::max(m, t.mono.exponent(ParamNames::hbar));
  return m;
}

Coefficient Coefficient::hbar_part(int power) const {
  Coefficient r;
  for (const auto& t : terms_)
    if (t.mono.exponent(ParamNames::hbar) == power) r.terms_.push_back(t);
  return r;
}

Coefficient Coefficient::with_hbar_sign_flipped() const {
  Coefficient r = *this;
  for (auto& t : r.terms_)
    if (t.mono.exponent(ParamNames::hbar) % 2 != 0) t.value = -t.value;
  return r;
}

int Coefficient::degree_in(std::uint32_t id) const {
  int d = 0;
  bool first = true;
  for (const auto& t : terms_) {
    int e = t.mono.exponent(id);
    d = first ? e : std::max(d, e);
    first = false;
  }
  return d;
}

int Coefficient::low_degree_in(std::uint32_t id) const {
  int d = 0;
  bool first = true;
  for (const auto& t : terms_) {
    int e = t.mono.exponent(id);
    d = first ? e : std::min(d, e);
    first = false;
  }
  return d;
}

bool Coefficient::contains(std::uint32_t id) const {
  for (const auto& t : terms_)
    if (t.mono.exponent(id) != 0) return true;
  return false;
}

Coefficient Coefficient::substitute(std::uint32_t id, const Coefficient& value) const {
  Coefficient r;
  for (const auto& t : terms_) {
    int e = t.mono.exponent(id);
    Coefficient base(t.value, t.mono.without(id));
    if (e == 0) {
      r += base;
    } else if (e > 0) {
      r += base * pow(value, e);
    } else {
      r += base * pow(value.inverse(), -e);
    }
  }
  return r;
}

void Coefficient::normalize() {
  std::sort(terms_.begin(), terms_.end(), [](const Term& a, const Term& b) { return a.mono < b.mono; });
  std::vector<Term> out;
  out.reserve(terms_.size());
  for (auto& t : terms_) {
    if (!out.empty() && out.back().mono == t.mono) {
      out.back().value += t.value;
    } else {
      out.push_back(std::move(t));
    }
  }
  out.erase(std::remove_if(out.begin(), out.end(), [](const Term& t) { return t.value.is_zero(); }), out.end());
  terms_ = std::move(out);
}

Coefficient& Coefficient::operator+=(const Coefficient& b) {
  if (b.terms_.empty()) return *this;
  if (terms_.empty()) {
    terms_ = b.terms_;
    return *this;
  }
  // Both sorted: linear merge.
  std::vector<Term> out;
  out.reserve(terms_.size() + b.terms_.size());
  auto i = terms_.begin();
  auto j = b.terms_.begin();
  while (i != terms_.end() || j != b.terms_.end()) {
    if (j == b.terms_.end() || (i != terms_.end() && i->mono < j->mono)) {
      out.push_back(std::move(*i++));
    } else if (i == terms_.end() || j->mono < i->mono) {
      out.push_back(*j++);
    } else {
      GaussRational v = i->value + j->value;
      if (!v.is_zero()) out.push_back({std::move(i->mono), std::move(v)});
      ++i;
      ++j;
    }
  }
  terms_ = std::move(out);
  return *this;
}

Coefficient& Coefficient::operator-=(const Coefficient& b) { return *this += -b; }

Coefficient operator+(const Coefficient& a, const Coefficient& b) {
  Coefficient r = a;
  r += b;
  return r;
}

Coefficient operator-(const Coefficient& a) {
  Coefficient r = a;
  for (auto& t : r.terms_) t.value = -t.value;
  return r;
}

Coefficient operator-(const Coefficient& a, const Coefficient& b) { return a + (-b); }

Coefficient operator*(const Coefficient& a, const Coefficient& b) {
  Coefficient r;
  if (a.terms_.empty() || b.terms_.empty()) return r;
  r.terms_.reserve(a.terms_.size() * b.terms_.size());
  for (const auto& x : a.terms_)
    for (const auto& y : b.terms_) r.terms_.push_back({x.mono * y.mono, x.value * y.value});
  if (r.terms_.size() > 1) r.normalize();
  return r;
}

bool operator==(const Coefficient& a, const Coefficient& b) {
  if (a.terms_.size() != b.terms_.size()) return false;
  for (std::size_t k = 0; k < a.terms_.size(); ++k)
    if (!(a.terms_[k].mono == b.terms_[k].mono) || !(a.terms_[k].value == b.terms_[k].value)) return false;
  return true;
}

std::size_t Coefficient::hash() const {
  std::size_t h = terms_.size();
  for (const auto& t : terms_) {
    h = h * 31 + t.mono.hash();
    h = h * 31 + std::hash<double>{}(t.value.re.get_d());
    h = h * 31 + std::hash<double>{}(t.value.im.get_d());
  }
  return h;
}

std::pair<double, double> Coefficient::evaluate(const std::map<std::string, double>& values) const {
  double re = 0, im = 0;
  for (const auto& t : terms_) {
    double f = 1;
    for (const auto& [id, e] : t.mono.factors()) {
      const auto& nm = ParamNames::name(id);
      auto it = values.find(nm);
      if (it == values.end()) throw InputError("no numeric value for parameter '" + nm + "'");
      f *= std::pow(it->second, e);
    }
    re += f * t.value.re.get_d();
    im += f * t.value.im.get_d();
  }
  return {re, im};
}

Coefficient pow(const Coefficient& c, int n) {
  if (n < 0) return pow(c.inverse(), -n);
  Coefficient r(1L), base = c;
  while (n > 0) {
    if (n & 1) r = r * base;
    n >>= 1;
    if (n) base = base * base;
  }
  return r;
}

}  // namespace phasestar
