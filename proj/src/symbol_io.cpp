#include "phasestar/symbol_io.hpp"

#include "phasestar/errors.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace phasestar {

std::string to_string(const Rational& r) {
  if (r.get_den() == 1) return r.get_num().get_str();
  return r.get_str();
}

namespace {

struct PrintedTerm {
  const Monomial* mono;
  const ParamMonomial* params;
  Rational value;
  bool imag;
};

// hbar first (ascending power), then the remaining generators by name.
std::pair<int, std::vector<std::pair<std::string, int>>> param_key(const ParamMonomial& m) {
  std::pair<int, std::vector<std::pair<std::string, int>>> k{m.exponent(ParamNames::hbar), {}};
  for (const auto& [id, e] : m.factors())
    if (id != ParamNames::hbar) k.second.emplace_back(ParamNames::name(id), e);
  std::sort(k.second.begin(), k.second.end());
  return k;
}

std::string power(const std::string& name, int e) { return e == 1 ? name : name + "^" + std::to_string(e); }

// Magnitude, i, generators and coordinates of one printed term (sign excluded).
std::string format_body(const Rational& mag, bool imag, const ParamMonomial& pm, const Monomial* mono, const PhaseSpace* sp) {
  std::vector<std::string> num, den;
  if (imag) num.push_back("i");
  auto key = param_key(pm);
  auto emit = [&](const std::string& name, int e) {
    if (e > 0) num.push_back(power(name, e));
    if (e < 0) den.push_back(power(name, -e));
  };
  emit("hbar", key.first);
  for (const auto& [n, e] : key.second) emit(n, e);
  if (mono)
    for (std::size_t i = 0; i < sp->dim(); ++i)
      if (mono->e[i]) num.push_back(power(sp->name(i), mono->e[i]));
  std::string out;
  bool unit = mag == 1;
  if (!unit || num.empty()) {
    out = mag.get_den() == 1 ? mag.get_num().get_str() : "(" + mag.get_str() + ")";
  }
  for (const auto& f : num) out += (out.empty() ? "" : "*") + f;
  if (!den.empty()) {
    out += "/";
    if (den.size() == 1) {
      out += den[0];
    } else {
      out += "(";
      for (std::size_t k = 0; k < den.size(); ++k) out += (k ? "*" : "") + den[k];
      out += ")";
    }
  }
  return out;
}

std::string join_terms(const std::vector<std::pair<bool, std::string>>& signed_bodies) {
  if (signed_bodies.empty()) return "0";
  std::string out;
  for (std::size_t k = 0; k < signed_bodies.size(); ++k) {
    const auto& [neg, body] = signed_bodies[k];
    if (k == 0) {
      out += neg ? "-" + body : body;
    } else {
      out += neg ? " - " : " + ";
      out += body;
    }
  }
  return out;
}

}  // namespace

std::string to_string(const Symbol& s) {
  std::vector<PrintedTerm> pts;
  for (const auto& t : s.terms())
    for (const auto& ct : t.coeff.terms()) {
      if (sgn(ct.value.re) != 0) pts.push_back({&t.mono, &ct.mono, ct.value.re, false});
      if (sgn(ct.value.im) != 0) pts.push_back({&t.mono, &ct.mono, ct.value.im, true});
    }
  std::stable_sort(pts.begin(), pts.end(), [](const PrintedTerm& a, const PrintedTerm& b) {
    if (!(*a.mono == *b.mono)) return precedes(*a.mono, *b.mono);
    auto ka = param_key(*a.params), kb = param_key(*b.params);
    if (ka != kb) return ka < kb;
    return !a.imag && b.imag;
  });
  std::vector<std::pair<bool, std::string>> bodies;
  for (const auto& p : pts) {
    Rational mag = abs(p.value);
    bodies.emplace_back(sgn(p.value) < 0, format_body(mag, p.imag, *p.params, p.mono, s.space().get()));
  }
  return join_terms(bodies);
}

std::string to_string(const Coefficient& c) {
  std::vector<std::tuple<std::pair<int, std::vector<std::pair<std::string, int>>>, bool, bool, std::string>> rows;
  for (const auto& ct : c.terms()) {
    auto key = param_key(ct.mono);
    if (sgn(ct.value.re) != 0)
      rows.emplace_back(key, false, sgn(ct.value.re) < 0, format_body(abs(ct.value.re), false, ct.mono, nullptr, nullptr));
    if (sgn(ct.value.im) != 0)
      rows.emplace_back(key, true, sgn(ct.value.im) < 0, format_body(abs(ct.value.im), true, ct.mono, nullptr, nullptr));
  }
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) < std::get<0>(b);
    return std::get<1>(a) < std::get<1>(b);
  });
  std::vector<std::pair<bool, std::string>> bodies;
  for (const auto& r : rows) bodies.emplace_back(std::get<2>(r), std::get<3>(r));
  return join_terms(bodies);
}

Rational parse_rational(std::string_view text) {
  std::string s(text);
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
  if (s.empty()) throw InputError("empty number");
  bool neg = false;
  if (s[0] == '-' || s[0] == '+') {
    neg = s[0] == '-';
    s = s.substr(1);
  }
  Rational r;
  auto slash = s.find('/');
  try {
    if (slash != std::string::npos) {
      r = Rational(mpz_class(s.substr(0, slash), 10), mpz_class(s.substr(slash + 1), 10));
      if (r.get_den() == 0) throw InputError("zero denominator");
      r.canonicalize();
    } else {
      std::string mant = s;
      long exp10 = 0;
      auto epos = s.find_first_of("eE");
      if (epos != std::string::npos) {
        mant = s.substr(0, epos);
        exp10 = std::stol(s.substr(epos + 1));
      }
      auto dot = mant.find('.');
      if (dot != std::string::npos) {
        std::string frac = mant.substr(dot + 1);
        mant = mant.substr(0, dot) + frac;
        exp10 -= static_cast<long>(frac.size());
      }
      if (mant.empty() || !std::all_of(mant.begin(), mant.end(), [](unsigned char c) { return std::isdigit(c); }))
        throw InputError("malformed number '" + std::string(text) + "'");
      mpz_class num(mant, 10), scale;
      mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exp10 < 0 ? -exp10 : exp10));
      r = exp10 < 0 ? Rational(num, scale) : Rational(num * scale);
      r.canonicalize();
    }
  } catch (const std::invalid_argument&) {
    throw InputError("malformed number '" + std::string(text) + "'");
  }
  return neg ? Rational(-r) : r;
}

namespace {

class Parser {
 public:
  Parser(std::string_view text, const SpacePtr& space, const ParseContext& ctx) : s_(text), space_(space), ctx_(ctx) {}

  Symbol run() {
    Symbol r = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return r;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, pos_); }

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

  Symbol expr() {
    Symbol r = term();
    for (;;) {
      if (accept('+')) {
        r += term();
      } else if (accept('-')) {
        r -= term();
      } else {
        return r;
      }
    }
  }

  Symbol term() {
    Symbol r = unary();
    for (;;) {
      if (accept('*')) {
        r = r * unary();
      } else if (accept('/')) {
        std::size_t at = pos_;
        Symbol d = unary();
        if (!d.is_constant() || !d.constant_value().invertible()) {
          pos_ = at;
          fail("division by a non-monomial or coordinate-dependent expression");
        }
        r = r * d.constant_value().inverse();
      } else {
        return r;
      }
    }
  }

  Symbol unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return powexpr();
  }

  Symbol powexpr() {
    Symbol base = primary();
    if (!accept('^')) return base;
    bool paren = accept('(');
    bool neg = accept('-');
    skip();
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) fail("expected integer exponent");
    int e = std::stoi(std::string(s_.substr(start, pos_ - start)));
    if (paren && !accept(')')) fail("expected ')'");
    if (!neg) return pow(base, e);
    if (!base.is_constant() || !base.constant_value().invertible()) fail("negative power of a non-invertible expression");
    return Symbol(space_, pow(base.constant_value().inverse(), e));
  }

  Symbol primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of expression");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Symbol r = expr();
      if (!accept(')')) fail("expected ')'");
      return r;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
      if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
        std::size_t save = pos_;
        ++pos_;
        if (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) ++pos_;
        std::size_t digits = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (digits == pos_) pos_ = save;
      }
      return Symbol(space_, Coefficient(parse_rational(s_.substr(start, pos_ - start))));
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      std::string name(s_.substr(start, pos_ - start));
      skip();
      if (pos_ < s_.size() && s_[pos_] == '(') {
        auto f = ctx_.functions.find(name);
        if (f == ctx_.functions.end()) fail("unknown function '" + name + "'");
        ++pos_;
        std::vector<Symbol> args;
        if (!accept(')')) {
          do {
            args.push_back(expr());
          } while (accept(','));
          if (!accept(')')) fail("expected ')' after arguments");
        }
        return f->second(args);
      }
      if (auto b = ctx_.bindings.find(name); b != ctx_.bindings.end()) {
        if (!same_space(b->second.space(), space_)) fail("binding '" + name + "' lives on another space");
        return b->second;
      }
      if (name == "i") return Symbol(space_, Coefficient::i());
      if (name == "hbar") return Symbol(space_, Coefficient::hbar());
      if (auto idx = space_->find(name)) return Symbol::coordinate(space_, *idx);
      return Symbol(space_, Coefficient::param(name));
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  const SpacePtr& space_;
  const ParseContext& ctx_;
};

}  // namespace

Symbol parse_symbol(std::string_view text, const SpacePtr& space, const ParseContext& ctx) {
  return Parser(text, space, ctx).run();
}

SpacePtr infer_space(const std::vector<std::string>& texts) {
  std::set<std::string> suffixes;
  for (const auto& t : texts) {
    for (std::size_t k = 0; k < t.size();) {
      if (std::isalpha(static_cast<unsigned char>(t[k])) || t[k] == '_') {
        std::size_t start = k;
        while (k < t.size() && (std::isalnum(static_cast<unsigned char>(t[k])) || t[k] == '_')) ++k;
        std::string id = t.substr(start, k - start);
        bool fn = k < t.size() && t[k] == '(';
        if (!fn && (id[0] == 'q' || id[0] == 'p') &&
            std::all_of(id.begin() + 1, id.end(), [](unsigned char c) { return std::isdigit(c); }))
          suffixes.insert(id.substr(1));
      } else {
        ++k;
      }
    }
  }
  if (suffixes.empty()) suffixes.insert("");
  std::vector<std::string> qs, ps;
  std::vector<std::string> ordered(suffixes.begin(), suffixes.end());
  std::sort(ordered.begin(), ordered.end(), [](const std::string& a, const std::string& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  for (const auto& s : ordered) {
    qs.push_back("q" + s);
    ps.push_back("p" + s);
  }
  return PhaseSpace::canonical(qs, ps);
}

}  // namespace phasestar
