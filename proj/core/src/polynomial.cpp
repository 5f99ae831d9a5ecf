#include "padicdyn/polynomial.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "padicdyn/errors.hpp"

namespace padicdyn {

UniPolyQ::UniPolyQ(std::vector<Rat> coeffs) : c_(std::move(coeffs)) {
  for (auto& x : c_) x.canonicalize();
  trim();
}

void UniPolyQ::trim() {
  while (c_.size() > 1 && c_.back() == 0) c_.pop_back();
  if (c_.empty()) c_.push_back(Rat(0));
}

int UniPolyQ::degree() const {
  if (c_.size() == 1 && c_[0] == 0) return -1;
  return (int)c_.size() - 1;
}

const Rat& UniPolyQ::coeff(int n) const {
  static const Rat zero(0);
  if (n < 0 || n >= (int)c_.size()) return zero;
  return c_[(size_t)n];
}

UniPolyQ operator+(const UniPolyQ& a, const UniPolyQ& b) {
  std::vector<Rat> c(std::max(a.c_.size(), b.c_.size()), Rat(0));
  for (size_t i = 0; i < c.size(); ++i) c[i] = a.coeff((int)i) + b.coeff((int)i);
  return UniPolyQ(std::move(c));
}

UniPolyQ UniPolyQ::operator-() const {
  std::vector<Rat> c;
  c.reserve(c_.size());
  for (const auto& x : c_) c.push_back(-x);
  return UniPolyQ(std::move(c));
}

UniPolyQ operator-(const UniPolyQ& a, const UniPolyQ& b) { return a + (-b); }

UniPolyQ operator*(const UniPolyQ& a, const UniPolyQ& b) {
  if (a.is_zero() || b.is_zero()) return UniPolyQ();
  std::vector<Rat> c(a.c_.size() + b.c_.size() - 1, Rat(0));
  for (size_t i = 0; i < a.c_.size(); ++i) {
    if (a.c_[i] == 0) continue;
    for (size_t j = 0; j < b.c_.size(); ++j)
      if (b.c_[j] != 0) c[i + j] += a.c_[i] * b.c_[j];
  }
  return UniPolyQ(std::move(c));
}

UniPolyQ UniPolyQ::scaled(const Rat& s) const {
  std::vector<Rat> c;
  c.reserve(c_.size());
  for (const auto& x : c_) c.push_back(x * s);
  return UniPolyQ(std::move(c));
}

UniPolyQ UniPolyQ::derivative() const {
  if (c_.size() <= 1) return UniPolyQ();
  std::vector<Rat> c(c_.size() - 1);
  for (size_t i = 1; i < c_.size(); ++i) c[i - 1] = c_[i] * Rat((long)i);
  return UniPolyQ(std::move(c));
}

UniPolyQ UniPolyQ::compose(const UniPolyQ& g) const {
  UniPolyQ res = UniPolyQ::constant(c_.back());
  for (int n = (int)c_.size() - 2; n >= 0; --n)
    res = res * g + UniPolyQ::constant(c_[(size_t)n]);
  return res;
}

UniPolyQ UniPolyQ::pow(unsigned e) const {
  UniPolyQ res = UniPolyQ::constant(Rat(1));
  UniPolyQ base = *this;
  while (e) {
    if (e & 1u) res = res * base;
    base = base * base;
    e >>= 1;
  }
  return res;
}

Rat UniPolyQ::evaluate(const Rat& x) const {
  Rat r(0);
  for (int n = (int)c_.size() - 1; n >= 0; --n) r = r * x + c_[(size_t)n];
  return r;
}

PadicNumber UniPolyQ::evaluate(const PadicNumber& x) const {
  PadicNumber r = PadicNumber::exact_zero(x.prime());
  for (int n = (int)c_.size() - 1; n >= 0; --n) {
    r = r * x;
    if (c_[(size_t)n] != 0)
      r = r + PadicNumber::embed_rational(c_[(size_t)n], x.prime(), kDefaultPrecision);
  }
  return r;
}

PadicSeries UniPolyQ::evaluate(const PadicSeries& x) const {
  const Prime& p = x.prime();
  PadicSeries r = PadicSeries::zero(p);
  for (int n = (int)c_.size() - 1; n >= 0; --n) {
    r = r * x;
    if (c_[(size_t)n] != 0)
      r = r + PadicSeries::constant(
                  PadicNumber::embed_rational(c_[(size_t)n], p, kDefaultPrecision));
  }
  return r;
}

std::pair<UniPolyQ, UniPolyQ> UniPolyQ::divmod(const UniPolyQ& a, const UniPolyQ& b) {
  if (b.is_zero()) fail(errc::internal, "polynomial division by zero");
  std::vector<Rat> rem = a.c_;
  int db = b.degree();
  if (a.degree() < db) return {UniPolyQ(), a};
  std::vector<Rat> quo((size_t)(a.degree() - db + 1), Rat(0));
  for (int n = a.degree(); n >= db; --n) {
    Rat q = rem[(size_t)n] / b.c_[(size_t)db];
    if (q == 0) continue;
    quo[(size_t)(n - db)] = q;
    for (int j = 0; j <= db; ++j) rem[(size_t)(n - db + j)] -= q * b.c_[(size_t)j];
  }
  return {UniPolyQ(std::move(quo)), UniPolyQ(std::move(rem))};
}

UniPolyQ UniPolyQ::gcd(UniPolyQ a, UniPolyQ b) {
  while (!b.is_zero()) {
    UniPolyQ r = divmod(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  if (a.is_zero()) return a;
  return a.scaled(Rat(1) / a.c_.back());
}

std::vector<std::pair<Rat, int>> UniPolyQ::rational_roots() const {
  std::vector<std::pair<Rat, int>> out;
  if (is_zero()) return out;
  // Clear denominators to a primitive integer polynomial.
  Int den(1);
  for (const auto& x : c_) den = lcm(den, x.get_den());
  std::vector<Int> ic(c_.size());
  for (size_t i = 0; i < c_.size(); ++i)
    ic[i] = c_[i].get_num() * (den / c_[i].get_den());
  size_t lo = 0;
  while (lo < ic.size() && ic[lo] == 0) ++lo;
  int zero_mult = (int)lo;
  if (zero_mult > 0) out.emplace_back(Rat(0), zero_mult);
  if (lo + 1 >= ic.size()) return out;
  Int a0 = abs(ic[lo]), an = abs(ic.back());
  auto divisors = [](const Int& n) {
    std::vector<Int> d;
    for (Int i(1); i * i <= n; ++i) {
      if (n % i == 0) {
        d.push_back(i);
        if (i * i != n) d.push_back(n / i);
      }
      if (i > 2000000) break; // guard; candidates beyond are not expected here
    }
    return d;
  };
  UniPolyQ f = *this;
  for (const Int& num : divisors(a0)) {
    for (const Int& dn : divisors(an)) {
      if (::gcd(num, dn) != 1) continue;
      for (int sign : {1, -1}) {
        Rat r(sign * num, dn);
        r.canonicalize();
        int mult = 0;
        while (!f.is_zero() && f.evaluate(r) == 0) {
          UniPolyQ lin({-r, Rat(1)});
          auto [q, rem] = divmod(f, lin);
          f = q;
          ++mult;
        }
        if (mult > 0) out.emplace_back(r, mult);
      }
    }
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

std::vector<uint64_t> UniPolyQ::mod_p(const Prime& p) const {
  std::vector<uint64_t> out(c_.size());
  for (size_t i = 0; i < c_.size(); ++i) {
    const Rat& x = c_[i];
    Int dmod = x.get_den() % Int((unsigned long)p.value());
    if (dmod == 0) fail(errc::denominator_divisible_by_p, "coefficient denominator divisible by p");
    uint64_t num = positive_mod_u64(x.get_num(), p.value());
    uint64_t den = positive_mod_u64(x.get_den(), p.value());
    out[i] = mulmod_u64(num, inverse_u64(den, p.value()), p.value());
  }
  return fp_trim(std::move(out));
}

std::string UniPolyQ::to_string(const std::string& var) const {
  std::ostringstream os;
  bool first = true;
  for (int n = (int)c_.size() - 1; n >= 0; --n) {
    if (c_[(size_t)n] == 0 && degree() >= 0) continue;
    if (!first) os << " + ";
    os << rational_to_string(c_[(size_t)n]);
    if (n == 1) os << "*" << var;
    if (n > 1) os << "*" << var << "^" << n;
    first = false;
  }
  if (first) os << "0";
  return os.str();
}

std::vector<uint64_t> fp_trim(std::vector<uint64_t> a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
  return a;
}

std::vector<uint64_t> fp_divmod_r(std::vector<uint64_t> a, const std::vector<uint64_t>& b,
                                  uint64_t p) {
  if (b.empty()) fail(errc::internal, "fp division by zero");
  uint64_t inv = inverse_u64(b.back(), p);
  while (a.size() >= b.size()) {
    uint64_t q = mulmod_u64(a.back(), inv, p);
    size_t shift = a.size() - b.size();
    for (size_t j = 0; j < b.size(); ++j) {
      uint64_t sub = mulmod_u64(q, b[j], p);
      a[shift + j] = (a[shift + j] + p - sub) % p;
    }
    a = fp_trim(std::move(a));
    if (a.size() < b.size()) break;
  }
  return a;
}

std::vector<uint64_t> fp_gcd(std::vector<uint64_t> a, std::vector<uint64_t> b, uint64_t p) {
  a = fp_trim(std::move(a));
  b = fp_trim(std::move(b));
  while (!b.empty()) {
    std::vector<uint64_t> r = fp_divmod_r(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  if (!a.empty()) {
    uint64_t inv = inverse_u64(a.back(), p);
    for (auto& x : a) x = mulmod_u64(x, inv, p);
  }
  return a;
}

std::vector<uint64_t> fp_derivative(const std::vector<uint64_t>& a, uint64_t p) {
  if (a.size() <= 1) return {};
  std::vector<uint64_t> d(a.size() - 1);
  for (size_t i = 1; i < a.size(); ++i) d[i - 1] = mulmod_u64(a[i], i % p, p);
  return fp_trim(std::move(d));
}

uint64_t fp_eval(const std::vector<uint64_t>& a, uint64_t x, uint64_t p) {
  uint64_t r = 0;
  for (size_t i = a.size(); i-- > 0;) r = (mulmod_u64(r, x, p) + a[i]) % p;
  return r;
}

MultiPolyQ MultiPolyQ::constant(int g, const Rat& a) {
  MultiPolyQ f(g);
  if (a != 0) f.terms_[std::vector<int>((size_t)g, 0)] = a;
  return f;
}

MultiPolyQ MultiPolyQ::variable(int g, int i) {
  MultiPolyQ f(g);
  std::vector<int> e((size_t)g, 0);
  e[(size_t)i] = 1;
  f.terms_[e] = Rat(1);
  return f;
}

int MultiPolyQ::total_degree() const {
  int d = 0;
  for (const auto& [e, a] : terms_) {
    int t = 0;
    for (int x : e) t += x;
    d = std::max(d, t);
  }
  return d;
}

void MultiPolyQ::set(const std::vector<int>& e, const Rat& a) {
  if ((int)e.size() != g_) fail(errc::internal, "exponent arity mismatch");
  if (a == 0)
    terms_.erase(e);
  else
    terms_[e] = a;
}

MultiPolyQ operator+(const MultiPolyQ& a, const MultiPolyQ& b) {
  if (a.g_ != b.g_) fail(errc::internal, "polynomial arity mismatch");
  MultiPolyQ r = a;
  for (const auto& [e, x] : b.terms_) {
    Rat s = r.terms_.count(e) ? r.terms_[e] + x : x;
    if (s == 0)
      r.terms_.erase(e);
    else
      r.terms_[e] = s;
  }
  return r;
}

MultiPolyQ MultiPolyQ::operator-() const {
  MultiPolyQ r(g_);
  for (const auto& [e, x] : terms_) r.terms_[e] = -x;
  return r;
}

MultiPolyQ operator-(const MultiPolyQ& a, const MultiPolyQ& b) { return a + (-b); }

MultiPolyQ operator*(const MultiPolyQ& a, const MultiPolyQ& b) {
  if (a.g_ != b.g_) fail(errc::internal, "polynomial arity mismatch");
  MultiPolyQ r(a.g_);
  for (const auto& [ea, xa] : a.terms_) {
    for (const auto& [eb, xb] : b.terms_) {
      std::vector<int> e(ea.size());
      for (size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
      Rat s = (r.terms_.count(e) ? r.terms_[e] : Rat(0)) + xa * xb;
      if (s == 0)
        r.terms_.erase(e);
      else
        r.terms_[e] = s;
    }
  }
  return r;
}

MultiPolyQ MultiPolyQ::scaled(const Rat& s) const {
  MultiPolyQ r(g_);
  if (s == 0) return r;
  for (const auto& [e, x] : terms_) r.terms_[e] = x * s;
  return r;
}

MultiPolyQ MultiPolyQ::pow(unsigned e) const {
  MultiPolyQ res = MultiPolyQ::constant(g_, Rat(1));
  MultiPolyQ base = *this;
  while (e) {
    if (e & 1u) res = res * base;
    base = base * base;
    e >>= 1;
  }
  return res;
}

MultiPolyQ MultiPolyQ::compose(const std::vector<MultiPolyQ>& args) const {
  if ((int)args.size() != g_) fail(errc::invalid_input, "argument arity mismatch");
  int gv = args[0].nvars();
  for (const auto& a : args)
    if (a.nvars() != gv) fail(errc::invalid_input, "argument arity mismatch");
  std::vector<int> maxexp(g_, 0);
  for (const auto& [e, a] : terms_)
    for (int i = 0; i < g_; ++i) maxexp[i] = std::max(maxexp[i], e[i]);
  std::vector<std::vector<MultiPolyQ>> pows(g_);
  for (int i = 0; i < g_; ++i) {
    pows[i].push_back(MultiPolyQ::constant(gv, Rat(1)));
    for (int k = 1; k <= maxexp[i]; ++k)
      pows[i].push_back(pows[i].back() * args[i]);
  }
  MultiPolyQ r(gv);
  for (const auto& [e, a] : terms_) {
    MultiPolyQ t = MultiPolyQ::constant(gv, a);
    for (int i = 0; i < g_; ++i)
      if (e[i] > 0) t = t * pows[i][e[i]];
    r = r + t;
  }
  return r;
}

Rat MultiPolyQ::evaluate(const std::vector<Rat>& x) const {
  Rat r(0);
  for (const auto& [e, a] : terms_) {
    Rat t = a;
    for (size_t i = 0; i < e.size(); ++i)
      for (int k = 0; k < e[i]; ++k) t *= x[i];
    r += t;
  }
  return r;
}

PadicNumber MultiPolyQ::evaluate(const std::vector<PadicNumber>& x) const {
  if (x.empty()) fail(errc::internal, "evaluation arity mismatch");
  const Prime& p = x[0].prime();
  PadicNumber r = PadicNumber::exact_zero(p);
  for (const auto& [e, a] : terms_) {
    PadicNumber t = PadicNumber::embed_rational(a, p, kDefaultPrecision);
    for (size_t i = 0; i < e.size(); ++i)
      for (int k = 0; k < e[i]; ++k) t = t * x[i];
    r = r + t;
  }
  return r;
}

PadicSeries MultiPolyQ::evaluate(const std::vector<PadicSeries>& x) const {
  if (x.empty()) fail(errc::internal, "evaluation arity mismatch");
  const Prime& p = x[0].prime();
  PadicSeries r = PadicSeries::zero(p);
  for (const auto& [e, a] : terms_) {
    PadicSeries t = PadicSeries::constant(PadicNumber::embed_rational(a, p, kDefaultPrecision));
    for (size_t i = 0; i < e.size(); ++i)
      for (int k = 0; k < e[i]; ++k) t = t * x[i];
    r = r + t;
  }
  return r;
}

MultiPolyQ MultiPolyQ::substitute_linear(const std::vector<std::vector<Rat>>& m,
                                         int new_g) const {
  std::vector<MultiPolyQ> images;
  for (int i = 0; i < g_; ++i) {
    MultiPolyQ im(new_g);
    for (int j = 0; j < new_g; ++j) {
      if (m[(size_t)i][(size_t)j] == 0) continue;
      im = im + MultiPolyQ::variable(new_g, j).scaled(m[(size_t)i][(size_t)j]);
    }
    images.push_back(im);
  }
  MultiPolyQ r(new_g);
  for (const auto& [e, a] : terms_) {
    MultiPolyQ t = MultiPolyQ::constant(new_g, a);
    for (size_t i = 0; i < e.size(); ++i)
      for (int k = 0; k < e[i]; ++k) t = t * images[i];
    r = r + t;
  }
  return r;
}

std::string MultiPolyQ::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [e, a] : terms_) {
    if (!first) os << " + ";
    os << rational_to_string(a);
    for (size_t i = 0; i < e.size(); ++i) {
      if (e[i] == 0) continue;
      os << "*x" << i;
      if (e[i] > 1) os << "^" << e[i];
    }
    first = false;
  }
  return os.str();
}

namespace {

// Recursive-descent parser over the minimal grammar.
class PolyParser {
public:
  PolyParser(const std::string& s, int g) : s_(s), g_(g) {}

  MultiPolyQ parse() {
    MultiPolyQ r = expr();
    skip();
    if (pos_ != s_.size())
      fail(errc::invalid_input, "unexpected character at offset " + std::to_string(pos_) +
                                    " in polynomial '" + s_ + "'");
    return r;
  }

private:
  const std::string& s_;
  int g_;
  size_t pos_ = 0;

  void skip() {
    while (pos_ < s_.size() && std::isspace((unsigned char)s_[pos_])) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  char peek() {
    skip();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }

  MultiPolyQ expr() {
    bool neg = false;
    if (eat('-'))
      neg = true;
    else
      eat('+');
    MultiPolyQ r = term();
    if (neg) r = -r;
    while (true) {
      if (eat('+'))
        r = r + term();
      else if (eat('-'))
        r = r - term();
      else
        break;
    }
    return r;
  }

  MultiPolyQ term() {
    MultiPolyQ r = factor();
    while (eat('*')) r = r * factor();
    return r;
  }

  MultiPolyQ factor() {
    MultiPolyQ b = base();
    if (eat('^')) {
      skip();
      size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit((unsigned char)s_[pos_])) ++pos_;
      if (start == pos_) fail(errc::invalid_input, "exponent expected after '^'");
      unsigned long e = std::stoul(s_.substr(start, pos_ - start));
      if (e > 64) fail(errc::invalid_input, "exponent too large");
      return b.pow((unsigned)e);
    }
    return b;
  }

  MultiPolyQ base() {
    skip();
    if (eat('(')) {
      MultiPolyQ r = expr();
      if (!eat(')')) fail(errc::invalid_input, "missing ')'");
      return r;
    }
    if (pos_ >= s_.size()) fail(errc::invalid_input, "unexpected end of polynomial");
    char c = s_[pos_];
    if (c == 't') {
      if (g_ != 1) fail(errc::invalid_input, "variable t only valid for one variable");
      ++pos_;
      return MultiPolyQ::variable(1, 0);
    }
    if (c == 'x') {
      ++pos_;
      size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit((unsigned char)s_[pos_])) ++pos_;
      if (start == pos_) fail(errc::invalid_input, "variable index expected after 'x'");
      unsigned long i = std::stoul(s_.substr(start, pos_ - start));
      if ((int)i >= g_) fail(errc::invalid_input, "variable index out of range: x" + std::to_string(i));
      return MultiPolyQ::variable(g_, (int)i);
    }
    if (std::isdigit((unsigned char)c)) {
      size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit((unsigned char)s_[pos_])) ++pos_;
      Int num(s_.substr(start, pos_ - start).c_str());
      if (eat('/')) {
        skip();
        size_t ds = pos_;
        while (pos_ < s_.size() && std::isdigit((unsigned char)s_[pos_])) ++pos_;
        if (ds == pos_) fail(errc::invalid_input, "denominator expected after '/'");
        Int den(s_.substr(ds, pos_ - ds).c_str());
        if (den == 0) fail(errc::invalid_input, "zero denominator");
        Rat r(num, den);
        r.canonicalize();
        return MultiPolyQ::constant(g_, r);
      }
      return MultiPolyQ::constant(g_, Rat(num));
    }
    fail(errc::invalid_input, std::string("unexpected character '") + c + "' in polynomial");
  }
};

} // namespace

MultiPolyQ parse_poly(const std::string& text, int g) {
  if (g < 1) fail(errc::invalid_input, "need at least one variable");
  return PolyParser(text, g).parse();
}

UniPolyQ parse_unipoly(const std::string& text) {
  MultiPolyQ m = parse_poly(text, 1);
  std::vector<Rat> c((size_t)m.total_degree() + 1, Rat(0));
  for (const auto& [e, a] : m.terms()) c[(size_t)e[0]] = a;
  return UniPolyQ(std::move(c));
}

} // namespace padicdyn
