#include "mlq/formal_cas.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <sstream>
#include <vector>

namespace mlq {

namespace {

// f * (1 + beta p^2), absorbing into the denominator where one exists
FormalPoly times_w(const FormalPoly& f) {
  FormalPoly out;
  for (const auto& [m, c] : f.terms()) {
    if (m.d > 0) {
      Monomial k = m;
      --k.d;
      out += FormalPoly::monomial(k, c);
    } else {
      Monomial k = m;
      out += FormalPoly::monomial(k, c);
      ++k.beta;
      k.p += 2;
      out += FormalPoly::monomial(k, c);
    }
  }
  return out;
}

// Terms grouped by everything but the p and beta exponents; each group is a
// polynomial in p whose coefficients are polynomials in beta.
struct RestKey {
  int q, s, hbar, lambda;
  auto operator<=>(const RestKey&) const = default;
};
using BetaPoly = std::map<int, GaussRational>;

void accumulate(BetaPoly& into, const BetaPoly& x, int shift, bool negate) {
  for (const auto& [e, c] : x) {
    GaussRational& t = into[e + shift];
    t = negate ? t - c : t + c;
    if (t.is_zero()) into.erase(e + shift);
  }
}

// Numerator divided by (1 + beta p^2) if the division is exact.
bool divide_w(const FormalPoly& num, FormalPoly& quot) {
  std::map<RestKey, std::map<int, BetaPoly>> groups;
  for (const auto& [m, c] : num.terms()) groups[{m.q, m.s, m.hbar, m.lambda}][m.p][m.beta] = c;
  FormalPoly out;
  for (const auto& [rk, byp] : groups) {
    const int deg = byp.rbegin()->first;
    if (deg < 2) return false;
    std::vector<BetaPoly> qk(deg + 1);
    for (int k = 0; k <= deg; ++k) {
      auto it = byp.find(k);
      if (it != byp.end()) qk[k] = it->second;
      // c_k = q_k + beta q_{k-2}
      if (k >= 2) accumulate(qk[k], qk[k - 2], 1, true);
    }
    if (!qk[deg].empty() || !qk[deg - 1].empty()) return false;
    for (int k = 0; k <= deg - 2; ++k)
      for (const auto& [e, c] : qk[k])
        out += FormalPoly::monomial({rk.q, k, rk.s, e, rk.hbar, rk.lambda, 0}, c);
  }
  quot = out;
  return true;
}

std::string rational_str(const Rational& r) {
  std::ostringstream os;
  os << r;
  return os.str();
}

std::string monomial_vars(const Monomial& m) {
  std::string out;
  auto put = [&](const char* name, int e) {
    if (e == 0) return;
    if (!out.empty()) out += "*";
    out += name;
    if (e != 1) out += "^" + std::to_string(e);
  };
  put("hbar", m.hbar);
  put("lambda", m.lambda);
  put("beta", m.beta);
  put("q", m.q);
  put("p", m.p);
  put("s", m.s);
  return out;
}

// Signed text of c * vars; a leading '-' marks negative terms.
std::string term_str(const GaussRational& c, const std::string& vars) {
  std::string coef;
  bool neg = false;
  if (c.im == 0) {
    neg = c.re < 0;
    const Rational a = neg ? Rational(-c.re) : c.re;
    coef = a == 1 && !vars.empty() ? "" : rational_str(a);
  } else if (c.re == 0) {
    neg = c.im < 0;
    const Rational b = neg ? Rational(-c.im) : c.im;
    coef = (b == 1 ? "" : rational_str(b) + "*") + "i";
  } else {
    coef = "(" + rational_str(c.re) + (c.im < 0 ? " - " : " + ") +
           rational_str(c.im < 0 ? Rational(-c.im) : c.im) + "*i)";
  }
  std::string body = coef;
  if (!vars.empty()) body += (coef.empty() ? "" : "*") + vars;
  return (neg ? "-" : "") + body;
}

bool term_order(const std::pair<Monomial, GaussRational>& x, const std::pair<Monomial, GaussRational>& y) {
  const Monomial& a = x.first;
  const Monomial& b = y.first;
  auto key = [](const Monomial& m) {
    return std::tuple(m.hbar, m.lambda, m.q + m.p + m.s + m.beta, m.beta, m.q, m.p, m.s);
  };
  return key(a) < key(b);
}

}  // namespace

FormalPoly FormalPoly::constant(const Rational& re, const Rational& im) { return monomial({}, {re, im}); }

FormalPoly FormalPoly::monomial(const Monomial& m, const GaussRational& c) {
  if (m.q < 0 || m.p < 0 || m.s < 0 || m.beta < 0 || m.hbar < 0 || m.lambda < 0 || m.d < 0)
    throw std::invalid_argument("FormalPoly: negative exponent");
  FormalPoly f;
  f.add(m, c);
  // s^2 -> 1 + beta p^2
  if (m.s >= 2) {
    FormalPoly base = monomial({m.q, m.p, m.s % 2, m.beta, m.hbar, m.lambda, m.d}, c);
    for (int k = 0; k < m.s / 2; ++k) base = times_w(base);
    return base;
  }
  return f;
}

FormalPoly FormalPoly::one_plus_beta_p2() { return constant(1) + monomial({.p = 2, .beta = 1}); }

void FormalPoly::add(const Monomial& m, const GaussRational& c) {
  if (c.is_zero()) return;
  auto it = terms_.find(m);
  if (it == terms_.end()) {
    terms_.emplace(m, c);
    return;
  }
  it->second = it->second + c;
  if (it->second.is_zero()) terms_.erase(it);
}

FormalPoly& FormalPoly::operator+=(const FormalPoly& o) {
  for (const auto& [m, c] : o.terms_) add(m, c);
  return *this;
}

FormalPoly& FormalPoly::operator-=(const FormalPoly& o) {
  for (const auto& [m, c] : o.terms_) add(m, {-c.re, -c.im});
  return *this;
}

FormalPoly FormalPoly::operator-() const { return FormalPoly() - *this; }

FormalPoly operator*(const FormalPoly& a, const FormalPoly& b) {
  FormalPoly out;
  for (const auto& [ma, ca] : a.terms_)
    for (const auto& [mb, cb] : b.terms_) {
      const Monomial m{ma.q + mb.q, ma.p + mb.p, ma.s + mb.s, ma.beta + mb.beta,
                       ma.hbar + mb.hbar, ma.lambda + mb.lambda, ma.d + mb.d};
      if (m.s < 2)
        out.add(m, ca * cb);
      else
        out += FormalPoly::monomial(m, ca * cb);
    }
  return out;
}

FormalPoly& FormalPoly::operator*=(const FormalPoly& o) { return *this = *this * o; }

FormalPoly pow(const FormalPoly& f, int k) {
  FormalPoly r = FormalPoly::constant(1);
  for (int i = 0; i < k; ++i) r *= f;
  return r;
}

FormalPoly FormalPoly::canonical() const {
  int D = 0;
  for (const auto& [m, c] : terms_) D = std::max(D, m.d);
  FormalPoly num;
  for (const auto& [m, c] : terms_) {
    Monomial k = m;
    k.d = 0;
    FormalPoly t = monomial(k, c);
    for (int r = 0; r < D - m.d; ++r) t = times_w(t);
    num += t;
  }
  FormalPoly quot;
  while (D > 0 && !num.terms_.empty() && divide_w(num, quot)) {
    num = quot;
    --D;
  }
  if (num.terms_.empty()) return num;
  FormalPoly out;
  for (const auto& [m, c] : num.terms_) {
    Monomial k = m;
    k.d = D;
    out.add(k, c);
  }
  return out;
}

bool FormalPoly::is_zero() const { return canonical().terms_.empty(); }

std::string FormalPoly::str() const {
  const FormalPoly c = canonical();
  if (c.terms_.empty()) return "0";
  std::vector<std::pair<Monomial, GaussRational>> ts(c.terms_.begin(), c.terms_.end());
  std::sort(ts.begin(), ts.end(), term_order);
  const int D = ts.front().first.d;

  Monomial common{INT_MAX, INT_MAX, INT_MAX, INT_MAX, INT_MAX, INT_MAX, 0};
  bool all_imag = true;
  for (const auto& [m, k] : ts) {
    common.q = std::min(common.q, m.q);
    common.p = std::min(common.p, m.p);
    common.s = std::min(common.s, m.s);
    common.beta = std::min(common.beta, m.beta);
    common.hbar = std::min(common.hbar, m.hbar);
    common.lambda = std::min(common.lambda, m.lambda);
    all_imag = all_imag && k.re == 0;
  }
  std::string out;
  if (ts.size() == 1) {
    out = term_str(ts[0].second, monomial_vars(ts[0].first));
  } else {
    std::string prefix = all_imag ? "i" : "";
    const std::string cv = monomial_vars(common);
    if (!cv.empty()) prefix += (prefix.empty() ? "" : "*") + cv;
    std::string body;
    for (std::size_t t = 0; t < ts.size(); ++t) {
      Monomial m = ts[t].first;
      m.q -= common.q;
      m.p -= common.p;
      m.s -= common.s;
      m.beta -= common.beta;
      m.hbar -= common.hbar;
      m.lambda -= common.lambda;
      GaussRational k = ts[t].second;
      if (all_imag) k = {k.im, 0};
      std::string s = term_str(k, monomial_vars(m));
      const bool neg = s[0] == '-';
      if (neg) s.erase(0, 1);
      if (t == 0)
        body = (neg ? "-" : "") + s;
      else
        body += (neg ? " - " : " + ") + s;
    }
    out = prefix.empty() ? body : prefix + "*(" + body + ")";
  }
  if (D == 1) out = "(" + out + ")/(1 + beta*p^2)";
  if (D > 1) out = "(" + out + ")/(1 + beta*p^2)^" + std::to_string(D);
  return out;
}

int FormalPoly::degree_q() const {
  int d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m.q);
  return d;
}

int FormalPoly::max_hbar() const {
  int d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m.hbar);
  return d;
}

FormalPoly FormalPoly::hbar_coefficient(int k) const {
  FormalPoly out;
  for (const auto& [m, c] : terms_)
    if (m.hbar == k) {
      Monomial x = m;
      x.hbar = 0;
      out.add(x, c);
    }
  return out;
}

cplx FormalPoly::eval(double q, double p, double beta, double hbar, double lambda) const {
  const double w = 1.0 + beta * p * p;
  cplx sum = 0.0;
  for (const auto& [m, c] : terms_) {
    const double v = std::pow(q, m.q) * std::pow(p, m.p) * std::pow(std::sqrt(w), m.s) * std::pow(beta, m.beta) *
                     std::pow(hbar, m.hbar) * std::pow(lambda, m.lambda) / std::pow(w, m.d);
    sum += cplx(c.re.convert_to<double>(), c.im.convert_to<double>()) * v;
  }
  return sum;
}

FormalPoly FormalPoly::d_q() const {
  FormalPoly out;
  for (const auto& [m, c] : terms_) {
    if (m.q == 0) continue;
    Monomial k = m;
    --k.q;
    out.add(k, c * GaussRational{m.q, 0});
  }
  return out;
}

FormalPoly FormalPoly::d_p() const {
  FormalPoly out;
  for (const auto& [m, c] : terms_) {
    if (m.p > 0) {
      Monomial k = m;
      --k.p;
      out.add(k, c * GaussRational{m.p, 0});
    }
    // d/dp s = beta p s / (1 + beta p^2) and d/dp w^-d = -2 d beta p / w^(d+1)
    const int f = m.s - 2 * m.d;
    if (f != 0) {
      Monomial k = m;
      ++k.beta;
      ++k.p;
      ++k.d;
      out.add(k, c * GaussRational{f, 0});
    }
  }
  return out;
}

DerivationPair DerivationPair::main() {
  return {"MAIN", [](const FormalPoly& f) { return f.d_q(); },
          [](const FormalPoly& f) { return times_w(f.d_p()); }};
}

DerivationPair DerivationPair::alt() {
  const FormalPoly s_inv = FormalPoly::monomial({.s = 1, .d = 1});
  const FormalPoly c = FormalPoly::monomial({.q = 1, .p = 1, .s = 1, .beta = 1}, {-1, 0});
  return {"ALT", [s_inv](const FormalPoly& f) { return s_inv * f.d_q(); },
          [c](const FormalPoly& f) { return c * f.d_q() + FormalPoly::s() * times_w(f.d_p()); }};
}

FormalStarResult formal_star(const DerivationPair& pair, const FormalPoly& f, const FormalPoly& g, int K) {
  if (K < 0) throw std::invalid_argument("formal_star: negative order");
  // each order-k term carries k position-type derivations in total
  const int bound = f.degree_q() + g.degree_q();
  const int order = std::min(K, bound);

  auto table = [&](const FormalPoly& x) {
    std::vector<std::vector<FormalPoly>> t(order + 1, std::vector<FormalPoly>(order + 1));
    for (int j = 0; j <= order; ++j) {
      t[0][j] = j == 0 ? x : pair.b(t[0][j - 1]);
      for (int i = 1; i + j <= order; ++i) t[i][j] = pair.a(t[i - 1][j]);
    }
    return t;
  };
  const auto tf = table(f), tg = table(g);
  const FormalPoly one_minus = FormalPoly::constant(1) - FormalPoly::lambda();
  const FormalPoly minus_lam = -FormalPoly::lambda();

  FormalPoly sum;
  FormalPoly ih_k = FormalPoly::constant(1);
  Rational fact = 1;
  for (int k = 0; k <= order; ++k) {
    if (k > 0) {
      ih_k *= FormalPoly::i() * FormalPoly::hbar();
      fact *= k;
    }
    FormalPoly inner;
    Rational binom = 1;
    for (int l = 0; l <= k; ++l) {
      if (l > 0) binom = binom * (k - l + 1) / l;
      inner += FormalPoly::constant(binom) * pow(one_minus, l) * pow(minus_lam, k - l) * tf[l][k - l] *
               tg[k - l][l];
    }
    sum += FormalPoly::constant(Rational(1) / fact) * ih_k * inner;
  }
  return {sum.canonical(), K >= bound, order};
}

FormalPoly formal_commutator(const DerivationPair& pair, const FormalPoly& f, const FormalPoly& g, int K) {
  return (formal_star(pair, f, g, K).value - formal_star(pair, g, f, K).value).canonical();
}

FormalPoly classical_limit(const DerivationPair& pair, const FormalPoly& f, const FormalPoly& g) {
  const FormalPoly c = formal_commutator(pair, f, g, 1).hbar_coefficient(1);
  return (FormalPoly::constant(0, -1) * c).canonical();
}

LatticeField eval_on_grid(const FormalPoly& f, const BetaContext& ctx, int n, int M) {
  LatticeField lat(ctx, n, M);
  const AngleGrid ag(n);
  for (int m = -M; m <= M; ++m)
    for (int k = 0; k < n; ++k)
      lat.at(m, k) = f.eval(lat.q(m), std::tan(ag.node(k)) / ctx.sqrt_beta(), ctx.beta, ctx.hbar, ctx.lambda);
  return lat;
}

}  // namespace mlq
