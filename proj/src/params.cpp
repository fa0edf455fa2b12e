#include "creature_lab/params.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace cl {

using boost::multiprecision::cpp_int;

std::optional<std::string> growth_violation(const GrowthSequences& g) {
  const std::size_t len = g.imax + 1;
  if (g.n1.size() != len || g.n2.size() != len || g.n3.size() != len)
    return "sequence length != imax+1";
  for (std::size_t i = 0; i < len; ++i) {
    auto at = "[" + std::to_string(i) + "]";
    if (g.n1[i] == 0) return "n1" + at + " > 0 violated";
    if (g.n2[i] == 0) return "n2" + at + " > 0 violated";
    if (g.n3[i] == 0) return "n3" + at + " > 0 violated";
  }
  // Report in the order the inequalities are displayed, lowest index first.
  for (std::size_t i = 0; i < len; ++i) {
    if (!(cpp_int(i) * g.n1[i] < g.n3[i]))
      return std::to_string(i) + "*n1[" + std::to_string(i) + "] < n3[" + std::to_string(i) +
             "] violated";
    if (i + 1 < len) {
      if (!(g.n2[i] < g.n1[i + 1]))
        return "n2[" + std::to_string(i) + "] < n1[" + std::to_string(i + 1) + "] violated";
      if (!(cpp_int(g.n1[i]) * g.n1[i] <= g.n1[i + 1]))
        return "n1[" + std::to_string(i) + "]^2 <= n1[" + std::to_string(i + 1) + "] violated";
    }
    if (!(g.n1[i] <= g.n2[i]))
      return "n1[" + std::to_string(i) + "] <= n2[" + std::to_string(i) + "] violated";
  }
  return std::nullopt;
}

GrowthSequences make_growth(std::size_t imax) {
  if (imax > 3) throw DomainError("default growth profile overflows 64 bits for imax > 3");
  GrowthSequences g;
  g.imax = imax;
  for (std::size_t i = 0; i <= imax; ++i) {
    Nat n1 = Nat{1} << (Nat{1} << (i + 2));  // 2^4, 2^8, 2^16, 2^32
    g.n1.push_back(n1);
    g.n2.push_back(n1);
    g.n3.push_back((i + 2) * n1 * 4);
  }
  if (auto v = growth_violation(g)) throw DomainError("default profile invalid: " + *v);
  return g;
}

GrowthSequences make_growth(std::size_t imax, std::vector<Nat> n1, std::vector<Nat> n2,
                            std::vector<Nat> n3) {
  GrowthSequences g{imax, std::move(n1), std::move(n2), std::move(n3)};
  if (auto v = growth_violation(g)) throw DomainError(*v);
  return g;
}

LgRatio LgRatio::of(Nat num, Nat den) {
  if (den == 0) throw DomainError("lg ratio with zero denominator");
  if (num <= den) return zero();
  return {num, den};
}

double LgRatio::value() const { return is_zero() ? 0.0 : std::log2(double(num) / double(den)); }

bool lg_geq(const LgRatio& a, const LgRatio& b, std::int64_t t) {
  // max(1, a) >= max(1, b) * 2^t, compared as integers.
  cpp_int an = a.is_zero() ? 1 : a.num, ad = a.is_zero() ? 1 : a.den;
  cpp_int bn = b.is_zero() ? 1 : b.num, bd = b.is_zero() ? 1 : b.den;
  cpp_int lhs = an * bd, rhs = bn * ad;
  if (t >= 0)
    rhs <<= unsigned(t);
  else
    lhs <<= unsigned(-t);
  return lhs >= rhs;
}

bool lg_geq_int(const LgRatio& a, std::int64_t t) { return lg_geq(a, LgRatio::zero(), t); }

std::string lg_str(const LgRatio& a) {
  if (a.is_zero()) return "0.000000";
  double v = a.value();
  long long micro = std::llround(v * 1e6);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%lld.%06lld", micro / 1000000, micro % 1000000);
  return buf;
}

Nat log2_ceil(Nat x) {
  if (x <= 1) return 0;
  Nat m = 0;
  while (m < 64 && (Nat{1} << m) < x) ++m;
  return m;
}

Nat log2_ceil_ratio(Nat num, Nat den) {
  if (den == 0) throw DomainError("log2 of ratio with zero denominator");
  if (num == 0 || num <= den) return 0;
  Nat m = 0;
  cpp_int d = den;
  while ((d << unsigned(m)) < num) ++m;
  return m;
}

Nat shr_floor(Nat n, Nat k) { return k >= 64 ? 0 : (n >> k); }

Nat binomial(Nat n, Nat k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  cpp_int r = 1;
  for (Nat j = 1; j <= k; ++j) r = r * (n - k + j) / j;
  if (r > cpp_int(std::numeric_limits<Nat>::max())) return std::numeric_limits<Nat>::max();
  return static_cast<Nat>(r);
}

Nat isqrt(Nat x) {
  Nat r = static_cast<Nat>(std::sqrt(double(x)));
  while (cpp_int(r) * r > x) --r;
  while (cpp_int(r + 1) * (r + 1) <= x) ++r;
  return r;
}

namespace {

LgRatio lg_shape(Nat n, Nat k) {
  if (k == 0) throw DomainError("f(n,0) undefined");
  return LgRatio::of(n, k);
}

Nat sqrt_kprime(Nat n, Nat k) {
  if (k == 0) throw DomainError("f(n,0) undefined");
  if (!lg_geq_int(lg_shape(n, k), 1))
    throw PreconditionError("halving witness needs f(n,k) >= 1");
  cpp_int nk = cpp_int(n) * k;
  Nat r = isqrt(static_cast<Nat>(nk));
  if (nk > cpp_int(r) * r + r) ++r;  // round half up: sqrt(x) >= r + 1/2
  Nat lo = k + 1, hi = n - 1;
  if (lo > hi) throw PreconditionError("no integer strictly between k and n");
  return std::clamp(r, lo, hi);
}

}  // namespace

const NormShape& default_shape() {
  static const NormShape s{"lg", lg_shape, sqrt_kprime};
  return s;
}

LgRatio f_eval(const NormShape& s, Nat n, Nat k) {
  if (k == 0) throw DomainError("f(n,0) undefined");
  return s.f(n, k);
}

Nat halving_witness(const NormShape& s, Nat n, Nat k) {
  if (k == 0) throw DomainError("f(n,0) undefined");
  return s.kprime(n, k);
}

}  // namespace cl
