#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cl {

using Nat = std::uint64_t;

/// Raised when a value lies outside an operation's domain.
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A named premise of a construction failed.
struct PreconditionError : DomainError {
  using DomainError::DomainError;
};

/// Exhaustive work exceeded the configured step budget.
struct BudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GrowthSequences {
  std::size_t imax = 0;
  std::vector<Nat> n1, n2, n3;

  /// n2 at index i-1, with the convention n2[-1] = 0.
  Nat n2_prev(Nat i) const { return i == 0 ? 0 : n2.at(i - 1); }
  bool operator==(const GrowthSequences&) const = default;
};

/// First violated inequality, e.g. "n2[0] < n1[1] violated", or nullopt.
std::optional<std::string> growth_violation(const GrowthSequences& g);

/// Default profile: n1[i] = 2^(2^(i+2)), n2 = n1, n3[i] = 4 (i+2) n2[i].
/// Values must fit 64 bits, so imax <= 3.
GrowthSequences make_growth(std::size_t imax);
GrowthSequences make_growth(std::size_t imax, std::vector<Nat> n1, std::vector<Nat> n2,
                            std::vector<Nat> n3);

/// Exact value max(0, lg(num/den)) with den >= 1.
struct LgRatio {
  Nat num = 1, den = 1;

  static LgRatio zero() { return {1, 1}; }
  static LgRatio of(Nat num, Nat den);
  double value() const;
  bool is_zero() const { return num <= den; }
};

/// a >= b + t, exactly.
bool lg_geq(const LgRatio& a, const LgRatio& b, std::int64_t t = 0);
/// a >= t for an integer t.
bool lg_geq_int(const LgRatio& a, std::int64_t t);
/// Decimal rendering with six places; identical on every platform.
std::string lg_str(const LgRatio& a);

/// ceil(lg x) for x > 0, 0 for x = 0.
Nat log2_ceil(Nat x);
/// ceil(lg(num/den)) clipped at 0; den >= 1.
Nat log2_ceil_ratio(Nat num, Nat den);
/// floor(n / 2^k), 0 once the shift leaves 64 bits.
Nat shr_floor(Nat n, Nat k);
Nat binomial(Nat n, Nat k);

struct NormShape {
  std::string name;
  std::function<LgRatio(Nat, Nat)> f;
  std::function<Nat(Nat, Nat)> kprime;
};

/// f(n,k) = lg(n/k), k'(n,k) = round(sqrt(nk)) clamped into (k, n).
const NormShape& default_shape();

LgRatio f_eval(const NormShape& s, Nat n, Nat k);
Nat halving_witness(const NormShape& s, Nat n, Nat k);

Nat isqrt(Nat x);

}  // namespace cl
