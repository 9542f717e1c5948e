#include "btlf/numeric.hpp"

#include <sstream>

namespace btlf {

const char* err_name(Err code) {
  switch (code) {
    case Err::DegenerateExtension: return "DegenerateExtension";
    case Err::UnsupportedResidueChar: return "UnsupportedResidueChar";
    case Err::DimensionMismatch: return "DimensionMismatch";
    case Err::AnisotropicTooLarge: return "AnisotropicTooLarge";
    case Err::IsotropySearchFailed: return "IsotropySearchFailed";
    case Err::RankDeficient: return "RankDeficient";
    case Err::ParameterOutOfRange: return "ParameterOutOfRange";
    case Err::NotSigmaFixed: return "NotSigmaFixed";
    case Err::NotShiftRelated: return "NotShiftRelated";
    case Err::H1Violated: return "H1Violated";
    case Err::NotInLieAlgebra: return "NotInLieAlgebra";
    case Err::UnsupportedFactorDegree: return "UnsupportedFactorDegree";
    case Err::DegenerateRestriction: return "DegenerateRestriction";
    case Err::BlockMismatch: return "BlockMismatch";
    case Err::NotEpsilonHermitian: return "NotEpsilonHermitian";
    case Err::UnsupportedDimension: return "UnsupportedDimension";
    case Err::UnsupportedTower: return "UnsupportedTower";
    case Err::BadInput: return "BadInput";
  }
  return "UnknownError";
}

std::string Val::str() const {
  if (!finite_) return "inf";
  return rat_str(q_);
}

bool is_odd_prime(long p) {
  if (p < 3 || p % 2 == 0) return false;
  for (long d = 3; d * d <= p; d += 2)
    if (p % d == 0) return false;
  return true;
}

Val vp(const Rat& q, long p) {
  if (q == 0) return Val::infinity();
  long v = 0;
  Int n = numerator(q);
  Int d = denominator(q);
  while (n % p == 0) { n /= p; ++v; }
  while (d % p == 0) { d /= p; --v; }
  return Val(Rat(v));
}

Rat unit_part(const Rat& q, long p) {
  if (q == 0) fail(Err::ParameterOutOfRange, "unit_part of zero");
  long v = to_long(numerator(vp(q, p).get()));
  Rat pk = 1;
  for (long i = 0; i < (v >= 0 ? v : -v); ++i) pk *= p;
  return v >= 0 ? Rat(q / pk) : Rat(q * pk);
}

static Int mod_inverse(Int a, const Int& m) {
  Int t = 0, newt = 1, r = m, newr = a % m;
  if (newr < 0) newr += m;
  while (newr != 0) {
    Int q = r / newr;
    Int tmp = t - q * newt; t = newt; newt = tmp;
    tmp = r - q * newr; r = newr; newr = tmp;
  }
  if (r != 1) fail(Err::ParameterOutOfRange, "mod_inverse: not invertible");
  if (t < 0) t += m;
  return t;
}

Rat reduce_mod_ppow(const Rat& q, long p, long k) {
  if (q == 0) return Rat(0);
  long a = to_long(numerator(vp(q, p).get()));
  if (a >= k) return Rat(0);
  // q = p^a * u with u a unit; reduce u mod p^{k-a}.
  Rat u = q;
  Rat pa = 1;
  for (long i = 0; i < (a >= 0 ? a : -a); ++i) pa *= p;
  u = a >= 0 ? Rat(q / pa) : Rat(q * pa);
  Int m = 1;
  for (long i = 0; i < k - a; ++i) m *= p;
  Int num = numerator(u) % m;
  if (num < 0) num += m;
  Int den_inv = mod_inverse(denominator(u) % m, m);
  Int r = (num * den_inv) % m;
  Rat out = Rat(r);
  return a >= 0 ? Rat(out * pa) : Rat(out / pa);
}

int legendre(const Rat& a, long p) {
  if (vp(a, p) != Val(0l)) fail(Err::ParameterOutOfRange, "legendre: not a unit");
  Int num = numerator(a) % p, den = denominator(a) % p;
  if (num < 0) num += p;
  if (den < 0) den += p;
  Int x = (num * mod_inverse(den, Int(p))) % p;
  // x^{(p-1)/2} mod p
  Int e = (p - 1) / 2, base = x, acc = 1;
  while (e > 0) {
    if (e % 2 == 1) acc = (acc * base) % p;
    base = (base * base) % p;
    e /= 2;
  }
  return acc == 1 ? 1 : -1;
}

static std::optional<Int> int_sqrt(const Int& n) {
  if (n < 0) return std::nullopt;
  if (n == 0) return Int(0);
  Int x = n, y = (x + 1) / 2;
  while (y < x) { x = y; y = (x + n / x) / 2; }
  if (x * x == n) return x;
  return std::nullopt;
}

std::optional<Rat> rat_sqrt(const Rat& q) {
  if (q < 0) return std::nullopt;
  auto sn = int_sqrt(numerator(q));
  if (!sn) return std::nullopt;
  auto sd = int_sqrt(denominator(q));
  if (!sd) return std::nullopt;
  return Rat(*sn) / Rat(*sd);
}

Int rat_floor(const Rat& q) {
  Int n = numerator(q), d = denominator(q);
  Int f = n / d;
  if (n < 0 && f * d != n) f -= 1;
  return f;
}

Int rat_ceil(const Rat& q) { return -rat_floor(-q); }

Rat rep_mod(const Rat& q, const Rat& period) {
  return q - Rat(rat_floor(Rat(q / period))) * period;
}

long to_long(const Int& n) {
  return static_cast<long>(n);
}

Rat parse_rat(const std::string& s) {
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rat(Int(s));
    Int num(s.substr(0, slash));
    Int den(s.substr(slash + 1));
    if (den == 0) fail(Err::BadInput, "rational with zero denominator: " + s);
    return Rat(num, den);
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    fail(Err::BadInput, "cannot parse rational: " + s);
  }
}

std::string rat_str(const Rat& q) {
  std::ostringstream os;
  os << numerator(q);
  if (denominator(q) != 1) os << "/" << denominator(q);
  return os.str();
}

}  // namespace btlf
