#pragma once

// Exact rational scalars and p-local helpers shared by the whole library.
// All valuations are normalized so that v(p) = 1; values live in (1/e)Z
// for small e, plus a formal +infinity for 0.

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace btlf {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

// Error taxonomy. Every throwing operation documents which code it uses.
enum class Err {
  DegenerateExtension,
  UnsupportedResidueChar,
  DimensionMismatch,
  AnisotropicTooLarge,
  IsotropySearchFailed,
  RankDeficient,
  ParameterOutOfRange,
  NotSigmaFixed,
  NotShiftRelated,
  H1Violated,
  NotInLieAlgebra,
  UnsupportedFactorDegree,
  DegenerateRestriction,
  BlockMismatch,
  NotEpsilonHermitian,
  UnsupportedDimension,
  UnsupportedTower,
  BadInput,
};

class Error : public std::runtime_error {
 public:
  Error(Err code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Err code() const { return code_; }

 private:
  Err code_;
};

[[noreturn]] inline void fail(Err code, const std::string& what) { throw Error(code, what); }

const char* err_name(Err code);

// Extended valuation value: rational or +infinity (the valuation of 0).
class Val {
 public:
  Val() : finite_(false) {}  // +infinity
  Val(const Rat& q) : finite_(true), q_(q) {}
  Val(long n) : finite_(true), q_(n) {}
  static Val infinity() { return Val(); }

  bool is_finite() const { return finite_; }
  const Rat& get() const {
    if (!finite_) fail(Err::ParameterOutOfRange, "valuation is infinite");
    return q_;
  }

  friend bool operator==(const Val& a, const Val& b) {
    if (a.finite_ != b.finite_) return false;
    return !a.finite_ || a.q_ == b.q_;
  }
  friend bool operator!=(const Val& a, const Val& b) { return !(a == b); }
  friend bool operator<(const Val& a, const Val& b) {
    if (!a.finite_) return false;           // inf < x never
    if (!b.finite_) return true;            // finite < inf
    return a.q_ < b.q_;
  }
  friend bool operator<=(const Val& a, const Val& b) { return a == b || a < b; }
  friend bool operator>=(const Val& a, const Val& b) { return b <= a; }
  friend bool operator>(const Val& a, const Val& b) { return b < a; }

  friend Val operator+(const Val& a, const Val& b) {
    if (!a.finite_ || !b.finite_) return infinity();
    return Val(a.q_ + b.q_);
  }
  friend Val operator+(const Val& a, const Rat& b) { return a.finite_ ? Val(a.q_ + b) : a; }
  friend Val operator-(const Val& a, const Rat& b) { return a.finite_ ? Val(a.q_ - b) : a; }

  std::string str() const;

 private:
  bool finite_;
  Rat q_;
};

inline Val vmin(const Val& a, const Val& b) { return a < b ? a : b; }

bool is_odd_prime(long p);

// v_p of a rational; v_p(0) = infinity.
Val vp(const Rat& q, long p);

// Unit part: q / p^{vp(q)} for q != 0.
Rat unit_part(const Rat& q, long p);

// Canonical representative of q modulo p^k Z_(p), for any rational q and any
// integer k (the class has a unique representative of the form p^a * m with
// a = vp(q) and 0 <= m < p^{k-a}).
Rat reduce_mod_ppow(const Rat& q, long p, long k);

// Legendre symbol (a|p) for odd prime p, a a p-adic unit given as a rational.
int legendre(const Rat& a, long p);

// Rational square root if it exists (exact).
std::optional<Rat> rat_sqrt(const Rat& q);

// ceil / floor of a rational as integers.
Int rat_ceil(const Rat& q);
Int rat_floor(const Rat& q);

// representative of q modulo `period` inside [0, period)
Rat rep_mod(const Rat& q, const Rat& period);

long to_long(const Int& n);

// Parse / print "a/b" (or "a") rationals used across all JSON encodings.
Rat parse_rat(const std::string& s);
std::string rat_str(const Rat& q);

}  // namespace btlf
