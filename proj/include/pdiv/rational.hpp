#pragma once

/* Exact rational scalars with a distinguished prime: the arithmetic
 * substrate for all p-local lattice computations. Backed by GMP. */

#include <boost/multiprecision/gmp.hpp>

#include <optional>
#include <stdexcept>
#include <string>

namespace pdiv {

using Int = boost::multiprecision::mpz_int;
using Rat = boost::multiprecision::mpq_rational;

/* p-adic valuation value; v(0) is a distinguished +infinity sentinel. */
struct PVal {
    bool infinite = false;
    long v = 0;

    static PVal inf() { return PVal{true, 0}; }
    static PVal of(long x) { return PVal{false, x}; }

    bool operator==(const PVal&) const = default;
    bool operator<(const PVal& o) const {
        if (infinite) return false;
        if (o.infinite) return true;
        return v < o.v;
    }
};

/* Exponent of p in n; n must be non-zero. */
long val_int(const Int& n, const Int& p);

/* p-adic valuation of an exact rational. */
PVal val_p(const Rat& x, const Int& p);

/* p^e as a rational; e may be negative. */
Rat pow_p(const Int& p, long e);

/* Parse "a/b" or "a" (canonicalized, denominator > 0); throws on b = 0
 * or malformed input. */
Rat parse_rat(const std::string& s);

std::string rat_str(const Rat& x);

bool is_prime(const Int& p);

/* Canonical representative of x modulo p^v Z_(p): the unique element of
 * Z[1/p] in [0, p^v) congruent to x. */
Rat canon_rep(const Rat& x, const Int& p, long v);

/* Exact rational with a distinguished prime and explicit p-valuation. */
class PLocalScalar {
  public:
    PLocalScalar(Int prime, Rat value) : p_(std::move(prime)), v_(std::move(value)) {
        if (p_ < 2) throw std::invalid_argument("PLocalScalar: prime must be >= 2");
        if (!is_prime(p_)) throw std::invalid_argument("PLocalScalar: p is not prime");
    }

    const Int& prime() const { return p_; }
    const Rat& value() const { return v_; }
    PVal valuation() const { return val_p(v_, p_); }
    bool is_p_integral() const { return !(valuation() < PVal::of(0)); }

    bool operator==(const PLocalScalar& o) const { return p_ == o.p_ && v_ == o.v_; }

  private:
    Int p_;
    Rat v_;
};

}  // namespace pdiv
