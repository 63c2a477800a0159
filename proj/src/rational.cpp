#include "pdiv/rational.hpp"

#include <gmp.h>

namespace pdiv {

long val_int(const Int& n, const Int& p) {
    if (n == 0) throw std::invalid_argument("val_int: zero argument");
    Int m = abs(n);
    long v = 0;
    while (mpz_divisible_p(m.backend().data(), p.backend().data())) {
        m /= p;
        ++v;
    }
    return v;
}

PVal val_p(const Rat& x, const Int& p) {
    if (x == 0) return PVal::inf();
    return PVal::of(val_int(numerator(x), p) - val_int(denominator(x), p));
}

Rat pow_p(const Int& p, long e) {
    Int q = pow(p, static_cast<unsigned>(e >= 0 ? e : -e));
    return e >= 0 ? Rat(q) : Rat(Int(1), q);
}

Rat parse_rat(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("parse_rat: empty string");
    const auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rat(Int(s));
        Int num(s.substr(0, slash));
        Int den(s.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("parse_rat: zero denominator");
        return Rat(num, den);  // canonicalizes, denominator made positive
    } catch (const std::runtime_error&) {
        throw std::invalid_argument("parse_rat: malformed rational '" + s + "'");
    }
}

std::string rat_str(const Rat& x) { return x.str(); }

bool is_prime(const Int& p) {
    if (p < 2) return false;
    return mpz_probab_prime_p(p.backend().data(), 32) != 0;
}

Rat canon_rep(const Rat& x, const Int& p, long v) {
    if (x == 0) return Rat(0);
    const long nu = val_p(x, p).v;
    if (nu >= v) return Rat(0);
    // x = p^nu * a/b with a, b prime to p; reduce a/b modulo p^{v-nu}.
    Int num = numerator(x), den = denominator(x);
    Int a = num / pow(p, static_cast<unsigned>(val_int(num, p)));
    Int b = den / pow(p, static_cast<unsigned>(val_int(den, p)));
    Int pk = pow(p, static_cast<unsigned>(v - nu));
    Int binv;
    if (mpz_invert(binv.backend().data(), b.backend().data(), pk.backend().data()) == 0)
        throw std::logic_error("canon_rep: non-invertible unit");
    Int w = ((a * binv) % pk + pk) % pk;
    return Rat(w) * pow_p(p, nu);
}

}  // namespace pdiv
