#ifndef RASM_RATIONAL_HPP
#define RASM_RATIONAL_HPP

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace rasm {

// Exact arbitrary-precision arithmetic. All operator entries, weights and
// probabilities in the library are Rat unless a float mode is requested.
using Int = mpz_class;
using Rat = mpq_class;

inline Rat make_rat(long num, long den = 1) {
    if (den == 0) throw std::invalid_argument("make_rat: zero denominator");
    Rat r(num, den);
    r.canonicalize();
    return r;
}

inline Rat make_rat(const Int& num, const Int& den) {
    if (den == 0) throw std::invalid_argument("make_rat: zero denominator");
    Rat r(num, den);
    r.canonicalize();
    return r;
}

// Accepts "p", "-p", "p/q" with decimal integers.
inline Rat parse_rat(const std::string& s) {
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) {
            Int n(s, 10);
            return Rat(n);
        }
        Int n(s.substr(0, slash), 10);
        Int d(s.substr(slash + 1), 10);
        return make_rat(n, d);
    } catch (const std::invalid_argument&) {
        throw std::invalid_argument("parse_rat: malformed rational '" + s + "'");
    }
}

// "p" when the denominator is 1, otherwise "p/q".
inline std::string rat_to_string(const Rat& r) {
    if (r.get_den() == 1) return r.get_num().get_str();
    return r.get_num().get_str() + "/" + r.get_den().get_str();
}

inline bool is_integer(const Rat& r) { return r.get_den() == 1; }

inline Int rat_num(const Rat& r) { return r.get_num(); }
inline Int rat_den(const Rat& r) { return r.get_den(); }

inline double rat_to_double(const Rat& r) { return mpq_get_d(r.get_mpq_t()); }

inline Int factorial(unsigned n) {
    Int f;
    mpz_fac_ui(f.get_mpz_t(), n);
    return f;
}

inline Int binomial(unsigned n, unsigned k) {
    Int b;
    mpz_bin_uiui(b.get_mpz_t(), n, k);
    return b;
}

}  // namespace rasm

#endif
