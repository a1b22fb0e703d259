#pragma once

// Exact arbitrary-precision number-theoretic primitives shared by the
// sieve pipelines.  Everything here is a pure function over immutable
// values; no floating point is used on any arithmetic path.

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace qsieve {

/// Arbitrary-precision unsigned integer carrier.  Values handled by this
/// library are kept non-negative; signed intermediates only appear inside
/// modular reductions.
using Natural = boost::multiprecision::cpp_int;

/// Legendre symbol outcome.
enum class Legendre : int {
    non_residue = -1,
    divides = 0,
    residue = 1,
};

inline int to_int(Legendre l) { return static_cast<int>(l); }

/// All primes p <= bound, strictly ascending.  Bounds below 2 yield an
/// empty list.  The bound must fit in memory as a bit table.
inline std::vector<Natural> sieve_of_eratosthenes(const Natural& bound) {
    std::vector<Natural> primes;
    if (bound < 2) return primes;
    if (bound > 0x40000000) {
        throw std::invalid_argument("sieve bound too large for a bit table");
    }
    const std::size_t limit = bound.convert_to<std::size_t>();
    std::vector<bool> composite(limit + 1, false);
    for (std::size_t p = 2; p <= limit; ++p) {
        if (composite[p]) continue;
        primes.emplace_back(p);
        for (std::size_t q = p * p; q <= limit; q += p) composite[q] = true;
    }
    return primes;
}

/// base^exp mod modulus by binary exponentiation, O(log exp) multiplies.
inline Natural mod_pow(const Natural& base, const Natural& exp, const Natural& modulus) {
    if (modulus == 0) throw std::invalid_argument("zero modulus");
    if (modulus == 1) return 0;
    Natural result = 1;
    Natural b = base % modulus;
    Natural e = exp;
    while (e > 0) {
        if ((e & 1) != 0) result = (result * b) % modulus;
        e >>= 1;
        b = (b * b) % modulus;
    }
    return result;
}

/// Legendre symbol (a/p) for odd prime p, by Euler's criterion:
/// a^((p-1)/2) mod p, with p-1 mapped to -1.  A result outside {0, 1, p-1}
/// means p was not prime.
inline Legendre legendre_symbol(const Natural& a, const Natural& p) {
    if (p < 3 || (p & 1) == 0) throw std::invalid_argument("invalid odd prime");
    const Natural r = mod_pow(a, (p - 1) >> 1, p);
    if (r == 0) return Legendre::divides;
    if (r == 1) return Legendre::residue;
    if (r == p - 1) return Legendre::non_residue;
    throw std::invalid_argument("invalid odd prime");
}

/// Greatest common divisor; gcd(a, 0) = a.
inline Natural gcd(Natural a, Natural b) {
    while (b != 0) {
        Natural r = a % b;
        a = std::move(b);
        b = std::move(r);
    }
    return a;
}

namespace detail {

// Floor square root by integer Newton iteration.  The seed overshoots the
// root, so the iteration decreases monotonically and the loop exit is exact.
inline Natural isqrt_floor(const Natural& n) {
    if (n == 0) return 0;
    Natural x = Natural(1) << (msb(n) / 2 + 1);
    for (;;) {
        Natural y = (x + n / x) >> 1;
        if (y >= x) return x;
        x = std::move(y);
    }
}

}  // namespace detail

/// Smallest s with s*s >= n, computed exactly (no floating point).
inline Natural isqrt_ceil(const Natural& n) {
    Natural s = detail::isqrt_floor(n);
    if (s * s < n) ++s;
    return s;
}

/// True when n is a perfect square.
inline bool is_perfect_square(const Natural& n) {
    const Natural s = detail::isqrt_floor(n);
    return s * s == n;
}

}  // namespace qsieve
