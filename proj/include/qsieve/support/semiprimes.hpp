#pragma once

// Seeded generation of primes and semiprimes for benchmarks and test
// fixtures.  Everything is deterministic for a given engine state.

#include "qsieve/numtheory.hpp"

#include <cstdint>
#include <random>
#include <stdexcept>

namespace qsieve::support {

/// Deterministic trial-division primality for 64-bit candidates.
inline bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    if (n % 2 == 0) return n == 2;
    for (std::uint64_t d = 3; d * d <= n; d += 2) {
        if (n % d == 0) return false;
    }
    return true;
}

/// Uniform draw from [lo, hi] via rejection, deterministic per engine state.
inline std::uint64_t draw_in_range(std::mt19937_64& rng, std::uint64_t lo, std::uint64_t hi) {
    const std::uint64_t span = hi - lo + 1;
    const std::uint64_t limit = span == 0 ? ~std::uint64_t(0) : (~std::uint64_t(0) / span) * span;
    for (;;) {
        const std::uint64_t r = rng();
        if (span == 0) return r;
        if (r < limit) return lo + r % span;
    }
}

/// Random prime with exactly `bits` significant bits (2 <= bits <= 34).
inline std::uint64_t random_prime_with_bits(std::mt19937_64& rng, unsigned bits) {
    if (bits < 2 || bits > 34) throw std::invalid_argument("prime bit size out of range");
    for (;;) {
        std::uint64_t candidate =
            draw_in_range(rng, std::uint64_t(1) << (bits - 1), (std::uint64_t(1) << bits) - 1);
        candidate |= 1;
        if (is_prime_u64(candidate)) return candidate;
    }
}

/// Random prime in [lo, hi].
inline std::uint64_t random_prime_in_range(std::mt19937_64& rng, std::uint64_t lo,
                                           std::uint64_t hi) {
    if (lo > hi || hi < 2) throw std::invalid_argument("bad prime range");
    for (;;) {
        std::uint64_t candidate = draw_in_range(rng, lo, hi) | 1;
        if (candidate > hi) candidate -= 2;
        if (candidate >= lo && is_prime_u64(candidate)) return candidate;
    }
}

struct Semiprime {
    Natural n;
    std::uint64_t p;
    std::uint64_t q;
};

/// Odd semiprime with roughly `bits` total bits, split evenly between two
/// distinct primes.
inline Semiprime random_semiprime_with_bits(std::mt19937_64& rng, unsigned bits) {
    if (bits < 6 || bits > 66) throw std::invalid_argument("semiprime bit size out of range");
    const unsigned half = bits / 2;
    for (;;) {
        const std::uint64_t p = random_prime_with_bits(rng, half);
        const std::uint64_t q = random_prime_with_bits(rng, bits - half);
        if (p == q || p == 2 || q == 2) continue;
        return Semiprime{Natural(p) * q, p, q};
    }
}

/// Odd semiprime whose prime factors both lie in [lo, hi].
inline Semiprime random_semiprime_with_factors_in(std::mt19937_64& rng, std::uint64_t lo,
                                                  std::uint64_t hi) {
    for (;;) {
        const std::uint64_t p = random_prime_in_range(rng, lo, hi);
        const std::uint64_t q = random_prime_in_range(rng, lo, hi);
        if (p == q || p == 2 || q == 2) continue;
        return Semiprime{Natural(p) * q, p, q};
    }
}

}  // namespace qsieve::support
