#pragma once

// Independent oracles used to pin expected values.  Everything here is
// deliberately naive (trial division, exhaustive search, direct DFT
// matrices) and shares no code with the implementation paths it checks.

#include "qsieve/gf2.hpp"
#include "qsieve/numtheory.hpp"

#include <complex>
#include <cstdint>
#include <set>
#include <vector>

namespace oracles {

using qsieve::BitVec;
using qsieve::Gf2Matrix;
using qsieve::Natural;

inline bool naive_is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d) {
        if (n % d == 0) return false;
    }
    return true;
}

inline std::vector<std::uint64_t> naive_primes(std::uint64_t bound) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t n = 2; n <= bound; ++n) {
        if (naive_is_prime(n)) out.push_back(n);
    }
    return out;
}

/// O(exp) repeated multiplication.
inline std::uint64_t naive_mod_pow(std::uint64_t base, std::uint64_t exp, std::uint64_t mod) {
    unsigned __int128 r = 1 % mod;
    for (std::uint64_t i = 0; i < exp; ++i) r = (r * base) % mod;
    return static_cast<std::uint64_t>(r);
}

/// Legendre symbol by exhaustive search over squares mod p.
inline int legendre_by_squares(std::uint64_t a, std::uint64_t p) {
    const std::uint64_t r = a % p;
    if (r == 0) return 0;
    for (std::uint64_t x = 1; x < p; ++x) {
        if ((x * x) % p == r) return 1;
    }
    return -1;
}

/// Every x in [a, b] whose value x^2 - n is fully divided by primes <= B
/// (all of them, not just the factor base); pairs of (x, residual-free
/// exponent map keyed by prime).
struct NaiveSmooth {
    Natural x;
    std::vector<std::pair<std::uint64_t, std::uint32_t>> factorization;
};

inline std::vector<NaiveSmooth> naive_smooth_scan(const Natural& n, std::uint64_t B,
                                                  const Natural& a, const Natural& b) {
    const std::vector<std::uint64_t> primes = naive_primes(B);
    std::vector<NaiveSmooth> out;
    for (Natural x = a; x <= b; ++x) {
        Natural v = x * x - n;
        NaiveSmooth entry;
        entry.x = x;
        for (const std::uint64_t p : primes) {
            std::uint32_t e = 0;
            while (v % p == 0) {
                v /= p;
                ++e;
            }
            if (e) entry.factorization.emplace_back(p, e);
        }
        if (v == 1) out.push_back(std::move(entry));
    }
    return out;
}

/// All nonzero selections s (over rows) with s.M = 0, by enumeration.
inline std::set<std::vector<bool>> brute_force_left_nullspace(const Gf2Matrix& m) {
    std::set<std::vector<bool>> null;
    const std::size_t rows = m.rows();
    for (std::uint64_t mask = 1; mask < (std::uint64_t(1) << rows); ++mask) {
        std::vector<bool> parity(m.cols(), false);
        for (std::size_t r = 0; r < rows; ++r) {
            if (!(mask >> r & 1)) continue;
            for (std::size_t c = 0; c < m.cols(); ++c) {
                if (m.get(r, c)) parity[c] = !parity[c];
            }
        }
        if (std::none_of(parity.begin(), parity.end(), [](bool b) { return b; })) {
            std::vector<bool> sel(rows);
            for (std::size_t r = 0; r < rows; ++r) sel[r] = (mask >> r) & 1;
            null.insert(std::move(sel));
        }
    }
    return null;
}

/// The set spanned by GF(2) vectors (zero vector excluded).
inline std::set<std::vector<bool>> gf2_span(const std::vector<BitVec>& basis, std::size_t size) {
    std::set<std::vector<bool>> span;
    for (std::uint64_t mask = 1; mask < (std::uint64_t(1) << basis.size()); ++mask) {
        std::vector<bool> v(size, false);
        for (std::size_t i = 0; i < basis.size(); ++i) {
            if (!(mask >> i & 1)) continue;
            for (std::size_t j = 0; j < size; ++j) {
                if (basis[i].get(j)) v[j] = !v[j];
            }
        }
        if (std::any_of(v.begin(), v.end(), [](bool b) { return b; })) span.insert(std::move(v));
    }
    return span;
}

/// Direct DFT matrix: entry (j, k) = omega^{jk} / sqrt(N), omega = e^{2 pi i / N}.
inline std::vector<std::vector<std::complex<double>>> dft_matrix(unsigned width) {
    const std::size_t N = std::size_t(1) << width;
    std::vector<std::vector<std::complex<double>>> m(N, std::vector<std::complex<double>>(N));
    const double scale = 1.0 / std::sqrt(double(N));
    for (std::size_t j = 0; j < N; ++j) {
        for (std::size_t k = 0; k < N; ++k) {
            const double angle = 2.0 * 3.14159265358979323846 * double(j * k) / double(N);
            m[j][k] = std::polar(scale, angle);
        }
    }
    return m;
}

}  // namespace oracles
