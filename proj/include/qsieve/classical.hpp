#pragma once

// Classical quadratic sieve: factor-base construction, exact smooth-relation
// collection over an interval, GF(2) linear algebra, congruence-of-squares
// assembly and gcd extraction.
//
// The pipeline factors an odd composite n by scanning x = ceil(sqrt(n)),
// ceil(sqrt(n))+1, ... and keeping every x whose value x^2 - n factors
// completely over a factor base of small primes.  Relations whose exponent
// vectors sum to zero mod 2 give x^2 = y^2 (mod n) and usually a nontrivial
// gcd.

#include "qsieve/gf2.hpp"
#include "qsieve/numtheory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qsieve::classical {

// ---------------------------------------------------------------------------
// Errors

/// Base class for recoverable sieve-pipeline failures.
struct SieveError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Fewer than |factor base| + 1 smooth values in the whole interval.
struct InsufficientRelations : SieveError {
    InsufficientRelations(std::size_t found_, std::size_t needed_)
        : SieveError("insufficient relations: found " + std::to_string(found_) +
                     ", need at least " + std::to_string(needed_)),
          found(found_), needed(needed_) {}
    std::size_t found;
    std::size_t needed;
};

/// Every congruence of squares had x = +-y (mod n).
struct AllDependenciesTrivial : SieveError {
    AllDependenciesTrivial() : SieveError("all dependencies trivial") {}
};

struct InputIsPrime : SieveError {
    InputIsPrime() : SieveError("input is prime") {}
};

struct EmptyFactorBase : SieveError {
    EmptyFactorBase() : SieveError("empty factor base") {}
};

/// One line of post-mortem per escalation attempt.
struct AttemptDiagnostics {
    Natural smoothness_bound;
    Natural interval_half_width;
    std::size_t relations_found = 0;
    std::string outcome;
};

struct FactorizationFailed : SieveError {
    explicit FactorizationFailed(std::vector<AttemptDiagnostics> attempts_)
        : SieveError("factorization failed after " +
                     std::to_string(attempts_.size()) + " attempts"),
          attempts(std::move(attempts_)) {}
    std::vector<AttemptDiagnostics> attempts;
};

// ---------------------------------------------------------------------------
// Domain types

/// Sieve configuration for one factorization attempt.
struct SieveParams {
    Natural n;
    Natural smoothness_bound;     // B
    Natural interval_half_width;  // M; the interval is [ceil(sqrt n), +2M]
    std::size_t relation_margin = 5;  // extra relations past |fb|+1 before stopping

    static SieveParams create(Natural n, Natural smoothness_bound,
                              Natural interval_half_width,
                              std::size_t relation_margin = 5) {
        if (n < 15) throw std::invalid_argument("n below minimum (need n >= 15)");
        if ((n & 1) == 0) throw std::invalid_argument("n must be odd");
        if (is_perfect_square(n)) throw std::invalid_argument("n is a perfect square");
        if (smoothness_bound < 3) throw std::invalid_argument("smoothness bound must be >= 3");
        if (interval_half_width < 1) throw std::invalid_argument("interval half-width must be >= 1");
        return SieveParams{std::move(n), std::move(smoothness_bound),
                           std::move(interval_half_width), relation_margin};
    }
};

/// Primes usable in relations: 2 plus every odd prime p <= B with (n/p) = 1.
struct FactorBase {
    std::vector<std::uint64_t> primes;  // ascending
    Natural n;
};

/// One sieve hit: value = x^2 - n = prod primes[i]^exponents[i] exactly.
struct Relation {
    Natural x;
    Natural value;
    std::vector<std::uint32_t> exponents;
};

struct FactorResult {
    Natural f1;  // 1 < f1 <= f2 < n, f1 * f2 = n
    Natural f2;
    std::optional<std::pair<Natural, Natural>> witness;  // (x, y) with x^2 = y^2 (mod n)
    std::size_t attempts = 0;  // congruences tried across all escalations
};

// ---------------------------------------------------------------------------
// Parameter heuristics

namespace detail {

/// ln(n) for arbitrary-size n (exact enough for heuristics).
inline double natural_log(const Natural& n) {
    if (n <= 0) throw std::invalid_argument("log of non-positive value");
    const unsigned bits = msb(n);
    if (bits < 512) return std::log(n.convert_to<double>());
    const std::uint64_t top = Natural(n >> (bits - 52)).convert_to<std::uint64_t>();
    return std::log(static_cast<double>(top)) + (bits - 52) * std::log(2.0);
}

/// Trial-division primality certificate, exact for n < 10^12; larger inputs
/// are reported as "unknown" (false) since the scan would no longer be desk
/// scale.  Divides by primes up to 10^6 from a table built once.
inline bool is_prime_desk_scale(const Natural& n) {
    if (n < 2) return false;
    if (n < 4) return true;
    if ((n & 1) == 0) return false;
    if (n >= Natural("1000000000000")) return false;

    static const std::vector<std::uint32_t> table = [] {
        constexpr std::uint32_t kLimit = 1000000;
        std::vector<bool> composite(kLimit + 1, false);
        std::vector<std::uint32_t> primes;
        for (std::uint32_t p = 3; p <= kLimit; p += 2) {
            if (composite[p]) continue;
            primes.push_back(p);
            for (std::uint64_t q = std::uint64_t(p) * p; q <= kLimit; q += 2 * p) {
                composite[q] = true;
            }
        }
        return primes;
    }();

    const std::uint64_t v = n.convert_to<std::uint64_t>();
    for (const std::uint32_t p : table) {
        const std::uint64_t d = p;
        if (d * d > v) break;
        if (v % d == 0) return false;
    }
    return true;
}

}  // namespace detail

/// Interval half-width M = L^(3*sqrt(2)/4) with L = exp(sqrt(ln n ln ln n)),
/// rounded up and clamped to at least 100.
inline Natural default_interval_half_width(const Natural& n) {
    const double ln_n = detail::natural_log(n);
    const double exponent = (3.0 * std::sqrt(2.0) / 4.0) * std::sqrt(ln_n * std::log(ln_n));
    const double m = std::exp(exponent);
    Natural result;
    if (m >= 9e18) {
        // A width this large is unusable anyway; saturate rather than overflow.
        result = Natural(9'000'000'000'000'000'000ULL);
    } else {
        result = Natural(static_cast<std::uint64_t>(std::ceil(m)));
    }
    if (result < 100) result = 100;
    return result;
}

/// Smallest B >= 30 whose expected smooth yield over the interval,
/// (2M+1) * pr^-pr with pr = ln n / ln B, covers |fb(B)| + 6.
inline Natural default_smoothness_bound(const Natural& n, const Natural& M) {
    const double ln_n = detail::natural_log(n);
    double interval = 2.0 * M.convert_to<double>() + 1.0;
    if (!(interval < 9e18)) interval = 9e18;

    for (std::uint64_t cap = 8192; cap <= (1u << 22); cap *= 4) {
        std::vector<bool> composite(cap + 1, false);
        std::vector<std::uint64_t> primes;
        for (std::uint64_t p = 2; p <= cap; ++p) {
            if (composite[p]) continue;
            primes.push_back(p);
            for (std::uint64_t q = p * p; q <= cap; q += p) composite[q] = true;
        }
        std::size_t fb_size = 0;
        std::size_t idx = 0;
        for (std::uint64_t B = 30; B <= cap; ++B) {
            while (idx < primes.size() && primes[idx] <= B) {
                const std::uint64_t p = primes[idx];
                if (p == 2 || legendre_symbol(n, Natural(p)) == Legendre::residue) ++fb_size;
                ++idx;
            }
            const double pr = ln_n / std::log(static_cast<double>(B));
            const double expected = interval * std::pow(pr, -pr);
            if (expected >= static_cast<double>(fb_size) + 6.0) return Natural(B);
        }
    }
    throw SieveError("cannot select a smoothness bound for this input");
}

/// Default parameters for factoring n.  Rejects even, prime (at desk scale)
/// and perfect-square inputs.
inline SieveParams default_params(const Natural& n) {
    if (n < 15) throw std::invalid_argument("n below minimum (need n >= 15)");
    if ((n & 1) == 0) throw std::invalid_argument("n must be odd");
    if (is_perfect_square(n)) throw std::invalid_argument("n is a perfect square");
    if (detail::is_prime_desk_scale(n)) throw InputIsPrime();
    const Natural m = default_interval_half_width(n);
    const Natural b = default_smoothness_bound(n, m);
    return SieveParams::create(n, b, m);
}

// ---------------------------------------------------------------------------
// Factor base

inline FactorBase build_factor_base(const Natural& n, const Natural& B) {
    if (B < 3) throw std::invalid_argument("smoothness bound must be >= 3");
    if ((n & 1) == 0) throw std::invalid_argument("n must be odd");
    const std::vector<Natural> primes = sieve_of_eratosthenes(B);
    if (primes.empty()) throw EmptyFactorBase();
    FactorBase fb;
    fb.n = n;
    for (const Natural& p : primes) {
        if (p == 2 || legendre_symbol(n, p) == Legendre::residue) {
            fb.primes.push_back(p.convert_to<std::uint64_t>());
        }
    }
    if (fb.primes.empty()) throw EmptyFactorBase();
    return fb;
}

/// Ascending interval [a, a + 2M] with a = ceil(sqrt(n)), so every sieved
/// value x^2 - n is nonnegative.
inline std::pair<Natural, Natural> sieve_interval(const SieveParams& params) {
    const Natural a = isqrt_ceil(params.n);
    return {a, a + 2 * params.interval_half_width};
}

// ---------------------------------------------------------------------------
// Relation collection

namespace detail {

// Square roots of n modulo p: the x (mod p) with p | x^2 - n.  Primes with
// (n/p) = -1 have none and simply never divide a sieved value.  Factor-base
// primes are small, so a direct search beats Tonelli-Shanks here.
inline std::vector<std::uint64_t> square_roots_mod(const Natural& n, std::uint64_t p) {
    if (p == 2) return {1};  // n odd: x^2 = n (mod 2) iff x odd
    const std::uint64_t r = Natural(n % p).convert_to<std::uint64_t>();
    for (std::uint64_t x = 0; x < p; ++x) {
        if (static_cast<std::uint64_t>((static_cast<unsigned __int128>(x) * x) % p) == r) {
            return x == 0 ? std::vector<std::uint64_t>{0}
                          : std::vector<std::uint64_t>{x, p - x};
        }
    }
    return {};
}

// Exact exponent vector of value over the factor base; residual must be 1.
inline std::vector<std::uint32_t> full_exponents(Natural value, const FactorBase& fb) {
    std::vector<std::uint32_t> exps(fb.primes.size(), 0);
    for (std::size_t i = 0; i < fb.primes.size(); ++i) {
        const std::uint64_t p = fb.primes[i];
        while (value % p == 0) {
            value /= p;
            ++exps[i];
        }
    }
    if (value != 1) throw std::logic_error("value not smooth over factor base");
    return exps;
}

// Walks the interval window by window.  Each window holds the current
// quotient of x^2 - n; for every factor-base prime the positions it divides
// (x = root mod p) are visited directly and divided out to exhaustion, all
// in exact integer arithmetic.  Positions whose quotient reaches 1 are the
// smooth ones.  Value is unsigned __int128 when the interval endpoint
// allows it, cpp_int otherwise.
template <class Value>
std::vector<Relation> collect_with(const SieveParams& params, const FactorBase& fb,
                                   const Natural& a, const Natural& b,
                                   std::size_t target) {
    const Value n_value = static_cast<Value>(params.n);
    std::vector<Relation> relations;

    struct Walk {
        std::uint64_t prime;
        std::uint64_t root;
    };
    std::vector<Walk> walks;
    for (const std::uint64_t p : fb.primes) {
        for (const std::uint64_t r : square_roots_mod(params.n, p)) {
            walks.push_back({p, r});
        }
    }

    constexpr std::size_t kWindow = 1 << 16;
    std::vector<Value> window;
    for (Natural lo = a; lo <= b; lo += kWindow) {
        Natural hi = lo + (kWindow - 1);
        if (hi > b) hi = b;
        const std::size_t len = static_cast<std::size_t>(Natural(hi - lo + 1).convert_to<std::uint64_t>());

        window.assign(len, Value(0));
        {
            Value x = static_cast<Value>(lo);
            for (std::size_t i = 0; i < len; ++i, ++x) window[i] = x * x - n_value;
        }

        for (const Walk& w : walks) {
            const std::uint64_t p = w.prime;
            const std::uint64_t rem = Natural(lo % p).convert_to<std::uint64_t>();
            std::uint64_t first = (w.root >= rem) ? w.root - rem : p - rem + w.root;
            for (std::uint64_t i = first; i < len; i += p) {
                Value& v = window[i];
                do { v /= p; } while (v % p == 0);
            }
        }

        for (std::size_t i = 0; i < len; ++i) {
            if (window[i] != 1) continue;
            Relation rel;
            rel.x = lo + i;
            rel.value = rel.x * rel.x - params.n;
            rel.exponents = full_exponents(rel.value, fb);
            relations.push_back(std::move(rel));
            if (relations.size() >= target) return relations;
        }
    }
    return relations;
}

}  // namespace detail

/// All smooth relations over the sieve interval, ascending in x, stopping
/// early once |fb| + 1 + relation_margin of them are in hand.  Throws
/// InsufficientRelations when the whole interval yields fewer than |fb| + 1.
inline std::vector<Relation> collect_relations(const SieveParams& params,
                                               const FactorBase& fb) {
    if (fb.primes.empty()) throw EmptyFactorBase();
    const auto [a, b] = sieve_interval(params);
    const std::size_t minimum = fb.primes.size() + 1;
    std::size_t target = minimum + params.relation_margin;
    if (target < minimum) target = static_cast<std::size_t>(-1);  // margin overflow = no early stop

    std::vector<Relation> relations;
    if (msb(b) < 63) {
        relations = detail::collect_with<unsigned __int128>(params, fb, a, b, target);
    } else {
        relations = detail::collect_with<Natural>(params, fb, a, b, target);
    }
    if (relations.size() < minimum) {
        throw InsufficientRelations(relations.size(), minimum);
    }
    return relations;
}

// ---------------------------------------------------------------------------
// Linear algebra and congruences

inline Gf2Matrix build_gf2_matrix(const std::vector<Relation>& relations) {
    if (relations.empty()) throw std::invalid_argument("no relations");
    const std::size_t cols = relations.front().exponents.size();
    Gf2Matrix m(relations.size(), cols);
    for (std::size_t r = 0; r < relations.size(); ++r) {
        if (relations[r].exponents.size() != cols) {
            throw std::invalid_argument("inconsistent factor base");
        }
        for (std::size_t c = 0; c < cols; ++c) {
            m.set(r, c, relations[r].exponents[c] & 1);
        }
    }
    return m;
}

/// Builds (x, y) from a null-space selection: x is the product of the chosen
/// x_i mod n; y is built from the halved summed exponent vector, never by a
/// huge integer square root.  The result always satisfies x^2 = y^2 (mod n).
inline std::pair<Natural, Natural> assemble_congruence(const std::vector<Relation>& relations,
                                                       const BitVec& selection,
                                                       const FactorBase& fb,
                                                       const Natural& n) {
    std::vector<std::uint64_t> exponent_sum(fb.primes.size(), 0);
    Natural x = 1;
    for (std::size_t i = 0; i < relations.size(); ++i) {
        if (!selection.get(i)) continue;
        x = (x * relations[i].x) % n;
        for (std::size_t j = 0; j < exponent_sum.size(); ++j) {
            exponent_sum[j] += relations[i].exponents[j];
        }
    }
    Natural y = 1;
    for (std::size_t j = 0; j < exponent_sum.size(); ++j) {
        if (exponent_sum[j] & 1) throw std::logic_error("invalid dependency: odd exponent sum");
        y = (y * mod_pow(Natural(fb.primes[j]), Natural(exponent_sum[j] / 2), n)) % n;
    }
    if ((x * x) % n != (y * y) % n) throw std::logic_error("congruence identity violated");
    return {x, y};
}

/// First congruence with a nontrivial gcd wins; attempts counts how many
/// were inspected, the successful one included.
inline FactorResult extract_factors(const Natural& n,
                                    const std::vector<std::pair<Natural, Natural>>& congruences) {
    std::size_t attempts = 0;
    for (const auto& [x, y] : congruences) {
        ++attempts;
        const Natural diff = (x >= y) ? Natural(x - y) : Natural(x + n - y);
        const Natural d = gcd(diff % n, n);
        if (d > 1 && d < n) {
            FactorResult result;
            const Natural other = n / d;
            result.f1 = (d <= other) ? d : other;
            result.f2 = n / result.f1;
            result.witness = std::make_pair(x, y);
            result.attempts = attempts;
            return result;
        }
    }
    throw AllDependenciesTrivial();
}

// ---------------------------------------------------------------------------
// Full pipeline

struct FactorOptions {
    std::size_t max_retries = 5;
    std::size_t relation_margin = 5;
};

/// What the successful attempt actually used; filled through the optional
/// out-parameter of factor().
struct FactorRunStats {
    std::size_t retries = 0;          // escalations before success
    std::size_t relations = 0;
    Natural smoothness_bound;
    Natural interval_half_width;
};

namespace detail {

// Null-space basis vectors in emission order, then all pairwise sums:
// roughly half the single dependencies give a trivial gcd, and combining
// two independent ones usually breaks the tie.
inline std::vector<BitVec> dependency_candidates(const std::vector<BitVec>& basis) {
    std::vector<BitVec> out = basis;
    for (std::size_t i = 0; i < basis.size(); ++i) {
        for (std::size_t j = i + 1; j < basis.size(); ++j) {
            BitVec combined = basis[i];
            combined.xor_with(basis[j]);
            out.push_back(std::move(combined));
        }
    }
    return out;
}

}  // namespace detail

/// Factors n.  Degenerate inputs (even, perfect square) split immediately;
/// primes are rejected at desk scale.  Otherwise runs the sieve with
/// automatic escalation: each retry doubles both the smoothness bound and
/// the interval half-width.
inline FactorResult factor(const Natural& n,
                           std::optional<SieveParams> params = std::nullopt,
                           const FactorOptions& options = {},
                           FactorRunStats* stats_out = nullptr) {
    if (n < 4) throw std::invalid_argument("n must be >= 4");
    if ((n & 1) == 0) {
        return FactorResult{2, n / 2, std::nullopt, 0};
    }
    if (is_perfect_square(n)) {
        const Natural s = isqrt_ceil(n);
        return FactorResult{s, s, std::nullopt, 0};
    }
    if (detail::is_prime_desk_scale(n)) throw InputIsPrime();

    SieveParams current = params ? *params : default_params(n);
    if (!params) current.relation_margin = options.relation_margin;

    std::vector<AttemptDiagnostics> diagnostics;
    std::size_t attempts_so_far = 0;

    for (std::size_t retry = 0; retry < options.max_retries; ++retry) {
        AttemptDiagnostics diag;
        diag.smoothness_bound = current.smoothness_bound;
        diag.interval_half_width = current.interval_half_width;

        const FactorBase fb = build_factor_base(n, current.smoothness_bound);
        std::vector<Relation> relations;
        try {
            relations = collect_relations(current, fb);
        } catch (const InsufficientRelations& e) {
            diag.relations_found = e.found;
            diag.outcome = e.what();
            diagnostics.push_back(std::move(diag));
            current = SieveParams::create(n, current.smoothness_bound * 2,
                                          current.interval_half_width * 2,
                                          current.relation_margin);
            continue;
        }
        diag.relations_found = relations.size();

        const Gf2Matrix matrix = build_gf2_matrix(relations);
        const std::vector<BitVec> basis = gf2_nullspace(matrix);
        if (!basis.empty()) {
            // Assemble one dependency at a time; the first one usually wins.
            std::size_t tried = 0;
            std::optional<FactorResult> found;
            for (const BitVec& sel : detail::dependency_candidates(basis)) {
                const auto congruence = assemble_congruence(relations, sel, fb, n);
                ++tried;
                try {
                    found = extract_factors(n, {congruence});
                    break;
                } catch (const AllDependenciesTrivial&) {
                }
            }
            if (found) {
                found->attempts = attempts_so_far + tried;
                if (stats_out) {
                    stats_out->retries = retry;
                    stats_out->relations = relations.size();
                    stats_out->smoothness_bound = current.smoothness_bound;
                    stats_out->interval_half_width = current.interval_half_width;
                }
                return *found;
            }
            attempts_so_far += tried;
            diag.outcome = "all dependencies trivial";
        } else {
            diag.outcome = "trivial null space";
        }
        diagnostics.push_back(std::move(diag));
        current = SieveParams::create(n, current.smoothness_bound * 2,
                                      current.interval_half_width * 2,
                                      current.relation_margin);
    }
    throw FactorizationFailed(std::move(diagnostics));
}

}  // namespace qsieve::classical
