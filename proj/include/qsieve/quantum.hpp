#pragma once

// Simulated quantum quadratic sieve pipeline, orchestrated on the sparse
// register simulator.
//
// Step 1 loads an equal superposition of primes up to the smoothness bound,
// entangles each prime with its Euler-criterion value and post-selects the
// quadratic residues, leaving the factor base in superposition.  Step 2
// loads the sieve interval, entangles each x with x^2 - n, divides the
// values register by every factor-base prime to exhaustion while counting
// exponents, and post-selects the fully divided (smooth) terms.  Step 3
// hands the surviving exponent vectors to the classical linear-algebra
// back end.
//
// The whole run is journaled as a trace of labeled steps with state
// snapshots and measurement records, matching the step numbering used by
// the trace file format (1, 1.1, 1.2, 1.3, 2, 2.1, 2.3, 2.4, 2.5, 3).

#include "qsieve/classical.hpp"
#include "qsieve/sim/state.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace qsieve::quantum {

using classical::FactorBase;
using classical::FactorResult;
using classical::SieveParams;

// ---------------------------------------------------------------------------
// Types

/// Post-measurement readout: every x whose value x^2 - n factored completely
/// over the base, with both the mod-2 exponent readout and the full exponent
/// vector (the latter is needed to build y in step 3).
struct SmoothEntry {
    Natural x;
    std::vector<std::uint8_t> exponents_mod2;
    std::vector<std::uint32_t> exponents;
};

struct SmoothSet {
    std::vector<SmoothEntry> entries;  // ascending x
};

/// A capped copy of a simulator state for journaling.
struct StateSnapshot {
    std::vector<sim::RegisterSpec> registers;
    std::vector<sim::Term> terms;  // first `terms.size()` of `support`, in canonical order
    std::size_t support = 0;
    double norm_squared = 0.0;
    bool truncated = false;
};

struct TraceStep {
    std::string label;
    std::optional<StateSnapshot> snapshot;
    std::vector<sim::MeasurementRecord> records;
    std::vector<std::string> notes;
};

struct PipelineTrace {
    std::size_t attempt = 1;  // escalation attempt the trace belongs to
    std::vector<TraceStep> steps;
};

struct PipelineOptions {
    std::size_t max_retries = 5;
    bool capture_terms = true;           // false keeps headers only
    std::size_t snapshot_term_cap = 100000;
};

struct PipelineResult {
    FactorResult factors;
    PipelineTrace trace;
    SieveParams params_used{};     // parameters of the successful attempt
    std::size_t relations = 0;     // smooth values the attempt worked from
};

// ---------------------------------------------------------------------------
// Internals

namespace detail {

inline std::uint64_t pow_mod_u64(std::uint64_t base, std::uint64_t exp, std::uint64_t mod) {
    if (mod == 1) return 0;
    unsigned __int128 result = 1;
    unsigned __int128 b = base % mod;
    while (exp > 0) {
        if (exp & 1) result = (result * b) % mod;
        b = (b * b) % mod;
        exp >>= 1;
    }
    return static_cast<std::uint64_t>(result);
}

inline StateSnapshot snapshot_of(const sim::QuantumState& s, const PipelineOptions& opt) {
    StateSnapshot snap;
    snap.registers = s.registers();
    snap.support = s.support();
    snap.norm_squared = s.norm_squared();
    if (opt.capture_terms) {
        const std::size_t keep = std::min(opt.snapshot_term_cap, s.terms().size());
        snap.terms.assign(s.terms().begin(), s.terms().begin() + keep);
    }
    snap.truncated = snap.terms.size() < snap.support;
    return snap;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Pipeline steps

namespace detail {

struct PrimeRegisters {
    std::vector<sim::RegisterSpec> specs;   // R1, R2
    std::vector<sim::RegWord> primes;       // all primes <= B
};

inline PrimeRegisters prime_registers(const Natural& B) {
    const std::vector<Natural> primes = sieve_of_eratosthenes(B);
    if (primes.empty()) throw classical::EmptyFactorBase();
    PrimeRegisters out;
    out.primes.reserve(primes.size());
    for (const Natural& p : primes) out.primes.push_back(p.convert_to<sim::RegWord>());
    std::vector<sim::RegWord> domain_values = out.primes;
    domain_values.push_back(0);
    out.specs = {
        {"R1", sim::Domain::values(std::move(domain_values))},
        {"R2", sim::Domain::range(0, B.convert_to<sim::RegWord>())},
    };
    return out;
}

}  // namespace detail

/// Step 1 + 1.1: R1 holds an equal superposition of all primes <= B
/// (produced classically), R2 is zero.
inline sim::QuantumState step1_prime_superposition(const Natural& B,
                                                   sim::LoadPath* path_out = nullptr) {
    detail::PrimeRegisters regs = detail::prime_registers(B);
    sim::QuantumState state = sim::init_state(std::move(regs.specs));
    return sim::load_uniform(std::move(state), "R1", std::move(regs.primes), path_out);
}

namespace detail {

/// Oracle for step 1.2: n^((p-1)/2) mod p.  Euler's criterion needs an odd
/// prime; 2 is parked on a value the post-selection drops and re-added
/// classically when the factor base is read off.
inline auto legendre_oracle(Natural n) {
    return [n = std::move(n)](std::span<const std::span<const sim::RegWord>> reads,
                              std::span<sim::RegWord> target) {
        const std::uint64_t p = reads[0][0];
        if (p == 2) {
            target[0] = 0;
            return;
        }
        const std::uint64_t r = Natural(n % p).convert_to<std::uint64_t>();
        target[0] = pow_mod_u64(r, (p - 1) / 2, p);
    };
}

}  // namespace detail

/// Step 1.2 + 1.3: store n^((p-1)/2) mod p in R2 for every prime in R1,
/// post-select R2 = 1 and read off the factor base (with 2 prepended, since
/// the Euler criterion only covers odd primes).  `after_oracle_out`, when
/// given, receives the entangled pre-measurement state.
inline std::pair<sim::QuantumState, FactorBase> step1_legendre_and_measure(
    sim::QuantumState state, const Natural& n,
    sim::MeasurementRecord* record_out = nullptr,
    sim::QuantumState* after_oracle_out = nullptr) {
    state = sim::apply_oracle(std::move(state), {"R1"}, "R2", detail::legendre_oracle(n),
                              sim::Combine::overwrite);
    if (after_oracle_out) *after_oracle_out = state;

    const std::map<sim::RegWord, double> dist = state.marginal("R2");
    if (dist.find(1) == dist.end()) throw classical::EmptyFactorBase();

    auto [collapsed, record] = sim::partial_measure(std::move(state), "R2",
                                                    sim::PostSelectMode{1});
    if (record_out) *record_out = record;

    FactorBase fb;
    fb.n = n;
    fb.primes.push_back(2);
    for (const sim::Term& t : collapsed.terms()) {
        const sim::RegWord p = collapsed.value_of(t, collapsed.register_index("R1"))[0];
        if (fb.primes.back() != p) fb.primes.push_back(p);
    }
    return {std::move(collapsed), std::move(fb)};
}

/// Step 2 + 2.1: R3 uniform over [a, b], R4 = x^2 - n per term, R5 a zero
/// exponent tuple (one slot per factor-base prime).  `after_load_out`, when
/// given, receives the intermediate state with R3 loaded but the value
/// oracle not yet applied (the end-of-step-2 state).
inline sim::QuantumState step2_sequence_superposition(const Natural& n, const Natural& a,
                                                      const Natural& b, std::size_t fb_size,
                                                      sim::LoadPath* path_out = nullptr,
                                                      sim::QuantumState* after_load_out = nullptr) {
    if (a >= b) throw std::invalid_argument("interval must satisfy a < b");
    if (msb(b) >= 32) {
        throw std::runtime_error(
            "quantum simulation infeasible: sieve values exceed the 64-bit register range");
    }
    const std::uint64_t a64 = a.convert_to<std::uint64_t>();
    const std::uint64_t b64 = b.convert_to<std::uint64_t>();
    if (b64 - a64 + 1 > sim::kSupportCap) throw std::runtime_error("support cap exceeded");

    const unsigned __int128 n128 = static_cast<unsigned __int128>(n.convert_to<std::uint64_t>());
    const unsigned __int128 vmax = (unsigned __int128)(b64)*b64 - n128;

    sim::QuantumState state = sim::init_state({
        {"R3", sim::Domain::range(0, b64)},
        {"R4", sim::Domain::range(0, static_cast<std::uint64_t>(vmax))},
        {"R5", sim::Domain::tuple(fb_size, sim::RegWord(1) << 32)},
    });
    std::vector<sim::RegWord> xs;
    xs.reserve(b64 - a64 + 1);
    for (std::uint64_t x = a64; x <= b64; ++x) xs.push_back(x);
    state = sim::load_uniform(std::move(state), "R3", std::move(xs), path_out);
    if (after_load_out) *after_load_out = state;

    return sim::apply_oracle(
        std::move(state), {"R3"}, "R4",
        [n128](std::span<const std::span<const sim::RegWord>> reads,
               std::span<sim::RegWord> target) {
            const unsigned __int128 x = reads[0][0];
            target[0] = static_cast<sim::RegWord>(x * x - n128);
        },
        sim::Combine::overwrite);
}

struct DivisionOutcome {
    SmoothSet smooth;
    std::vector<TraceStep> steps;  // trace fragment: 2.3, 2.4, 2.5
};

/// Steps 2.3-2.5: tensor the factor-base state with the sequence state,
/// divide R4 by each factor-base prime to exhaustion (incrementing that
/// prime's slot of R5 per division), post-select R4 = 1 and reduce R5 mod 2.
///
/// The second QFT the source construction applies to the values register
/// between the tensor product and the division loop is skipped: its
/// amplitudes are not well-defined enough to implement, and the
/// post-selected support depends only on smoothness.  The skip is journaled
/// in the trace fragment.
inline DivisionOutcome step2_divide_and_measure(const sim::QuantumState& sequence_state,
                                                const sim::QuantumState& factor_base_state,
                                                const Natural& n, const FactorBase& fb,
                                                const PipelineOptions& options = {}) {
    DivisionOutcome out;

    sim::QuantumState state = sim::tensor(factor_base_state, sequence_state);
    {
        TraceStep step;
        step.label = "2.3";
        step.snapshot = detail::snapshot_of(state, options);
        step.notes.push_back("step 2.3-qft: skipped (under-specified)");
        out.steps.push_back(std::move(step));
    }

    const std::size_t r4 = state.register_index("R4");
    const std::size_t r4_off = state.slot_offset(r4);

    for (std::size_t i = 0; i < fb.primes.size(); ++i) {
        const std::uint64_t p = fb.primes[i];
        for (;;) {
            bool any_divisible = false;
            for (const sim::Term& t : state.terms()) {
                if (t.key[r4_off] % p == 0) {
                    any_divisible = true;
                    break;
                }
            }
            if (!any_divisible) break;
            state = sim::apply_oracle(
                std::move(state), {"R4"}, "R5",
                [p, i](std::span<const std::span<const sim::RegWord>> reads,
                       std::span<sim::RegWord> target) {
                    if (reads[0][0] % p == 0) ++target[i];
                },
                sim::Combine::accumulate);
            state = sim::map_register(std::move(state), "R4", [p](std::span<sim::RegWord> v) {
                if (v[0] % p == 0) v[0] /= p;
            });
        }
    }
    {
        TraceStep step;
        step.label = "2.4";
        step.snapshot = detail::snapshot_of(state, options);
        out.steps.push_back(std::move(step));
    }

    {
        const std::map<sim::RegWord, double> dist = state.marginal("R4");
        if (dist.find(1) == dist.end()) {
            throw classical::SieveError("no smooth values in interval");
        }
    }
    auto [collapsed, record] = sim::partial_measure(std::move(state), "R4",
                                                    sim::PostSelectMode{1});
    state = std::move(collapsed);

    // Read out x and the full exponent vectors before the mod-2 reduction;
    // the same x appears once per factor-base branch of R1 and must carry
    // identical exponents in each.
    const std::size_t r3 = state.register_index("R3");
    const std::size_t r5 = state.register_index("R5");
    std::map<sim::RegWord, std::vector<std::uint32_t>> by_x;
    for (const sim::Term& t : state.terms()) {
        const sim::RegWord x = state.value_of(t, r3)[0];
        const auto exps_view = state.value_of(t, r5);
        std::vector<std::uint32_t> exps(exps_view.begin(), exps_view.end());
        const auto [it, inserted] = by_x.emplace(x, std::move(exps));
        if (!inserted && !std::equal(it->second.begin(), it->second.end(), exps_view.begin(),
                                     exps_view.end())) {
            throw std::logic_error("inconsistent exponents across factor-base branches");
        }
    }
    for (const auto& [x, exps] : by_x) {
        // No information was lost in R4: x alone reconstructs x^2 - n.
        Natural reconstructed = 1;
        for (std::size_t i = 0; i < exps.size(); ++i) {
            for (std::uint32_t e = 0; e < exps[i]; ++e) reconstructed *= fb.primes[i];
        }
        if (reconstructed != Natural(x) * x - n) {
            throw std::logic_error("exponent bookkeeping does not reproduce x^2 - n");
        }
        SmoothEntry entry;
        entry.x = x;
        entry.exponents = exps;
        entry.exponents_mod2.reserve(exps.size());
        for (std::uint32_t e : exps) entry.exponents_mod2.push_back(e & 1);
        out.smooth.entries.push_back(std::move(entry));
    }

    state = sim::map_register(std::move(state), "R5", [](std::span<sim::RegWord> v) {
        for (sim::RegWord& c : v) c &= 1;
    });
    {
        TraceStep step;
        step.label = "2.5";
        step.snapshot = detail::snapshot_of(state, options);
        step.records.push_back(record);
        step.notes.push_back("smooth values: " + std::to_string(out.smooth.entries.size()));
        out.steps.push_back(std::move(step));
    }
    return out;
}

/// Step 3: classical post-processing of the smooth set, identical to the
/// classical pipeline's linear-algebra and gcd stages.
inline FactorResult step3_classical_postprocess(const SmoothSet& smooth, const Natural& n,
                                                const FactorBase& fb) {
    if (smooth.entries.size() < 2) {
        throw classical::InsufficientRelations(smooth.entries.size(), 2);
    }
    std::vector<classical::Relation> relations;
    relations.reserve(smooth.entries.size());
    for (const SmoothEntry& e : smooth.entries) {
        classical::Relation rel;
        rel.x = e.x;
        rel.value = e.x * e.x - n;
        rel.exponents = e.exponents;
        relations.push_back(std::move(rel));
    }
    const Gf2Matrix matrix = classical::build_gf2_matrix(relations);
    const std::vector<BitVec> basis = gf2_nullspace(matrix);
    if (basis.empty()) {
        // An empty null space means the relations are independent; the caller
        // treats it exactly like a relation shortage.
        throw classical::InsufficientRelations(smooth.entries.size(),
                                               smooth.entries.size() + 1);
    }
    std::size_t tried = 0;
    for (const BitVec& sel : classical::detail::dependency_candidates(basis)) {
        const auto congruence = classical::assemble_congruence(relations, sel, fb, n);
        ++tried;
        try {
            classical::FactorResult result = classical::extract_factors(n, {congruence});
            result.attempts = tried;
            return result;
        } catch (const classical::AllDependenciesTrivial&) {
        }
    }
    throw classical::AllDependenciesTrivial();
}

// ---------------------------------------------------------------------------
// Full pipeline

/// Runs steps 1 through 3, journaling every state, with the same degenerate
/// handling and escalation policy as the classical pipeline.  Degenerate
/// inputs (even, perfect square) short-circuit before any quantum step and
/// return an empty trace.
inline PipelineResult run_pipeline(const Natural& n,
                                   std::optional<SieveParams> params = std::nullopt,
                                   const PipelineOptions& options = {}) {
    if (n < 4) throw std::invalid_argument("n must be >= 4");
    if ((n & 1) == 0) {
        return {FactorResult{2, n / 2, std::nullopt, 0}, PipelineTrace{}};
    }
    if (is_perfect_square(n)) {
        const Natural s = isqrt_ceil(n);
        return {FactorResult{s, s, std::nullopt, 0}, PipelineTrace{}};
    }
    if (classical::detail::is_prime_desk_scale(n)) throw classical::InputIsPrime();

    SieveParams current = params ? *params : classical::default_params(n);
    std::vector<classical::AttemptDiagnostics> diagnostics;
    std::size_t attempts_so_far = 0;

    for (std::size_t retry = 0; retry < options.max_retries; ++retry) {
        classical::AttemptDiagnostics diag;
        diag.smoothness_bound = current.smoothness_bound;
        diag.interval_half_width = current.interval_half_width;

        PipelineTrace trace;
        trace.attempt = retry + 1;
        try {
            // Step 1: R1, R2 initialized to zero.
            detail::PrimeRegisters regs = detail::prime_registers(current.smoothness_bound);
            {
                const sim::QuantumState zeros = sim::init_state(regs.specs);
                TraceStep step;
                step.label = "1";
                step.snapshot = detail::snapshot_of(zeros, options);
                trace.steps.push_back(std::move(step));
            }

            // Step 1.1: prime superposition.
            sim::LoadPath prime_path = sim::LoadPath::direct;
            sim::QuantumState fb_state =
                step1_prime_superposition(current.smoothness_bound, &prime_path);
            {
                TraceStep step;
                step.label = "1.1";
                step.snapshot = detail::snapshot_of(fb_state, options);
                step.notes.push_back(prime_path == sim::LoadPath::qft_circuit
                                         ? "loading: qft"
                                         : "loading: direct");
                trace.steps.push_back(std::move(step));
            }

            // Steps 1.2 + 1.3: Legendre oracle, then post-selection of the
            // quadratic residues.
            sim::MeasurementRecord record;
            sim::QuantumState after_oracle;
            auto [collapsed, fb] = step1_legendre_and_measure(std::move(fb_state), n,
                                                              &record, &after_oracle);
            {
                TraceStep step;
                step.label = "1.2";
                step.snapshot = detail::snapshot_of(after_oracle, options);
                trace.steps.push_back(std::move(step));
            }
            {
                TraceStep step;
                step.label = "1.3";
                step.snapshot = detail::snapshot_of(collapsed, options);
                step.records.push_back(record);
                step.notes.push_back("factor base size: " + std::to_string(fb.primes.size()));
                trace.steps.push_back(std::move(step));
            }

            // Step 2 + 2.1: interval superposition, then the value oracle.
            const auto [a, b] = classical::sieve_interval(current);
            sim::LoadPath seq_path = sim::LoadPath::direct;
            sim::QuantumState after_load;
            sim::QuantumState seq_state = step2_sequence_superposition(
                n, a, b, fb.primes.size(), &seq_path, &after_load);
            {
                TraceStep step;
                step.label = "2";
                step.snapshot = detail::snapshot_of(after_load, options);
                step.notes.push_back(seq_path == sim::LoadPath::qft_circuit
                                         ? "loading: qft"
                                         : "loading: direct");
                trace.steps.push_back(std::move(step));
            }
            {
                TraceStep step;
                step.label = "2.1";
                step.snapshot = detail::snapshot_of(seq_state, options);
                trace.steps.push_back(std::move(step));
            }

            // Steps 2.3-2.5.
            DivisionOutcome division =
                step2_divide_and_measure(seq_state, collapsed, n, fb, options);
            for (TraceStep& step : division.steps) trace.steps.push_back(std::move(step));
            diag.relations_found = division.smooth.entries.size();

            // Step 3.
            FactorResult result = step3_classical_postprocess(division.smooth, n, fb);
            {
                TraceStep step;
                step.label = "3";
                step.notes.push_back("relations: " +
                                     std::to_string(division.smooth.entries.size()));
                step.notes.push_back("factors: " + result.f1.str() + " x " + result.f2.str());
                trace.steps.push_back(std::move(step));
            }
            result.attempts += attempts_so_far;
            return {std::move(result), std::move(trace), current,
                    division.smooth.entries.size()};
        } catch (const classical::FactorizationFailed&) {
            throw;
        } catch (const classical::SieveError& e) {
            diag.outcome = e.what();
        }
        diagnostics.push_back(std::move(diag));
        current = SieveParams::create(n, current.smoothness_bound * 2,
                                      current.interval_half_width * 2,
                                      current.relation_margin);
    }
    throw classical::FactorizationFailed(std::move(diagnostics));
}

}  // namespace qsieve::quantum
