#include "qsieve/quantum.hpp"

#include "oracles.hpp"
#include "qsieve/support/semiprimes.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace qsieve;
using quantum::PipelineOptions;
using quantum::SmoothSet;

TEST_CASE("step 1.1: prime superposition sizes and amplitudes") {
    const auto state = quantum::step1_prime_superposition(10);
    REQUIRE(state.support() == 4);  // pi(10) = 4
    for (const auto& t : state.terms()) {
        CHECK(std::abs(t.amp - sim::Amplitude{0.5, 0.0}) < 1e-12);
        CHECK(t.key[1] == 0);
    }
    CHECK(state.norm_squared() == Catch::Approx(1.0).margin(1e-9));

    const auto single = quantum::step1_prime_superposition(2);
    REQUIRE(single.support() == 1);
    CHECK(single.terms()[0].key[0] == 2);
    CHECK(std::abs(single.terms()[0].amp - sim::Amplitude{1.0, 0.0}) < 1e-12);

    CHECK_THROWS_AS(quantum::step1_prime_superposition(1), classical::EmptyFactorBase);
}

TEST_CASE("step 1.2/1.3: Legendre measurement for n=15347, B=30") {
    auto state = quantum::step1_prime_superposition(30);
    REQUIRE(state.support() == 10);  // pi(30) = 10

    sim::MeasurementRecord record;
    auto [collapsed, fb] = quantum::step1_legendre_and_measure(std::move(state), 15347, &record);

    // 3 odd qualifying primes (17, 23, 29) among the 10 primes <= 30
    CHECK(record.probability == Catch::Approx(0.3).margin(1e-9));
    CHECK(record.value == 1);
    REQUIRE(collapsed.support() == 3);
    const double expected = 1.0 / std::sqrt(3.0);
    for (const auto& t : collapsed.terms()) {
        CHECK(std::abs(t.amp.real() - expected) < 1e-9);
        CHECK(std::abs(t.amp.imag()) < 1e-12);
    }
    CHECK(collapsed.norm_squared() == Catch::Approx(1.0).margin(1e-9));
    CHECK(fb.primes == std::vector<std::uint64_t>{2, 17, 23, 29});
    // identical to the classical construction
    CHECK(fb.primes == classical::build_factor_base(15347, 30).primes);
}

TEST_CASE("step 1 factor base matches the classical one across random inputs") {
    std::mt19937_64 rng(51);
    for (int i = 0; i < 10; ++i) {
        const auto sp = support::random_semiprime_with_factors_in(rng, 1000, 30000);
        const Natural B = 30 + rng() % 100;
        auto state = quantum::step1_prime_superposition(B);
        auto [collapsed, fb] = quantum::step1_legendre_and_measure(std::move(state), sp.n);
        CHECK(fb.primes == classical::build_factor_base(sp.n, B).primes);
    }
}

TEST_CASE("step 2: sequence superposition with value oracle") {
    sim::LoadPath path = sim::LoadPath::qft_circuit;
    const auto state = quantum::step2_sequence_superposition(15347, 124, 133, 4, &path);
    CHECK(path == sim::LoadPath::direct);  // 10 values is not a power of two
    REQUIRE(state.support() == 10);
    const double expected = 1.0 / std::sqrt(10.0);
    const std::size_t r3 = state.register_index("R3");
    const std::size_t r4 = state.register_index("R4");
    const std::size_t r5 = state.register_index("R5");
    bool saw_first = false;
    for (const auto& t : state.terms()) {
        CHECK(std::abs(std::abs(t.amp) - expected) < 1e-9);
        const sim::RegWord x = state.value_of(t, r3)[0];
        CHECK(state.value_of(t, r4)[0] == x * x - 15347);
        for (const sim::RegWord e : state.value_of(t, r5)) CHECK(e == 0);
        if (x == 124) {
            saw_first = true;
            CHECK(state.value_of(t, r4)[0] == 29);
        }
    }
    CHECK(saw_first);
    CHECK_THROWS_AS(quantum::step2_sequence_superposition(15347, 133, 124, 4),
                    std::invalid_argument);
}

TEST_CASE("step 2 uses the QFT circuit when the interval is a power of two") {
    sim::LoadPath path = sim::LoadPath::direct;
    // [124, 139] has 16 values
    const auto state = quantum::step2_sequence_superposition(15347, 124, 139, 4, &path);
    CHECK(path == sim::LoadPath::qft_circuit);
    CHECK(state.support() == 16);
    CHECK(state.norm_squared() == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("steps 2.3-2.5: division and measurement on the worked interval") {
    const Natural n = 15347;
    auto prime_state = quantum::step1_prime_superposition(30);
    auto [fb_state, fb] = quantum::step1_legendre_and_measure(std::move(prime_state), n);
    const auto seq = quantum::step2_sequence_superposition(n, 124, 144, fb.primes.size());

    const auto outcome = quantum::step2_divide_and_measure(seq, fb_state, n, fb);

    // x = 124 is smooth: 124^2 - 15347 = 29
    REQUIRE(!outcome.smooth.entries.empty());
    CHECK(outcome.smooth.entries[0].x == 124);
    CHECK(outcome.smooth.entries[0].exponents == std::vector<std::uint32_t>{0, 0, 0, 1});
    CHECK(outcome.smooth.entries[0].exponents_mod2 == std::vector<std::uint8_t>{0, 0, 0, 1});

    // smooth set equals the classical relation collection on the same interval
    const auto params = classical::SieveParams::create(n, 30, 10, 1000000);
    const auto relations = [&] {
        try {
            return classical::collect_relations(params, fb);
        } catch (const classical::InsufficientRelations&) {
            return std::vector<classical::Relation>{};
        }
    }();
    const auto naive = oracles::naive_smooth_scan(n, 30, 124, 144);
    REQUIRE(outcome.smooth.entries.size() == naive.size());
    for (std::size_t i = 0; i < naive.size(); ++i) {
        CHECK(outcome.smooth.entries[i].x == naive[i].x);
    }

    // trace fragment: 2.3 (with the skip note), 2.4, 2.5 (with the record)
    REQUIRE(outcome.steps.size() == 3);
    CHECK(outcome.steps[0].label == "2.3");
    REQUIRE(!outcome.steps[0].notes.empty());
    CHECK(outcome.steps[0].notes[0] == "step 2.3-qft: skipped (under-specified)");
    CHECK(outcome.steps[1].label == "2.4");
    CHECK(outcome.steps[2].label == "2.5");
    REQUIRE(outcome.steps[2].records.size() == 1);
    // P(R4 = 1) = #smooth / interval size
    CHECK(outcome.steps[2].records[0].probability ==
          Catch::Approx(double(naive.size()) / 21.0).margin(1e-9));
}

TEST_CASE("step 3 delegates to the classical linear algebra") {
    const Natural n = 15347;
    const auto fb = classical::build_factor_base(n, 30);
    SmoothSet smooth;
    smooth.entries.push_back({124, {0, 0, 0, 1}, {0, 0, 0, 1}});
    smooth.entries.push_back({126, {0, 0, 0, 0}, {0, 0, 2, 0}});
    const auto result = quantum::step3_classical_postprocess(smooth, n, fb);
    CHECK(result.f1 == 103);
    CHECK(result.f2 == 149);

    SmoothSet tiny;
    tiny.entries.push_back({124, {0, 0, 0, 1}, {0, 0, 0, 1}});
    CHECK_THROWS_AS(quantum::step3_classical_postprocess(tiny, n, fb),
                    classical::InsufficientRelations);
}

TEST_CASE("run_pipeline factors the worked example with a paper-ordered trace") {
    const auto result = quantum::run_pipeline(15347);
    CHECK(result.factors.f1 == 103);
    CHECK(result.factors.f2 == 149);

    const std::vector<std::string> expected_labels{"1",   "1.1", "1.2", "1.3", "2",
                                                   "2.1", "2.3", "2.4", "2.5", "3"};
    REQUIRE(result.trace.steps.size() == expected_labels.size());
    for (std::size_t i = 0; i < expected_labels.size(); ++i) {
        CHECK(result.trace.steps[i].label == expected_labels[i]);
    }
    for (const auto& step : result.trace.steps) {
        if (!step.snapshot) continue;
        CHECK(step.snapshot->norm_squared == Catch::Approx(1.0).margin(1e-9));
    }
}

TEST_CASE("run_pipeline short-circuits degenerate inputs before quantum steps") {
    const auto even = quantum::run_pipeline(15346);
    CHECK(even.factors.f1 == 2);
    CHECK(even.trace.steps.empty());

    const auto square = quantum::run_pipeline(15129);
    CHECK(square.factors.f1 == 123);
    CHECK(square.factors.f2 == 123);
    CHECK(square.trace.steps.empty());

    CHECK_THROWS_AS(quantum::run_pipeline(13), classical::InputIsPrime);
}

TEST_CASE("reversibility: full exponents rebuild x^2 - n for every smooth x") {
    std::mt19937_64 rng(57);
    for (int i = 0; i < 4; ++i) {
        const auto sp = support::random_semiprime_with_factors_in(rng, 1000, 20000);
        const auto result = quantum::run_pipeline(sp.n);
        CHECK(result.factors.f1 * result.factors.f2 == sp.n);
    }
    // the rebuild check itself runs inside step2_divide_and_measure; a wrong
    // exponent tuple would have thrown std::logic_error before this point
}

TEST_CASE("pipeline equivalence on seeded semiprimes") {
    std::mt19937_64 rng(61);
    for (int i = 0; i < 6; ++i) {
        const auto sp = support::random_semiprime_with_factors_in(rng, 1000, 30000);

        PipelineOptions opts;
        opts.capture_terms = false;
        const auto quantum_result = quantum::run_pipeline(sp.n, std::nullopt, opts);
        const auto classical_result = classical::factor(sp.n);

        CHECK(quantum_result.factors.f1 == classical_result.f1);
        CHECK(quantum_result.factors.f2 == classical_result.f2);

        // smooth sets match the classical relations over the identical interval
        const auto params = quantum_result.params_used;
        const auto fb = classical::build_factor_base(sp.n, params.smoothness_bound);
        auto full_scan = params;
        full_scan.relation_margin = 1000000000;
        const auto relations = classical::collect_relations(full_scan, fb);

        auto prime_state = quantum::step1_prime_superposition(params.smoothness_bound);
        auto [fb_state, qfb] =
            quantum::step1_legendre_and_measure(std::move(prime_state), sp.n);
        const auto [a, b] = classical::sieve_interval(params);
        const auto seq =
            quantum::step2_sequence_superposition(sp.n, a, b, qfb.primes.size());
        const auto outcome = quantum::step2_divide_and_measure(seq, fb_state, sp.n, qfb);

        REQUIRE(outcome.smooth.entries.size() == relations.size());
        for (std::size_t j = 0; j < relations.size(); ++j) {
            CHECK(outcome.smooth.entries[j].x == relations[j].x);
            CHECK(outcome.smooth.entries[j].exponents == relations[j].exponents);
        }
    }
}

TEST_CASE("measurement law at both steps is exact") {
    const Natural n = 15347;
    const Natural B = 30;

    auto prime_state = quantum::step1_prime_superposition(B);
    sim::MeasurementRecord rec1;
    auto [fb_state, fb] = quantum::step1_legendre_and_measure(std::move(prime_state), n, &rec1);
    // pr(1) = (#odd qualifying primes) / pi(B)
    std::size_t qualifying = 0;
    const auto primes = oracles::naive_primes(30);
    for (const auto p : primes) {
        if (p != 2 && oracles::legendre_by_squares(15347 % p, p) == 1) ++qualifying;
    }
    CHECK(rec1.probability ==
          Catch::Approx(double(qualifying) / double(primes.size())).margin(1e-9));

    const Natural a = 124, b = 144;
    const auto seq = quantum::step2_sequence_superposition(n, a, b, fb.primes.size());
    const auto outcome = quantum::step2_divide_and_measure(seq, fb_state, n, fb);
    const auto smooth_count = oracles::naive_smooth_scan(n, 30, a, b).size();
    CHECK(outcome.steps[2].records[0].probability ==
          Catch::Approx(double(smooth_count) / 21.0).margin(1e-9));
}

TEST_CASE("snapshots can be capped") {
    PipelineOptions opts;
    opts.snapshot_term_cap = 2;
    const auto result = quantum::run_pipeline(15347, std::nullopt, opts);
    bool saw_truncated = false;
    for (const auto& step : result.trace.steps) {
        if (!step.snapshot) continue;
        if (step.snapshot->truncated) {
            saw_truncated = true;
            CHECK(step.snapshot->terms.size() == 2);
            CHECK(step.snapshot->support > 2);
        }
    }
    CHECK(saw_truncated);
}
