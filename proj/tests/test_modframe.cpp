#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "modrecon/modframe.hpp"

using namespace modrecon;

namespace {

PolyContextPtr xy_lex() { return make_context({"x", "y"}, OrderKind::lex); }

PolyQ P(const PolyContextPtr& ctx, const char* text) { return parse_poly(ctx, text); }

GroebnerBasisFp basis_mod(const PolyContextPtr& ctx,
                          std::vector<const char*> polys, std::uint64_t p) {
    std::vector<PolyFp> gens;
    for (const char* s : polys)
        gens.push_back(*reduce_poly_mod_p(parse_poly(ctx, s), p));
    return buchberger(gens);
}

RunConfig sequential_config(long start, unsigned batch = 4) {
    RunConfig cfg;
    cfg.batch = batch;
    cfg.primes.mode = PrimeStreamConfig::Mode::sequential;
    cfg.primes.start = start;
    return cfg;
}

ModularJob load_fixture() {
    std::ifstream in(MODRECON_DATA_DIR "/type5_sextic.fixture");
    REQUIRE(in.good());
    return load_fixture_job(in);
}

} // namespace

TEST_CASE("assign_round_weights formula") {
    CHECK(assign_round_weights(0, 4) == 1);
    CHECK(assign_round_weights(4, 4) == 2); // new total 8 > 4
    CHECK(assign_round_weights(7, 3) == 3); // new total 9 > 7
    CHECK_THROWS_AS(assign_round_weights(1, 0), Error);
    // escalation invariant on random instances
    std::uint64_t rng = 3;
    for (int i = 0; i < 200; ++i) {
        unsigned existing = static_cast<unsigned>(splitmix64(rng) % 10000);
        std::size_t n = 1 + splitmix64(rng) % 16;
        unsigned w = assign_round_weights(existing, n);
        CHECK(w * n > existing);
    }
}

TEST_CASE("majority vote keeps the heaviest class") {
    auto ctx = xy_lex();
    RoundState state;
    state.ctx = ctx;
    state.round = 1;
    // four primes agree, one dissents
    for (std::uint64_t p : {7ull, 11ull, 13ull, 17ull})
        state.accepted.push_back({p, basis_mod(ctx, {"x^2 - 1", "x*y - 1"}, p), 1, 1});
    state.accepted.push_back({19, basis_mod(ctx, {"x", "y"}, 19), 1, 1});

    RoundState voted = delete_by_majority_vote(std::move(state));
    CHECK(voted.accepted.size() == 4);
    REQUIRE(voted.rejected.size() == 1);
    CHECK(voted.rejected[0].prime == 19);
    CHECK(voted.rejected[0].type == BadPrimeType::type4);
}

TEST_CASE("majority vote tie breaks toward the smaller fingerprint") {
    auto ctx = xy_lex();
    RoundState state;
    state.ctx = ctx;
    state.round = 2;
    state.accepted.push_back({7, basis_mod(ctx, {"x"}, 7), 3, 1});
    state.accepted.push_back({11, basis_mod(ctx, {"y"}, 11), 3, 2});
    RoundState voted = delete_by_majority_vote(std::move(state));
    REQUIRE(voted.accepted.size() == 1);
    // under lex x > y, the fingerprint {y} is the lexicographically smaller one
    CHECK(voted.accepted[0].prime == 11);
    CHECK(voted.rejected[0].prime == 7);
}

TEST_CASE("majority vote weights beat cardinality") {
    auto ctx = xy_lex();
    RoundState state;
    state.ctx = ctx;
    state.round = 1;
    state.accepted.push_back({7, basis_mod(ctx, {"x"}, 7), 5, 1});
    for (std::uint64_t p : {11ull, 13ull, 17ull})
        state.accepted.push_back({p, basis_mod(ctx, {"y"}, p), 1, 1});
    RoundState voted = delete_by_majority_vote(std::move(state));
    REQUIRE(voted.accepted.size() == 1);
    CHECK(voted.accepted[0].prime == 7);
}

TEST_CASE("vote soundness: a strict weight majority always wins") {
    auto ctx = xy_lex();
    GroebnerBasisFp shapes[3] = {basis_mod(ctx, {"x^2 - 1", "x*y - 1"}, 7),
                                 basis_mod(ctx, {"x", "y"}, 7),
                                 basis_mod(ctx, {"y^2"}, 7)};
    std::uint64_t rng = 55;
    for (int trial = 0; trial < 200; ++trial) {
        RoundState state;
        state.ctx = ctx;
        state.round = 1;
        unsigned totals[3] = {0, 0, 0};
        std::uint64_t prime = 11;
        std::size_t entries = 2 + splitmix64(rng) % 6;
        for (std::size_t i = 0; i < entries; ++i) {
            std::size_t shape = splitmix64(rng) % 3;
            unsigned weight = 1 + static_cast<unsigned>(splitmix64(rng) % 5);
            totals[shape] += weight;
            state.accepted.push_back({prime, shapes[shape], weight, 1});
            prime += 2;
        }
        unsigned rest = totals[1] + totals[2];
        bool strict_majority = totals[0] > rest;
        RoundState voted = delete_by_majority_vote(std::move(state));
        if (!strict_majority)
            continue;
        for (const auto& kept : voted.accepted)
            CHECK(fingerprint(kept.basis) == fingerprint(shapes[0]));
        for (const auto& gone : voted.rejected)
            CHECK(gone.type == BadPrimeType::type4);
    }
}

TEST_CASE("denominator primes reject as type-1 inside run_job") {
    auto ctx = xy_lex();
    ModularJob job = make_groebner_job(ctx, {P(ctx, "x - 1/2"), P(ctx, "y - 1/3")});
    RunConfig cfg = sequential_config(2); // batch 1 is {2, 3, 5, 7}
    RunResult result = run_job(job, cfg);
    CHECK(result.basis.elements[0] == P(ctx, "x - 1/2"));
    CHECK(result.basis.elements[1] == P(ctx, "y - 1/3"));
    bool saw2 = false, saw3 = false;
    for (const auto& line : result.report.primes) {
        if (line.prime == 2) {
            CHECK(line.status == BadPrimeType::type1);
            CHECK(line.weight == 0);
            saw2 = true;
        }
        if (line.prime == 3) {
            CHECK(line.status == BadPrimeType::type1);
            saw3 = true;
        }
    }
    CHECK(saw2);
    CHECK(saw3);
}

TEST_CASE("type-5 fixture fingerprints agree so the vote removes nothing") {
    ModularJob job = load_fixture();
    RoundState state;
    state.ctx = job.ctx;
    state.round = 1;
    for (std::uint64_t p : {7ull, 11ull, 13ull, 5ull}) {
        ComputeOutcome outcome = job.compute(p);
        REQUIRE(std::holds_alternative<GroebnerBasisFp>(outcome));
        state.accepted.push_back({p, std::get<GroebnerBasisFp>(outcome), 1, 1});
    }
    RoundState voted = delete_by_majority_vote(std::move(state));
    CHECK(voted.accepted.size() == 4);
    CHECK(voted.rejected.empty());
}

TEST_CASE("lift_basis identity on a single prime") {
    auto ctx = xy_lex();
    GroebnerBasisFp b = basis_mod(ctx, {"x + y + 1"}, 101);
    LiftOutcome lift = lift_basis({{101, b}});
    REQUIRE(lift.ok);
    REQUIRE(lift.basis.elements.size() == 1);
    CHECK(lift.basis.elements[0] == P(ctx, "x + y + 1"));
    CHECK(lift.cofactors.empty());
}

TEST_CASE("lift_basis recovers 13/12 from a corrupted prime") {
    // constant coefficient 13/12 as images over 5, 11, 101 plus garbage at 7:
    // (13^2 + 12^2) * 7 < 5*11*101
    auto ctx = xy_lex();
    std::vector<std::pair<std::uint64_t, GroebnerBasisFp>> bases;
    for (std::uint64_t p : {5ull, 7ull, 11ull, 101ull}) {
        Fp c = (p == 7) ? Fp(2, 7)
                        : Fp::from_int(rational_mod(Rational(13, 12),
                                                    Int((unsigned long)p))->value, p);
        GroebnerBasisFp b;
        b.ctx = ctx;
        b.reduced = true;
        std::vector<Term<Fp>> terms;
        terms.push_back({Monomial({1, 0}), Fp(1, p)});
        terms.push_back({Monomial({0, 0}), c});
        b.elements.push_back(PolyFp::from_terms(ctx, std::move(terms)));
        bases.emplace_back(p, b);
    }
    LiftOutcome lift = lift_basis(bases);
    REQUIRE(lift.ok);
    REQUIRE(lift.basis.elements.size() == 1);
    CHECK(lift.basis.elements[0] == P(ctx, "x + 13/12"));
    REQUIRE(lift.cofactors.size() == 1);
    CHECK(lift.cofactors[0] == 7);
}

TEST_CASE("lift_basis aligns missing monomials as zero residues") {
    // target x + 24: modulo 2 and 3 the constant vanishes
    auto ctx = xy_lex();
    std::vector<std::pair<std::uint64_t, GroebnerBasisFp>> bases;
    for (std::uint64_t p : {2ull, 3ull, 7ull, 11ull, 13ull})
        bases.emplace_back(p, basis_mod(ctx, {"x + 24"}, p));
    LiftOutcome lift = lift_basis(bases);
    REQUIRE(lift.ok);
    CHECK(lift.basis.elements[0] == P(ctx, "x + 24"));
}

TEST_CASE("lift_basis failure path when primes are insufficient") {
    // constant residue 5 modulo 26 = 2*13 lies outside C_26, so the
    // coefficient lift must fail
    auto ctx = xy_lex();
    std::vector<std::pair<std::uint64_t, GroebnerBasisFp>> bases;
    for (std::uint64_t p : {2ull, 13ull})
        bases.emplace_back(p, basis_mod(ctx, {"x + 5"}, p));
    LiftOutcome lift = lift_basis(bases);
    CHECK(!lift.ok);
}

TEST_CASE("fixture tables lift to the target once the good product clears 2885") {
    ModularJob job = load_fixture();
    auto get = [&](std::uint64_t p) {
        ComputeOutcome o = job.compute(p);
        return std::get<GroebnerBasisFp>(o);
    };
    GroebnerBasisQ target = buchberger(job.generators);

    // good product 7*11*13 = 1001 < 2885: the corrupted coefficients cannot lift
    std::vector<std::pair<std::uint64_t, GroebnerBasisFp>> small = {
        {5, get(5)}, {7, get(7)}, {11, get(11)}, {13, get(13)}};
    LiftOutcome att = lift_basis(small);
    CHECK((!att.ok || !(att.basis == target)));

    // good product 1001*101*103 clears the tolerance bound (24^2+1)*5 = 2885
    std::vector<std::pair<std::uint64_t, GroebnerBasisFp>> big = small;
    big.emplace_back(101, get(101));
    big.emplace_back(103, get(103));
    LiftOutcome ok = lift_basis(big);
    REQUIRE(ok.ok);
    CHECK(ok.basis == target);
    REQUIRE(ok.cofactors.size() == 1);
    CHECK(ok.cofactors[0] == 5); // the type-5 prime shows up in the cofactor
}

TEST_CASE("p_test accepts the true basis and rejects corrupted ones") {
    auto ctx = xy_lex();
    ModularJob job = make_groebner_job(ctx, {P(ctx, "x^2 - 1"), P(ctx, "x*y - 1")});
    GroebnerBasisQ G = buchberger(job.generators);

    std::set<Int> used;
    PrimeStream fresh = random_prime_stream(7);
    CHECK(p_test(job, G, used, fresh));
    CHECK(!used.empty()); // the tested prime is recorded

    GroebnerBasisQ corrupted = G;
    corrupted.elements[1] = corrupted.elements[1] + PolyQ::constant(ctx, Rational(1));
    PrimeStream fresh2 = random_prime_stream(8);
    std::set<Int> used2;
    CHECK(!p_test(job, corrupted, used2, fresh2));

    CHECK_THROWS_AS(p_test(job, GroebnerBasisQ{}, used, fresh), Error);
}

TEST_CASE("p_test retry bound") {
    auto ctx = xy_lex();
    ModularJob job = make_groebner_job(ctx, {P(ctx, "x - 1")});
    job.compute = [](std::uint64_t) -> ComputeOutcome {
        return Rejection{BadPrimeType::type2, "always"};
    };
    GroebnerBasisQ G = buchberger(job.generators);
    std::set<Int> used;
    PrimeStream fresh = random_prime_stream(9);
    CHECK_THROWS_AS(p_test(job, G, used, fresh, 4), Error);
}

TEST_CASE("run_job on a plain groebner job matches direct buchberger") {
    auto ctx = xy_lex();
    ModularJob job = make_groebner_job(ctx, {P(ctx, "x^2 - 1"), P(ctx, "x*y - 1")});
    RunConfig cfg;
    cfg.seed = 42;
    RunResult result = run_job(job, cfg);
    CHECK(result.basis == buchberger(job.generators));
    CHECK(result.report.success);
    CHECK(result.report.rounds == 1);
    for (const auto& line : result.report.primes)
        CHECK(line.status == BadPrimeType::good);
}

TEST_CASE("run_job is deterministic for a fixed seed") {
    auto ctx = xy_lex();
    ModularJob job = make_groebner_job(ctx, {P(ctx, "x^2 - 1"), P(ctx, "x*y - 1")});
    RunConfig cfg;
    cfg.seed = 99;
    RunResult a = run_job(job, cfg);
    RunResult b = run_job(job, cfg);
    CHECK(a.basis == b.basis);
    CHECK(a.report.to_text() == b.report.to_text());
    cfg.threads = 1;
    RunResult c = run_job(job, cfg); // worker count must not affect the outcome
    CHECK(a.report.to_text() == c.report.to_text());

    setenv("MODRECON_THREADS", "2", 1);
    cfg.threads = 0; // 0 defers to the environment cap
    RunResult d = run_job(job, cfg);
    unsetenv("MODRECON_THREADS");
    CHECK(a.report.to_text() == d.report.to_text());
}

TEST_CASE("run_job reconstructs the fixture despite the undetectable bad prime") {
    ModularJob job = load_fixture();
    RunConfig cfg = sequential_config(5); // batch 1 is exactly {5, 7, 11, 13}
    RunResult result = run_job(job, cfg);
    GroebnerBasisQ target = buchberger(job.generators);
    CHECK(result.basis == target);
    CHECK(result.report.success);
    CHECK(result.report.rounds >= 2); // 1001 < 2885 forces an enlargement

    bool saw_suspected = false;
    for (const auto& line : result.report.primes) {
        if (line.prime == 5) {
            CHECK(line.status == BadPrimeType::type5_suspected);
            saw_suspected = true;
        } else {
            CHECK(line.status == BadPrimeType::good);
        }
    }
    CHECK(saw_suspected);
    REQUIRE(result.report.bad_factors.size() == 1);
    CHECK(result.report.bad_factors[0] == 5);
    CHECK(result.report.nprime_estimate * 5 == result.report.modulus);
}

TEST_CASE("linear solve job examples") {
    // hand elimination: x = (1, -1)
    ModularJob job = make_linear_solve_job({{Rational(2), Rational(1)},
                                            {Rational(1), Rational(1)}},
                                           {Rational(1), Rational(0)});
    RunConfig cfg;
    cfg.seed = 5;
    RunResult result = run_job(job, cfg);
    REQUIRE(result.basis.elements.size() == 2);
    CHECK(result.basis.elements[0] == parse_poly(job.ctx, "u1 - 1"));
    CHECK(result.basis.elements[1] == parse_poly(job.ctx, "u2 + 1"));

    // det = 3: p = 3 must be rejected as type-2
    ModularJob diag = make_linear_solve_job({{Rational(3), Rational(0)},
                                             {Rational(0), Rational(1)}},
                                            {Rational(1), Rational(0)});
    RunConfig seq = sequential_config(2);
    RunResult r2 = run_job(diag, seq);
    CHECK(r2.basis.elements[0] == parse_poly(diag.ctx, "u1 - 1/3"));
    CHECK(r2.basis.elements[1] == parse_poly(diag.ctx, "u2"));
    bool saw_type2 = false;
    for (const auto& line : r2.report.primes)
        if (line.prime == 3) {
            CHECK(line.status == BadPrimeType::type2);
            saw_type2 = true;
        }
    CHECK(saw_type2);

    // identity system
    ModularJob id2 = make_linear_solve_job({{Rational(1), Rational(0)},
                                            {Rational(0), Rational(1)}},
                                           {Rational(5), Rational(-7, 3)});
    RunResult r3 = run_job(id2, cfg);
    CHECK(r3.basis.elements[0] == parse_poly(id2.ctx, "u1 - 5"));
    CHECK(r3.basis.elements[1] == parse_poly(id2.ctx, "u2 + 7/3"));

    CHECK_THROWS_AS(make_linear_solve_job({{Rational(1), Rational(1)},
                                           {Rational(1), Rational(1)}},
                                          {Rational(0), Rational(0)}),
                    Error);
}

TEST_CASE("fault plans leave the answer unchanged") {
    auto ctx = xy_lex();
    ModularJob base = make_groebner_job(ctx, {P(ctx, "x^2 - 1"), P(ctx, "x*y - 1")});
    RunConfig cfg;
    cfg.seed = 1234;
    GroebnerBasisQ expected = run_job(base, cfg).basis;

    for (std::uint64_t plan_seed = 0; plan_seed < 20; ++plan_seed) {
        FaultPlan plan = random_fault_plan(base, cfg, plan_seed);
        CHECK(!plan.corruptions.empty());
        ModularJob faulty = with_faults(base, plan);
        RunResult result = run_job(faulty, cfg);
        CHECK(result.basis == expected);
        RunResult again = run_job(faulty, cfg);
        CHECK(result.report.to_text() == again.report.to_text());
    }
}

TEST_CASE("with_faults validates replacement moduli") {
    auto ctx = xy_lex();
    ModularJob base = make_groebner_job(ctx, {P(ctx, "x - 1")});
    FaultPlan plan;
    plan.corruptions.emplace(7, basis_mod(ctx, {"x"}, 11)); // wrong field
    ModularJob faulty = with_faults(base, plan);
    CHECK_THROWS_AS(faulty.compute(7), Error);
    CHECK(std::holds_alternative<GroebnerBasisFp>(faulty.compute(13)));
}

TEST_CASE("run_job raises MaxRoundsError when verification cannot pass") {
    auto ctx = xy_lex();
    ModularJob job = make_groebner_job(ctx, {P(ctx, "x^2 - 1"), P(ctx, "x*y - 1")});
    job.verify = [](const GroebnerBasisQ&) { return false; };
    RunConfig cfg;
    cfg.max_rounds = 3;
    try {
        run_job(job, cfg);
        FAIL("expected MaxRoundsError");
    } catch (const MaxRoundsError& e) {
        CHECK(!e.report.success);
        CHECK(e.report.rounds == 3);
        CHECK(e.report.to_text().find("summary result fail") != std::string::npos);
    }
}

TEST_CASE("weight escalation shows up in multi-round reports") {
    ModularJob job = load_fixture();
    RunConfig cfg = sequential_config(5);
    RunResult result = run_job(job, cfg);
    unsigned round1_total = 0, round2_total = 0;
    for (const auto& line : result.report.primes) {
        if (line.round == 1)
            round1_total += line.weight;
        if (line.round == 2)
            round2_total += line.weight;
    }
    CHECK(round1_total > 0);
    CHECK(round2_total > round1_total);
}

TEST_CASE("report text grammar") {
    auto ctx = xy_lex();
    ModularJob job = make_groebner_job(ctx, {P(ctx, "x - 3")});
    RunConfig cfg;
    cfg.seed = 77;
    RunResult result = run_job(job, cfg);
    std::string text = result.report.to_text();
    CHECK(text.rfind("# modrecon report v1\n", 0) == 0);
    CHECK(text.find("summary rounds 1") != std::string::npos);
    CHECK(text.find("summary result ok") != std::string::npos);
    CHECK(text.find("summary cofactors []") != std::string::npos);
    std::istringstream lines(text);
    std::string line;
    std::getline(lines, line); // header
    for (int i = 0; i < 4; ++i) {
        std::getline(lines, line);
        CHECK(line.rfind("p ", 0) == 0);
        CHECK(line.find(" weight ") != std::string::npos);
        CHECK(line.find(" status good fingerprint ") != std::string::npos);
    }
}

TEST_CASE("fixture loader rejects malformed input") {
    std::istringstream missing("vars: x\norder: lex\ntarget: x\n");
    CHECK_THROWS_AS(load_fixture_job(missing), Error);
    std::istringstream junk("vars: x\norder: lex\nbad-prime: 5\ntarget: x\nbad: x\nwhat: 3\n");
    CHECK_THROWS_AS(load_fixture_job(junk), Error);
}
