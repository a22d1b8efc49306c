#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "modrecon/lift.hpp"

using namespace modrecon;

namespace {

// Brute-force oracle: every vector of Lambda_{N,r} is k*(r,1) + m*(N,0);
// scan |y| <= N and the x candidates nearest zero for each y.
long brute_force_min_norm(long N, long r) {
    long best = -1;
    for (long y = -N; y <= N; ++y) {
        long x0 = ((y % N) * (r % N)) % N;
        if (x0 < 0)
            x0 += N;
        for (long x : {x0, x0 - N}) {
            if (x == 0 && y == 0)
                continue;
            long norm = x * x + y * y;
            if (best < 0 || norm < best)
                best = norm;
        }
    }
    return best;
}

// Brute-force Farey preimage: exhaustive search of F_B with B = floor(sqrt((N-1)/2))
std::optional<Rational> brute_force_farey(const Int& N, const Int& r) {
    Int B = sqrt(Int((N - 1) / 2));
    for (Int a = 0; a <= B; ++a) {
        for (Int b = -B; b <= B; ++b) {
            if (sgn(b) == 0 || gcd(a, b) != 1 || gcd(b, N) != 1)
                continue;
            // a/b = r mod N
            if ((a - b * r) % N == 0)
                return Rational(a, b);
        }
    }
    return std::nullopt;
}

} // namespace

TEST_CASE("gaussian_reduce reproduces the three worked traces") {
    auto vec = [](long a, long b) { return LatticeVector{Int(a), Int(b)}; };

    GaussReduction g1 = gaussian_reduce(vec(38885, 0), vec(22684, 1));
    REQUIRE(g1.trace.size() == 4);
    CHECK(g1.trace[0] == vec(-6483, -2));
    CHECK(g1.trace[1] == vec(3235, -5));
    CHECK(g1.trace[2] == vec(-13, -12));
    CHECK(g1.trace[3] == vec(1493, -1613));
    CHECK(g1.shortest == vec(-13, -12));

    GaussReduction g2 = gaussian_reduce(vec(38885, 0), vec(16524, 1));
    REQUIRE(g2.trace.size() == 4);
    CHECK(g2.trace[0] == vec(5837, -2));
    CHECK(g2.trace[1] == vec(-987, 7));
    CHECK(g2.trace[2] == vec(-85, 40));
    // (-987,7) - 10*(-85,40) = (-137,-393)
    CHECK(g2.trace[3] == vec(-137, -393));
    CHECK(g2.shortest == vec(-85, 40));

    GaussReduction g3 = gaussian_reduce(vec(38885, 0), vec(464, 1));
    REQUIRE(g3.trace.size() == 2);
    CHECK(g3.trace[0] == vec(-91, -84));
    CHECK(g3.trace[1] == vec(191, -251));
    CHECK(g3.shortest == vec(-91, -84));

    CHECK(gaussian_reduce(vec(1, 0), vec(0, 1)).shortest.norm_sq() == 1);
    CHECK_THROWS_AS(gaussian_reduce(vec(2, 4), vec(1, 2)), Error);
}

TEST_CASE("farey_preimage worked examples") {
    CHECK(farey_preimage(Int(38885), Int(22684)) == Rational(13, 12));
    CHECK(!farey_preimage(Int(38885), Int(16524)).has_value());
    CHECK(!farey_preimage(Int(38885), Int(464)).has_value());
    CHECK(!farey_preimage(Int(26), Int(5)).has_value());
    CHECK(farey_preimage(Int(26), Int(9)) == Rational(1, 3));
    CHECK(farey_preimage(Int(26), Int(0)) == Rational(0));
    CHECK(farey_preimage(Int(1000), Int(0)) == Rational(0));
}

TEST_CASE("error_tolerant_lift worked examples") {
    LiftResult a = error_tolerant_lift(Int(26), Int(7));
    REQUIRE(a.value.has_value());
    CHECK(*a.value == Rational(1, 2));
    CHECK(a.cofactor == 2);

    LiftResult b = error_tolerant_lift(Int(26), Int(20));
    REQUIRE(b.value.has_value());
    CHECK(*b.value == Rational(1, 2));
    CHECK(b.cofactor == 2);

    LiftResult c = error_tolerant_lift(Int(26), Int(5));
    CHECK(!c.value.has_value());
    CHECK(c.shortest.norm_sq() >= 26);

    LiftResult d = error_tolerant_lift(Int(38885), Int(22684));
    REQUIRE(d.value.has_value());
    CHECK(*d.value == Rational(13, 12));
    CHECK(d.cofactor == 1);

    LiftResult e = error_tolerant_lift(Int(38885), Int(464));
    REQUIRE(e.value.has_value());
    CHECK(*e.value == Rational(13, 12));
    CHECK(e.cofactor == 7);

    // 85/-40 canonicalizes with the sign on the numerator
    LiftResult f = error_tolerant_lift(Int(38885), Int(16524));
    REQUIRE(f.value.has_value());
    CHECK(*f.value == Rational(-17, 8));
    CHECK(f.cofactor == 5);
}

TEST_CASE("cn_membership on the N=26 example") {
    CHECK(!cn_membership(Int(26), Int(5)));
    CHECK(!cn_membership(Int(26), Int(21)));
    CHECK(cn_membership(Int(26), Int(7)));
    CHECK(cn_membership(Int(26), Int(0)));
    CHECK_THROWS_AS(cn_membership(Int(2000000), Int(1)), Error);
}

TEST_CASE("diagnose_bad_factors") {
    LiftResult e = error_tolerant_lift(Int(38885), Int(464));
    FactorScan scan = diagnose_bad_factors(e, Int(38885));
    REQUIRE(scan.factors.size() == 1);
    CHECK(scan.factors[0] == 7);
    CHECK(scan.remainder == 1);

    LiftResult d = error_tolerant_lift(Int(38885), Int(22684));
    CHECK(diagnose_bad_factors(d, Int(38885)).factors.empty());

    LiftResult a = error_tolerant_lift(Int(26), Int(7));
    FactorScan scan2 = diagnose_bad_factors(a, Int(26));
    REQUIRE(scan2.factors.size() == 1);
    CHECK(scan2.factors[0] == 2);

    LiftResult none = error_tolerant_lift(Int(26), Int(5));
    CHECK_THROWS_AS(diagnose_bad_factors(none, Int(26)), Error);
}

TEST_CASE("farey and psi agree where farey is defined, N <= 200") {
    for (Int N = 2; N <= 200; ++N) {
        for (Int r = 0; r < N; ++r) {
            auto farey = farey_preimage(N, r);
            if (!farey)
                continue;
            LiftResult lift = error_tolerant_lift(N, r);
            REQUIRE(lift.value.has_value());
            CHECK(*lift.value == *farey);
        }
    }
}

TEST_CASE("farey matches exhaustive F_B search, N <= 200") {
    for (Int N = 2; N <= 200; ++N) {
        for (Int r = 0; r < N; ++r) {
            auto fast = farey_preimage(N, r);
            auto slow = brute_force_farey(N, r);
            CHECK(fast.has_value() == slow.has_value());
            if (fast && slow)
                CHECK(*fast == *slow);
        }
    }
}

TEST_CASE("error tolerant lift matches C_N membership, N <= 200") {
    for (Int N = 2; N <= 200; ++N) {
        for (Int r = 0; r < N; ++r) {
            LiftResult lift = error_tolerant_lift(N, r);
            CHECK(lift.value.has_value() == cn_membership(N, r));
            if (lift.value) {
                // every lattice vector below the norm bound yields the same
                // rational; cross-check via the raw vector
                CHECK(Rational(lift.shortest.a, lift.shortest.b) == *lift.value);
            }
        }
    }
}

TEST_CASE("gaussian shortest-vector certificate, N <= 500") {
    for (long N = 2; N <= 500; ++N) {
        for (long r = 0; r < N; ++r) {
            LiftResult lift = error_tolerant_lift(Int(N), Int(r));
            long min_norm = brute_force_min_norm(N, r);
            CHECK(lift.shortest.norm_sq() == min_norm);
        }
    }
}

TEST_CASE("randomized error tolerance under the good/bad product bound") {
    const long small_primes[] = {3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41,
                                 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97};
    std::uint64_t rng = 2024;
    int done = 0;
    while (done < 1000) {
        long a = static_cast<long>(splitmix64(rng) % 400);
        long b = static_cast<long>(splitmix64(rng) % 399) + 1;
        if (splitmix64(rng) % 2)
            b = -b;
        if (gcd(Int(a), Int(b)) != 1)
            continue;

        // one bad prime, enough good primes for (a^2+b^2)*M < N'
        std::size_t bad_at = splitmix64(rng) % 24;
        Int M(small_primes[bad_at]);
        Int target = Int(a) * a + Int(b) * b;
        target *= M;

        std::vector<Residue> residues;
        Int nprime = 1;
        bool feasible = true;
        for (std::size_t i = 0; i < 24 && nprime <= target; ++i) {
            if (i == bad_at)
                continue;
            Int p(small_primes[i]);
            auto img = rational_mod(Rational(a, b), p);
            if (!img) { // denominator divisible by this good prime: skip trial
                feasible = false;
                break;
            }
            residues.push_back(*img);
            nprime *= p;
        }
        if (!feasible || nprime <= target)
            continue;

        Int wrong(splitmix64(rng) % small_primes[bad_at]);
        residues.emplace_back(wrong, M);

        Residue combined = crt_combine(residues);
        LiftResult lift = error_tolerant_lift(combined.modulus, combined.value);
        REQUIRE(lift.value.has_value());
        CHECK(*lift.value == Rational(a, b));
        CHECK(M % lift.cofactor == 0); // cofactor divides the bad-prime product
        ++done;
    }
}
