#ifndef MODRECON_MODFRAME_HPP
#define MODRECON_MODFRAME_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "modrecon/lift.hpp"
#include "modrecon/poly.hpp"

namespace modrecon {

enum class BadPrimeType {
    good,
    type1, // input reduction undefined or invalid
    type2, // construction fails mid-run
    type3, // known-invariant mismatch
    type4, // fingerprint minority, removed by the vote
    type5_suspected // survived the vote but divides a lift cofactor
};

std::string to_string(BadPrimeType t);

struct Rejection {
    BadPrimeType type = BadPrimeType::type2;
    std::string note;
};

using ComputeOutcome = std::variant<GroebnerBasisFp, Rejection>;

/// Pluggable per-prime construction. compute must be a pure function of the
/// prime; rejected or wrong answers may occur for only finitely many primes.
struct ModularJob {
    std::string description;
    PolyContextPtr ctx;
    std::vector<PolyQ> generators; // input polynomials, used by pTest exclusions
    std::function<ComputeOutcome(std::uint64_t p)> compute;
    std::function<bool(const GroebnerBasisQ&)> verify;
};

/// Job computing the reduced Groebner basis of <generators> modulo each
/// prime. Verification accepts G when every S-polynomial of G reduces to
/// zero and every input generator reduces to zero modulo G.
ModularJob make_groebner_job(PolyContextPtr ctx, std::vector<PolyQ> generators,
                             std::string description = "groebner");

/// Demo job for the type-2 taxonomy entry: solve A*x = b per prime by
/// elimination. The solution vector is encoded as the basis {u_i - x_i}, so
/// the generic vote/lift path applies unchanged; primes dividing det(A)
/// reject as type-2. Verification checks A*x = b exactly.
ModularJob make_linear_solve_job(const std::vector<std::vector<Rational>>& A,
                                 const std::vector<Rational>& b);

/// Fixture job replaying a known characteristic-zero basis from per-prime
/// tables: good primes return the target basis reduced mod p, the listed bad
/// prime returns the alternative basis. Format:
///   vars: x,y,z
///   order: degrevlex
///   bad-prime: 5
///   target: <poly>   (one line per element)
///   bad: <poly>
ModularJob load_fixture_job(std::istream& in);

/// Finite corruption map realizing the bad-prime taxonomy in tests.
struct FaultPlan {
    std::map<std::uint64_t, ComputeOutcome> corruptions;
};

/// Wrap a job so compute consults the plan first.
ModularJob with_faults(ModularJob base, FaultPlan plan);

struct RunConfig {
    unsigned batch = 4;      // t, primes added per round
    unsigned max_rounds = 16;
    std::uint64_t seed = 0;  // drives prime selection and pTest draws
    // template for the per-round prime source; its seed field is replaced
    // by a value derived from `seed`
    PrimeStreamConfig primes = [] {
        PrimeStreamConfig cfg;
        cfg.mode = PrimeStreamConfig::Mode::random;
        return cfg;
    }();
    unsigned threads = 0; // 0: MODRECON_THREADS env, then hardware
    unsigned ptest_retries = 32;
};

struct AcceptedEntry {
    std::uint64_t prime;
    GroebnerBasisFp basis;
    unsigned weight;
    unsigned round;
};

struct RejectedEntry {
    std::uint64_t prime;
    BadPrimeType type;
    unsigned round;
    std::string fingerprint; // hex digest for type-4 entries, "-" otherwise
    unsigned weight = 0;
};

struct RoundState {
    std::vector<AcceptedEntry> accepted;
    std::vector<RejectedEntry> rejected;
    unsigned round = 0;
    unsigned batch = 4;
    std::uint64_t seed = 0;
    PolyContextPtr ctx; // ordering used for fingerprint tie-breaks
};

/// Weight given to each of n_new primes so that the new total strictly
/// exceeds existing_total: floor(existing_total / n_new) + 1.
unsigned assign_round_weights(unsigned existing_total, std::size_t n_new);

/// Keep the fingerprint class of largest total weight (ties: the
/// lexicographically smallest fingerprint); move the rest to rejected as
/// type-4.
RoundState delete_by_majority_vote(RoundState state);

struct LiftOutcome {
    bool ok = false;
    GroebnerBasisQ basis;
    Int modulus = 1;           // product of the input primes
    std::vector<Int> cofactors; // nontrivial lift cofactors, deduplicated
};

/// Coefficientwise CRT + error tolerant lifting of bases sharing one
/// fingerprint. A monomial absent from one image is treated as residue 0.
/// ok=false when some coefficient has no lift (the enlarge-P path).
LiftOutcome lift_basis(const std::vector<std::pair<std::uint64_t, GroebnerBasisFp>>& bases);

/// Draw a fresh admissible prime (not used, not dividing any numerator or
/// denominator in G or the job generators), compute the modular basis and
/// compare with G mod p. The tested prime is recorded in `used`. Throws
/// Error when no admissible prime is found within `retries`.
bool p_test(const ModularJob& job, const GroebnerBasisQ& G,
            std::set<Int>& used, PrimeStream& fresh, unsigned retries = 32);

struct PrimeReport {
    std::uint64_t prime;
    unsigned weight;
    BadPrimeType status;
    std::string fingerprint; // hex digest or "-"
    unsigned round;
};

struct RunReport {
    bool success = false;
    unsigned rounds = 0;
    std::vector<PrimeReport> primes; // ascending by prime
    Int modulus = 1;                 // product of accepted primes
    Int nprime_estimate = 1;         // modulus with suspected primes divided out
    std::vector<Int> cofactors;
    std::vector<Int> bad_factors;

    std::string to_text() const;
};

struct RunResult {
    GroebnerBasisQ basis;
    RunReport report;
};

struct MaxRoundsError : Error {
    RunReport report;
    explicit MaxRoundsError(RunReport r)
        : Error("run_job: max rounds exceeded without a verified result"),
          report(std::move(r)) {}
};

/// The full reconstruction loop: per-round prime batches (computed
/// concurrently, merged in ascending-prime order), weighted majority vote,
/// CRT + error tolerant lift, pTest, verification; enlarge on any failure.
RunResult run_job(const ModularJob& job, const RunConfig& config);

/// Deterministic corruption of 1-3 primes the run will actually draw:
/// rejections, wrong-fingerprint bases, or same-fingerprint coefficient
/// errors, chosen by plan_seed.
FaultPlan random_fault_plan(const ModularJob& base, const RunConfig& config,
                            std::uint64_t plan_seed);

} // namespace modrecon

#endif
