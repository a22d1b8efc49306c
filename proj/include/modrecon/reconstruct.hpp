#ifndef MODRECON_RECONSTRUCT_HPP
#define MODRECON_RECONSTRUCT_HPP

#include <functional>
#include <map>
#include <optional>
#include <set>

#include "modrecon/arith.hpp"
#include "modrecon/lift.hpp"

namespace modrecon {

enum class Lifter { farey, error_tolerant };

enum class OracleKind {
    exact,    // every non-rejected answer is correct; finitely many rejections
    erroneous // finitely many primes answer wrongly or reject
};

/// Black-box source of x mod p. evaluate returns the residue value in [0,p)
/// or nullopt for a rejected prime.
struct ModularOracle {
    std::function<std::optional<Int>(const Int& p)> evaluate;
    OracleKind kind = OracleKind::exact;
};

/// Oracle producing exact images of a known target, with optional per-prime
/// overrides (wrong values) and rejections. Used by tests and the CLI.
ModularOracle image_oracle(const Rational& target,
                           std::map<Int, Int> overrides = {},
                           std::set<Int> rejects = {});

/// Acceptance rule for a lifted candidate. Exactly one of verifier /
/// height_bound must be set. The height rule accepts x/y once
/// max(|x|,|y|) <= height_bound and N > 2*(2*H^2)*bad_prime_budget.
struct TerminationPolicy {
    std::function<bool(const Rational&)> verifier;
    std::optional<Int> height_bound;
    Int bad_prime_budget = 1;
    unsigned max_primes = 64;
    unsigned lift_stride = 1; // attempt a lift every k-th accepted prime
};

TerminationPolicy verify_policy(std::function<bool(const Rational&)> verifier,
                                unsigned max_primes = 64);
TerminationPolicy height_policy(Int height_bound, unsigned max_primes = 64,
                                Int bad_prime_budget = Int(1));

/// Structural equality of canonical forms (the "y = x" comparison).
bool verify_callback_equality(const Rational& candidate, const Rational& target);

struct ReconstructReport {
    bool success = false;
    Rational value;
    unsigned primes_tried = 0;
    std::vector<Int> rejected; // primes the oracle refused
    unsigned lift_failures = 0;
    Int modulus = 1; // accumulated N at exit
};

/// Rational reconstruction driver: accumulate residues by Chinese
/// remaindering, lift after each accepted prime, stop when the policy
/// accepts. Correctness with an erroneous oracle requires the
/// error-tolerant lifter; the combination farey+erroneous is permitted so
/// callers can observe the resulting non-termination.
ReconstructReport reconstruct_rational(const ModularOracle& oracle,
                                       const TerminationPolicy& policy,
                                       PrimeStream& primes, Lifter lifter);

} // namespace modrecon

#endif
