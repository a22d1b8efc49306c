#include "modrecon/reconstruct.hpp"

#include <map>
#include <set>

namespace modrecon {

ModularOracle image_oracle(const Rational& target, std::map<Int, Int> overrides,
                           std::set<Int> rejects) {
    ModularOracle oracle;
    // rejections alone keep the oracle exact; only wrong values make it erroneous
    oracle.kind = overrides.empty() ? OracleKind::exact : OracleKind::erroneous;
    oracle.evaluate = [target, overrides = std::move(overrides),
                       rejects = std::move(rejects)](const Int& p) -> std::optional<Int> {
        if (rejects.count(p))
            return std::nullopt;
        if (auto it = overrides.find(p); it != overrides.end()) {
            Int v;
            mpz_mod(v.get_mpz_t(), it->second.get_mpz_t(), p.get_mpz_t());
            return v;
        }
        auto res = rational_mod(target, p);
        if (!res)
            return std::nullopt;
        return res->value;
    };
    return oracle;
}

TerminationPolicy verify_policy(std::function<bool(const Rational&)> verifier,
                                unsigned max_primes) {
    TerminationPolicy policy;
    policy.verifier = std::move(verifier);
    policy.max_primes = max_primes;
    return policy;
}

TerminationPolicy height_policy(Int height_bound, unsigned max_primes,
                                Int bad_prime_budget) {
    TerminationPolicy policy;
    policy.height_bound = std::move(height_bound);
    policy.bad_prime_budget = std::move(bad_prime_budget);
    policy.max_primes = max_primes;
    return policy;
}

bool verify_callback_equality(const Rational& candidate, const Rational& target) {
    return candidate == target;
}

namespace {

bool policy_accepts(const TerminationPolicy& policy, const Rational& y, const Int& N) {
    if (policy.verifier)
        return policy.verifier(y);
    if (policy.height_bound) {
        const Int& h = *policy.height_bound;
        return y.height() <= h && N > 2 * (2 * h * h) * policy.bad_prime_budget;
    }
    throw Error("TerminationPolicy: neither verifier nor height bound set");
}

} // namespace

ReconstructReport reconstruct_rational(const ModularOracle& oracle,
                                       const TerminationPolicy& policy,
                                       PrimeStream& primes, Lifter lifter) {
    if (!policy.verifier && !policy.height_bound)
        throw Error("TerminationPolicy: neither verifier nor height bound set");
    unsigned stride = policy.lift_stride == 0 ? 1 : policy.lift_stride;

    ReconstructReport report;
    Int N = 1, r = 0;
    unsigned accepted = 0;
    while (report.primes_tried < policy.max_primes) {
        Int p = primes.next();
        ++report.primes_tried;

        auto s = oracle.evaluate(p);
        if (!s) {
            report.rejected.push_back(p);
            continue;
        }
        if (N == 1) {
            mpz_mod(r.get_mpz_t(), s->get_mpz_t(), p.get_mpz_t());
            N = p;
        } else {
            Residue merged = crt_pair(Residue(r, N), Residue(*s, p));
            r = merged.value;
            N = merged.modulus;
        }
        report.modulus = N;
        ++accepted;
        if (accepted % stride != 0)
            continue;

        std::optional<Rational> y;
        if (lifter == Lifter::farey) {
            y = farey_preimage(N, r);
        } else {
            y = error_tolerant_lift(N, r).value;
        }
        if (!y) {
            ++report.lift_failures;
            continue;
        }
        if (policy_accepts(policy, *y, N)) {
            report.success = true;
            report.value = *y;
            return report;
        }
    }
    return report; // max_primes exhausted without acceptance
}

} // namespace modrecon
