#ifndef MODRECON_LIFT_HPP
#define MODRECON_LIFT_HPP

#include <optional>
#include <string>
#include <vector>

#include "modrecon/arith.hpp"

namespace modrecon {

struct LatticeVector {
    Int a;
    Int b;

    Int norm_sq() const { return a * a + b * b; }

    friend bool operator==(const LatticeVector& x, const LatticeVector& y) {
        return x.a == y.a && x.b == y.b;
    }
    std::string to_string() const {
        return "(" + a.get_str() + "," + b.get_str() + ")";
    }
};

struct GaussReduction {
    LatticeVector shortest; // a shortest nonzero vector of the lattice
    LatticeVector second;   // the final, non-improving remainder
    std::vector<LatticeVector> trace; // every remainder, in order
};

/// Rank-2 lattice reduction by nearest-integer division (ties to even).
/// Iterates v_{i+2} = v_i - round(<v_i,v_{i+1}>/|v_{i+1}|^2) * v_{i+1} until
/// the norm stops decreasing. Throws Error on linearly dependent inputs.
GaussReduction gaussian_reduce(LatticeVector v1, LatticeVector v2);

/// Classical Farey preimage: the unique a/b with gcd(a,b)=1, gcd(b,N)=1,
/// a = br mod N and 2a^2, 2b^2 <= N-1, or nullopt when none exists.
/// Euclidean division with non-negative remainders, independent of
/// gaussian_reduce on purpose.
std::optional<Rational> farey_preimage(const Int& N, const Int& r);

struct LiftResult {
    std::optional<Rational> value; // nullopt: no vector of norm^2 < N
    LatticeVector shortest;        // raw signed vector the reduction ended on
    Int cofactor;                  // gcd(|a|,|b|) of shortest when lifted, else 1
};

/// Error tolerant lifting: Gaussian reduction of <(N,0),(r,1)>; returns the
/// canonicalized a/b of the shortest vector when its norm^2 < N. The value is
/// independent of which shortest-norm vector the reduction lands on.
LiftResult error_tolerant_lift(const Int& N, const Int& r);

/// Exhaustive test oracle for membership of r in C_N: some (u,v,q) with
/// q >= 1, q | N, u^2+v^2 < N/q^2, u = vr mod N/q, gcd(u,v)=1, u >= 0,
/// v != 0. Intended for small N; throws Error above oracle_bound.
bool cn_membership(const Int& N, const Int& r, const Int& oracle_bound = Int(1000000));

struct FactorScan {
    std::vector<Int> factors; // distinct primes found by trial division
    Int remainder;            // unfactored part, 1 when fully factored
};

/// Prime factors of gcd(cofactor, N) by trial division up to trial_bound.
FactorScan factor_gcd_with(const Int& cofactor, const Int& N,
                           unsigned long trial_bound = 1u << 20);

/// factor_gcd_with applied to a lift result; requires result.value.
FactorScan diagnose_bad_factors(const LiftResult& result, const Int& N,
                                unsigned long trial_bound = 1u << 20);

} // namespace modrecon

#endif
