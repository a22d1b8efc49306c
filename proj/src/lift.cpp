#include "modrecon/lift.hpp"

namespace modrecon {

namespace {

// round(num/den) for den > 0, ties to even
Int round_nearest_even(const Int& num, const Int& den) {
    Int q, r;
    mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    Int twice = 2 * r;
    int cmp = ::cmp(twice, den);
    if (cmp > 0 || (cmp == 0 && mpz_odd_p(q.get_mpz_t())))
        ++q;
    return q;
}

Int dot(const LatticeVector& x, const LatticeVector& y) {
    return x.a * y.a + x.b * y.b;
}

} // namespace

GaussReduction gaussian_reduce(LatticeVector v1, LatticeVector v2) {
    if (v1.a * v2.b - v1.b * v2.a == 0)
        throw Error("gaussian_reduce: linearly dependent input vectors");
    if (v1.norm_sq() < v2.norm_sq())
        std::swap(v1, v2);

    GaussReduction out;
    LatticeVector prev = v1;
    LatticeVector cur = v2;
    for (;;) {
        Int q = round_nearest_even(dot(prev, cur), cur.norm_sq());
        LatticeVector rem{prev.a - q * cur.a, prev.b - q * cur.b};
        out.trace.push_back(rem);
        if (rem.norm_sq() >= cur.norm_sq()) {
            out.shortest = cur;
            out.second = rem;
            return out;
        }
        prev = cur;
        cur = rem;
    }
}

std::optional<Rational> farey_preimage(const Int& N, const Int& r) {
    if (N < 2)
        throw Error("farey_preimage: N must be >= 2");
    if (sgn(r) < 0 || r >= N)
        throw Error("farey_preimage: residue out of range");

    Int bound = N - 1;
    Int pa = N, pb = 0;  // (a_i, b_i)
    Int ca = r, cb = 1;  // (a_{i+1}, b_{i+1})
    while (2 * ca * ca > bound) {
        Int q, rem;
        // Euclidean division with 0 <= rem < ca
        mpz_fdiv_qr(q.get_mpz_t(), rem.get_mpz_t(), pa.get_mpz_t(), ca.get_mpz_t());
        Int nb = pb - q * cb;
        pa = ca;
        pb = cb;
        ca = rem;
        cb = nb;
    }
    if (2 * cb * cb <= bound && gcd(ca, cb) == 1)
        return Rational(ca, cb);
    return std::nullopt;
}

LiftResult error_tolerant_lift(const Int& N, const Int& r) {
    if (N < 2)
        throw Error("error_tolerant_lift: N must be >= 2");
    if (sgn(r) < 0 || r >= N)
        throw Error("error_tolerant_lift: residue out of range");

    GaussReduction red = gaussian_reduce({N, Int(0)}, {r, Int(1)});
    LiftResult out{std::nullopt, red.shortest, Int(1)};
    if (red.shortest.norm_sq() >= N)
        return out;
    if (sgn(red.shortest.b) == 0) // unreachable per the shrinking-norm argument
        return out;
    out.value = Rational(red.shortest.a, red.shortest.b);
    out.cofactor = gcd(red.shortest.a, red.shortest.b);
    return out;
}

bool cn_membership(const Int& N, const Int& r, const Int& oracle_bound) {
    if (N < 2)
        throw Error("cn_membership: N must be >= 2");
    if (N > oracle_bound)
        throw Error("cn_membership: N exceeds the oracle bound");
    if (sgn(r) < 0 || r >= N)
        throw Error("cn_membership: residue out of range");

    for (Int q = 1; q * q < N; ++q) {
        if (N % q != 0)
            continue;
        Int nq = N / q; // u = vr is taken mod N/q
        Int qsq = q * q;
        // u^2 + v^2 < N/q^2 is checked exactly as (u^2 + v^2) * q^2 < N
        for (Int v = 1; v * v * qsq < N; ++v) {
            for (int vs : {1, -1}) {
                Int sv = vs * v;
                Int target;
                mpz_mod(target.get_mpz_t(), Int(sv * r).get_mpz_t(), nq.get_mpz_t());
                for (Int u = target; (u * u + v * v) * qsq < N; u += nq) {
                    if (gcd(u, sv) == 1)
                        return true;
                }
            }
        }
    }
    return false;
}

FactorScan factor_gcd_with(const Int& cofactor, const Int& N,
                           unsigned long trial_bound) {
    FactorScan out;
    out.remainder = gcd(cofactor, N);
    for (Int p = 2; p <= trial_bound && p * p <= out.remainder; ++p) {
        if (out.remainder % p != 0)
            continue;
        out.factors.push_back(p);
        while (out.remainder % p == 0)
            out.remainder /= p;
    }
    if (out.remainder > 1 && out.remainder <= trial_bound) {
        // remainder itself is prime and within the bound
        out.factors.push_back(out.remainder);
        out.remainder = 1;
    }
    return out;
}

FactorScan diagnose_bad_factors(const LiftResult& result, const Int& N,
                                unsigned long trial_bound) {
    if (!result.value)
        throw Error("diagnose_bad_factors: lift result carries no value");
    return factor_gcd_with(result.cofactor, N, trial_bound);
}

} // namespace modrecon
