#ifndef MODRECON_POLY_HPP
#define MODRECON_POLY_HPP

#include <algorithm>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "modrecon/arith.hpp"

namespace modrecon {

/// Exponent vector of fixed length (one slot per ring variable).
class Monomial {
public:
    Monomial() = default;
    explicit Monomial(std::vector<unsigned> exps)
        : e_(std::move(exps)),
          deg_(std::accumulate(e_.begin(), e_.end(), 0u)) {}

    static Monomial one(std::size_t nvars) {
        return Monomial(std::vector<unsigned>(nvars, 0));
    }

    std::size_t nvars() const { return e_.size(); }
    unsigned exponent(std::size_t i) const { return e_[i]; }
    unsigned total_degree() const { return deg_; }
    bool is_one() const { return deg_ == 0; }

    Monomial operator*(const Monomial& o) const {
        std::vector<unsigned> e(e_.size());
        for (std::size_t i = 0; i < e_.size(); ++i)
            e[i] = e_[i] + o.e_[i];
        return Monomial(std::move(e));
    }

    bool divides(const Monomial& o) const {
        for (std::size_t i = 0; i < e_.size(); ++i)
            if (e_[i] > o.e_[i])
                return false;
        return true;
    }

    /// o / *this, valid when *this divides o
    Monomial divide_into(const Monomial& o) const {
        std::vector<unsigned> e(e_.size());
        for (std::size_t i = 0; i < e_.size(); ++i)
            e[i] = o.e_[i] - e_[i];
        return Monomial(std::move(e));
    }

    static Monomial lcm(const Monomial& a, const Monomial& b) {
        std::vector<unsigned> e(a.e_.size());
        for (std::size_t i = 0; i < e.size(); ++i)
            e[i] = std::max(a.e_[i], b.e_[i]);
        return Monomial(std::move(e));
    }

    friend bool operator==(const Monomial& a, const Monomial& b) {
        return a.e_ == b.e_;
    }
    friend bool operator!=(const Monomial& a, const Monomial& b) {
        return !(a == b);
    }

private:
    std::vector<unsigned> e_;
    unsigned deg_ = 0;
};

enum class OrderKind { lex, degrevlex };

/// Global monomial ordering: lex or degrevlex over a variable priority
/// permutation (perm[0] is the most significant variable index).
class MonomialOrder {
public:
    MonomialOrder() = default;
    MonomialOrder(OrderKind kind, std::vector<unsigned> perm)
        : kind_(kind), perm_(std::move(perm)) {}

    static MonomialOrder identity(OrderKind kind, std::size_t nvars) {
        std::vector<unsigned> perm(nvars);
        std::iota(perm.begin(), perm.end(), 0u);
        return MonomialOrder(kind, std::move(perm));
    }

    OrderKind kind() const { return kind_; }
    const std::vector<unsigned>& permutation() const { return perm_; }

    /// <0, 0, >0 as a is smaller, equal, larger than b.
    int compare(const Monomial& a, const Monomial& b) const {
        if (kind_ == OrderKind::lex) {
            for (unsigned idx : perm_) {
                if (a.exponent(idx) != b.exponent(idx))
                    return a.exponent(idx) < b.exponent(idx) ? -1 : 1;
            }
            return 0;
        }
        if (a.total_degree() != b.total_degree())
            return a.total_degree() < b.total_degree() ? -1 : 1;
        for (auto it = perm_.rbegin(); it != perm_.rend(); ++it) {
            if (a.exponent(*it) != b.exponent(*it))
                return a.exponent(*it) < b.exponent(*it) ? 1 : -1;
        }
        return 0;
    }

    bool less(const Monomial& a, const Monomial& b) const { return compare(a, b) < 0; }
    bool greater(const Monomial& a, const Monomial& b) const { return compare(a, b) > 0; }

    friend bool operator==(const MonomialOrder& x, const MonomialOrder& y) {
        return x.kind_ == y.kind_ && x.perm_ == y.perm_;
    }

private:
    OrderKind kind_ = OrderKind::lex;
    std::vector<unsigned> perm_;
};

/// Ring context shared by every polynomial of one computation.
struct PolyContext {
    std::vector<std::string> vars;
    MonomialOrder order;
};

using PolyContextPtr = std::shared_ptr<const PolyContext>;

PolyContextPtr make_context(std::vector<std::string> vars, OrderKind kind);

/// Prime field element; the modulus travels with the value.
class Fp {
public:
    Fp() = default;
    Fp(std::uint64_t v, std::uint64_t p) : p_(p) {
        if (p < 2)
            throw Error("Fp: modulus must be >= 2");
        v_ = v % p;
    }

    static Fp from_int(const Int& n, std::uint64_t p);

    std::uint64_t value() const { return v_; }
    std::uint64_t modulus() const { return p_; }
    bool is_zero() const { return v_ == 0; }
    bool is_one() const { return v_ == 1; }

    Fp operator-() const { return Fp(v_ == 0 ? 0 : p_ - v_, p_); }
    Fp operator+(const Fp& o) const;
    Fp operator-(const Fp& o) const;
    Fp operator*(const Fp& o) const;
    Fp operator/(const Fp& o) const;
    Fp inverse() const;

    friend bool operator==(const Fp& a, const Fp& b) {
        return a.v_ == b.v_ && a.p_ == b.p_;
    }
    friend bool operator!=(const Fp& a, const Fp& b) { return !(a == b); }

    std::string to_string() const { return std::to_string(v_); }

private:
    std::uint64_t v_ = 0;
    std::uint64_t p_ = 0;
};

inline Rational one_like(const Rational&) { return Rational(1); }
inline Fp one_like(const Fp& x) { return Fp(1, x.modulus()); }

inline std::string coeff_to_string(const Rational& c) { return c.to_string(); }
inline std::string coeff_to_string(const Fp& c) { return c.to_string(); }

inline bool coeff_is_negative(const Rational& c) { return c.sign() < 0; }
inline bool coeff_is_negative(const Fp&) { return false; }
inline Rational coeff_abs(const Rational& c) { return c.sign() < 0 ? -c : c; }
inline Fp coeff_abs(const Fp& c) { return c; }

template <class K>
struct Term {
    Monomial mono;
    K coeff;
};

/// Sparse multivariate polynomial; terms kept strictly descending under the
/// context ordering, no zero coefficients stored.
template <class K>
class Poly {
public:
    Poly() = default; // zero with no context; usable as a placeholder only

    explicit Poly(PolyContextPtr ctx) : ctx_(std::move(ctx)) {}

    static Poly zero(PolyContextPtr ctx) { return Poly(std::move(ctx)); }

    static Poly constant(PolyContextPtr ctx, K c) {
        Poly p(ctx);
        if (!c.is_zero())
            p.terms_.push_back({Monomial::one(ctx->vars.size()), std::move(c)});
        return p;
    }

    static Poly from_terms(PolyContextPtr ctx, std::vector<Term<K>> terms) {
        if (!ctx) {
            if (!terms.empty())
                throw Error("Poly: terms without a ring context");
            return Poly();
        }
        Poly p(ctx);
        const MonomialOrder& ord = ctx->order;
        std::stable_sort(terms.begin(), terms.end(),
                         [&ord](const Term<K>& a, const Term<K>& b) {
                             return ord.greater(a.mono, b.mono);
                         });
        for (auto& t : terms) {
            if (!p.terms_.empty() && p.terms_.back().mono == t.mono) {
                p.terms_.back().coeff = p.terms_.back().coeff + t.coeff;
            } else {
                p.terms_.push_back(std::move(t));
            }
        }
        std::erase_if(p.terms_, [](const Term<K>& t) { return t.coeff.is_zero(); });
        return p;
    }

    const PolyContextPtr& context() const { return ctx_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t nterms() const { return terms_.size(); }
    const std::vector<Term<K>>& terms() const { return terms_; }

    const Monomial& leading_monomial() const {
        require_nonzero();
        return terms_.front().mono;
    }
    const K& leading_coeff() const {
        require_nonzero();
        return terms_.front().coeff;
    }

    /// coefficient of a monomial, zero-like when absent
    std::optional<K> coeff_of(const Monomial& m) const {
        for (const auto& t : terms_)
            if (t.mono == m)
                return t.coeff;
        return std::nullopt;
    }

    Poly operator-() const {
        Poly p(ctx_);
        p.terms_.reserve(terms_.size());
        for (const auto& t : terms_)
            p.terms_.push_back({t.mono, -t.coeff});
        return p;
    }

    /// *this minus its leading term
    Poly tail() const {
        require_nonzero();
        Poly p(ctx_);
        p.terms_.assign(terms_.begin() + 1, terms_.end());
        return p;
    }

    /// *this + c * x^m * g, the reduction/accumulation kernel
    Poly axpy(const K& c, const Monomial& m, const Poly& g) const {
        const PolyContextPtr& ctx = ctx_ ? ctx_ : g.ctx_;
        const MonomialOrder& ord = ctx->order;
        Poly out(ctx);
        out.terms_.reserve(terms_.size() + g.terms_.size());
        std::size_t i = 0, j = 0;
        while (i < terms_.size() || j < g.terms_.size()) {
            if (j == g.terms_.size()) {
                out.terms_.push_back(terms_[i++]);
                continue;
            }
            Monomial shifted = g.terms_[j].mono * m;
            int cmp = (i == terms_.size()) ? -1 : ord.compare(terms_[i].mono, shifted);
            if (cmp > 0) {
                out.terms_.push_back(terms_[i++]);
            } else if (cmp < 0) {
                K prod = c * g.terms_[j].coeff;
                if (!prod.is_zero())
                    out.terms_.push_back({std::move(shifted), std::move(prod)});
                ++j;
            } else {
                K sum = terms_[i].coeff + c * g.terms_[j].coeff;
                if (!sum.is_zero())
                    out.terms_.push_back({terms_[i].mono, std::move(sum)});
                ++i;
                ++j;
            }
        }
        return out;
    }

    Poly operator+(const Poly& o) const {
        if (o.is_zero())
            return ctx_ ? *this : o;
        return axpy(one_like(o.terms_.front().coeff), Monomial::one(o.ctx_->vars.size()), o);
    }
    Poly operator-(const Poly& o) const {
        if (o.is_zero())
            return ctx_ ? *this : o;
        return axpy(-one_like(o.terms_.front().coeff), Monomial::one(o.ctx_->vars.size()), o);
    }

    Poly operator*(const Poly& o) const {
        const PolyContextPtr& ctx = ctx_ ? ctx_ : o.ctx_;
        Poly acc(ctx);
        for (const auto& t : terms_)
            acc = acc.axpy(t.coeff, t.mono, o);
        return acc;
    }

    Poly scaled(const K& c) const {
        Poly p(ctx_);
        if (c.is_zero())
            return p;
        p.terms_.reserve(terms_.size());
        for (const auto& t : terms_) {
            K prod = t.coeff * c;
            if (!prod.is_zero())
                p.terms_.push_back({t.mono, std::move(prod)});
        }
        return p;
    }

    Poly monic() const {
        if (is_zero())
            return *this;
        return scaled(leading_coeff().inverse());
    }

    friend bool operator==(const Poly& a, const Poly& b) {
        if (a.terms_.size() != b.terms_.size())
            return false;
        for (std::size_t i = 0; i < a.terms_.size(); ++i) {
            if (a.terms_[i].mono != b.terms_[i].mono ||
                !(a.terms_[i].coeff == b.terms_[i].coeff))
                return false;
        }
        return true;
    }
    friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

    std::string to_string() const;

private:
    void require_nonzero() const {
        if (terms_.empty())
            throw Error("Poly: zero polynomial has no leading term");
    }

    PolyContextPtr ctx_;
    std::vector<Term<K>> terms_;
};

using PolyQ = Poly<Rational>;
using PolyFp = Poly<Fp>;

/// Remainder of f under the division algorithm by G. The reducer for each
/// term is the first list entry whose leading monomial divides it, so the
/// result is deterministic for a fixed list order.
template <class K>
Poly<K> normal_form(const Poly<K>& f, const std::vector<const Poly<K>*>& reducers) {
    if (f.is_zero())
        return f;
    Poly<K> h = f;
    std::vector<Term<K>> done;
    while (!h.is_zero()) {
        const Monomial& lm = h.leading_monomial();
        const Poly<K>* g = nullptr;
        for (const Poly<K>* cand : reducers) {
            if (!cand->is_zero() && cand->leading_monomial().divides(lm)) {
                g = cand;
                break;
            }
        }
        if (g == nullptr) {
            done.push_back(h.terms().front());
            h = h.tail();
            continue;
        }
        K factor = -(h.leading_coeff() / g->leading_coeff());
        h = h.axpy(factor, g->leading_monomial().divide_into(lm), *g);
    }
    return Poly<K>::from_terms(f.context(), std::move(done));
}

template <class K>
Poly<K> normal_form(const Poly<K>& f, const std::vector<Poly<K>>& G) {
    std::vector<const Poly<K>*> ptrs;
    ptrs.reserve(G.size());
    for (const auto& g : G)
        ptrs.push_back(&g);
    return normal_form(f, ptrs);
}

template <class K>
Poly<K> s_polynomial(const Poly<K>& f, const Poly<K>& g) {
    Monomial lcm = Monomial::lcm(f.leading_monomial(), g.leading_monomial());
    Poly<K> zero(f.context());
    Poly<K> left = zero.axpy(f.leading_coeff().inverse(),
                             f.leading_monomial().divide_into(lcm), f);
    return left.axpy(-(g.leading_coeff().inverse()),
                     g.leading_monomial().divide_into(lcm), g);
}

template <class K>
struct GroebnerBasis {
    PolyContextPtr ctx;
    std::vector<Poly<K>> elements; // sorted by leading monomial, descending
    bool reduced = false;

    friend bool operator==(const GroebnerBasis& a, const GroebnerBasis& b) {
        return a.elements == b.elements;
    }
};

using GroebnerBasisQ = GroebnerBasis<Rational>;
using GroebnerBasisFp = GroebnerBasis<Fp>;

/// Reduced Groebner basis of the ideal generated by gens, computed with
/// Buchberger's algorithm (normal selection strategy, product and chain
/// criteria), followed by inter-reduction.
GroebnerBasisQ buchberger(const std::vector<PolyQ>& gens);
GroebnerBasisFp buchberger(const std::vector<PolyFp>& gens);

/// Sorted leading-monomial list of a basis.
struct Fingerprint {
    std::vector<Monomial> lms; // descending under the basis ordering

    friend bool operator==(const Fingerprint& a, const Fingerprint& b) {
        return a.lms == b.lms;
    }
    friend bool operator!=(const Fingerprint& a, const Fingerprint& b) {
        return !(a == b);
    }
};

template <class K>
Fingerprint fingerprint(const GroebnerBasis<K>& basis) {
    Fingerprint fp;
    fp.lms.reserve(basis.elements.size());
    for (const auto& g : basis.elements)
        fp.lms.push_back(g.leading_monomial());
    return fp;
}

/// Total order on fingerprints (elementwise by ord, then by length).
bool fingerprint_less(const Fingerprint& a, const Fingerprint& b,
                      const MonomialOrder& ord);

/// Stable 64-bit digest for report lines.
std::uint64_t fingerprint_hash(const Fingerprint& fp);
std::string fingerprint_hex(const Fingerprint& fp);
std::string monomial_to_string(const Monomial& m, const PolyContext& ctx);

/// Coefficientwise reduction modulo p; nullopt when some denominator is
/// divisible by p (a type-1 prime for these generators).
std::optional<PolyFp> reduce_poly_mod_p(const PolyQ& f, std::uint64_t p);
std::optional<GroebnerBasisFp> reduce_basis_mod_p(const GroebnerBasisQ& basis,
                                                  std::uint64_t p);

/// Scalar multiple with integer coefficients of collective gcd 1 and a
/// positive leading coefficient. Throws Error on the zero polynomial.
PolyQ clear_denominators(const PolyQ& f);

// --- text format -----------------------------------------------------------

struct IdealFile {
    PolyContextPtr ctx;
    std::vector<PolyQ> generators;
};

/// `vars: x,y,z` / `order: lex|degrevlex` / one polynomial per line.
/// '#' comments and blank lines are permitted.
IdealFile parse_ideal_file(std::istream& in);
std::string print_ideal_file(const IdealFile& ideal);

/// Human-readable polynomial syntax: `+ - * ^`, `*` optional, rational
/// coefficients as `a/b`. Round-trips Poly::to_string exactly.
PolyQ parse_poly(const PolyContextPtr& ctx, std::string_view text);

} // namespace modrecon

#endif
