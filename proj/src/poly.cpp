#include "modrecon/poly.hpp"

#include <cctype>
#include <cstdio>
#include <istream>
#include <set>
#include <sstream>

namespace modrecon {

PolyContextPtr make_context(std::vector<std::string> vars, OrderKind kind) {
    if (vars.empty())
        throw Error("PolyContext: at least one variable required");
    std::set<std::string> seen(vars.begin(), vars.end());
    if (seen.size() != vars.size())
        throw Error("PolyContext: duplicate variable names");
    auto ctx = std::make_shared<PolyContext>();
    ctx->order = MonomialOrder::identity(kind, vars.size());
    ctx->vars = std::move(vars);
    return ctx;
}

// --- prime field -------------------------------------------------------------

namespace {

std::uint64_t fp_mul(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % p);
}

std::uint64_t fp_inv(std::uint64_t a, std::uint64_t p) {
    if (a == 0)
        throw Error("Fp: inverse of zero");
    // extended Euclid; p < 2^62 keeps the signed arithmetic in range
    std::int64_t t = 0, newt = 1;
    std::int64_t r = static_cast<std::int64_t>(p), newr = static_cast<std::int64_t>(a);
    while (newr != 0) {
        std::int64_t q = r / newr;
        std::int64_t tmp = t - q * newt;
        t = newt;
        newt = tmp;
        tmp = r - q * newr;
        r = newr;
        newr = tmp;
    }
    if (r != 1)
        throw Error("Fp: modulus not prime or element not invertible");
    if (t < 0)
        t += static_cast<std::int64_t>(p);
    return static_cast<std::uint64_t>(t);
}

void check_same_field(const Fp& a, const Fp& b) {
    if (a.modulus() != b.modulus())
        throw Error("Fp: mixed moduli");
}

} // namespace

Fp Fp::from_int(const Int& n, std::uint64_t p) {
    Int m;
    mpz_mod(m.get_mpz_t(), n.get_mpz_t(), Int(static_cast<unsigned long>(p)).get_mpz_t());
    return Fp(mpz_get_ui(m.get_mpz_t()), p);
}

Fp Fp::operator+(const Fp& o) const {
    check_same_field(*this, o);
    std::uint64_t s = v_ + o.v_;
    if (s >= p_)
        s -= p_;
    return Fp(s, p_);
}

Fp Fp::operator-(const Fp& o) const {
    check_same_field(*this, o);
    return Fp(v_ >= o.v_ ? v_ - o.v_ : v_ + p_ - o.v_, p_);
}

Fp Fp::operator*(const Fp& o) const {
    check_same_field(*this, o);
    return Fp(fp_mul(v_, o.v_, p_), p_);
}

Fp Fp::operator/(const Fp& o) const {
    check_same_field(*this, o);
    return Fp(fp_mul(v_, fp_inv(o.v_, p_), p_), p_);
}

Fp Fp::inverse() const { return Fp(fp_inv(v_, p_), p_); }

// --- Buchberger --------------------------------------------------------------

namespace {

// intermediate normalization: keep coefficients small over Q, monic over Fp
PolyQ normalize_working(const PolyQ& f) { return clear_denominators(f); }
PolyFp normalize_working(const PolyFp& f) { return f.monic(); }

template <class K>
struct PairEntry {
    std::size_t i, j; // i < j
    Monomial lcm;
    unsigned degree;
};

template <class K>
GroebnerBasis<K> buchberger_impl(const std::vector<Poly<K>>& gens) {
    GroebnerBasis<K> out;
    for (const auto& g : gens)
        if (g.context()) {
            out.ctx = g.context();
            break;
        }
    std::vector<Poly<K>> basis;
    for (const auto& g : gens)
        if (!g.is_zero())
            basis.push_back(normalize_working(g));
    if (basis.empty()) {
        out.reduced = true;
        return out;
    }

    const MonomialOrder& ord = out.ctx->order;

    // reducer list view sorted by leading monomial descending, stable
    std::vector<const Poly<K>*> view;
    auto rebuild_view = [&]() {
        view.clear();
        view.reserve(basis.size());
        for (const auto& g : basis)
            view.push_back(&g);
        std::stable_sort(view.begin(), view.end(),
                         [&ord](const Poly<K>* a, const Poly<K>* b) {
                             return ord.greater(a->leading_monomial(),
                                                b->leading_monomial());
                         });
    };
    rebuild_view();

    std::vector<PairEntry<K>> pending;
    std::set<std::pair<std::size_t, std::size_t>> done;
    auto push_pairs_for = [&](std::size_t j) {
        for (std::size_t i = 0; i < j; ++i) {
            Monomial lcm = Monomial::lcm(basis[i].leading_monomial(),
                                         basis[j].leading_monomial());
            pending.push_back({i, j, lcm, lcm.total_degree()});
        }
    };
    for (std::size_t j = 1; j < basis.size(); ++j)
        push_pairs_for(j);

    while (!pending.empty()) {
        // normal strategy: smallest lcm degree, then smallest (i, j)
        std::size_t best = 0;
        for (std::size_t k = 1; k < pending.size(); ++k) {
            const auto& a = pending[k];
            const auto& b = pending[best];
            if (a.degree < b.degree ||
                (a.degree == b.degree && (a.i < b.i || (a.i == b.i && a.j < b.j))))
                best = k;
        }
        PairEntry<K> pair = pending[best];
        pending.erase(pending.begin() + best);
        done.insert({pair.i, pair.j});

        const Monomial& lmi = basis[pair.i].leading_monomial();
        const Monomial& lmj = basis[pair.j].leading_monomial();
        // product criterion
        if (lmi * lmj == pair.lcm)
            continue;
        // chain criterion
        bool skip = false;
        for (std::size_t k = 0; k < basis.size() && !skip; ++k) {
            if (k == pair.i || k == pair.j)
                continue;
            if (!basis[k].leading_monomial().divides(pair.lcm))
                continue;
            auto key = [](std::size_t a, std::size_t b) {
                return std::make_pair(std::min(a, b), std::max(a, b));
            };
            if (done.count(key(pair.i, k)) && done.count(key(pair.j, k)))
                skip = true;
        }
        if (skip)
            continue;

        Poly<K> h = normal_form(s_polynomial(basis[pair.i], basis[pair.j]), view);
        if (h.is_zero())
            continue;
        basis.push_back(normalize_working(h));
        push_pairs_for(basis.size() - 1);
        rebuild_view();
    }

    // minimalize: drop elements whose leading monomial another one divides
    std::vector<bool> keep(basis.size(), true);
    for (std::size_t i = 0; i < basis.size(); ++i) {
        if (!keep[i])
            continue;
        for (std::size_t j = 0; j < basis.size(); ++j) {
            if (i == j || !keep[j])
                continue;
            const Monomial& mi = basis[i].leading_monomial();
            const Monomial& mj = basis[j].leading_monomial();
            if (mj.divides(mi) && !(mi == mj && j > i)) {
                keep[i] = false;
                break;
            }
        }
    }
    std::vector<Poly<K>> minimal;
    for (std::size_t i = 0; i < basis.size(); ++i)
        if (keep[i])
            minimal.push_back(basis[i]);

    // tail-reduce each element against the others, make monic, sort
    std::vector<Poly<K>> reduced;
    for (std::size_t i = 0; i < minimal.size(); ++i) {
        std::vector<const Poly<K>*> others;
        for (std::size_t j = 0; j < minimal.size(); ++j)
            if (j != i)
                others.push_back(&minimal[j]);
        reduced.push_back(normal_form(minimal[i], others).monic());
    }
    std::stable_sort(reduced.begin(), reduced.end(),
                     [&ord](const Poly<K>& a, const Poly<K>& b) {
                         return ord.greater(a.leading_monomial(), b.leading_monomial());
                     });
    out.elements = std::move(reduced);
    out.reduced = true;
    return out;
}

} // namespace

GroebnerBasisQ buchberger(const std::vector<PolyQ>& gens) {
    return buchberger_impl(gens);
}

GroebnerBasisFp buchberger(const std::vector<PolyFp>& gens) {
    return buchberger_impl(gens);
}

// --- fingerprints ------------------------------------------------------------

bool fingerprint_less(const Fingerprint& a, const Fingerprint& b,
                      const MonomialOrder& ord) {
    std::size_t n = std::min(a.lms.size(), b.lms.size());
    for (std::size_t i = 0; i < n; ++i) {
        int cmp = ord.compare(a.lms[i], b.lms[i]);
        if (cmp != 0)
            return cmp < 0;
    }
    return a.lms.size() < b.lms.size();
}

std::uint64_t fingerprint_hash(const Fingerprint& fp) {
    std::uint64_t h = 0xcbf29ce484222325ull; // FNV-1a
    auto mix = [&h](std::uint64_t v) {
        for (int byte = 0; byte < 8; ++byte) {
            h ^= (v >> (8 * byte)) & 0xff;
            h *= 0x100000001b3ull;
        }
    };
    mix(fp.lms.size());
    for (const auto& m : fp.lms) {
        mix(m.nvars());
        for (std::size_t i = 0; i < m.nvars(); ++i)
            mix(m.exponent(i));
    }
    return h;
}

std::string fingerprint_hex(const Fingerprint& fp) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fingerprint_hash(fp)));
    return std::string(buf);
}

std::string monomial_to_string(const Monomial& m, const PolyContext& ctx) {
    if (m.is_one())
        return "1";
    std::string out;
    for (std::size_t i = 0; i < m.nvars(); ++i) {
        unsigned e = m.exponent(i);
        if (e == 0)
            continue;
        if (!out.empty())
            out += "*";
        out += ctx.vars[i];
        if (e > 1)
            out += "^" + std::to_string(e);
    }
    return out;
}

// --- reductions ----------------------------------------------------------------

std::optional<PolyFp> reduce_poly_mod_p(const PolyQ& f, std::uint64_t p) {
    if (!f.context())
        return PolyFp();
    std::vector<Term<Fp>> terms;
    terms.reserve(f.nterms());
    Int pz(static_cast<unsigned long>(p));
    for (const auto& t : f.terms()) {
        auto residue = rational_mod(t.coeff, pz);
        if (!residue)
            return std::nullopt; // type-1: denominator divisible by p
        Fp c(mpz_get_ui(residue->value.get_mpz_t()), p);
        if (!c.is_zero())
            terms.push_back({t.mono, c});
    }
    return PolyFp::from_terms(f.context(), std::move(terms));
}

std::optional<GroebnerBasisFp> reduce_basis_mod_p(const GroebnerBasisQ& basis,
                                                  std::uint64_t p) {
    GroebnerBasisFp out;
    out.ctx = basis.ctx;
    out.reduced = basis.reduced;
    for (const auto& g : basis.elements) {
        auto gp = reduce_poly_mod_p(g, p);
        if (!gp)
            return std::nullopt;
        if (!gp->is_zero())
            out.elements.push_back(std::move(*gp));
    }
    return out;
}

PolyQ clear_denominators(const PolyQ& f) {
    if (f.is_zero())
        throw Error("clear_denominators: zero polynomial");
    Int den_lcm = 1;
    for (const auto& t : f.terms())
        den_lcm = lcm(den_lcm, t.coeff.denominator());
    Int content = 0;
    for (const auto& t : f.terms())
        content = gcd(content, Int(t.coeff.numerator() * (den_lcm / t.coeff.denominator())));
    Rational scale(den_lcm, content);
    if (f.leading_coeff().sign() < 0)
        scale = -scale;
    return f.scaled(scale);
}

// --- printing ------------------------------------------------------------------

namespace {

template <class K>
std::string poly_to_string_impl(const Poly<K>& f) {
    if (f.is_zero())
        return "0";
    const PolyContext& ctx = *f.context();
    std::string out;
    bool first = true;
    for (const auto& t : f.terms()) {
        K a = coeff_abs(t.coeff);
        bool negative = coeff_is_negative(t.coeff);
        if (first) {
            if (negative)
                out += "-";
            first = false;
        } else {
            out += negative ? " - " : " + ";
        }
        if (t.mono.is_one()) {
            out += coeff_to_string(a);
        } else if (a.is_one()) {
            out += monomial_to_string(t.mono, ctx);
        } else {
            out += coeff_to_string(a) + "*" + monomial_to_string(t.mono, ctx);
        }
    }
    return out;
}

} // namespace

template <>
std::string Poly<Rational>::to_string() const {
    return poly_to_string_impl(*this);
}

template <>
std::string Poly<Fp>::to_string() const {
    return poly_to_string_impl(*this);
}

// --- parsing ---------------------------------------------------------------------

namespace {

struct PolyParser {
    const PolyContextPtr& ctx;
    std::string_view text;
    std::size_t pos = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw Error("polynomial parse error at offset " + std::to_string(pos) +
                    ": " + what);
    }

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
            ++pos;
    }

    bool eof() {
        skip_ws();
        return pos >= text.size();
    }

    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }

    Int parse_integer() {
        skip_ws();
        std::size_t start = pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])))
            ++pos;
        if (pos == start)
            fail("expected an integer");
        return Int(std::string(text.substr(start, pos - start)));
    }

    // longest variable name matching at pos, or npos
    std::size_t match_var() {
        std::size_t best = std::string::npos;
        std::size_t best_len = 0;
        for (std::size_t i = 0; i < ctx->vars.size(); ++i) {
            const std::string& v = ctx->vars[i];
            if (v.size() > best_len && text.substr(pos, v.size()) == v) {
                best = i;
                best_len = v.size();
            }
        }
        if (best != std::string::npos)
            pos += best_len;
        return best;
    }

    Term<Rational> parse_term(int sign) {
        Rational coeff(sign);
        bool have_any = false;
        if (std::isdigit(static_cast<unsigned char>(peek()))) {
            Int num = parse_integer();
            Int den = 1;
            if (peek() == '/') {
                ++pos;
                den = parse_integer();
            }
            coeff = coeff * Rational(num, den);
            have_any = true;
            if (peek() == '*')
                ++pos;
        }
        std::vector<unsigned> exps(ctx->vars.size(), 0);
        while (true) {
            skip_ws();
            std::size_t var = match_var();
            if (var == std::string::npos)
                break;
            unsigned e = 1;
            if (peek() == '^') {
                ++pos;
                Int ei = parse_integer();
                if (!mpz_fits_ulong_p(ei.get_mpz_t()))
                    fail("exponent too large");
                e = static_cast<unsigned>(mpz_get_ui(ei.get_mpz_t()));
            }
            exps[var] += e;
            have_any = true;
            if (peek() == '*')
                ++pos;
        }
        if (!have_any)
            fail("expected a coefficient or a variable");
        return {Monomial(std::move(exps)), coeff};
    }

    PolyQ parse() {
        std::vector<Term<Rational>> terms;
        if (eof())
            fail("empty polynomial");
        bool first = true;
        while (!eof()) {
            int sign = 1;
            char c = peek();
            if (c == '+' || c == '-') {
                sign = (c == '-') ? -1 : 1;
                ++pos;
            } else if (!first) {
                fail("expected '+' or '-' between terms");
            }
            terms.push_back(parse_term(sign));
            first = false;
        }
        return PolyQ::from_terms(ctx, std::move(terms));
    }
};

std::string strip(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

} // namespace

PolyQ parse_poly(const PolyContextPtr& ctx, std::string_view text) {
    PolyParser parser{ctx, text};
    return parser.parse();
}

IdealFile parse_ideal_file(std::istream& in) {
    std::string line;
    std::vector<std::string> meaningful;
    std::vector<std::string> poly_lines;
    PolyContextPtr ctx;
    std::vector<std::string> vars;
    std::optional<OrderKind> kind;

    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        line = strip(line);
        if (line.empty())
            continue;
        if (line.rfind("vars:", 0) == 0) {
            std::string rest = strip(line.substr(5));
            std::string name;
            std::istringstream ss(rest);
            while (std::getline(ss, name, ',')) {
                name = strip(name);
                if (name.empty())
                    throw Error("ideal file: empty variable name");
                vars.push_back(name);
            }
            continue;
        }
        if (line.rfind("order:", 0) == 0) {
            std::string rest = strip(line.substr(6));
            if (rest == "lex")
                kind = OrderKind::lex;
            else if (rest == "degrevlex")
                kind = OrderKind::degrevlex;
            else
                throw Error("ideal file: unknown order '" + rest + "'");
            continue;
        }
        poly_lines.push_back(line);
    }
    if (vars.empty())
        throw Error("ideal file: missing 'vars:' line");
    if (!kind)
        throw Error("ideal file: missing 'order:' line");
    ctx = make_context(vars, *kind);

    IdealFile out;
    out.ctx = ctx;
    for (const auto& text : poly_lines)
        out.generators.push_back(parse_poly(ctx, text));
    return out;
}

std::string print_ideal_file(const IdealFile& ideal) {
    std::string out = "vars: ";
    for (std::size_t i = 0; i < ideal.ctx->vars.size(); ++i) {
        if (i)
            out += ",";
        out += ideal.ctx->vars[i];
    }
    out += "\norder: ";
    out += ideal.ctx->order.kind() == OrderKind::lex ? "lex" : "degrevlex";
    out += "\n";
    for (const auto& g : ideal.generators)
        out += g.to_string() + "\n";
    return out;
}

} // namespace modrecon
