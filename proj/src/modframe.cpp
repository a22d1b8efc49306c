#include "modrecon/modframe.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <cstdlib>
#include <istream>
#include <sstream>
#include <thread>

namespace modrecon {

std::string to_string(BadPrimeType t) {
    switch (t) {
    case BadPrimeType::good: return "good";
    case BadPrimeType::type1: return "type-1";
    case BadPrimeType::type2: return "type-2";
    case BadPrimeType::type3: return "type-3";
    case BadPrimeType::type4: return "type-4";
    case BadPrimeType::type5_suspected: return "type-5-suspected";
    }
    return "?";
}

// --- worker pool ---------------------------------------------------------------

namespace {

unsigned resolve_workers(unsigned requested) {
    if (requested > 0)
        return requested;
    if (const char* env = std::getenv("MODRECON_THREADS")) {
        unsigned n = static_cast<unsigned>(std::strtoul(env, nullptr, 10));
        if (n > 0)
            return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

template <class F>
void parallel_for_n(std::size_t n, unsigned workers, F&& body) {
    if (n == 0)
        return;
    workers = std::min<std::size_t>(workers, n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            body(i);
        return;
    }
    std::atomic<std::size_t> cursor{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto run = [&]() {
        for (;;) {
            std::size_t i = cursor.fetch_add(1);
            if (i >= n)
                return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error)
                    first_error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back(run);
    for (auto& t : pool)
        t.join();
    if (first_error)
        std::rethrow_exception(first_error);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t state = seed ^ salt;
    return splitmix64(state);
}

PrimeStream make_batch_stream(const RunConfig& config) {
    PrimeStreamConfig cfg = config.primes;
    cfg.seed = derive_seed(config.seed, 0x626174636821ull);
    return PrimeStream(cfg);
}

PrimeStream make_ptest_stream(const RunConfig& config) {
    PrimeStreamConfig cfg = config.primes;
    cfg.seed = derive_seed(config.seed, 0x7074657374ull);
    return PrimeStream(cfg);
}

std::uint64_t to_u64_prime(const Int& p) {
    if (!mpz_fits_ulong_p(p.get_mpz_t()))
        throw Error("run_job: prime does not fit in 64 bits");
    return mpz_get_ui(p.get_mpz_t());
}

} // namespace

// --- jobs ----------------------------------------------------------------------

ModularJob make_groebner_job(PolyContextPtr ctx, std::vector<PolyQ> generators,
                             std::string description) {
    ModularJob job;
    job.description = std::move(description);
    job.ctx = std::move(ctx);
    job.generators = std::move(generators);

    job.compute = [gens = job.generators](std::uint64_t p) -> ComputeOutcome {
        std::vector<PolyFp> reduced;
        reduced.reserve(gens.size());
        for (const auto& g : gens) {
            auto gp = reduce_poly_mod_p(g, p);
            if (!gp)
                return Rejection{BadPrimeType::type1,
                                 "coefficient denominator divisible by p"};
            if (!gp->is_zero())
                reduced.push_back(std::move(*gp));
        }
        return buchberger(reduced);
    };

    job.verify = [gens = job.generators](const GroebnerBasisQ& G) {
        bool any_nonzero_gen = false;
        for (const auto& g : gens)
            if (!g.is_zero())
                any_nonzero_gen = true;
        if (G.elements.empty())
            return !any_nonzero_gen;
        for (std::size_t i = 0; i < G.elements.size(); ++i)
            for (std::size_t j = i + 1; j < G.elements.size(); ++j)
                if (!normal_form(s_polynomial(G.elements[i], G.elements[j]),
                                 G.elements).is_zero())
                    return false;
        for (const auto& g : gens)
            if (!normal_form(g, G.elements).is_zero())
                return false;
        return true;
    };
    return job;
}

ModularJob make_linear_solve_job(const std::vector<std::vector<Rational>>& A,
                                 const std::vector<Rational>& b) {
    const std::size_t n = A.size();
    if (n == 0 || b.size() != n)
        throw Error("linear_solve_job: A must be square and match b");
    for (const auto& row : A)
        if (row.size() != n)
            throw Error("linear_solve_job: A must be square");

    // reject singular inputs up front with exact elimination
    {
        std::vector<std::vector<Rational>> m = A;
        for (std::size_t col = 0; col < n; ++col) {
            std::size_t pivot = col;
            while (pivot < n && m[pivot][col].is_zero())
                ++pivot;
            if (pivot == n)
                throw Error("linear_solve_job: A is singular over the rationals");
            std::swap(m[pivot], m[col]);
            for (std::size_t row = col + 1; row < n; ++row) {
                if (m[row][col].is_zero())
                    continue;
                Rational f = m[row][col] / m[col][col];
                for (std::size_t k = col; k < n; ++k)
                    m[row][k] -= f * m[col][k];
            }
        }
    }

    std::vector<std::string> vars;
    for (std::size_t i = 0; i < n; ++i)
        vars.push_back("u" + std::to_string(i + 1));
    PolyContextPtr ctx = make_context(vars, OrderKind::lex);

    ModularJob job;
    job.description = "linear-solve";
    job.ctx = ctx;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<Term<Rational>> terms;
        for (std::size_t j = 0; j < n; ++j) {
            std::vector<unsigned> e(n, 0);
            e[j] = 1;
            terms.push_back({Monomial(std::move(e)), A[i][j]});
        }
        terms.push_back({Monomial::one(n), -b[i]});
        job.generators.push_back(PolyQ::from_terms(ctx, std::move(terms)));
    }

    job.compute = [A, b, ctx, n](std::uint64_t p) -> ComputeOutcome {
        Int pz(static_cast<unsigned long>(p));
        std::vector<std::vector<Fp>> m(n, std::vector<Fp>(n + 1, Fp(0, p)));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                auto r = rational_mod(A[i][j], pz);
                if (!r)
                    return Rejection{BadPrimeType::type1, "entry undefined mod p"};
                m[i][j] = Fp(mpz_get_ui(r->value.get_mpz_t()), p);
            }
            auto r = rational_mod(b[i], pz);
            if (!r)
                return Rejection{BadPrimeType::type1, "entry undefined mod p"};
            m[i][n] = Fp(mpz_get_ui(r->value.get_mpz_t()), p);
        }
        for (std::size_t col = 0; col < n; ++col) {
            std::size_t pivot = col;
            while (pivot < n && m[pivot][col].is_zero())
                ++pivot;
            if (pivot == n)
                return Rejection{BadPrimeType::type2, "matrix singular modulo p"};
            std::swap(m[pivot], m[col]);
            Fp inv = m[col][col].inverse();
            for (std::size_t k = col; k <= n; ++k)
                m[col][k] = m[col][k] * inv;
            for (std::size_t row = 0; row < n; ++row) {
                if (row == col || m[row][col].is_zero())
                    continue;
                Fp f = m[row][col];
                for (std::size_t k = col; k <= n; ++k)
                    m[row][k] = m[row][k] - f * m[col][k];
            }
        }
        GroebnerBasisFp basis;
        basis.ctx = ctx;
        basis.reduced = true;
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<Term<Fp>> terms;
            std::vector<unsigned> e(n, 0);
            e[i] = 1;
            terms.push_back({Monomial(std::move(e)), Fp(1, p)});
            Fp c = -m[i][n]; // u_i - x_i
            if (!c.is_zero())
                terms.push_back({Monomial::one(n), c});
            basis.elements.push_back(PolyFp::from_terms(ctx, std::move(terms)));
        }
        return basis;
    };

    job.verify = [A, b, n](const GroebnerBasisQ& G) {
        if (G.elements.size() != n)
            return false;
        std::vector<Rational> x(n);
        for (std::size_t i = 0; i < n; ++i) {
            const PolyQ& g = G.elements[i];
            if (g.is_zero() || g.nterms() > 2)
                return false;
            const Monomial& lm = g.leading_monomial();
            if (lm.total_degree() != 1 || lm.exponent(i) != 1)
                return false;
            if (!(g.leading_coeff() == Rational(1)))
                return false;
            if (g.nterms() == 2) {
                const auto& t = g.terms()[1];
                if (!t.mono.is_one())
                    return false;
                x[i] = -t.coeff;
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            Rational acc;
            for (std::size_t j = 0; j < n; ++j)
                acc += A[i][j] * x[j];
            if (acc != b[i])
                return false;
        }
        return true;
    };
    return job;
}

ModularJob load_fixture_job(std::istream& in) {
    std::vector<std::string> vars;
    std::optional<OrderKind> kind;
    std::optional<std::uint64_t> bad_prime;
    std::vector<std::string> target_lines, bad_lines;

    std::string line;
    auto strip = [](std::string s) {
        std::size_t b = s.find_first_not_of(" \t\r\n");
        if (b == std::string::npos)
            return std::string();
        std::size_t e = s.find_last_not_of(" \t\r\n");
        return s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        line = strip(line);
        if (line.empty())
            continue;
        if (line.rfind("vars:", 0) == 0) {
            std::istringstream ss(strip(line.substr(5)));
            std::string name;
            while (std::getline(ss, name, ','))
                vars.push_back(strip(name));
        } else if (line.rfind("order:", 0) == 0) {
            std::string rest = strip(line.substr(6));
            if (rest == "lex")
                kind = OrderKind::lex;
            else if (rest == "degrevlex")
                kind = OrderKind::degrevlex;
            else
                throw Error("fixture: unknown order '" + rest + "'");
        } else if (line.rfind("bad-prime:", 0) == 0) {
            bad_prime = std::strtoull(strip(line.substr(10)).c_str(), nullptr, 10);
        } else if (line.rfind("target:", 0) == 0) {
            target_lines.push_back(strip(line.substr(7)));
        } else if (line.rfind("bad:", 0) == 0) {
            bad_lines.push_back(strip(line.substr(4)));
        } else {
            throw Error("fixture: unrecognized line '" + line + "'");
        }
    }
    if (vars.empty() || !kind)
        throw Error("fixture: missing vars/order header");
    if (!bad_prime || target_lines.empty() || bad_lines.empty())
        throw Error("fixture: missing bad-prime/target/bad entries");

    PolyContextPtr ctx = make_context(vars, *kind);
    std::vector<PolyQ> target, bad;
    for (const auto& t : target_lines)
        target.push_back(parse_poly(ctx, t));
    for (const auto& t : bad_lines)
        bad.push_back(parse_poly(ctx, t));

    GroebnerBasisQ expected = buchberger(target);

    ModularJob job;
    job.description = "type5-fixture";
    job.ctx = ctx;
    job.generators = target;
    job.compute = [target, bad, bp = *bad_prime](std::uint64_t p) -> ComputeOutcome {
        const std::vector<PolyQ>& source = (p == bp) ? bad : target;
        std::vector<PolyFp> reduced;
        for (const auto& g : source) {
            auto gp = reduce_poly_mod_p(g, p);
            if (!gp)
                return Rejection{BadPrimeType::type1,
                                 "coefficient denominator divisible by p"};
            if (!gp->is_zero())
                reduced.push_back(std::move(*gp));
        }
        return buchberger(reduced);
    };
    job.verify = [expected](const GroebnerBasisQ& G) { return G == expected; };
    return job;
}

ModularJob with_faults(ModularJob base, FaultPlan plan) {
    ModularJob out = base;
    out.compute = [inner = base.compute,
                   plan = std::move(plan)](std::uint64_t p) -> ComputeOutcome {
        auto it = plan.corruptions.find(p);
        if (it == plan.corruptions.end())
            return inner(p);
        if (const auto* basis = std::get_if<GroebnerBasisFp>(&it->second)) {
            for (const auto& g : basis->elements)
                for (const auto& t : g.terms())
                    if (t.coeff.modulus() != p)
                        throw Error("FaultPlan: replacement basis has wrong modulus");
        }
        return it->second;
    };
    return out;
}

// --- round state -----------------------------------------------------------------

unsigned assign_round_weights(unsigned existing_total, std::size_t n_new) {
    if (n_new == 0)
        throw Error("assign_round_weights: no new primes");
    return existing_total / static_cast<unsigned>(n_new) + 1;
}

RoundState delete_by_majority_vote(RoundState state) {
    if (state.accepted.empty())
        return state;

    struct Group {
        Fingerprint fp;
        unsigned long total = 0;
        std::vector<std::size_t> members;
    };
    std::vector<Group> groups;
    for (std::size_t i = 0; i < state.accepted.size(); ++i) {
        Fingerprint fp = fingerprint(state.accepted[i].basis);
        bool found = false;
        for (auto& g : groups) {
            if (g.fp == fp) {
                g.total += state.accepted[i].weight;
                g.members.push_back(i);
                found = true;
                break;
            }
        }
        if (!found)
            groups.push_back({std::move(fp), state.accepted[i].weight, {i}});
    }
    const MonomialOrder* ord = state.ctx ? &state.ctx->order : nullptr;
    std::size_t best = 0;
    for (std::size_t g = 1; g < groups.size(); ++g) {
        if (groups[g].total > groups[best].total) {
            best = g;
        } else if (groups[g].total == groups[best].total && ord &&
                   fingerprint_less(groups[g].fp, groups[best].fp, *ord)) {
            best = g;
        }
    }

    std::vector<bool> keep(state.accepted.size(), false);
    for (std::size_t i : groups[best].members)
        keep[i] = true;
    RoundState out;
    out.round = state.round;
    out.batch = state.batch;
    out.seed = state.seed;
    out.ctx = state.ctx;
    out.rejected = std::move(state.rejected);
    for (std::size_t i = 0; i < state.accepted.size(); ++i) {
        if (keep[i]) {
            out.accepted.push_back(std::move(state.accepted[i]));
        } else {
            out.rejected.push_back({state.accepted[i].prime, BadPrimeType::type4,
                                    state.round,
                                    fingerprint_hex(fingerprint(state.accepted[i].basis)),
                                    state.accepted[i].weight});
        }
    }
    return out;
}

// --- lifting ---------------------------------------------------------------------

LiftOutcome lift_basis(const std::vector<std::pair<std::uint64_t, GroebnerBasisFp>>& bases) {
    if (bases.empty())
        throw Error("lift_basis: no bases");
    LiftOutcome out;
    for (const auto& [p, basis] : bases)
        out.modulus *= Int(static_cast<unsigned long>(p));

    const GroebnerBasisFp& first = bases.front().second;
    Fingerprint shared = fingerprint(first);
    for (const auto& [p, basis] : bases)
        if (fingerprint(basis) != shared)
            throw Error("lift_basis: bases do not share a fingerprint");

    PolyContextPtr ctx = first.ctx;
    if (!ctx && !first.elements.empty())
        ctx = first.elements.front().context();

    GroebnerBasisQ lifted;
    lifted.ctx = ctx;
    lifted.reduced = true;
    std::set<Int> cofactors;

    for (std::size_t e = 0; e < first.elements.size(); ++e) {
        // union of monomials over all images of element e
        std::vector<Monomial> monos;
        for (const auto& [p, basis] : bases)
            for (const auto& t : basis.elements[e].terms())
                monos.push_back(t.mono);
        const MonomialOrder& ord = ctx->order;
        std::sort(monos.begin(), monos.end(),
                  [&ord](const Monomial& a, const Monomial& b) {
                      return ord.greater(a, b);
                  });
        monos.erase(std::unique(monos.begin(), monos.end()), monos.end());

        std::vector<Term<Rational>> terms;
        for (const auto& m : monos) {
            std::vector<Residue> residues;
            residues.reserve(bases.size());
            for (const auto& [p, basis] : bases) {
                auto c = basis.elements[e].coeff_of(m);
                residues.emplace_back(Int(static_cast<unsigned long>(c ? c->value() : 0)),
                                      Int(static_cast<unsigned long>(p)));
            }
            Residue combined = crt_combine(residues);
            LiftResult lifted_coeff = error_tolerant_lift(combined.modulus, combined.value);
            if (!lifted_coeff.value)
                return out; // ok stays false: enlarge P
            if (lifted_coeff.cofactor != 1)
                cofactors.insert(lifted_coeff.cofactor);
            if (!lifted_coeff.value->is_zero())
                terms.push_back({m, *lifted_coeff.value});
        }
        lifted.elements.push_back(PolyQ::from_terms(ctx, std::move(terms)));
    }
    out.basis = std::move(lifted);
    out.cofactors.assign(cofactors.begin(), cofactors.end());
    out.ok = true;
    return out;
}

// --- pTest -----------------------------------------------------------------------

namespace {

bool divides_any_coefficient(const Int& p, const GroebnerBasisQ& G,
                             const std::vector<PolyQ>& gens) {
    auto check_poly = [&p](const PolyQ& f) {
        for (const auto& t : f.terms()) {
            if (t.coeff.numerator() != 0 && t.coeff.numerator() % p == 0)
                return true;
            if (t.coeff.denominator() % p == 0)
                return true;
        }
        return false;
    };
    for (const auto& g : G.elements)
        if (check_poly(g))
            return true;
    for (const auto& g : gens)
        if (check_poly(g))
            return true;
    return false;
}

} // namespace

bool p_test(const ModularJob& job, const GroebnerBasisQ& G,
            std::set<Int>& used, PrimeStream& fresh, unsigned retries) {
    if (G.elements.empty())
        throw Error("p_test: empty candidate basis");
    // skipping over already-used primes is stream navigation, not a retry
    std::uint64_t skip_budget = 100000;
    for (unsigned attempt = 0; attempt < retries; ++attempt) {
        Int p = fresh.next();
        while (used.count(p)) {
            if (skip_budget-- == 0)
                throw Error("p_test: prime stream exhausted by used primes");
            p = fresh.next();
        }
        if (divides_any_coefficient(p, G, job.generators))
            continue;
        ComputeOutcome outcome = job.compute(to_u64_prime(p));
        if (std::holds_alternative<Rejection>(outcome))
            continue;
        used.insert(p);
        auto Gp = reduce_basis_mod_p(G, to_u64_prime(p));
        if (!Gp)
            continue; // cannot happen for admissible p
        return *Gp == std::get<GroebnerBasisFp>(outcome);
    }
    throw Error("p_test: no admissible fresh prime within the retry bound");
}

// --- reporting -------------------------------------------------------------------

std::string RunReport::to_text() const {
    std::ostringstream out;
    out << "# modrecon report v1\n";
    for (const auto& line : primes) {
        out << "p " << line.prime << " weight " << line.weight << " status "
            << modrecon::to_string(line.status) << " fingerprint "
            << line.fingerprint << "\n";
    }
    auto list = [](const std::vector<Int>& xs) {
        std::string s = "[";
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (i)
                s += ",";
            s += xs[i].get_str();
        }
        return s + "]";
    };
    out << "summary rounds " << rounds << "\n";
    out << "summary result " << (success ? "ok" : "fail") << "\n";
    out << "summary modulus " << modulus.get_str() << "\n";
    out << "summary nprime-estimate " << nprime_estimate.get_str() << "\n";
    out << "summary cofactors " << list(cofactors) << "\n";
    out << "summary bad-factors " << list(bad_factors) << "\n";
    return out.str();
}

// --- driver ----------------------------------------------------------------------

namespace {

RunReport build_report(const RoundState& state, bool success,
                       const LiftOutcome* lift, const std::set<std::uint64_t>& suspected,
                       const std::vector<Int>& bad_factors) {
    RunReport report;
    report.success = success;
    report.rounds = state.round;
    for (const auto& a : state.accepted) {
        BadPrimeType status = suspected.count(a.prime) ? BadPrimeType::type5_suspected
                                                       : BadPrimeType::good;
        report.primes.push_back({a.prime, a.weight, status,
                                 fingerprint_hex(fingerprint(a.basis)), a.round});
        report.modulus *= Int(static_cast<unsigned long>(a.prime));
    }
    for (const auto& r : state.rejected)
        report.primes.push_back({r.prime, r.weight, r.type, r.fingerprint, r.round});
    std::sort(report.primes.begin(), report.primes.end(),
              [](const PrimeReport& a, const PrimeReport& b) {
                  return a.prime < b.prime;
              });
    report.nprime_estimate = report.modulus;
    for (std::uint64_t p : suspected) {
        Int pz(static_cast<unsigned long>(p));
        if (report.nprime_estimate % pz == 0)
            report.nprime_estimate /= pz;
    }
    if (lift != nullptr)
        report.cofactors = lift->cofactors;
    report.bad_factors = bad_factors;
    return report;
}

} // namespace

RunResult run_job(const ModularJob& job, const RunConfig& config) {
    if (!job.compute || !job.verify)
        throw Error("run_job: job must define compute and verify");
    if (config.batch == 0)
        throw Error("run_job: batch size must be positive");

    PrimeStream batch_stream = make_batch_stream(config);
    PrimeStream ptest_stream = make_ptest_stream(config);
    unsigned workers = resolve_workers(config.threads);

    RoundState state;
    state.batch = config.batch;
    state.seed = config.seed;
    state.ctx = job.ctx;
    std::set<Int> used;

    LiftOutcome last_lift;
    std::set<std::uint64_t> suspected;
    std::vector<Int> bad_factors;

    for (unsigned round = 1; round <= config.max_rounds; ++round) {
        state.round = round;

        std::vector<std::uint64_t> batch;
        while (batch.size() < config.batch) {
            Int p = batch_stream.next();
            if (used.count(p))
                continue;
            used.insert(p);
            batch.push_back(to_u64_prime(p));
        }
        std::sort(batch.begin(), batch.end());

        std::vector<std::optional<ComputeOutcome>> outcomes(batch.size());
        parallel_for_n(batch.size(), workers,
                       [&](std::size_t i) { outcomes[i] = job.compute(batch[i]); });

        std::vector<std::pair<std::uint64_t, GroebnerBasisFp>> fresh;
        for (std::size_t i = 0; i < batch.size(); ++i) {
            ComputeOutcome& outcome = *outcomes[i];
            if (auto* rej = std::get_if<Rejection>(&outcome)) {
                state.rejected.push_back({batch[i], rej->type, round, "-", 0});
            } else {
                fresh.emplace_back(batch[i],
                                   std::move(std::get<GroebnerBasisFp>(outcome)));
            }
        }

        if (!fresh.empty()) {
            unsigned existing_total = 0;
            for (const auto& a : state.accepted)
                existing_total += a.weight;
            unsigned w = assign_round_weights(existing_total, fresh.size());
            for (auto& [p, basis] : fresh)
                state.accepted.push_back({p, std::move(basis), w, round});
        }
        if (state.accepted.empty())
            continue;

        state = delete_by_majority_vote(std::move(state));

        std::vector<std::pair<std::uint64_t, GroebnerBasisFp>> pairs;
        pairs.reserve(state.accepted.size());
        for (const auto& a : state.accepted)
            pairs.emplace_back(a.prime, a.basis);
        std::sort(pairs.begin(), pairs.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });

        last_lift = lift_basis(pairs);
        if (!last_lift.ok)
            continue;

        suspected.clear();
        bad_factors.clear();
        std::set<Int> factor_set;
        for (const Int& c : last_lift.cofactors) {
            FactorScan scan = factor_gcd_with(c, last_lift.modulus);
            for (const Int& f : scan.factors) {
                factor_set.insert(f);
                if (mpz_fits_ulong_p(f.get_mpz_t()))
                    suspected.insert(mpz_get_ui(f.get_mpz_t()));
            }
        }
        bad_factors.assign(factor_set.begin(), factor_set.end());

        if (!last_lift.basis.elements.empty() &&
            !p_test(job, last_lift.basis, used, ptest_stream, config.ptest_retries))
            continue;
        if (!job.verify(last_lift.basis))
            continue;

        RunReport report = build_report(state, true, &last_lift, suspected, bad_factors);
        return {std::move(last_lift.basis), std::move(report)};
    }
    state.round = config.max_rounds;
    throw MaxRoundsError(build_report(state, false, last_lift.ok ? &last_lift : nullptr,
                                      suspected, bad_factors));
}

// --- fault injection ---------------------------------------------------------------

FaultPlan random_fault_plan(const ModularJob& base, const RunConfig& config,
                            std::uint64_t plan_seed) {
    PrimeStream replay = make_batch_stream(config);
    std::vector<std::uint64_t> pool;
    for (unsigned i = 0; i < config.batch * 2; ++i)
        pool.push_back(to_u64_prime(replay.next()));

    std::uint64_t rng = plan_seed ^ 0xfa017510ull;
    auto draw = [&rng]() { return splitmix64(rng); };

    FaultPlan plan;
    std::size_t victims = 1 + draw() % std::min<std::size_t>(3, pool.size());
    std::set<std::uint64_t> chosen;
    while (chosen.size() < victims)
        chosen.insert(pool[draw() % pool.size()]);

    for (std::uint64_t p : chosen) {
        switch (draw() % 4) {
        case 0:
            plan.corruptions.emplace(p, Rejection{BadPrimeType::type1, "injected"});
            break;
        case 1:
            plan.corruptions.emplace(p, Rejection{BadPrimeType::type2, "injected"});
            break;
        case 2: {
            // wrong fingerprint: the unit ideal's basis {1}
            GroebnerBasisFp unit;
            unit.ctx = base.ctx;
            unit.reduced = true;
            unit.elements.push_back(PolyFp::constant(base.ctx, Fp(1, p)));
            plan.corruptions.emplace(p, std::move(unit));
            break;
        }
        default: {
            // same fingerprint, wrong trailing coefficient
            ComputeOutcome truth = base.compute(p);
            auto* basis = std::get_if<GroebnerBasisFp>(&truth);
            if (basis == nullptr || basis->elements.empty() ||
                basis->elements.back().leading_monomial().is_one()) {
                plan.corruptions.emplace(p, Rejection{BadPrimeType::type3, "injected"});
                break;
            }
            PolyFp bump = PolyFp::constant(base.ctx, Fp(1, p));
            basis->elements.back() = basis->elements.back() + bump;
            plan.corruptions.emplace(p, std::move(*basis));
            break;
        }
        }
    }
    return plan;
}

} // namespace modrecon
