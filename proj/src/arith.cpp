#include "modrecon/arith.hpp"

#include <istream>
#include <sstream>

namespace modrecon {

Rational::Rational(const Int& num, const Int& den) {
    if (sgn(den) == 0)
        throw Error("Rational: zero denominator");
    q_ = mpq_class(num, den);
    q_.canonicalize();
}

Rational::Rational(long num, long den) : Rational(Int(num), Int(den)) {}

Int Rational::height() const {
    Int n = abs(numerator());
    Int d = denominator();
    return n > d ? n : d;
}

Rational Rational::operator-() const {
    Rational r;
    r.q_ = -q_;
    return r;
}

Rational& Rational::operator/=(const Rational& o) {
    if (o.is_zero())
        throw Error("Rational: division by zero");
    q_ /= o.q_;
    return *this;
}

Rational Rational::inverse() const {
    if (is_zero())
        throw Error("Rational: inverse of zero");
    return Rational(denominator(), numerator());
}

std::string Rational::to_string() const {
    return q_.get_str();
}

std::optional<Rational> Rational::parse(std::string_view s) {
    if (s.empty())
        return std::nullopt;
    std::string str(s);
    auto slash = str.find('/');
    try {
        if (slash == std::string::npos)
            return Rational(Int(str));
        Int num(str.substr(0, slash));
        Int den(str.substr(slash + 1));
        if (sgn(den) == 0)
            return std::nullopt;
        return Rational(num, den);
    } catch (const std::invalid_argument&) {
        return std::nullopt;
    }
}

Residue::Residue(Int v, Int m) : value(std::move(v)), modulus(std::move(m)) {
    if (modulus < 2)
        throw Error("Residue: modulus must be >= 2");
    mpz_mod(value.get_mpz_t(), value.get_mpz_t(), modulus.get_mpz_t());
}

std::optional<Residue> rational_mod(const Rational& x, const Int& N) {
    if (N < 2)
        throw Error("rational_mod: modulus must be >= 2");
    Int b = x.denominator();
    Int inv;
    if (!mpz_invert(inv.get_mpz_t(), b.get_mpz_t(), N.get_mpz_t()))
        return std::nullopt;
    return Residue(x.numerator() * inv, N);
}

Residue crt_pair(const Residue& r1, const Residue& r2) {
    // 1 = e*N + f*p, combined value r*f*p + s*e*N mod N*p
    Int g, e, f;
    mpz_gcdext(g.get_mpz_t(), e.get_mpz_t(), f.get_mpz_t(),
               r1.modulus.get_mpz_t(), r2.modulus.get_mpz_t());
    if (g != 1)
        throw Error("crt_pair: moduli are not coprime");
    Int combined = r1.value * f * r2.modulus + r2.value * e * r1.modulus;
    return Residue(combined, r1.modulus * r2.modulus);
}

Residue crt_combine(const std::vector<Residue>& residues) {
    if (residues.empty())
        throw Error("crt_combine: empty residue list");
    Residue acc = residues.front();
    for (std::size_t i = 1; i < residues.size(); ++i)
        acc = crt_pair(acc, residues[i]);
    return acc;
}

namespace {

std::uint64_t mulmod_u64(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>(
        static_cast<unsigned __int128>(a) * b % m);
}

std::uint64_t powmod_u64(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
    std::uint64_t result = 1;
    base %= m;
    while (exp > 0) {
        if (exp & 1)
            result = mulmod_u64(result, base, m);
        base = mulmod_u64(base, base, m);
        exp >>= 1;
    }
    return result;
}

} // namespace

bool is_prime_u64(std::uint64_t n) {
    if (n < 2)
        return false;
    for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull,
                            19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n == p)
            return true;
        if (n % p == 0)
            return false;
    }
    std::uint64_t d = n - 1;
    unsigned s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    // This witness set decides primality for every n < 2^64.
    for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull,
                            19ull, 23ull, 29ull, 31ull, 37ull}) {
        std::uint64_t x = powmod_u64(a, d, n);
        if (x == 1 || x == n - 1)
            continue;
        bool composite = true;
        for (unsigned i = 1; i < s; ++i) {
            x = mulmod_u64(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite)
            return false;
    }
    return true;
}

bool is_prime(const Int& n) {
    if (sgn(n) <= 0)
        return false;
    if (mpz_sizeinbase(n.get_mpz_t(), 2) <= 64 && mpz_fits_ulong_p(n.get_mpz_t()))
        return is_prime_u64(mpz_get_ui(n.get_mpz_t()));
    return mpz_probab_prime_p(n.get_mpz_t(), 64) != 0;
}

PrimeStream::PrimeStream(PrimeStreamConfig cfg)
    : cfg_(std::move(cfg)), cursor_(cfg_.start), rng_state_(cfg_.seed) {
    if (cfg_.mode == PrimeStreamConfig::Mode::random &&
        (cfg_.bits_min < 2 || cfg_.bits_min >= cfg_.bits_max || cfg_.bits_max > 62))
        throw Error("PrimeStream: random mode needs 2 <= bits_min < bits_max <= 62");
}

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

std::uint64_t PrimeStream::rng_next() {
    return splitmix64(rng_state_);
}

Int PrimeStream::next() {
    using Mode = PrimeStreamConfig::Mode;
    using Dir = PrimeStreamConfig::Direction;

    if (cfg_.mode == Mode::random) {
        std::uint64_t lo = 1ull << cfg_.bits_min;
        std::uint64_t span = (1ull << cfg_.bits_max) - lo;
        for (std::uint64_t attempt = 0; attempt < cfg_.max_attempts; ++attempt) {
            Int candidate(static_cast<unsigned long>(lo + rng_next() % span));
            if (!is_prime(candidate))
                continue;
            if (cfg_.excluded.count(candidate) || emitted_.count(candidate))
                continue;
            emitted_.insert(candidate);
            return candidate;
        }
        throw Error("PrimeStream: attempt bound exceeded in random mode");
    }

    for (std::uint64_t attempt = 0; attempt < cfg_.max_attempts; ++attempt) {
        if (cursor_ < 2)
            throw Error("PrimeStream: descending stream exhausted");
        Int candidate = cursor_;
        cursor_ += (cfg_.direction == Dir::ascending) ? 1 : -1;
        if (is_prime(candidate) && !cfg_.excluded.count(candidate))
            return candidate;
    }
    throw Error("PrimeStream: attempt bound exceeded in sequential mode");
}

PrimeStream random_prime_stream(std::uint64_t seed) {
    PrimeStreamConfig cfg;
    cfg.mode = PrimeStreamConfig::Mode::random;
    cfg.seed = seed;
    return PrimeStream(cfg);
}

std::vector<Residue> parse_residue_lines(std::istream& in) {
    std::vector<Residue> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        std::istringstream fields(line);
        std::string v, m;
        if (!(fields >> v))
            continue; // blank or comment-only line
        if (!(fields >> m))
            throw Error("residue file line " + std::to_string(lineno) +
                        ": expected '<value> <modulus>'");
        std::string extra;
        if (fields >> extra)
            throw Error("residue file line " + std::to_string(lineno) +
                        ": trailing tokens");
        try {
            out.emplace_back(Int(v), Int(m));
        } catch (const std::invalid_argument&) {
            throw Error("residue file line " + std::to_string(lineno) +
                        ": malformed integer");
        }
    }
    return out;
}

std::string format_residue(const Residue& r) {
    return r.value.get_str() + " " + r.modulus.get_str();
}

} // namespace modrecon
