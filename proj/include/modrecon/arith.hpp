#ifndef MODRECON_ARITH_HPP
#define MODRECON_ARITH_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

namespace modrecon {

using Int = mpz_class;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Rational number in canonical form: gcd(num,den)=1, den>0, zero is 0/1.
class Rational {
public:
    Rational() : q_(0) {}
    Rational(long n) : q_(n) {}
    explicit Rational(const Int& n) : q_(n) {}
    Rational(const Int& num, const Int& den);
    Rational(long num, long den);

    Int numerator() const { return Int(q_.get_num()); }
    Int denominator() const { return Int(q_.get_den()); }
    bool is_zero() const { return sgn(q_) == 0; }
    bool is_one() const { return q_ == 1; }
    int sign() const { return sgn(q_); }

    /// max(|numerator|, |denominator|)
    Int height() const;

    Rational operator-() const;
    Rational& operator+=(const Rational& o) { q_ += o.q_; return *this; }
    Rational& operator-=(const Rational& o) { q_ -= o.q_; return *this; }
    Rational& operator*=(const Rational& o) { q_ *= o.q_; return *this; }
    Rational& operator/=(const Rational& o);

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
    friend bool operator==(const Rational& a, const Rational& b) { return a.q_ == b.q_; }
    friend bool operator!=(const Rational& a, const Rational& b) { return a.q_ != b.q_; }
    friend bool operator<(const Rational& a, const Rational& b) { return a.q_ < b.q_; }

    Rational inverse() const;

    /// "a/b", or just "a" when the denominator is 1.
    std::string to_string() const;
    /// Accepts the printer's output ("13/12", "-17/8", "42").
    static std::optional<Rational> parse(std::string_view s);

private:
    mpq_class q_;
};

/// Value-modulus pair with 0 <= value < modulus and modulus >= 2.
struct Residue {
    Int value;
    Int modulus;

    Residue(Int v, Int m);

    friend bool operator==(const Residue& a, const Residue& b) {
        return a.value == b.value && a.modulus == b.modulus;
    }
};

/// x mod N for x = a/b; nullopt when gcd(b, N) > 1 (the type-1 condition).
std::optional<Residue> rational_mod(const Rational& x, const Int& N);

/// Chinese remainder combination of two residues with coprime moduli.
Residue crt_pair(const Residue& r1, const Residue& r2);

/// Left fold of crt_pair over a non-empty list.
Residue crt_combine(const std::vector<Residue>& residues);

/// Deterministic below 2^64 (fixed Miller-Rabin witness set), 64-round
/// probabilistic above.
bool is_prime(const Int& n);
bool is_prime_u64(std::uint64_t n);

/// splitmix64 step; advances state and returns the next value.
std::uint64_t splitmix64(std::uint64_t& state);

struct PrimeStreamConfig {
    enum class Mode { sequential, random };
    enum class Direction { ascending, descending };

    Mode mode = Mode::sequential;
    Direction direction = Direction::ascending;
    Int start = 2;
    std::set<Int> excluded;
    std::uint64_t seed = 0;
    // random mode draws uniformly from [2^bits_min, 2^bits_max)
    unsigned bits_min = 28;
    unsigned bits_max = 31;
    // candidates examined before next() gives up
    std::uint64_t max_attempts = 10'000'000;
};

/// Deterministic prime source. The emission sequence is a pure function of
/// the config; random mode never repeats a prime.
class PrimeStream {
public:
    explicit PrimeStream(PrimeStreamConfig cfg);

    /// Next prime, honoring mode/direction/excluded. Throws Error once
    /// max_attempts candidates have been examined without success.
    Int next();

    const PrimeStreamConfig& config() const { return cfg_; }

private:
    PrimeStreamConfig cfg_;
    Int cursor_;
    std::uint64_t rng_state_;
    std::set<Int> emitted_;

    std::uint64_t rng_next();
};

/// Default stream for the ideal-reconstruction framework: random 28-31 bit
/// primes under the given seed.
PrimeStream random_prime_stream(std::uint64_t seed);

/// Residue list text format: one "<value> <modulus>" pair per line, '#'
/// starts a comment. Throws Error on malformed input.
std::vector<Residue> parse_residue_lines(std::istream& in);
std::string format_residue(const Residue& r);

} // namespace modrecon

#endif
