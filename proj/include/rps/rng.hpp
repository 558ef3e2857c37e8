#ifndef RPS_RNG_HPP
#define RPS_RNG_HPP

#include <cstdint>
#include <random>

#include "rps/field.hpp"

namespace rps {

/// Deterministic pseudo-random source. mt19937_64 is fully specified by the
/// standard, and the draw helpers below avoid std::uniform_int_distribution
/// (whose output is implementation-defined), so a seed reproduces the same
/// stream on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next() { return eng_(); }

    /// Unbiased draw from [0, n) by rejection.
    std::uint64_t below(std::uint64_t n)
    {
        if (n == 0)
            return 0;
        std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        for (;;) {
            std::uint64_t x = eng_();
            if (x < limit)
                return x % n;
        }
    }

    std::int64_t int_in(std::int64_t lo, std::int64_t hi) // inclusive
    {
        return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

    bool coin() { return (eng_() & 1) != 0; }

private:
    std::mt19937_64 eng_;
};

/// Draws: Q -> numerator in [-9,9] over denominator in [1,9]; F_p -> uniform
/// residue; extensions -> independent base draws for both parts.
inline FieldElement random_element(const FieldSpec& spec, Rng& rng)
{
    switch (spec.kind()) {
        case FieldSpec::Kind::Rationals: {
            std::int64_t num = rng.int_in(-9, 9);
            std::int64_t den = rng.int_in(1, 9);
            return FieldElement::from_rational(spec, Rational(num, den));
        }
        case FieldSpec::Kind::Prime:
            return FieldElement::from_integer(spec, Int(rng.below(spec.prime_modulus())));
        case FieldSpec::Kind::Omega: {
            FieldElement a = random_element(spec.base(), rng);
            FieldElement b = random_element(spec.base(), rng);
            return FieldElement::make_extension(spec, std::move(a), std::move(b));
        }
    }
    throw Error(Err::BadInput, "bad field kind");
}

inline FieldElement random_nonzero_element(const FieldSpec& spec, Rng& rng)
{
    for (;;) {
        FieldElement x = random_element(spec, rng);
        if (!x.is_zero())
            return x;
    }
}

} // namespace rps

#endif // RPS_RNG_HPP
