#ifndef RPS_FIELD_HPP
#define RPS_FIELD_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <variant>

#include "rps/error.hpp"

namespace rps {

using Int = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

namespace detail {

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m)
{
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

inline std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t m)
{
    std::uint64_t r = 1 % m;
    base %= m;
    while (exp) {
        if (exp & 1)
            r = mulmod(r, base, m);
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    return r;
}

// Deterministic Miller-Rabin, valid for all 64-bit inputs.
inline bool is_prime_u64(std::uint64_t n)
{
    if (n < 2)
        return false;
    for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n % p == 0)
            return n == p;
    }
    std::uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        std::uint64_t x = powmod(a, d, n);
        if (x == 1 || x == n - 1)
            continue;
        bool composite = true;
        for (int i = 1; i < s; ++i) {
            x = mulmod(x, x, n);
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

inline std::uint64_t inv_mod(std::uint64_t a, std::uint64_t p)
{
    if (a == 0)
        throw Error(Err::DivisionByZero, "inverse of zero in F_" + std::to_string(p));
    // extended Euclid on signed 128-bit intermediates
    __int128 t = 0, newt = 1;
    __int128 r = static_cast<__int128>(p), newr = static_cast<__int128>(a);
    while (newr != 0) {
        __int128 q = r / newr;
        __int128 tmp = t - q * newt;
        t = newt;
        newt = tmp;
        tmp = r - q * newr;
        r = newr;
        newr = tmp;
    }
    if (t < 0)
        t += p;
    return static_cast<std::uint64_t>(t);
}

} // namespace detail

/// Identifies one of the supported exact scalar fields: Q, F_p, or a
/// quadratic extension obtained by adjoining a primitive cube root of
/// unity to a field that lacks one.
class FieldSpec {
public:
    enum class Kind { Rationals, Prime, Omega };

    static FieldSpec rationals() { return FieldSpec(Kind::Rationals, 0, nullptr); }

    static FieldSpec prime(std::uint64_t p)
    {
        if (!detail::is_prime_u64(p))
            throw Error(Err::BadInput, "modulus " + std::to_string(p) + " is not prime");
        return FieldSpec(Kind::Prime, p, nullptr);
    }

    static FieldSpec omega_extension(const FieldSpec& base)
    {
        if (base.has_omega())
            throw Error(Err::AlreadyHasOmega,
                        "base field " + base.name() + " already contains a root of x^2+x+1");
        return FieldSpec(Kind::Omega, base.p_, std::make_shared<FieldSpec>(base));
    }

    /// Accepts the CLI syntax: "Q", "Fp:<p>", "Q(w)", "Fp2:<p>".
    static FieldSpec parse(std::string_view text)
    {
        if (text == "Q")
            return rationals();
        if (text == "Q(w)")
            return omega_extension(rationals());
        auto parse_p = [&](std::string_view digits) {
            if (digits.empty())
                throw Error(Err::BadInput, "missing prime in field name");
            std::uint64_t p = 0;
            for (char c : digits) {
                if (!std::isdigit(static_cast<unsigned char>(c)) || p > (UINT64_MAX - 9) / 10)
                    throw Error(Err::BadInput, "bad prime in field name");
                p = p * 10 + static_cast<std::uint64_t>(c - '0');
            }
            return p;
        };
        if (text.rfind("Fp2:", 0) == 0)
            return omega_extension(prime(parse_p(text.substr(4))));
        if (text.rfind("Fp:", 0) == 0)
            return prime(parse_p(text.substr(3)));
        throw Error(Err::BadInput, "unknown field '" + std::string(text) +
                                       "' (expected Q | Fp:<p> | Q(w) | Fp2:<p>)");
    }

    Kind kind() const { return kind_; }

    std::uint64_t prime_modulus() const { return p_; }

    const FieldSpec& base() const
    {
        if (!base_)
            throw Error(Err::NotApplicable, "field " + name() + " is not an extension");
        return *base_;
    }

    std::uint64_t characteristic() const { return kind_ == Kind::Rationals ? 0 : p_; }

    /// True iff omega_of() succeeds: x^2 + x + 1 has a root here.
    bool has_omega() const
    {
        switch (kind_) {
            case Kind::Rationals: return false;
            case Kind::Prime: return p_ == 3 || p_ % 3 == 1;
            case Kind::Omega: return true;
        }
        return false;
    }

    std::string name() const
    {
        switch (kind_) {
            case Kind::Rationals: return "Q";
            case Kind::Prime: return "Fp:" + std::to_string(p_);
            case Kind::Omega:
                return base_->kind_ == Kind::Rationals ? "Q(w)" : "Fp2:" + std::to_string(p_);
        }
        return "?";
    }

    friend bool operator==(const FieldSpec& x, const FieldSpec& y)
    {
        return x.kind_ == y.kind_ && x.p_ == y.p_;
    }
    friend bool operator!=(const FieldSpec& x, const FieldSpec& y) { return !(x == y); }

private:
    FieldSpec(Kind kind, std::uint64_t p, std::shared_ptr<const FieldSpec> base)
        : kind_(kind), p_(p), base_(std::move(base))
    {
    }

    Kind kind_;
    std::uint64_t p_; // characteristic for Prime and Omega-over-prime, 0 otherwise
    std::shared_ptr<const FieldSpec> base_;
};

class FieldElement;

namespace detail {
struct OmegaParts;
using OmegaPtr = std::shared_ptr<const OmegaParts>;
} // namespace detail

/// Immutable element of a FieldSpec field, kept in canonical form:
/// reduced fraction over Q, least residue over F_p, and a unique pair
/// (a, b) = a + b*w over extensions, reduced by w^2 = -w - 1.
class FieldElement {
public:
    static FieldElement zero(const FieldSpec& spec);
    static FieldElement one(const FieldSpec& spec);
    static FieldElement from_integer(const FieldSpec& spec, const Int& n);
    static FieldElement from_integer(const FieldSpec& spec, long long n)
    {
        return from_integer(spec, Int(n));
    }
    static FieldElement from_rational(const FieldSpec& spec, const Rational& q);
    /// Builds a + b*w in an omega extension from two base-field parts.
    static FieldElement make_extension(const FieldSpec& spec, FieldElement a, FieldElement b);

    const FieldSpec& spec() const { return spec_; }

    bool is_zero() const;
    bool is_one() const { return *this == one(spec_); }

    const Rational& rat() const { return std::get<Rational>(v_); }
    std::uint64_t residue() const { return std::get<std::uint64_t>(v_); }
    const FieldElement& ext_a() const;
    const FieldElement& ext_b() const;

    FieldElement operator-() const;
    FieldElement inv() const;
    /// The unique nontrivial base-fixing automorphism on extensions
    /// (a + b*w -> (a-b) - b*w); identity on Q and F_p.
    FieldElement conjugate() const;

    friend FieldElement operator+(const FieldElement& x, const FieldElement& y);
    friend FieldElement operator-(const FieldElement& x, const FieldElement& y);
    friend FieldElement operator*(const FieldElement& x, const FieldElement& y);
    friend FieldElement operator/(const FieldElement& x, const FieldElement& y)
    {
        return x * y.inv();
    }

    friend bool operator==(const FieldElement& x, const FieldElement& y);
    friend bool operator!=(const FieldElement& x, const FieldElement& y) { return !(x == y); }

    std::string str() const;

private:
    using Value = std::variant<Rational, std::uint64_t, detail::OmegaPtr>;

    FieldElement(FieldSpec spec, Value v) : spec_(std::move(spec)), v_(std::move(v)) {}

    static void check_same(const FieldElement& x, const FieldElement& y)
    {
        if (x.spec_ != y.spec_)
            throw Error(Err::FieldMismatch,
                        x.spec_.name() + " element combined with " + y.spec_.name() + " element");
    }

    FieldSpec spec_;
    Value v_;
};

namespace detail {
struct OmegaParts {
    FieldElement a;
    FieldElement b;
};
} // namespace detail

inline const FieldElement& FieldElement::ext_a() const { return std::get<detail::OmegaPtr>(v_)->a; }
inline const FieldElement& FieldElement::ext_b() const { return std::get<detail::OmegaPtr>(v_)->b; }

inline FieldElement FieldElement::zero(const FieldSpec& spec)
{
    switch (spec.kind()) {
        case FieldSpec::Kind::Rationals: return FieldElement(spec, Rational(0));
        case FieldSpec::Kind::Prime: return FieldElement(spec, std::uint64_t{0});
        case FieldSpec::Kind::Omega:
            return make_extension(spec, zero(spec.base()), zero(spec.base()));
    }
    throw Error(Err::BadInput, "bad field kind");
}

inline FieldElement FieldElement::one(const FieldSpec& spec)
{
    switch (spec.kind()) {
        case FieldSpec::Kind::Rationals: return FieldElement(spec, Rational(1));
        case FieldSpec::Kind::Prime:
            return FieldElement(spec, std::uint64_t{1 % spec.prime_modulus()});
        case FieldSpec::Kind::Omega:
            return make_extension(spec, one(spec.base()), zero(spec.base()));
    }
    throw Error(Err::BadInput, "bad field kind");
}

inline FieldElement FieldElement::from_integer(const FieldSpec& spec, const Int& n)
{
    switch (spec.kind()) {
        case FieldSpec::Kind::Rationals: return FieldElement(spec, Rational(n));
        case FieldSpec::Kind::Prime: {
            Int r = n % Int(spec.prime_modulus());
            if (r < 0)
                r += Int(spec.prime_modulus());
            return FieldElement(spec, r.convert_to<std::uint64_t>());
        }
        case FieldSpec::Kind::Omega:
            return make_extension(spec, from_integer(spec.base(), n), zero(spec.base()));
    }
    throw Error(Err::BadInput, "bad field kind");
}

inline FieldElement FieldElement::from_rational(const FieldSpec& spec, const Rational& q)
{
    switch (spec.kind()) {
        case FieldSpec::Kind::Rationals: return FieldElement(spec, q);
        case FieldSpec::Kind::Prime: {
            FieldElement num = from_integer(spec, numerator(q));
            FieldElement den = from_integer(spec, denominator(q));
            return num / den;
        }
        case FieldSpec::Kind::Omega:
            return make_extension(spec, from_rational(spec.base(), q), zero(spec.base()));
    }
    throw Error(Err::BadInput, "bad field kind");
}

inline FieldElement FieldElement::make_extension(const FieldSpec& spec, FieldElement a,
                                                 FieldElement b)
{
    if (spec.kind() != FieldSpec::Kind::Omega)
        throw Error(Err::NotApplicable, "make_extension on non-extension field " + spec.name());
    if (a.spec() != spec.base() || b.spec() != spec.base())
        throw Error(Err::FieldMismatch, "extension parts must lie in " + spec.base().name());
    return FieldElement(spec, std::make_shared<detail::OmegaParts>(
                                  detail::OmegaParts{std::move(a), std::move(b)}));
}

inline bool FieldElement::is_zero() const
{
    switch (spec_.kind()) {
        case FieldSpec::Kind::Rationals: return rat().is_zero();
        case FieldSpec::Kind::Prime: return residue() == 0;
        case FieldSpec::Kind::Omega: return ext_a().is_zero() && ext_b().is_zero();
    }
    return false;
}

inline FieldElement FieldElement::operator-() const
{
    switch (spec_.kind()) {
        case FieldSpec::Kind::Rationals: return FieldElement(spec_, Rational(-rat()));
        case FieldSpec::Kind::Prime: {
            std::uint64_t p = spec_.prime_modulus();
            return FieldElement(spec_, residue() == 0 ? 0 : p - residue());
        }
        case FieldSpec::Kind::Omega: return make_extension(spec_, -ext_a(), -ext_b());
    }
    throw Error(Err::BadInput, "bad field kind");
}

inline FieldElement operator+(const FieldElement& x, const FieldElement& y)
{
    FieldElement::check_same(x, y);
    switch (x.spec_.kind()) {
        case FieldSpec::Kind::Rationals:
            return FieldElement(x.spec_, Rational(x.rat() + y.rat()));
        case FieldSpec::Kind::Prime: {
            std::uint64_t p = x.spec_.prime_modulus();
            std::uint64_t s = x.residue() + y.residue(); // p < 2^63, no overflow
            if (s >= p)
                s -= p;
            return FieldElement(x.spec_, s);
        }
        case FieldSpec::Kind::Omega:
            return FieldElement::make_extension(x.spec_, x.ext_a() + y.ext_a(),
                                                x.ext_b() + y.ext_b());
    }
    throw Error(Err::BadInput, "bad field kind");
}

inline FieldElement operator-(const FieldElement& x, const FieldElement& y) { return x + (-y); }

inline FieldElement operator*(const FieldElement& x, const FieldElement& y)
{
    FieldElement::check_same(x, y);
    switch (x.spec_.kind()) {
        case FieldSpec::Kind::Rationals:
            return FieldElement(x.spec_, Rational(x.rat() * y.rat()));
        case FieldSpec::Kind::Prime:
            return FieldElement(x.spec_,
                                detail::mulmod(x.residue(), y.residue(), x.spec_.prime_modulus()));
        case FieldSpec::Kind::Omega: {
            // (a1 + b1 w)(a2 + b2 w) with w^2 = -w - 1
            const FieldElement& a1 = x.ext_a();
            const FieldElement& b1 = x.ext_b();
            const FieldElement& a2 = y.ext_a();
            const FieldElement& b2 = y.ext_b();
            FieldElement bb = b1 * b2;
            return FieldElement::make_extension(x.spec_, a1 * a2 - bb,
                                                a1 * b2 + b1 * a2 - bb);
        }
    }
    throw Error(Err::BadInput, "bad field kind");
}

inline FieldElement FieldElement::inv() const
{
    switch (spec_.kind()) {
        case FieldSpec::Kind::Rationals:
            if (rat().is_zero())
                throw Error(Err::DivisionByZero, "inverse of zero in Q");
            return FieldElement(spec_, Rational(1 / rat()));
        case FieldSpec::Kind::Prime:
            return FieldElement(spec_, detail::inv_mod(residue(), spec_.prime_modulus()));
        case FieldSpec::Kind::Omega: {
            // (a + bw)^-1 = ((a-b) - bw) / (a^2 - ab + b^2)
            const FieldElement& a = ext_a();
            const FieldElement& b = ext_b();
            FieldElement norm = a * a - a * b + b * b;
            if (norm.is_zero())
                throw Error(Err::DivisionByZero, "inverse of zero in " + spec_.name());
            FieldElement ninv = norm.inv();
            return make_extension(spec_, (a - b) * ninv, (-b) * ninv);
        }
    }
    throw Error(Err::BadInput, "bad field kind");
}

inline FieldElement FieldElement::conjugate() const
{
    if (spec_.kind() != FieldSpec::Kind::Omega)
        return *this;
    return make_extension(spec_, ext_a() - ext_b(), -ext_b());
}

inline bool operator==(const FieldElement& x, const FieldElement& y)
{
    FieldElement::check_same(x, y);
    switch (x.spec_.kind()) {
        case FieldSpec::Kind::Rationals: return x.rat() == y.rat();
        case FieldSpec::Kind::Prime: return x.residue() == y.residue();
        case FieldSpec::Kind::Omega:
            return x.ext_a() == y.ext_a() && x.ext_b() == y.ext_b();
    }
    return false;
}

/// The element the classification theorems call omega: 1 in characteristic 3,
/// otherwise a primitive cube root of unity. Deterministic: over F_p the
/// smaller of the two roots of x^2 + x + 1 is returned.
inline FieldElement omega_of(const FieldSpec& spec)
{
    switch (spec.kind()) {
        case FieldSpec::Kind::Rationals:
            throw Error(Err::NoOmega, "x^2+x+1 has no rational root; use Q(w)");
        case FieldSpec::Kind::Prime: {
            std::uint64_t p = spec.prime_modulus();
            if (p == 3)
                return FieldElement::one(spec);
            if (p % 3 != 1)
                throw Error(Err::NoOmega,
                            "F_" + std::to_string(p) + " has no cube root of unity; use Fp2:" +
                                std::to_string(p));
            std::uint64_t w = 0;
            if (p < (1u << 16)) {
                for (std::uint64_t c = 0;; ++c) {
                    if ((detail::mulmod(c, c, p) + c + 1) % p == 0) {
                        w = c;
                        break;
                    }
                }
            }
            else {
                std::uint64_t r = 1;
                for (std::uint64_t g = 2; ; ++g) {
                    r = detail::powmod(g, (p - 1) / 3, p);
                    if (r != 1)
                        break;
                }
                w = std::min(r, p - 1 - r);
            }
            return FieldElement::from_integer(spec, Int(w));
        }
        case FieldSpec::Kind::Omega:
            return FieldElement::make_extension(spec, FieldElement::zero(spec.base()),
                                                FieldElement::one(spec.base()));
    }
    throw Error(Err::BadInput, "bad field kind");
}

// ---------------------------------------------------------------------------
// Scalar text syntax: integers "-3", rationals "2/3", "w", "w2", products and
// sums thereof ("1+2*w", "-2/3*w"). Used by the polynomial grammar, element
// parsing, and the structure-constant JSON format.

namespace detail {

class ScalarParser {
public:
    ScalarParser(std::string_view text, const FieldSpec& spec) : text_(text), spec_(spec) {}

    FieldElement parse()
    {
        FieldElement v = parse_expr();
        skip_ws();
        if (pos_ != text_.size())
            throw SyntaxError(pos_, "trailing input in scalar");
        return v;
    }

private:
    FieldElement parse_expr()
    {
        skip_ws();
        bool neg = false;
        if (peek() == '-') {
            neg = true;
            ++pos_;
        }
        FieldElement acc = parse_term();
        if (neg)
            acc = -acc;
        for (;;) {
            skip_ws();
            char c = peek();
            if (c == '+' || c == '-') {
                ++pos_;
                FieldElement t = parse_term();
                acc = (c == '+') ? acc + t : acc - t;
            }
            else {
                return acc;
            }
        }
    }

    FieldElement parse_term()
    {
        FieldElement acc = parse_atom();
        for (;;) {
            skip_ws();
            if (peek() == '*') {
                ++pos_;
                acc = acc * parse_atom();
            }
            else {
                return acc;
            }
        }
    }

    FieldElement parse_atom()
    {
        skip_ws();
        char c = peek();
        if (c == '(') {
            ++pos_;
            FieldElement v = parse_expr();
            skip_ws();
            if (peek() != ')')
                throw SyntaxError(pos_, "expected ')'");
            ++pos_;
            return v;
        }
        if (c == 'w') {
            ++pos_;
            FieldElement w = omega_of(spec_);
            if (peek() == '2') {
                ++pos_;
                return w * w;
            }
            return w;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            Int num = parse_uint();
            skip_ws();
            if (peek() == '/') {
                ++pos_;
                skip_ws();
                if (!std::isdigit(static_cast<unsigned char>(peek())))
                    throw SyntaxError(pos_, "expected denominator");
                Int den = parse_uint();
                if (den.is_zero())
                    throw Error(Err::DivisionByZero, "zero denominator in scalar");
                return FieldElement::from_rational(spec_, Rational(num, den));
            }
            return FieldElement::from_integer(spec_, num);
        }
        throw SyntaxError(pos_, "expected scalar atom");
    }

    Int parse_uint()
    {
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
        return Int(std::string(text_.substr(start, pos_ - start)));
    }

    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

    void skip_ws()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    std::string_view text_;
    const FieldSpec& spec_;
    std::size_t pos_ = 0;
};

} // namespace detail

inline FieldElement parse_scalar(std::string_view text, const FieldSpec& spec)
{
    return detail::ScalarParser(text, spec).parse();
}

inline std::string FieldElement::str() const
{
    switch (spec_.kind()) {
        case FieldSpec::Kind::Rationals: {
            const Rational& q = rat();
            std::string s = numerator(q).str();
            if (denominator(q) != 1)
                s += "/" + denominator(q).str();
            return s;
        }
        case FieldSpec::Kind::Prime: return std::to_string(residue());
        case FieldSpec::Kind::Omega: {
            const FieldElement& a = ext_a();
            const FieldElement& b = ext_b();
            if (b.is_zero())
                return a.str();
            std::string bs;
            if (b.is_one())
                bs = "w";
            else if ((-b).is_one())
                bs = "-w";
            else
                bs = b.str() + "*w";
            if (a.is_zero())
                return bs;
            return a.str() + (bs[0] == '-' ? "" : "+") + bs;
        }
    }
    return "?";
}

} // namespace rps

#endif // RPS_FIELD_HPP
