#ifndef RPS_PI_HPP
#define RPS_PI_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rps/classify.hpp"
#include "rps/linalg.hpp"
#include "rps/poly.hpp"
#include "rps/rng.hpp"
#include "rps/sweep.hpp"

namespace rps {

/// Outcome of a basis-tuple identity check. A multilinear polynomial is a PI
/// iff it vanishes on all d^m basis tuples; the counterexample, when present,
/// is the first nonzero tuple in odometer order and re-evaluates to its
/// stored value. integer_certified marks sweeps done in exact integers, which
/// settle the identity over every field at once (the structure constants and
/// coefficients then read identically in any characteristic).
struct PIReport {
    bool is_pi = false;
    bool exhaustive = false; // full grid (vs seeded sample)
    bool integer_certified = false;
    std::uint64_t tuples_checked = 0;
    std::optional<Witness> counterexample;
    std::vector<std::uint64_t> counterexample_primes; // primes dividing every coordinate
};

namespace detail {

inline std::vector<std::uint64_t> small_prime_divisors(Int n)
{
    std::vector<std::uint64_t> out;
    if (n < 0)
        n = -n;
    if (n <= 1)
        return out;
    for (std::uint64_t p = 2; Int(p) * p <= n && p < 2000000; p == 2 ? p = 3 : p += 2) {
        if (n % p == 0) {
            out.push_back(p);
            while (n % p == 0)
                n /= p;
        }
    }
    if (n > 1 && n < Int(UINT64_MAX))
        out.push_back(n.convert_to<std::uint64_t>());
    return out;
}

/// Primes p for which the counterexample value could still vanish mod p:
/// divisors of the gcd of its (integer) coordinates.
inline std::vector<std::uint64_t> counterexample_primes_of(const AlgebraElement& value)
{
    Int g = 0;
    for (const auto& c : value.coords()) {
        if (c.spec().kind() != FieldSpec::Kind::Rationals)
            return {};
        const Rational& q = c.rat();
        if (denominator(q) != 1)
            return {};
        g = boost::multiprecision::gcd(g, numerator(q));
    }
    return small_prime_divisors(g);
}

template <class Sys>
constexpr bool is_integer_ring_v =
    std::is_same_v<typename Sys::Value, std::int64_t> || std::is_same_v<typename Sys::Value, Int>;

} // namespace detail

/// Exhaustive basis-tuple check. Throws CapExceeded when the grid is larger
/// than cap unless exhaustive_override is set.
inline PIReport is_pi(const Polynomial& p, const AlgebraPtr& alg,
                      std::uint64_t cap = kDefaultTupleCap, int threads = 1,
                      bool exhaustive_override = false)
{
    if (!p.is_multilinear())
        throw Error(Err::NotMultilinear,
                    "the basis-tuple criterion is valid for multilinear polynomials only");
    const MonadAlgebra& A = *alg;
    if (p.field() != A.field())
        throw Error(Err::FieldMismatch, "polynomial and algebra over different fields");
    if (p.is_zero())
        return PIReport{true, true, true, 0, std::nullopt, {}};

    return detail::with_lowered(p, A, [&](const auto& sys) -> PIReport {
        std::uint64_t total = sys.total_tuples();
        if (total > cap && !exhaustive_override)
            throw Error(Err::CapExceeded, std::to_string(total) +
                                              " tuples exceed the cap of " + std::to_string(cap) +
                                              "; pass the exhaustive flag to run anyway");
        PIReport report;
        report.exhaustive = true;
        report.integer_certified = detail::is_integer_ring_v<std::decay_t<decltype(sys)>>;

        struct Scratch {
            std::vector<typename std::decay_t<decltype(sys)>::Value> buf;
        };
        thread_local Scratch scratch; // one callback frame per worker
        FirstHit hit = sweep_find_first(sys, threads, [&](const std::vector<int>&, const auto& vals) {
            return !sys.combined_is_zero(vals, scratch.buf);
        });

        if (!hit.found) {
            report.is_pi = true;
            report.tuples_checked = total;
            return report;
        }
        report.is_pi = false;
        report.tuples_checked = hit.index + 1;
        std::vector<AlgebraElement> args = detail::tuple_args(alg, hit.tuple);
        AlgebraElement value = evaluate(p, args); // independent exact re-evaluation
        if (value.is_zero())
            throw Error(Err::BadInput, "sweep counterexample failed re-evaluation");
        report.counterexample_primes = detail::counterexample_primes_of(value);
        report.counterexample = Witness{std::move(args), std::move(value)};
        return report;
    });
}

/// Seeded spot check on `samples` random basis tuples. A found counterexample
/// refutes the identity exactly; a clean pass is evidence, not proof.
inline PIReport is_pi_random(const Polynomial& p, const AlgebraPtr& alg, std::uint64_t samples,
                             std::uint64_t seed)
{
    if (!p.is_multilinear())
        throw Error(Err::NotMultilinear,
                    "the basis-tuple criterion is valid for multilinear polynomials only");
    const MonadAlgebra& A = *alg;
    if (p.field() != A.field())
        throw Error(Err::FieldMismatch, "polynomial and algebra over different fields");
    if (p.is_zero())
        return PIReport{true, true, true, 0, std::nullopt, {}};

    return detail::with_lowered(p, A, [&](const auto& sys) -> PIReport {
        PIReport report;
        report.exhaustive = false;
        Rng rng(seed);
        int m = sys.dag.arity;
        std::vector<int> tuple(static_cast<std::size_t>(m), 0);
        auto vals = sys.make_values();
        std::vector<typename std::decay_t<decltype(sys)>::Value> scratch;
        for (std::uint64_t s = 0; s < samples; ++s) {
            for (int v = 0; v < m; ++v)
                tuple[static_cast<std::size_t>(v)] = static_cast<int>(rng.below(sys.dim));
            sys.eval_tuple(tuple, vals);
            ++report.tuples_checked;
            if (!sys.combined_is_zero(vals, scratch)) {
                report.is_pi = false;
                std::vector<AlgebraElement> args = detail::tuple_args(alg, tuple);
                AlgebraElement value = evaluate(p, args);
                report.counterexample_primes = detail::counterexample_primes_of(value);
                report.counterexample = Witness{std::move(args), std::move(value)};
                return report;
            }
        }
        report.is_pi = true;
        return report;
    });
}

// ---------------------------------------------------------------------------

/// Identity coefficients of degree m as the exact nullspace of the streamed
/// d^m * d evaluation system over the canonical multilinear monomial basis.
struct NullspaceBasis {
    int degree = 0;
    FieldSpec field = FieldSpec::rationals();
    std::vector<MonomialTree> monomials;                // column order
    std::vector<std::vector<FieldElement>> vectors;     // nullspace basis
    std::uint64_t system_rows = 0;                      // full shape: d^m * d
    std::uint64_t rows_streamed = 0;                    // rows fed before the rank settled
    std::size_t system_rank = 0;

    std::vector<Polynomial> polynomials() const
    {
        std::vector<Polynomial> out;
        out.reserve(vectors.size());
        for (const auto& v : vectors) {
            Polynomial p(field, degree);
            for (std::size_t i = 0; i < monomials.size(); ++i)
                p.add_term(monomials[i], v[i]);
            out.push_back(std::move(p));
        }
        return out;
    }

    /// Exact membership test: does the coefficient vector of p lie in the
    /// span of the nullspace basis?
    bool contains(const Polynomial& p) const
    {
        RowReducer span(field, monomials.size());
        for (const auto& v : vectors)
            span.add_row(v);
        std::vector<FieldElement> row;
        row.reserve(monomials.size());
        for (const auto& t : monomials) {
            auto it = p.terms().find(t);
            row.push_back(it == p.terms().end() ? FieldElement::zero(field) : it->second);
        }
        return span.contains(std::move(row));
    }
};

/// Builds the linear system row by row (never materialized) and returns a
/// basis of multilinear identities of degree m on the algebra.
inline NullspaceBasis find_multilinear_pis(int m, const AlgebraPtr& alg,
                                           std::uint64_t cap = kDefaultTupleCap,
                                           int monomial_cap = 10)
{
    const MonadAlgebra& A = *alg;
    const FieldSpec& F = A.field();
    std::vector<MonomialTree> monomials = enumerate_multilinear_monomials(m, monomial_cap);
    std::size_t n_cols = monomials.size();
    std::size_t d = A.dim();

    return detail::with_lowered_trees(monomials, m, A, [&](const auto& sys) -> NullspaceBasis {
        std::uint64_t total = sys.total_tuples();
        if (total > cap)
            throw Error(Err::CapExceeded, "basis grid of " + std::to_string(total) +
                                              " tuples exceeds the cap");
        RowReducer reducer(F, n_cols);
        std::uint64_t rows = 0;
        sweep_tuples(sys, {}, [&](const std::vector<int>&, const auto& vals) {
            for (std::size_t k = 0; k < d; ++k) {
                std::vector<FieldElement> row;
                row.reserve(n_cols);
                for (std::size_t col = 0; col < n_cols; ++col)
                    row.push_back(sys.ring.to_field(
                        vals[static_cast<std::size_t>(sys.dag.roots[col]) * d + k], F));
                ++rows;
                reducer.add_row(std::move(row));
            }
            return reducer.rank() < n_cols; // full rank: nullspace is {0}
        });
        NullspaceBasis out{m,    F,    std::move(monomials), reducer.nullspace(),
                           total * d, rows, reducer.rank()};
        return out;
    });
}

/// Smallest m whose multilinear monomial count exceeds d^(m+1); at that
/// degree the evaluation system is wider than tall, so a nonzero identity
/// must exist on any d-dimensional algebra of the given kind.
inline int pi_existence_threshold(int d, MonomialKind kind)
{
    if (d < 1)
        throw Error(Err::BadInput, "dimension must be positive");
    Int dd(d);
    Int power = dd * dd; // d^(m+1) at m = 1
    for (int m = 1; m <= 256; ++m) {
        if (count_formula(m, kind) > power)
            return m;
        power *= dd;
    }
    throw Error(Err::BadInput, "threshold search exceeded degree 256"); // unreachable
}

} // namespace rps

#endif // RPS_PI_HPP
