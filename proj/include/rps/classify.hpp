#ifndef RPS_CLASSIFY_HPP
#define RPS_CLASSIFY_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rps/algebra.hpp"
#include "rps/linalg.hpp"
#include "rps/poly.hpp"
#include "rps/rng.hpp"
#include "rps/sweep.hpp"

namespace rps {

constexpr std::uint64_t kDefaultTupleCap = 1ull << 24;

/// One certified evaluation: value = p(args), re-checkable exactly.
struct Witness {
    std::vector<AlgebraElement> args;
    AlgebraElement value;
};

struct SpanReport {
    std::vector<AlgebraElement> span_basis; // row-reduced, leading coordinate 1
    std::size_t dimension = 0;
    bool exhausted = true; // the span is exact (grid finished or rank maxed out)
    std::uint64_t tuples_checked = 0;
    std::vector<Witness> witnesses; // one per new dimension, odometer order
};

/// Sum of all monomial coefficients (the c of the span classification).
inline FieldElement coefficient_sum(const Polynomial& p)
{
    if (!p.is_multilinear())
        throw Error(Err::NotMultilinear, "coefficient_sum needs a multilinear polynomial");
    FieldElement acc = FieldElement::zero(p.field());
    for (const auto& [t, c] : p.terms())
        acc = acc + c;
    return acc;
}

namespace detail {

/// Applies fn to the polynomial lowered into the cheapest exact ring that can
/// represent it; falls back to wider rings on overflow.
template <class Fn>
auto with_lowered(const Polynomial& p, const MonadAlgebra& A, Fn&& fn)
{
    const FieldSpec& F = A.field();
    if (F.kind() == FieldSpec::Kind::Prime && F.prime_modulus() < (1ull << 62)) {
        return fn(SweepSystem<ModRing>::lower(p, A, ModRing{F.prime_modulus()}));
    }
    if (F.kind() == FieldSpec::Kind::Rationals) {
        try {
            return fn(SweepSystem<Int64Ring>::lower(p, A, Int64Ring{}));
        }
        catch (const RingUnrepresentable&) {
        }
        catch (const RingOverflow&) {
        }
        try {
            return fn(SweepSystem<BigIntRing>::lower(p, A, BigIntRing{}));
        }
        catch (const RingUnrepresentable&) {
        }
    }
    return fn(SweepSystem<FieldRing>::lower(p, A, FieldRing{F}));
}

template <class Fn>
auto with_lowered_trees(const std::vector<MonomialTree>& trees, int arity, const MonadAlgebra& A,
                        Fn&& fn)
{
    const FieldSpec& F = A.field();
    if (F.kind() == FieldSpec::Kind::Prime && F.prime_modulus() < (1ull << 62)) {
        return fn(SweepSystem<ModRing>::lower_trees(trees, arity, A, ModRing{F.prime_modulus()}));
    }
    if (F.kind() == FieldSpec::Kind::Rationals) {
        try {
            return fn(SweepSystem<Int64Ring>::lower_trees(trees, arity, A, Int64Ring{}));
        }
        catch (const RingUnrepresentable&) {
        }
        catch (const RingOverflow&) {
        }
        try {
            return fn(SweepSystem<BigIntRing>::lower_trees(trees, arity, A, BigIntRing{}));
        }
        catch (const RingUnrepresentable&) {
        }
    }
    return fn(SweepSystem<FieldRing>::lower_trees(trees, arity, A, FieldRing{F}));
}

inline std::vector<AlgebraElement> tuple_args(const AlgebraPtr& alg, const std::vector<int>& tuple)
{
    std::vector<AlgebraElement> args;
    args.reserve(tuple.size());
    for (int b : tuple)
        args.push_back(alg->basis_element(static_cast<std::size_t>(b)));
    return args;
}

} // namespace detail

/// Evaluates p on basis tuples and row-reduces the values. For a multilinear
/// polynomial the linear span of the image equals the span of these values,
/// since multilinearity expands any argument into basis elements. Stops early
/// once the span has maximal dimension; truncates (exhausted = false) if the
/// grid exceeds cap.
inline SpanReport basis_span(const Polynomial& p, const AlgebraPtr& alg,
                             std::uint64_t cap = kDefaultTupleCap, int threads = 1)
{
    if (!p.is_multilinear())
        throw Error(Err::NotMultilinear, "basis_span needs a multilinear polynomial");
    const MonadAlgebra& A = *alg;
    const FieldSpec& F = A.field();
    std::size_t d = A.dim();

    return detail::with_lowered(p, A, [&](const auto& sys) -> SpanReport {
        std::uint64_t total = sys.total_tuples();
        bool capped = total > cap;

        struct Candidate {
            std::vector<int> tuple;
            std::vector<FieldElement> row;
        };

        SpanReport report;
        RowReducer reducer(F, d);

        auto finish = [&](std::uint64_t checked, bool exhausted) {
            report.dimension = reducer.rank();
            for (const auto& row : reducer.rows())
                report.span_basis.push_back(alg->element(row));
            report.tuples_checked = checked;
            report.exhausted = exhausted;
            return report;
        };

        // empty row result means the value was zero (checked in the ring,
        // before any conversion)
        auto value_row = [&](const auto& vals, std::vector<typename std::decay_t<decltype(sys)>::Value>& scratch) {
            std::vector<FieldElement> row;
            if (sys.combined_is_zero(vals, scratch))
                return row;
            row.reserve(d);
            for (const auto& v : scratch)
                row.push_back(sys.ring.to_field(v, F));
            return row;
        };

        auto add_candidate = [&](const std::vector<int>& tuple, std::vector<FieldElement> row) {
            if (reducer.add_row(std::move(row))) {
                std::vector<AlgebraElement> args = detail::tuple_args(alg, tuple);
                AlgebraElement value = evaluate(p, args); // independent re-evaluation
                report.witnesses.push_back(Witness{std::move(args), std::move(value)});
            }
        };

        auto [k, chunks] = choose_chunking(d, sys.dag.arity, capped ? 1 : threads);
        if (chunks <= 1 || capped) {
            // sequential scan (also the truncated-cap path)
            std::uint64_t checked = 0;
            std::vector<typename std::decay_t<decltype(sys)>::Value> scratch;
            sweep_tuples(sys, {}, [&](const std::vector<int>& tuple, const auto& vals) {
                ++checked;
                std::vector<FieldElement> row = value_row(vals, scratch);
                if (!row.empty())
                    add_candidate(tuple, std::move(row));
                return checked < cap && reducer.rank() < d;
            });
            return finish(checked, checked == total || reducer.rank() == d);
        }

        // parallel: per-chunk local reduction, merged in chunk order; the local
        // candidate lists are supersets of the sequential "new direction"
        // tuples, so the merged result reproduces the sequential one exactly.
        std::vector<std::vector<Candidate>> chunk_candidates(chunks);
        std::vector<std::uint64_t> chunk_checked(chunks, 0);
        run_chunks(chunks, threads, [&](std::uint64_t c) {
            std::vector<int> prefix = detail::chunk_prefix(c, d, k);
            RowReducer local(F, d);
            std::vector<typename std::decay_t<decltype(sys)>::Value> scratch;
            sweep_tuples(sys, prefix, [&](const std::vector<int>& tuple, const auto& vals) {
                ++chunk_checked[c];
                std::vector<FieldElement> row = value_row(vals, scratch);
                if (!row.empty()) {
                    std::vector<FieldElement> original = row;
                    if (local.add_row(std::move(row)))
                        chunk_candidates[c].push_back(Candidate{tuple, std::move(original)});
                }
                return local.rank() < d;
            });
        });
        std::uint64_t checked = 0;
        for (std::uint64_t c = 0; c < chunks; ++c) {
            checked += chunk_checked[c];
            for (auto& cand : chunk_candidates[c])
                add_candidate(cand.tuple, std::move(cand.row));
        }
        return finish(checked, true);
    });
}

// ---------------------------------------------------------------------------

enum class ImageTag { Zero, Line, Plane, FullSpan };

inline const char* image_tag_name(ImageTag t)
{
    switch (t) {
        case ImageTag::Zero: return "Zero";
        case ImageTag::Line: return "Line";
        case ImageTag::Plane: return "Plane";
        case ImageTag::FullSpan: return "FullSpan";
    }
    return "?";
}

/// Classification outcome with re-checkable witnesses. theorem_label names
/// the subspace in the vocabulary of the classification theorems; for the
/// 3-dimensional case on the non-unital algebra only the span is certified
/// and the label records the claimed density.
struct ImageClass {
    ImageTag tag;
    std::string theorem_label;
    FieldElement coeff_sum;
    std::size_t span_dim = 0;
    std::optional<AlgebraElement> line_direction; // normalized, leading coordinate 1
    std::vector<AlgebraElement> plane_basis;
    std::vector<Witness> witnesses;
};

/// A classification outcome that contradicts the theorems; carries the full
/// span evidence. This surfacing loudly is the point: it would falsify a
/// theorem (or, far more likely, reveal a corrupted structure table).
class TheoremViolationError : public Error {
public:
    TheoremViolationError(const std::string& what, SpanReport report)
        : Error(Err::TheoremViolation, what), report_(std::move(report))
    {
    }
    const SpanReport& report() const { return report_; }

private:
    SpanReport report_;
};

namespace detail {

/// Is y proportional to x (y = s*x for some scalar s)?
inline bool proportional(const AlgebraElement& x, const AlgebraElement& y)
{
    std::size_t d = x.coords().size();
    std::size_t lead = d;
    for (std::size_t i = 0; i < d; ++i) {
        if (!x.coord(i).is_zero()) {
            lead = i;
            break;
        }
    }
    if (lead == d)
        return y.is_zero();
    FieldElement s = y.coord(lead) / x.coord(lead);
    return y == x.scaled(s);
}

inline AlgebraElement normalized_direction(const AlgebraElement& x)
{
    for (std::size_t i = 0; i < x.coords().size(); ++i)
        if (!x.coord(i).is_zero())
            return x.scaled(x.coord(i).inv());
    return x;
}

/// The admissible invariant lines on each algebra, as normalized coordinate
/// vectors plus their labels.
inline std::vector<std::pair<AlgebraElement, std::string>> admissible_lines(const AlgebraPtr& alg)
{
    const MonadAlgebra& A = *alg;
    const FieldSpec& F = A.field();
    std::vector<std::pair<AlgebraElement, std::string>> out;
    FieldElement one = FieldElement::one(F);
    if (F.characteristic() == 3) {
        switch (A.kind()) {
            case AlgebraKind::M:
                out.emplace_back(A.element({FieldElement::zero(F), one, one, one}), "<P+R+S>");
                break;
            case AlgebraKind::MTilde:
                out.emplace_back(A.element({one, one, one}), "<P+R+S>");
                break;
            case AlgebraKind::MZero:
                // P+R+S in the (P-R, R-S) basis is A + 2B in characteristic 3
                out.emplace_back(A.element({one, FieldElement::from_integer(F, 2)}), "<P+R+S>");
                break;
            default: break;
        }
        return out;
    }
    if (!F.has_omega())
        return out; // no invariant lines exist
    FieldElement w = omega_of(F);
    FieldElement w2 = w * w;
    switch (A.kind()) {
        case AlgebraKind::M:
            out.emplace_back(A.element({FieldElement::zero(F), one, w, w2}), "<P+w*R+w2*S>");
            out.emplace_back(A.element({FieldElement::zero(F), one, w2, w}), "<P+w2*R+w*S>");
            break;
        case AlgebraKind::MTilde:
            out.emplace_back(A.element({one, w, w2}), "<U>");
            out.emplace_back(A.element({one, w2, w}), "<V>");
            break;
        case AlgebraKind::MZero:
            // the trace-zero plane admits no 1-dimensional multilinear image
            break;
        default: break;
    }
    return out;
}

/// Span vector lies in the trace-zero scalar-free plane?
inline bool in_m0(const AlgebraPtr& alg, const AlgebraElement& x)
{
    const MonadAlgebra& A = *alg;
    FieldElement tr = FieldElement::zero(A.field());
    for (std::size_t i = 0; i < A.dim(); ++i)
        tr = tr + x.coord(i);
    if (!tr.is_zero())
        return false;
    if (auto u = A.label_index("1"))
        return x.coord(*u).is_zero();
    return true;
}

} // namespace detail

struct ClassifyOptions {
    std::uint64_t cap = kDefaultTupleCap;
    int threads = 1;
};

/// The decision procedure behind the classification theorems. Nonzero
/// coefficient sum on the unital algebra yields the whole algebra with the
/// constructive witnesses a = p(a/c, 1, ..., 1); otherwise the basis span
/// decides, with every line checked against the admissible invariant lines.
/// An outcome outside the theorem lists throws TheoremViolationError.
inline ImageClass classify_image(const Polynomial& p, const AlgebraPtr& alg,
                                 const ClassifyOptions& opts = {})
{
    if (!p.is_multilinear())
        throw Error(Err::NotMultilinear, "classification needs a multilinear polynomial");
    const MonadAlgebra& A = *alg;
    if (A.kind() == AlgebraKind::Generic)
        throw Error(Err::NotApplicable,
                    "classification covers the RPS algebras; run the span report instead");
    if (p.field() != A.field())
        throw Error(Err::FieldMismatch, "polynomial and algebra over different fields");

    FieldElement c = coefficient_sum(p);
    std::size_t d = A.dim();

    if (A.kind() == AlgebraKind::M && !c.is_zero()) {
        // a = p(c^-1 a, 1, ..., 1) hits every element; witness per basis vector
        FieldElement cinv = c.inv();
        AlgebraElement unit = A.unit_element();
        ImageClass out{ImageTag::FullSpan, "M", c, d, std::nullopt, {}, {}};
        for (std::size_t i = 0; i < d; ++i) {
            std::vector<AlgebraElement> args;
            args.push_back(A.basis_element(i).scaled(cinv));
            for (int j = 1; j < p.arity(); ++j)
                args.push_back(unit);
            AlgebraElement value = evaluate(p, args);
            if (value != A.basis_element(i))
                throw Error(Err::BadInput, "unit-substitution witness failed; corrupted algebra?");
            out.witnesses.push_back(Witness{std::move(args), std::move(value)});
        }
        return out;
    }

    SpanReport rep = basis_span(p, alg, opts.cap, opts.threads);
    if (!rep.exhausted)
        throw Error(Err::CapExceeded, "basis grid exceeds the tuple cap; raise it to classify");

    ImageClass out{ImageTag::Zero, "0", c, rep.dimension, std::nullopt, {}, rep.witnesses};

    switch (rep.dimension) {
        case 0:
            return out; // polynomial identity
        case 1: {
            AlgebraElement dir = rep.span_basis[0];
            AlgebraMap ph = phi(alg);
            if (!detail::proportional(dir, ph(dir)))
                throw TheoremViolationError(
                    "1-dimensional image with direction " + dir.str() +
                        " is not invariant under the order-3 rotation",
                    rep);
            for (const auto& [line, label] : detail::admissible_lines(alg)) {
                if (detail::proportional(line, dir)) {
                    out.tag = ImageTag::Line;
                    out.theorem_label = label;
                    out.line_direction = detail::normalized_direction(dir);
                    return out;
                }
            }
            throw TheoremViolationError("1-dimensional image with direction " + dir.str() +
                                            " on " + A.name() +
                                            " is excluded by the classification",
                                        rep);
        }
        case 2: {
            for (const auto& b : rep.span_basis) {
                if (A.kind() != AlgebraKind::MZero && !detail::in_m0(alg, b))
                    throw TheoremViolationError(
                        "2-dimensional image not equal to the trace-zero plane (basis vector " +
                            b.str() + ")",
                        rep);
            }
            out.tag = ImageTag::Plane;
            out.theorem_label = "M0";
            out.plane_basis = rep.span_basis;
            return out;
        }
        case 3: {
            if (A.kind() != AlgebraKind::MTilde)
                throw TheoremViolationError("3-dimensional span on " + A.name() +
                                                " is excluded by the classification",
                                            rep);
            out.tag = ImageTag::FullSpan;
            out.theorem_label = "Zariski dense in Mtilde";
            return out;
        }
        default:
            throw TheoremViolationError("span of dimension " + std::to_string(rep.dimension) +
                                            " with zero coefficient sum on " + A.name(),
                                        rep);
    }
}

// ---------------------------------------------------------------------------

/// Maximum Jacobian rank of the evaluation map over `samples` seeded random
/// argument tuples -- an exact lower bound for the dimension of the image's
/// Zariski closure. Works for arbitrary (not necessarily multilinear)
/// polynomials; needs characteristic 0 or p > deg to keep derivatives honest.
inline int estimate_dimension(const Polynomial& p, const AlgebraPtr& alg, int samples,
                              std::uint64_t seed)
{
    const MonadAlgebra& A = *alg;
    std::uint64_t ch = A.field().characteristic();
    if (ch != 0 && ch <= static_cast<std::uint64_t>(p.degree()))
        throw Error(Err::SmallCharacteristic,
                    "characteristic " + std::to_string(ch) + " <= degree " +
                        std::to_string(p.degree()) + " degenerates derivatives");
    if (p.field() != A.field())
        throw Error(Err::FieldMismatch, "polynomial and algebra over different fields");
    Rng rng(seed);
    std::size_t d = A.dim();
    int best = 0;
    for (int s = 0; s < samples; ++s) {
        std::vector<AlgebraElement> args;
        for (int i = 0; i < p.arity(); ++i)
            args.push_back(random_algebra_element(alg, rng));
        RowReducer reducer(A.field(), d);
        for (int i = 0; i < p.arity() && reducer.rank() < d; ++i) {
            for (std::size_t k = 0; k < d && reducer.rank() < d; ++k) {
                auto [val, der] = evaluate_dual(p, args, i, A.basis_element(k));
                reducer.add_row(der.coords());
            }
        }
        best = std::max(best, static_cast<int>(reducer.rank()));
        if (best == static_cast<int>(d))
            break;
    }
    return best;
}

} // namespace rps

#endif // RPS_CLASSIFY_HPP
