#ifndef RPS_ALGEBRA_HPP
#define RPS_ALGEBRA_HPP

#include <algorithm>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rps/field.hpp"
#include "rps/linalg.hpp"
#include "rps/rng.hpp"

namespace rps {

enum class AlgebraKind { M, MZero, MTilde, Generic };

class MonadAlgebra;
using AlgebraPtr = std::shared_ptr<const MonadAlgebra>;

class AlgebraElement;

/// Finite-dimensional commutative algebra over a FieldSpec field, given by
/// structure constants on a labeled basis. Commutativity and the unit law
/// are checked at construction; associativity is neither assumed nor checked.
class MonadAlgebra : public std::enable_shared_from_this<MonadAlgebra> {
public:
    static AlgebraPtr create(FieldSpec field, std::vector<std::string> basis_labels,
                             std::vector<std::vector<FieldElement>> table,
                             std::optional<std::size_t> unit_index,
                             AlgebraKind kind = AlgebraKind::Generic, std::string name = "custom");

    const FieldSpec& field() const { return field_; }
    std::size_t dim() const { return dim_; }
    const std::vector<std::string>& basis_labels() const { return labels_; }
    std::optional<std::size_t> unit_index() const { return unit_; }
    AlgebraKind kind() const { return kind_; }
    const std::string& name() const { return name_; }

    std::optional<std::size_t> label_index(std::string_view label) const
    {
        for (std::size_t i = 0; i < labels_.size(); ++i)
            if (labels_[i] == label)
                return i;
        return std::nullopt;
    }

    /// Coordinates of E_i * E_j.
    const std::vector<FieldElement>& table_at(std::size_t i, std::size_t j) const
    {
        return table_[i * dim_ + j];
    }

    AlgebraElement basis_element(std::size_t i) const;
    AlgebraElement zero_element() const;
    AlgebraElement unit_element() const;
    AlgebraElement element(std::vector<FieldElement> coords) const;

    friend bool operator==(const MonadAlgebra& x, const MonadAlgebra& y)
    {
        if (&x == &y)
            return true;
        if (x.field_ != y.field_ || x.dim_ != y.dim_ || x.labels_ != y.labels_ ||
            x.unit_ != y.unit_)
            return false;
        for (std::size_t k = 0; k < x.table_.size(); ++k)
            for (std::size_t c = 0; c < x.dim_; ++c)
                if (x.table_[k][c] != y.table_[k][c])
                    return false;
        return true;
    }
    friend bool operator!=(const MonadAlgebra& x, const MonadAlgebra& y) { return !(x == y); }

private:
    MonadAlgebra(FieldSpec field, std::vector<std::string> labels,
                 std::vector<std::vector<FieldElement>> table, std::optional<std::size_t> unit,
                 AlgebraKind kind, std::string name)
        : field_(std::move(field)), dim_(labels.size()), labels_(std::move(labels)),
          table_(std::move(table)), unit_(unit), kind_(kind), name_(std::move(name))
    {
    }

    FieldSpec field_;
    std::size_t dim_;
    std::vector<std::string> labels_;
    std::vector<std::vector<FieldElement>> table_; // row-major, table_[i*dim+j]
    std::optional<std::size_t> unit_;
    AlgebraKind kind_;
    std::string name_;
};

/// Coordinate vector over a MonadAlgebra. Immutable value semantics; all
/// operations are pure.
class AlgebraElement {
public:
    AlgebraElement(AlgebraPtr algebra, std::vector<FieldElement> coords)
        : alg_(std::move(algebra)), coords_(std::move(coords))
    {
        if (coords_.size() != alg_->dim())
            throw Error(Err::BadInput, "coordinate count does not match algebra dimension");
    }

    const AlgebraPtr& algebra() const { return alg_; }
    const std::vector<FieldElement>& coords() const { return coords_; }
    const FieldElement& coord(std::size_t i) const { return coords_[i]; }
    const FieldSpec& field() const { return alg_->field(); }

    bool is_zero() const
    {
        for (const auto& c : coords_)
            if (!c.is_zero())
                return false;
        return true;
    }

    AlgebraElement operator-() const
    {
        std::vector<FieldElement> out;
        out.reserve(coords_.size());
        for (const auto& c : coords_)
            out.push_back(-c);
        return AlgebraElement(alg_, std::move(out));
    }

    AlgebraElement scaled(const FieldElement& s) const
    {
        std::vector<FieldElement> out;
        out.reserve(coords_.size());
        for (const auto& c : coords_)
            out.push_back(s * c);
        return AlgebraElement(alg_, std::move(out));
    }

    friend AlgebraElement operator+(const AlgebraElement& x, const AlgebraElement& y)
    {
        check_same(x, y);
        std::vector<FieldElement> out;
        out.reserve(x.coords_.size());
        for (std::size_t i = 0; i < x.coords_.size(); ++i)
            out.push_back(x.coords_[i] + y.coords_[i]);
        return AlgebraElement(x.alg_, std::move(out));
    }

    friend AlgebraElement operator-(const AlgebraElement& x, const AlgebraElement& y)
    {
        return x + (-y);
    }

    friend AlgebraElement operator*(const AlgebraElement& x, const AlgebraElement& y)
    {
        check_same(x, y);
        const MonadAlgebra& A = *x.alg_;
        std::size_t d = A.dim();
        std::vector<FieldElement> out;
        out.reserve(d);
        for (std::size_t k = 0; k < d; ++k)
            out.push_back(FieldElement::zero(A.field()));
        for (std::size_t i = 0; i < d; ++i) {
            if (x.coords_[i].is_zero())
                continue;
            for (std::size_t j = 0; j < d; ++j) {
                if (y.coords_[j].is_zero())
                    continue;
                FieldElement c = x.coords_[i] * y.coords_[j];
                const auto& t = A.table_at(i, j);
                for (std::size_t k = 0; k < d; ++k)
                    if (!t[k].is_zero())
                        out[k] = out[k] + c * t[k];
            }
        }
        return AlgebraElement(x.alg_, std::move(out));
    }

    friend bool operator==(const AlgebraElement& x, const AlgebraElement& y)
    {
        check_same(x, y);
        for (std::size_t i = 0; i < x.coords_.size(); ++i)
            if (x.coords_[i] != y.coords_[i])
                return false;
        return true;
    }
    friend bool operator!=(const AlgebraElement& x, const AlgebraElement& y) { return !(x == y); }

    std::string str() const;

private:
    static void check_same(const AlgebraElement& x, const AlgebraElement& y)
    {
        if (x.alg_ == y.alg_)
            return;
        if (*x.alg_ != *y.alg_)
            throw Error(Err::FieldMismatch, "elements of different algebras");
    }

    AlgebraPtr alg_;
    std::vector<FieldElement> coords_;
};

inline AlgebraPtr MonadAlgebra::create(FieldSpec field, std::vector<std::string> labels,
                                       std::vector<std::vector<FieldElement>> table,
                                       std::optional<std::size_t> unit, AlgebraKind kind,
                                       std::string name)
{
    std::size_t d = labels.size();
    if (d == 0)
        throw Error(Err::BadInput, "algebra must have positive dimension");
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i + 1; j < d; ++j)
            if (labels[i] == labels[j])
                throw Error(Err::BadInput, "duplicate basis label '" + labels[i] + "'");
    if (table.size() != d * d)
        throw Error(Err::BadInput, "structure table must have dim^2 entries");
    for (const auto& row : table) {
        if (row.size() != d)
            throw Error(Err::BadInput, "structure constants must have dim coordinates");
        for (const auto& c : row)
            if (c.spec() != field)
                throw Error(Err::FieldMismatch, "structure constant in wrong field");
    }
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i + 1; j < d; ++j) {
            for (std::size_t k = 0; k < d; ++k) {
                if (table[i * d + j][k] != table[j * d + i][k])
                    throw Error(Err::BadInput, "structure table is not commutative at (" +
                                                   labels[i] + "," + labels[j] + ")");
            }
        }
    }
    if (unit) {
        std::size_t u = *unit;
        if (u >= d)
            throw Error(Err::BadInput, "unit index out of range");
        FieldElement one = FieldElement::one(field);
        FieldElement zero = FieldElement::zero(field);
        for (std::size_t j = 0; j < d; ++j) {
            for (std::size_t k = 0; k < d; ++k) {
                const FieldElement& expect = (k == j) ? one : zero;
                if (table[u * d + j][k] != expect || table[j * d + u][k] != expect)
                    throw Error(Err::BadInput, "unit law fails at basis '" + labels[j] + "'");
            }
        }
    }
    return AlgebraPtr(new MonadAlgebra(std::move(field), std::move(labels), std::move(table), unit,
                                       kind, std::move(name)));
}

inline AlgebraElement MonadAlgebra::basis_element(std::size_t i) const
{
    std::vector<FieldElement> coords;
    coords.reserve(dim_);
    for (std::size_t k = 0; k < dim_; ++k)
        coords.push_back(k == i ? FieldElement::one(field_) : FieldElement::zero(field_));
    return AlgebraElement(shared_from_this(), std::move(coords));
}

inline AlgebraElement MonadAlgebra::zero_element() const
{
    std::vector<FieldElement> coords;
    coords.reserve(dim_);
    for (std::size_t k = 0; k < dim_; ++k)
        coords.push_back(FieldElement::zero(field_));
    return AlgebraElement(shared_from_this(), std::move(coords));
}

inline AlgebraElement MonadAlgebra::unit_element() const
{
    if (!unit_)
        throw Error(Err::NotApplicable, "algebra '" + name_ + "' has no unit");
    return basis_element(*unit_);
}

inline AlgebraElement MonadAlgebra::element(std::vector<FieldElement> coords) const
{
    return AlgebraElement(shared_from_this(), std::move(coords));
}

// ---------------------------------------------------------------------------
// The rock-paper-scissors algebras.

/// The 4-dimensional unital algebra on (1, P, R, S) -- or its 3-dimensional
/// non-unital subalgebra on (P, R, S) when with_unit is false. Every basis
/// element is idempotent and the product of two distinct non-unit elements is
/// the winning move: R*P = P, P*S = S, S*R = R.
inline AlgebraPtr rps_algebra(const FieldSpec& field, bool with_unit = true)
{
    std::vector<std::string> labels =
        with_unit ? std::vector<std::string>{"1", "P", "R", "S"}
                  : std::vector<std::string>{"P", "R", "S"};
    std::size_t d = labels.size();
    auto idx = [&](std::string_view l) {
        for (std::size_t i = 0; i < d; ++i)
            if (labels[i] == l)
                return i;
        throw Error(Err::BadInput, "label lookup");
    };
    // winner[i][j] as labels over {P,R,S}
    auto winner = [](std::string_view a, std::string_view b) -> std::string {
        if (a == b)
            return std::string(a);
        auto beats = [](std::string_view x, std::string_view y) {
            return (x == "P" && y == "R") || (x == "S" && y == "P") || (x == "R" && y == "S");
        };
        return beats(a, b) ? std::string(a) : std::string(b);
    };
    std::vector<std::vector<FieldElement>> table;
    table.reserve(d * d);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            std::size_t k;
            if (with_unit && (i == 0 || j == 0))
                k = (i == 0) ? j : i;
            else
                k = idx(winner(labels[i], labels[j]));
            std::vector<FieldElement> coords;
            coords.reserve(d);
            for (std::size_t c = 0; c < d; ++c)
                coords.push_back(c == k ? FieldElement::one(field) : FieldElement::zero(field));
            table.push_back(std::move(coords));
        }
    }
    return MonadAlgebra::create(field, std::move(labels), std::move(table),
                                with_unit ? std::optional<std::size_t>(0) : std::nullopt,
                                with_unit ? AlgebraKind::M : AlgebraKind::MTilde,
                                with_unit ? "M" : "Mtilde");
}

/// The diagonalizing basis of the trace-zero, scalar-free plane:
/// U = ((1+2w)/3)(P + wR + w^2 S), V = ((1+2w^2)/3)(P + w^2 R + wS),
/// W = (P + R + S)/3, as elements of the unital algebra.
struct GoodBasis {
    AlgebraElement U;
    AlgebraElement V;
    AlgebraElement W;
};

inline GoodBasis good_basis(const FieldSpec& field)
{
    if (field.characteristic() == 3)
        throw Error(Err::CharThree, "the good basis is not defined in characteristic 3");
    if (!field.has_omega())
        throw Error(Err::NoOmega, "the good basis needs a cube root of unity in " + field.name());
    AlgebraPtr m = rps_algebra(field, true);
    FieldElement w = omega_of(field);
    FieldElement w2 = w * w;
    FieldElement one = FieldElement::one(field);
    FieldElement zero = FieldElement::zero(field);
    FieldElement third = FieldElement::from_integer(field, 3).inv();
    FieldElement two = FieldElement::from_integer(field, 2);
    FieldElement cu = (one + two * w) * third;
    FieldElement cv = (one + two * w2) * third;
    AlgebraElement U = m->element({zero, cu, cu * w, cu * w2});
    AlgebraElement V = m->element({zero, cv, cv * w2, cv * w});
    AlgebraElement W = m->element({zero, third, third, third});
    return GoodBasis{std::move(U), std::move(V), std::move(W)};
}

// ---------------------------------------------------------------------------
// Homomorphisms to the base field.

/// Linear functional that respects multiplication; multiplicativity on all
/// basis pairs is verified at construction.
class Homomorphism {
public:
    static Homomorphism create(AlgebraPtr alg, std::vector<FieldElement> values, std::string name)
    {
        if (values.size() != alg->dim())
            throw Error(Err::BadInput, "functional needs one value per basis element");
        std::size_t d = alg->dim();
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < d; ++j) {
                const auto& prod = alg->table_at(i, j);
                FieldElement lhs = FieldElement::zero(alg->field());
                for (std::size_t k = 0; k < d; ++k)
                    if (!prod[k].is_zero())
                        lhs = lhs + prod[k] * values[k];
                if (lhs != values[i] * values[j])
                    throw Error(Err::NotApplicable, name + " is not multiplicative at (" +
                                                        alg->basis_labels()[i] + "," +
                                                        alg->basis_labels()[j] + ")");
            }
        }
        return Homomorphism(std::move(alg), std::move(values), std::move(name));
    }

    FieldElement operator()(const AlgebraElement& x) const
    {
        if (*x.algebra() != *alg_)
            throw Error(Err::FieldMismatch, "element from a different algebra");
        FieldElement acc = FieldElement::zero(alg_->field());
        for (std::size_t i = 0; i < values_.size(); ++i)
            if (!x.coord(i).is_zero())
                acc = acc + x.coord(i) * values_[i];
        return acc;
    }

    const std::vector<FieldElement>& values() const { return values_; }
    const std::string& name() const { return name_; }

private:
    Homomorphism(AlgebraPtr alg, std::vector<FieldElement> values, std::string name)
        : alg_(std::move(alg)), values_(std::move(values)), name_(std::move(name))
    {
    }

    AlgebraPtr alg_;
    std::vector<FieldElement> values_;
    std::string name_;
};

namespace detail {
inline bool rps_labels_only(const MonadAlgebra& a)
{
    for (const auto& l : a.basis_labels())
        if (l != "1" && l != "P" && l != "R" && l != "S")
            return false;
    return true;
}
} // namespace detail

/// trace(x0*1 + aP + bR + cS) = x0 + a + b + c.
inline Homomorphism trace_hom(const AlgebraPtr& alg)
{
    if (!detail::rps_labels_only(*alg))
        throw Error(Err::NotApplicable, "trace needs a basis labeled among 1, P, R, S");
    std::vector<FieldElement> values;
    for (std::size_t i = 0; i < alg->dim(); ++i)
        values.push_back(FieldElement::one(alg->field()));
    return Homomorphism::create(alg, std::move(values), "trace");
}

/// Sc(x0*1 + aP + bR + cS) = x0, the coefficient of the unit.
inline Homomorphism sc_hom(const AlgebraPtr& alg)
{
    if (!detail::rps_labels_only(*alg) || !alg->label_index("1"))
        throw Error(Err::NotApplicable, "Sc needs the unital basis (1, P, R, S)");
    std::size_t u = *alg->label_index("1");
    std::vector<FieldElement> values;
    for (std::size_t i = 0; i < alg->dim(); ++i)
        values.push_back(i == u ? FieldElement::one(alg->field())
                                : FieldElement::zero(alg->field()));
    return Homomorphism::create(alg, std::move(values), "Sc");
}

inline FieldElement trace_of(const AlgebraElement& x) { return trace_hom(x.algebra())(x); }
inline FieldElement sc_of(const AlgebraElement& x) { return sc_hom(x.algebra())(x); }

// ---------------------------------------------------------------------------
// Algebra maps (linear or omega-semi-linear), automorphism verification.

/// Additive map between algebras, given by the images of the source basis.
/// When conjugate_scalars is set the map is semi-linear: coefficients pass
/// through the omega conjugation of the (shared) field.
class AlgebraMap {
public:
    AlgebraMap(AlgebraPtr source, AlgebraPtr target, std::vector<AlgebraElement> images,
               bool conjugate_scalars = false, std::string name = "map")
        : source_(std::move(source)), target_(std::move(target)), images_(std::move(images)),
          conj_(conjugate_scalars), name_(std::move(name))
    {
        if (images_.size() != source_->dim())
            throw Error(Err::BadInput, "map needs one image per source basis element");
        for (const auto& img : images_)
            if (*img.algebra() != *target_)
                throw Error(Err::BadInput, "image lies outside the target algebra");
        if (source_->field() != target_->field())
            throw Error(Err::FieldMismatch, "source and target over different fields");
        if (conj_ && source_->field().kind() != FieldSpec::Kind::Omega)
            throw Error(Err::NotApplicable,
                        "scalar conjugation needs an omega extension field");
    }

    AlgebraElement operator()(const AlgebraElement& x) const
    {
        if (*x.algebra() != *source_)
            throw Error(Err::FieldMismatch, "element from a different algebra");
        AlgebraElement acc = target_->zero_element();
        for (std::size_t i = 0; i < images_.size(); ++i) {
            const FieldElement& c = x.coord(i);
            if (c.is_zero())
                continue;
            acc = acc + images_[i].scaled(conj_ ? c.conjugate() : c);
        }
        return acc;
    }

    /// this after inner: x -> this(inner(x)).
    AlgebraMap compose(const AlgebraMap& inner) const
    {
        if (*inner.target_ != *source_)
            throw Error(Err::BadInput, "composition mismatch");
        std::vector<AlgebraElement> images;
        images.reserve(inner.images_.size());
        for (const auto& img : inner.images_)
            images.push_back((*this)(img));
        return AlgebraMap(inner.source_, target_, std::move(images), conj_ != inner.conj_,
                          name_ + "∘" + inner.name_);
    }

    bool is_identity() const
    {
        if (conj_ || *source_ != *target_)
            return false;
        for (std::size_t i = 0; i < images_.size(); ++i)
            if (images_[i] != source_->basis_element(i))
                return false;
        return true;
    }

    const AlgebraPtr& source() const { return source_; }
    const AlgebraPtr& target() const { return target_; }
    const std::vector<AlgebraElement>& images() const { return images_; }
    bool conjugates_scalars() const { return conj_; }
    const std::string& name() const { return name_; }

    friend bool operator==(const AlgebraMap& f, const AlgebraMap& g)
    {
        if (*f.source_ != *g.source_ || *f.target_ != *g.target_ || f.conj_ != g.conj_)
            return false;
        for (std::size_t i = 0; i < f.images_.size(); ++i)
            if (f.images_[i] != g.images_[i])
                return false;
        return true;
    }

private:
    AlgebraPtr source_;
    AlgebraPtr target_;
    std::vector<AlgebraElement> images_;
    bool conj_;
    std::string name_;
};

struct AutomorphismCheck {
    bool ok;
    int i = -1; // basis pair witnessing the failure, when !ok and applicable
    int j = -1;
    std::string detail;
    explicit operator bool() const { return ok; }
};

inline AutomorphismCheck verify_automorphism(const AlgebraMap& map);

namespace detail {
inline AlgebraMap verified(AlgebraMap map)
{
    AutomorphismCheck chk = verify_automorphism(map);
    if (!chk.ok)
        throw Error(Err::BadInput, map.name() + " failed verification: " + chk.detail);
    return map;
}
} // namespace detail

/// Checks that an endo-map is bijective, semi-linear w.r.t. its declared
/// conjugation, and multiplicative on all basis pairs. On failure the first
/// offending basis pair (row-major scan) is reported.
inline AutomorphismCheck verify_automorphism(const AlgebraMap& map)
{
    if (*map.source() != *map.target())
        return {false, -1, -1, "source and target differ"};
    const MonadAlgebra& A = *map.source();
    std::size_t d = A.dim();
    std::vector<std::vector<FieldElement>> rows;
    rows.reserve(d);
    for (const auto& img : map.images())
        rows.push_back(img.coords());
    if (matrix_rank(A.field(), rows, d) != d)
        return {false, -1, -1, "matrix is singular"};
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            AlgebraElement lhs = map(A.element(A.table_at(i, j)));
            AlgebraElement rhs = map(A.basis_element(i)) * map(A.basis_element(j));
            if (lhs != rhs) {
                return {false, static_cast<int>(i), static_cast<int>(j),
                        "map(" + A.basis_labels()[i] + "*" + A.basis_labels()[j] +
                            ") = " + lhs.str() + " but product of images is " + rhs.str()};
            }
        }
    }
    return {true, -1, -1, ""};
}

/// The order-3 rotation 1 -> 1, P -> R -> S -> P (diagonal w^2, w on the
/// good basis of the trace-zero plane).
inline AlgebraMap phi(const AlgebraPtr& alg)
{
    const MonadAlgebra& A = *alg;
    switch (A.kind()) {
        case AlgebraKind::M:
        case AlgebraKind::MTilde: {
            std::vector<AlgebraElement> images;
            for (const auto& l : A.basis_labels()) {
                std::string to = l == "P" ? "R" : l == "R" ? "S" : l == "S" ? "P" : l;
                images.push_back(A.basis_element(*A.label_index(to)));
            }
            return detail::verified(AlgebraMap(alg, alg, std::move(images), false, "phi"));
        }
        case AlgebraKind::MZero: {
            if (A.label_index("U")) {
                FieldElement w = omega_of(A.field());
                std::vector<AlgebraElement> images;
                images.push_back(A.basis_element(0).scaled(w * w)); // U -> w^2 U
                images.push_back(A.basis_element(1).scaled(w));     // V -> w V
                return detail::verified(AlgebraMap(alg, alg, std::move(images), false, "phi"));
            }
            // basis (P-R, R-S): phi(P-R) = R-S, phi(R-S) = S-P = -(P-R)-(R-S)
            std::vector<AlgebraElement> images;
            images.push_back(A.basis_element(1));
            images.push_back(-(A.basis_element(0) + A.basis_element(1)));
            return detail::verified(AlgebraMap(alg, alg, std::move(images), false, "phi"));
        }
        case AlgebraKind::Generic:
            throw Error(Err::NotApplicable, "phi is defined on the rock-paper-scissors algebras");
    }
    throw Error(Err::BadInput, "bad algebra kind");
}

/// The order-2 swap U <-> V on the good-basis trace-zero plane.
inline AlgebraMap psi_m0(const AlgebraPtr& alg)
{
    const MonadAlgebra& A = *alg;
    if (A.kind() != AlgebraKind::MZero)
        throw Error(Err::NotApplicable, "psi is an automorphism of the trace-zero plane");
    if (!A.label_index("U")) {
        if (A.field().characteristic() == 3)
            throw Error(Err::CharThree, "the good basis does not exist in characteristic 3");
        throw Error(Err::NoOmega, "psi needs the good basis; " + A.field().name() +
                                      " has no cube root of unity");
    }
    std::vector<AlgebraElement> images;
    images.push_back(A.basis_element(1));
    images.push_back(A.basis_element(0));
    return detail::verified(AlgebraMap(alg, alg, std::move(images), false, "psi"));
}

/// The semi-linear extension: basis elements fixed (U, V swapped on the
/// good-basis plane) while scalars pass through omega conjugation. Only
/// omega-extension fields carry the conjugation.
inline AlgebraMap psi_semilinear(const AlgebraPtr& alg)
{
    const MonadAlgebra& A = *alg;
    if (A.field().kind() != FieldSpec::Kind::Omega)
        throw Error(Err::NotApplicable,
                    "semi-linear psi needs Q(w) or Fp2:<p>, got " + A.field().name());
    std::vector<AlgebraElement> images;
    if (A.kind() == AlgebraKind::MZero && A.label_index("U")) {
        images.push_back(A.basis_element(1));
        images.push_back(A.basis_element(0));
    }
    else if (A.kind() == AlgebraKind::M || A.kind() == AlgebraKind::MTilde) {
        for (std::size_t i = 0; i < A.dim(); ++i)
            images.push_back(A.basis_element(i));
    }
    else {
        throw Error(Err::NotApplicable, "semi-linear psi is defined on the RPS algebras");
    }
    return detail::verified(AlgebraMap(alg, alg, std::move(images), true, "psi~"));
}

// ---------------------------------------------------------------------------
// The trace-zero scalar-free plane as a standalone algebra.

struct Subalgebra {
    AlgebraPtr algebra;
    AlgebraMap embedding; // into the unital algebra
    bool good_basis;      // (U, V) if true, (P-R, R-S) otherwise
};

/// The 2-dimensional ideal of trace-zero, scalar-free elements. Uses the
/// good basis (U, V) when the field allows it, and the integral basis
/// (P-R, R-S) in characteristic 3 or when omega is missing.
inline Subalgebra m0_subalgebra(const FieldSpec& field)
{
    AlgebraPtr m = rps_algebra(field, true);
    FieldElement one = FieldElement::one(field);
    FieldElement zero = FieldElement::zero(field);
    bool good = field.characteristic() != 3 && field.has_omega();
    if (good) {
        GoodBasis gb = good_basis(field);
        // U*U = V, V*V = U, U*V = 0
        std::vector<std::vector<FieldElement>> table;
        table.push_back({zero, one});  // U*U
        table.push_back({zero, zero}); // U*V
        table.push_back({zero, zero}); // V*U
        table.push_back({one, zero});  // V*V
        AlgebraPtr m0 = MonadAlgebra::create(field, {"U", "V"}, std::move(table), std::nullopt,
                                             AlgebraKind::MZero, "M0");
        AlgebraMap embed(m0, m, {gb.U, gb.V}, false, "embed");
        return Subalgebra{m0, std::move(embed), true};
    }
    // A = P-R, B = R-S: A*A = -A, A*B = A+B, B*B = -B
    FieldElement neg = -one;
    std::vector<std::vector<FieldElement>> table;
    table.push_back({neg, zero}); // A*A
    table.push_back({one, one});  // A*B
    table.push_back({one, one});  // B*A
    table.push_back({zero, neg}); // B*B
    AlgebraPtr m0 = MonadAlgebra::create(field, {"P-R", "R-S"}, std::move(table), std::nullopt,
                                         AlgebraKind::MZero, "M0");
    auto idx = [&](const char* l) { return *m->label_index(l); };
    AlgebraElement P = m->basis_element(idx("P"));
    AlgebraElement R = m->basis_element(idx("R"));
    AlgebraElement S = m->basis_element(idx("S"));
    AlgebraMap embed(m0, m, {P - R, R - S}, false, "embed");
    return Subalgebra{m0, std::move(embed), false};
}

// ---------------------------------------------------------------------------
// Element text syntax: linear combinations of basis labels, e.g. "P+2*R-S",
// "(1+w)*U", "2/3" (unit coordinate). Labels are matched greedily against the
// algebra's own basis, so the integral basis labels "P-R", "R-S" parse whole.

inline AlgebraElement parse_element(std::string_view text, const AlgebraPtr& alg)
{
    const MonadAlgebra& A = *alg;
    const FieldSpec& F = A.field();
    std::vector<FieldElement> coords;
    for (std::size_t i = 0; i < A.dim(); ++i)
        coords.push_back(FieldElement::zero(F));

    std::size_t pos = 0;
    auto skip_ws = [&] {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
            ++pos;
    };
    auto match_label = [&]() -> std::optional<std::size_t> {
        std::optional<std::size_t> best;
        std::size_t best_len = 0;
        for (std::size_t i = 0; i < A.dim(); ++i) {
            const std::string& l = A.basis_labels()[i];
            // purely numeric labels (the unit "1") read as scalars instead,
            // which lands on the same coordinate and keeps "1/3" a fraction
            if (std::all_of(l.begin(), l.end(),
                            [](unsigned char c) { return std::isdigit(c); }))
                continue;
            if (l.size() > best_len && text.substr(pos, l.size()) == l)
                best = i, best_len = l.size();
        }
        if (best)
            pos += best_len;
        return best;
    };

    skip_ws();
    if (text.substr(pos) == "0")
        return A.zero_element();

    bool first = true;
    while (true) {
        skip_ws();
        if (pos == text.size()) {
            if (first)
                throw SyntaxError(pos, "empty element");
            break;
        }
        bool negative = false;
        if (text[pos] == '+' || text[pos] == '-') {
            negative = text[pos] == '-';
            ++pos;
            skip_ws();
        }
        else if (!first) {
            throw SyntaxError(pos, "expected '+' or '-' between terms");
        }
        first = false;

        // term := label | scalar ['*' label]
        FieldElement coef = FieldElement::one(F);
        std::optional<std::size_t> label = match_label();
        if (!label) {
            // leading scalar: consume scalar atoms joined by '*' until a label shows up
            std::size_t scalar_start = pos;
            bool saw_scalar = false;
            while (true) {
                skip_ws();
                std::size_t atom_start = pos;
                char c = pos < text.size() ? text[pos] : '\0';
                if (c == '(') {
                    int depth = 0;
                    while (pos < text.size()) {
                        if (text[pos] == '(')
                            ++depth;
                        else if (text[pos] == ')' && --depth == 0) {
                            ++pos;
                            break;
                        }
                        ++pos;
                    }
                    if (depth != 0)
                        throw SyntaxError(atom_start, "unbalanced '('");
                }
                else if (c == 'w' || std::isdigit(static_cast<unsigned char>(c))) {
                    if (c == 'w') {
                        ++pos;
                        if (pos < text.size() && text[pos] == '2')
                            ++pos;
                    }
                    else {
                        while (pos < text.size() &&
                               (std::isdigit(static_cast<unsigned char>(text[pos])) ||
                                text[pos] == '/'))
                            ++pos;
                    }
                }
                else {
                    throw SyntaxError(pos, "expected scalar or basis label");
                }
                saw_scalar = true;
                std::size_t after_atom = pos;
                skip_ws();
                if (pos < text.size() && text[pos] == '*') {
                    ++pos;
                    skip_ws();
                    label = match_label();
                    if (label) {
                        coef = parse_scalar(text.substr(scalar_start, after_atom - scalar_start), F);
                        break;
                    }
                    continue; // another scalar atom
                }
                // term ends: pure scalar, belongs to the unit coordinate
                coef = parse_scalar(text.substr(scalar_start, after_atom - scalar_start), F);
                pos = after_atom;
                break;
            }
            if (!saw_scalar)
                throw SyntaxError(pos, "expected term");
        }

        if (negative)
            coef = -coef;
        if (label) {
            coords[*label] = coords[*label] + coef;
        }
        else {
            if (!A.unit_index())
                throw Error(Err::NotApplicable,
                            "scalar term needs a unital algebra, '" + A.name() + "' has none");
            coords[*A.unit_index()] = coords[*A.unit_index()] + coef;
        }
    }
    return A.element(std::move(coords));
}

inline std::string AlgebraElement::str() const
{
    const MonadAlgebra& A = *alg_;
    std::string out;
    for (std::size_t i = 0; i < coords_.size(); ++i) {
        const FieldElement& c = coords_[i];
        if (c.is_zero())
            continue;
        std::string cs = c.str();
        bool needs_parens = cs.find_first_of("+-", 1) != std::string::npos;
        std::string piece;
        bool is_unit = A.unit_index() && *A.unit_index() == i;
        if (is_unit) {
            piece = needs_parens ? "(" + cs + ")" : cs;
        }
        else if (c.is_one()) {
            piece = A.basis_labels()[i];
        }
        else if ((-c).is_one()) {
            piece = "-" + A.basis_labels()[i];
        }
        else {
            piece = (needs_parens ? "(" + cs + ")" : cs) + "*" + A.basis_labels()[i];
        }
        if (out.empty())
            out = piece;
        else if (piece[0] == '-')
            out += "-" + piece.substr(1);
        else
            out += "+" + piece;
    }
    return out.empty() ? "0" : out;
}

inline AlgebraElement random_algebra_element(const AlgebraPtr& alg, Rng& rng)
{
    std::vector<FieldElement> coords;
    coords.reserve(alg->dim());
    for (std::size_t i = 0; i < alg->dim(); ++i)
        coords.push_back(random_element(alg->field(), rng));
    return alg->element(std::move(coords));
}

} // namespace rps

#endif // RPS_ALGEBRA_HPP
