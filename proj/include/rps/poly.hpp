#ifndef RPS_POLY_HPP
#define RPS_POLY_HPP

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "rps/algebra.hpp"
#include "rps/field.hpp"
#include "rps/rng.hpp"

namespace rps {

// ---------------------------------------------------------------------------
// Commutative non-associative monomials as binary trees. Bracketing is
// structural: (x1*x2)*x3 and x1*(x2*x3) are different monomials. The
// commutativity quotient is a canonical form: at every product node the
// children are ordered by (degree, serialization), and two monomials are
// equal iff their serializations are equal.

class MonomialTree {
    struct Node {
        int var; // leaf variable index (0-based), or -1 for a product
        std::shared_ptr<const Node> l, r;
        int degree;
        std::vector<int> vars; // sorted leaf multiset
        std::string key;
    };
    using NodePtr = std::shared_ptr<const Node>;

public:
    static MonomialTree leaf(int var)
    {
        if (var < 0)
            throw Error(Err::BadInput, "negative variable index");
        auto n = std::make_shared<Node>();
        n->var = var;
        n->degree = 1;
        n->vars = {var};
        n->key = "x" + std::to_string(var + 1);
        return MonomialTree(std::move(n));
    }

    /// Product with the canonical child order applied at this node.
    static MonomialTree product(const MonomialTree& a, const MonomialTree& b)
    {
        return before(a, b) ? make_product(a, b) : make_product(b, a);
    }

    /// Product exactly as written; use canonicalize() to normalize.
    static MonomialTree raw_product(const MonomialTree& a, const MonomialTree& b)
    {
        return make_product(a, b);
    }

    bool is_leaf() const { return node_->var >= 0; }
    int var() const { return node_->var; }
    MonomialTree left() const { return MonomialTree(node_->l); }
    MonomialTree right() const { return MonomialTree(node_->r); }
    int degree() const { return node_->degree; }
    const std::vector<int>& variables() const { return node_->vars; }
    const std::string& key() const { return node_->key; }
    int max_var() const { return node_->vars.back(); }

    bool is_canonical() const
    {
        if (is_leaf())
            return true;
        return before(left(), right()) && left().is_canonical() && right().is_canonical();
    }

    /// Each of x1..xm exactly once.
    bool multilinear_on(int m) const
    {
        if (node_->degree != m)
            return false;
        for (int i = 0; i < m; ++i)
            if (node_->vars[static_cast<std::size_t>(i)] != i)
                return false;
        return true;
    }

    std::string str() const
    {
        if (is_leaf())
            return node_->key;
        return node_->key.substr(1, node_->key.size() - 2);
    }

    friend bool operator==(const MonomialTree& x, const MonomialTree& y)
    {
        return x.node_->key == y.node_->key;
    }
    friend bool operator!=(const MonomialTree& x, const MonomialTree& y) { return !(x == y); }
    friend bool operator<(const MonomialTree& x, const MonomialTree& y)
    {
        if (x.node_->degree != y.node_->degree)
            return x.node_->degree < y.node_->degree;
        return x.node_->key < y.node_->key;
    }

private:
    explicit MonomialTree(NodePtr n) : node_(std::move(n)) {}

    static bool before(const MonomialTree& a, const MonomialTree& b)
    {
        return a < b || a.node_->key == b.node_->key;
    }

    static MonomialTree make_product(const MonomialTree& a, const MonomialTree& b)
    {
        auto n = std::make_shared<Node>();
        n->var = -1;
        n->l = a.node_;
        n->r = b.node_;
        n->degree = a.degree() + b.degree();
        n->vars.reserve(n->degree);
        std::merge(a.variables().begin(), a.variables().end(), b.variables().begin(),
                   b.variables().end(), std::back_inserter(n->vars));
        n->key = "(" + a.key() + "*" + b.key() + ")";
        return MonomialTree(std::move(n));
    }

    NodePtr node_;
};

/// Idempotent; preserves evaluation in every commutative algebra.
inline MonomialTree canonicalize(const MonomialTree& t)
{
    if (t.is_leaf())
        return t;
    return MonomialTree::product(canonicalize(t.left()), canonicalize(t.right()));
}

// ---------------------------------------------------------------------------

/// Sparse linear combination of canonical monomials. Terms with zero
/// coefficient are never stored; inserting through add_term merges via the
/// canonical key, so commutatively equal inputs collapse.
class Polynomial {
public:
    Polynomial(FieldSpec field, int arity) : field_(std::move(field)), arity_(arity)
    {
        if (arity < 0)
            throw Error(Err::BadInput, "negative arity");
    }

    static Polynomial variable(const FieldSpec& field, int arity, int var)
    {
        Polynomial p(field, arity);
        p.add_term(MonomialTree::leaf(var), FieldElement::one(field));
        return p;
    }

    const FieldSpec& field() const { return field_; }
    int arity() const { return arity_; }
    const std::map<MonomialTree, FieldElement>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    void add_term(const MonomialTree& tree, const FieldElement& coeff)
    {
        if (coeff.spec() != field_)
            throw Error(Err::FieldMismatch, "coefficient from the wrong field");
        if (coeff.is_zero())
            return;
        MonomialTree t = canonicalize(tree);
        if (t.max_var() >= arity_)
            throw Error(Err::UnknownVariable,
                        "monomial uses x" + std::to_string(t.max_var() + 1) + " but arity is " +
                            std::to_string(arity_));
        auto it = terms_.find(t);
        if (it == terms_.end()) {
            terms_.emplace(t, coeff);
        }
        else {
            FieldElement s = it->second + coeff;
            if (s.is_zero())
                terms_.erase(it);
            else
                it->second = s;
        }
    }

    friend Polynomial operator+(const Polynomial& x, const Polynomial& y)
    {
        check_compatible(x, y);
        Polynomial out = x;
        for (const auto& [t, c] : y.terms_)
            out.add_term(t, c);
        return out;
    }

    friend Polynomial operator-(const Polynomial& x, const Polynomial& y)
    {
        check_compatible(x, y);
        Polynomial out = x;
        for (const auto& [t, c] : y.terms_)
            out.add_term(t, -c);
        return out;
    }

    Polynomial scaled(const FieldElement& s) const
    {
        Polynomial out(field_, arity_);
        if (s.is_zero())
            return out;
        for (const auto& [t, c] : terms_)
            out.add_term(t, s * c);
        return out;
    }

    /// Bilinear product: all pairwise tree products, canonicalized and merged.
    Polynomial multiplied(const Polynomial& y) const
    {
        check_compatible(*this, y);
        Polynomial out(field_, arity_);
        for (const auto& [t1, c1] : terms_)
            for (const auto& [t2, c2] : y.terms_)
                out.add_term(MonomialTree::product(t1, t2), c1 * c2);
        return out;
    }

    /// Every monomial of degree arity containing each variable exactly once.
    /// The zero polynomial is vacuously multilinear.
    bool is_multilinear() const
    {
        for (const auto& [t, c] : terms_)
            if (!t.multilinear_on(arity_))
                return false;
        return true;
    }

    bool is_homogeneous(int d) const
    {
        for (const auto& [t, c] : terms_)
            if (t.degree() != d)
                return false;
        return true;
    }

    int degree() const
    {
        int d = 0;
        for (const auto& [t, c] : terms_)
            d = std::max(d, t.degree());
        return d;
    }

    std::string str() const
    {
        if (terms_.empty())
            return "0";
        std::string out;
        for (const auto& [t, c] : terms_) {
            std::string piece;
            if (c.is_one()) {
                piece = t.str();
            }
            else if ((-c).is_one()) {
                piece = "-" + t.str();
            }
            else {
                std::string cs = c.str();
                if (cs.find_first_of("+-", 1) != std::string::npos)
                    cs = "(" + cs + ")";
                piece = cs + "*" + t.str();
            }
            if (out.empty())
                out = piece;
            else if (piece[0] == '-')
                out += "-" + piece.substr(1);
            else
                out += "+" + piece;
        }
        return out;
    }

private:
    static void check_compatible(const Polynomial& x, const Polynomial& y)
    {
        if (x.field_ != y.field_)
            throw Error(Err::FieldMismatch, "polynomials over different fields");
        if (x.arity_ != y.arity_)
            throw Error(Err::ArityMismatch, "polynomials of different arity");
    }

    FieldSpec field_;
    int arity_;
    std::map<MonomialTree, FieldElement> terms_;
};

inline bool operator==(const Polynomial& x, const Polynomial& y)
{
    if (x.field() != y.field() || x.arity() != y.arity() ||
        x.terms().size() != y.terms().size())
        return false;
    auto it = y.terms().begin();
    for (const auto& [t, c] : x.terms()) {
        if (t != it->first || c != it->second)
            return false;
        ++it;
    }
    return true;
}
inline bool operator!=(const Polynomial& x, const Polynomial& y) { return !(x == y); }

// ---------------------------------------------------------------------------
// Parsing. Grammar:
//   poly   := '0' | ['-'] term (('+'|'-') term)*
//   term   := atom ('*' atom)*
//   atom   := scalar | var | '(' poly ')'
//   scalar := uint ['/' uint] | 'w' | 'w2' | '(' scalar-sum ')'
//   var    := 'x' uint
// Scalar atoms multiply into the term's coefficient. A parenthesized group
// containing no variable is a scalar. Chains of three or more variable
// factors without brackets are rejected unless the left-associativity policy
// is selected.

enum class AssocPolicy { Reject, Left };

namespace detail {

class PolyParser {
public:
    PolyParser(std::string_view text, const FieldSpec& field, int arity, AssocPolicy policy)
        : text_(text), field_(field), arity_(arity), policy_(policy)
    {
    }

    Polynomial parse()
    {
        skip_ws();
        // allow the canonical rendering of the zero polynomial
        if (text_.substr(pos_) == "0")
            return Polynomial(field_, arity_ > 0 ? arity_ : 0);
        if (arity_ == 0)
            arity_ = scan_max_var(); // inferred from the largest index used
        Polynomial acc = parse_sum();
        skip_ws();
        if (pos_ != text_.size())
            throw SyntaxError(pos_, "trailing input");
        return acc;
    }

private:
    int scan_max_var() const
    {
        long max_idx = 0;
        for (std::size_t i = 0; i < text_.size(); ++i) {
            if (text_[i] != 'x')
                continue;
            long idx = 0;
            std::size_t j = i + 1;
            while (j < text_.size() && std::isdigit(static_cast<unsigned char>(text_[j])) &&
                   idx <= 1000000)
                idx = idx * 10 + (text_[j++] - '0');
            max_idx = std::max(max_idx, idx);
        }
        return static_cast<int>(max_idx);
    }

    Polynomial parse_sum()
    {
        int work_arity = arity_;
        Polynomial acc(field_, work_arity);
        bool negative = false;
        skip_ws();
        if (peek() == '-') {
            negative = true;
            ++pos_;
        }
        for (;;) {
            Polynomial t = parse_term(work_arity);
            acc = negative ? acc - t : acc + t;
            skip_ws();
            char c = peek();
            if (c == '+' || c == '-') {
                negative = c == '-';
                ++pos_;
            }
            else {
                return acc;
            }
        }
    }

    Polynomial parse_term(int work_arity)
    {
        FieldElement coeff = FieldElement::one(field_);
        std::vector<Polynomial> factors;
        std::size_t second_star = 0;
        for (;;) {
            skip_ws();
            std::size_t at = pos_;
            char c = peek();
            if (c == 'x') {
                int v = parse_var();
                factors.push_back(Polynomial::variable(field_, work_arity, v));
            }
            else if (c == '(') {
                std::size_t close = matching_paren(at);
                std::string_view inner = text_.substr(at + 1, close - at - 1);
                if (inner.find('x') != std::string_view::npos) {
                    ++pos_;
                    Polynomial sub = parse_sum();
                    skip_ws();
                    if (peek() != ')')
                        throw SyntaxError(pos_, "expected ')'");
                    ++pos_;
                    factors.push_back(std::move(sub));
                }
                else {
                    coeff = coeff * parse_scalar_group(inner, at + 1);
                    pos_ = close + 1;
                }
            }
            else if (c == 'w' || std::isdigit(static_cast<unsigned char>(c))) {
                coeff = coeff * parse_scalar_atom();
            }
            else {
                throw SyntaxError(pos_, "expected variable, scalar, or '('");
            }
            skip_ws();
            if (peek() == '*') {
                if (factors.size() == 2 && second_star == 0)
                    second_star = pos_;
                ++pos_;
                continue;
            }
            break;
        }
        if (factors.empty())
            throw SyntaxError(pos_, "term has no variable factor");
        Polynomial result = factors[0];
        if (factors.size() == 2) {
            result = result.multiplied(factors[1]);
        }
        else if (factors.size() > 2) {
            if (policy_ != AssocPolicy::Left)
                throw Error(Err::AmbiguousProduct,
                            "product of " + std::to_string(factors.size()) +
                                " factors needs brackets (or the left-associativity policy), near "
                                "offset " +
                                std::to_string(second_star));
            for (std::size_t i = 1; i < factors.size(); ++i)
                result = result.multiplied(factors[i]);
        }
        return result.scaled(coeff);
    }

    int parse_var()
    {
        std::size_t at = pos_;
        ++pos_; // 'x'
        if (!std::isdigit(static_cast<unsigned char>(peek())))
            throw SyntaxError(pos_, "expected variable index after 'x'");
        long idx = 0;
        while (std::isdigit(static_cast<unsigned char>(peek()))) {
            idx = idx * 10 + (peek() - '0');
            if (idx > 1000000)
                throw SyntaxError(at, "variable index out of range");
            ++pos_;
        }
        if (idx < 1)
            throw Error(Err::UnknownVariable, "variables are x1, x2, ...");
        if (arity_ > 0 && idx > arity_)
            throw Error(Err::UnknownVariable, "x" + std::to_string(idx) +
                                                  " exceeds arity " + std::to_string(arity_));
        return static_cast<int>(idx - 1);
    }

    FieldElement parse_scalar_atom()
    {
        char c = peek();
        if (c == 'w') {
            ++pos_;
            FieldElement w = omega_of(field_);
            if (peek() == '2') {
                ++pos_;
                if (std::isalnum(static_cast<unsigned char>(peek())))
                    throw SyntaxError(pos_, "bad scalar token");
                return w * w;
            }
            return w;
        }
        std::size_t start = pos_;
        while (std::isdigit(static_cast<unsigned char>(peek())))
            ++pos_;
        Int num(std::string(text_.substr(start, pos_ - start)));
        skip_ws();
        if (peek() == '/') {
            std::size_t slash = pos_;
            ++pos_;
            skip_ws();
            if (!std::isdigit(static_cast<unsigned char>(peek())))
                throw SyntaxError(slash, "expected denominator");
            std::size_t dstart = pos_;
            while (std::isdigit(static_cast<unsigned char>(peek())))
                ++pos_;
            Int den(std::string(text_.substr(dstart, pos_ - dstart)));
            if (den.is_zero())
                throw Error(Err::DivisionByZero, "zero denominator");
            return FieldElement::from_rational(field_, Rational(num, den));
        }
        return FieldElement::from_integer(field_, num);
    }

    FieldElement parse_scalar_group(std::string_view inner, std::size_t offset)
    {
        try {
            return parse_scalar(inner, field_);
        }
        catch (const SyntaxError& e) {
            throw SyntaxError(offset + e.position(), "bad scalar group");
        }
    }

    std::size_t matching_paren(std::size_t open) const
    {
        int depth = 0;
        for (std::size_t i = open; i < text_.size(); ++i) {
            if (text_[i] == '(')
                ++depth;
            else if (text_[i] == ')' && --depth == 0)
                return i;
        }
        throw SyntaxError(open, "unbalanced '('");
    }

    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

    void skip_ws()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    std::string_view text_;
    const FieldSpec& field_;
    int arity_;
    AssocPolicy policy_;
    std::size_t pos_ = 0;
};

} // namespace detail

/// arity 0 means "infer from the largest variable index used".
inline Polynomial parse_polynomial(std::string_view text, const FieldSpec& field, int arity = 0,
                                   AssocPolicy policy = AssocPolicy::Reject)
{
    return detail::PolyParser(text, field, arity, policy).parse();
}

/// Strips '#' comments (to end of line); for polynomial files.
inline std::string strip_comments(std::string_view text)
{
    std::string out;
    bool in_comment = false;
    for (char c : text) {
        if (c == '#')
            in_comment = true;
        if (c == '\n')
            in_comment = false;
        if (!in_comment)
            out += c == '\n' ? ' ' : c;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Enumeration and counting.

namespace detail {

inline const std::vector<MonomialTree>& trees_on(const std::vector<int>& vars,
                                                 std::map<std::vector<int>, std::vector<MonomialTree>>& memo)
{
    auto it = memo.find(vars);
    if (it != memo.end())
        return it->second;
    std::vector<MonomialTree> out;
    std::size_t n = vars.size();
    if (n == 1) {
        out.push_back(MonomialTree::leaf(vars[0]));
    }
    else {
        // split into {A, B} with vars[0] in A; each unordered split appears once
        for (std::uint32_t mask = 1; mask < (1u << n) - 1; mask += 2) {
            std::vector<int> a, b;
            for (std::size_t i = 0; i < n; ++i)
                ((mask >> i) & 1 ? a : b).push_back(vars[i]);
            for (const auto& ta : trees_on(a, memo))
                for (const auto& tb : trees_on(b, memo))
                    out.push_back(MonomialTree::product(ta, tb));
        }
    }
    auto res = memo.emplace(vars, std::move(out));
    return res.first->second;
}

} // namespace detail

/// All distinct canonical multilinear commutative non-associative monomials
/// on x1..xm, sorted by (degree, serialization).
inline std::vector<MonomialTree> enumerate_multilinear_monomials(int m, int cap = 10)
{
    if (m < 1)
        throw Error(Err::BadInput, "need at least one variable");
    if (m > cap)
        throw Error(Err::CapExceeded, "degree " + std::to_string(m) + " exceeds cap " +
                                          std::to_string(cap));
    std::vector<int> vars;
    for (int i = 0; i < m; ++i)
        vars.push_back(i);
    std::map<std::vector<int>, std::vector<MonomialTree>> memo;
    std::vector<MonomialTree> out = detail::trees_on(vars, memo);
    std::sort(out.begin(), out.end());
    return out;
}

/// All distinct canonical monomials in the single variable x1 of the given
/// degree (Wedderburn-Etherington shapes).
inline std::vector<MonomialTree> enumerate_unary_monomials(int degree, int cap = 16)
{
    if (degree < 1)
        throw Error(Err::BadInput, "degree must be positive");
    if (degree > cap)
        throw Error(Err::CapExceeded, "degree exceeds cap");
    std::vector<std::vector<MonomialTree>> by_degree(static_cast<std::size_t>(degree) + 1);
    by_degree[1].push_back(MonomialTree::leaf(0));
    for (int n = 2; n <= degree; ++n) {
        std::set<MonomialTree> seen;
        for (int k = 1; k <= n / 2; ++k) {
            for (const auto& a : by_degree[static_cast<std::size_t>(k)])
                for (const auto& b : by_degree[static_cast<std::size_t>(n - k)])
                    seen.insert(MonomialTree::product(a, b));
        }
        by_degree[static_cast<std::size_t>(n)].assign(seen.begin(), seen.end());
    }
    return by_degree[static_cast<std::size_t>(degree)];
}

enum class MonomialKind { AssocNoncomm, NonassocNoncomm, NonassocComm };

/// Multilinear monomial counts of degree m: m! for associative
/// non-commutative, m!*C(m-1) for non-associative non-commutative, and
/// m!*C(m-1)*2^(1-m) for non-associative commutative (C is the Catalan
/// number counting bracketings).
inline Int count_formula(int m, MonomialKind kind)
{
    if (m < 1)
        throw Error(Err::BadInput, "degree must be positive");
    Int fact = 1;
    for (int i = 2; i <= m; ++i)
        fact *= i;
    if (kind == MonomialKind::AssocNoncomm)
        return fact;
    // C_{m-1} = binomial(2m-2, m-1) / m
    Int binom = 1;
    for (int i = 1; i <= m - 1; ++i)
        binom = binom * (m - 1 + i) / i;
    Int catalan = binom / m;
    if (kind == MonomialKind::NonassocNoncomm)
        return fact * catalan;
    Int total = fact * catalan;
    Int pow2 = Int(1) << (m - 1);
    if (total % pow2 != 0)
        throw Error(Err::BadInput, "count not divisible by 2^(m-1)"); // unreachable
    return total / pow2;
}

// ---------------------------------------------------------------------------
// Evaluation.

namespace detail {

inline AlgebraElement eval_tree(const MonomialTree& t,
                                const std::vector<AlgebraElement>& args,
                                std::unordered_map<std::string, AlgebraElement>& memo)
{
    if (t.is_leaf())
        return args[static_cast<std::size_t>(t.var())];
    auto it = memo.find(t.key());
    if (it != memo.end())
        return it->second;
    AlgebraElement v = eval_tree(t.left(), args, memo) * eval_tree(t.right(), args, memo);
    memo.emplace(t.key(), v);
    return v;
}

} // namespace detail

/// Structural recursion on each monomial tree, then the linear combination.
inline AlgebraElement evaluate(const Polynomial& p, const std::vector<AlgebraElement>& args)
{
    if (static_cast<int>(args.size()) != p.arity())
        throw Error(Err::ArityMismatch, "expected " + std::to_string(p.arity()) +
                                            " arguments, got " + std::to_string(args.size()));
    if (!args.empty()) {
        for (const auto& a : args)
            if (*a.algebra() != *args[0].algebra())
                throw Error(Err::FieldMismatch, "arguments from different algebras");
        if (args[0].field() != p.field())
            throw Error(Err::FieldMismatch, "polynomial over " + p.field().name() +
                                                " evaluated on an algebra over " +
                                                args[0].field().name());
    }
    else {
        throw Error(Err::ArityMismatch, "evaluation needs at least one argument");
    }
    AlgebraElement acc = args[0].algebra()->zero_element();
    std::unordered_map<std::string, AlgebraElement> memo;
    for (const auto& [t, c] : p.terms())
        acc = acc + detail::eval_tree(t, args, memo).scaled(c);
    return acc;
}

namespace detail {

struct Dual {
    AlgebraElement val;
    AlgebraElement der;
};

inline Dual eval_tree_dual(const MonomialTree& t, const std::vector<Dual>& args,
                           std::unordered_map<std::string, Dual>& memo)
{
    if (t.is_leaf())
        return args[static_cast<std::size_t>(t.var())];
    auto it = memo.find(t.key());
    if (it != memo.end())
        return it->second;
    Dual a = eval_tree_dual(t.left(), args, memo);
    Dual b = eval_tree_dual(t.right(), args, memo);
    Dual v{a.val * b.val, a.val * b.der + a.der * b.val};
    memo.emplace(t.key(), v);
    return v;
}

} // namespace detail

/// Evaluates over the dual numbers F[eps]/(eps^2) with argument i perturbed
/// by eps*direction; returns the value and the exact directional derivative.
inline std::pair<AlgebraElement, AlgebraElement> evaluate_dual(const Polynomial& p,
                                                               const std::vector<AlgebraElement>& args,
                                                               int arg_index,
                                                               const AlgebraElement& direction)
{
    if (static_cast<int>(args.size()) != p.arity())
        throw Error(Err::ArityMismatch, "expected " + std::to_string(p.arity()) + " arguments");
    if (arg_index < 0 || arg_index >= p.arity())
        throw Error(Err::BadInput, "direction index out of range");
    std::vector<detail::Dual> duals;
    duals.reserve(args.size());
    AlgebraElement zero = args[0].algebra()->zero_element();
    for (std::size_t i = 0; i < args.size(); ++i)
        duals.push_back({args[i], static_cast<int>(i) == arg_index ? direction : zero});
    AlgebraElement val = zero;
    AlgebraElement der = zero;
    std::unordered_map<std::string, detail::Dual> memo;
    for (const auto& [t, c] : p.terms()) {
        detail::Dual d = detail::eval_tree_dual(t, duals, memo);
        val = val + d.val.scaled(c);
        der = der + d.der.scaled(c);
    }
    return {std::move(val), std::move(der)};
}

// ---------------------------------------------------------------------------
// Substitution.

namespace detail {

inline Polynomial substitute_tree(const MonomialTree& t, const std::vector<Polynomial>& inners,
                                  std::unordered_map<std::string, Polynomial>& memo)
{
    if (t.is_leaf())
        return inners[static_cast<std::size_t>(t.var())];
    auto it = memo.find(t.key());
    if (it != memo.end())
        return it->second;
    Polynomial v = substitute_tree(t.left(), inners, memo)
                       .multiplied(substitute_tree(t.right(), inners, memo));
    memo.emplace(t.key(), v);
    return v;
}

} // namespace detail

/// Formal composition: replaces xi by inners[i], expands, and canonicalizes.
/// All inner polynomials share one ambient variable set (use shift_variables
/// or substitute_disjoint for fresh blocks).
inline Polynomial substitute(const Polynomial& outer, const std::vector<Polynomial>& inners)
{
    if (static_cast<int>(inners.size()) != outer.arity())
        throw Error(Err::ArityMismatch, "outer arity " + std::to_string(outer.arity()) +
                                            " but " + std::to_string(inners.size()) + " inners");
    if (inners.empty())
        return Polynomial(outer.field(), 0);
    int arity = inners[0].arity();
    for (const auto& q : inners) {
        if (q.arity() != arity)
            throw Error(Err::ArityMismatch, "inner polynomials of different arity");
        if (q.field() != outer.field())
            throw Error(Err::FieldMismatch, "inner polynomial over a different field");
    }
    Polynomial acc(outer.field(), arity);
    std::unordered_map<std::string, Polynomial> memo;
    for (const auto& [t, c] : outer.terms())
        acc = acc + detail::substitute_tree(t, inners, memo).scaled(c);
    return acc;
}

inline MonomialTree shift_tree(const MonomialTree& t, int offset)
{
    if (t.is_leaf())
        return MonomialTree::leaf(t.var() + offset);
    return MonomialTree::product(shift_tree(t.left(), offset), shift_tree(t.right(), offset));
}

inline Polynomial shift_variables(const Polynomial& p, int offset, int new_arity)
{
    Polynomial out(p.field(), new_arity);
    for (const auto& [t, c] : p.terms())
        out.add_term(shift_tree(t, offset), c);
    return out;
}

/// Composition with fresh variable blocks: inners[k] is rewritten onto its
/// own consecutive block, so the result arity is the sum of inner arities.
inline Polynomial substitute_disjoint(const Polynomial& outer,
                                      const std::vector<Polynomial>& inners)
{
    if (static_cast<int>(inners.size()) != outer.arity())
        throw Error(Err::ArityMismatch, "outer arity does not match inner count");
    int total = 0;
    for (const auto& q : inners)
        total += q.arity();
    std::vector<Polynomial> shifted;
    shifted.reserve(inners.size());
    int offset = 0;
    for (const auto& q : inners) {
        shifted.push_back(shift_variables(q, offset, total));
        offset += q.arity();
    }
    return substitute(outer, shifted);
}

// ---------------------------------------------------------------------------

/// Random multilinear polynomial of degree m: every canonical monomial gets
/// an independent random coefficient (zero allowed, so the support varies).
inline Polynomial random_multilinear_polynomial(const FieldSpec& field, int m, Rng& rng)
{
    Polynomial p(field, m);
    for (const auto& t : enumerate_multilinear_monomials(m))
        p.add_term(t, random_element(field, rng));
    return p;
}

} // namespace rps

#endif // RPS_POLY_HPP
