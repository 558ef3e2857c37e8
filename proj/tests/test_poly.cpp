#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>
#include <string>

#include "rps/poly.hpp"
#include "rps/rng.hpp"

using namespace rps;

namespace {

AlgebraElement el(const AlgebraPtr& a, const char* label)
{
    return a->basis_element(*a->label_index(label));
}

// Test-local commutative normal form, independent of the library's
// degree-then-serialization order: nested children sorted lexicographically.
std::string oracle_form(const MonomialTree& t)
{
    if (t.is_leaf())
        return "v" + std::to_string(t.var());
    std::string a = oracle_form(t.left());
    std::string b = oracle_form(t.right());
    if (b < a)
        std::swap(a, b);
    return "{" + a + "," + b + "}";
}

// Test-local evaluator: plain recursion on the tree as written.
AlgebraElement oracle_eval(const MonomialTree& t, const std::vector<AlgebraElement>& args)
{
    if (t.is_leaf())
        return args[static_cast<std::size_t>(t.var())];
    return oracle_eval(t.left(), args) * oracle_eval(t.right(), args);
}

MonomialTree random_raw_tree(int vars, int degree, Rng& rng)
{
    if (degree == 1)
        return MonomialTree::leaf(static_cast<int>(rng.below(static_cast<std::uint64_t>(vars))));
    int left = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(degree - 1)));
    return MonomialTree::raw_product(random_raw_tree(vars, left, rng),
                                     random_raw_tree(vars, degree - left, rng));
}

// All multilinear commutative monomials by brute force: every bracketing of
// every permutation, deduplicated by the oracle normal form.
std::set<std::string> oracle_multilinear_forms(int m)
{
    std::vector<int> perm(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i)
        perm[static_cast<std::size_t>(i)] = i;
    std::set<std::string> forms;
    std::function<std::vector<MonomialTree>(const std::vector<int>&)> all_brackets =
        [&](const std::vector<int>& seq) -> std::vector<MonomialTree> {
        std::vector<MonomialTree> out;
        if (seq.size() == 1) {
            out.push_back(MonomialTree::leaf(seq[0]));
            return out;
        }
        for (std::size_t cut = 1; cut < seq.size(); ++cut) {
            std::vector<int> l(seq.begin(), seq.begin() + static_cast<std::ptrdiff_t>(cut));
            std::vector<int> r(seq.begin() + static_cast<std::ptrdiff_t>(cut), seq.end());
            for (const auto& a : all_brackets(l))
                for (const auto& b : all_brackets(r))
                    out.push_back(MonomialTree::raw_product(a, b));
        }
        return out;
    };
    do {
        for (const auto& t : all_brackets(perm))
            forms.insert(oracle_form(t));
    } while (std::next_permutation(perm.begin(), perm.end()));
    return forms;
}

} // namespace

TEST_CASE("parsing the worked examples")
{
    FieldSpec Q = FieldSpec::rationals();
    Polynomial g = parse_polynomial("(x1*x2)*x3 - (x1*x3)*x2", Q, 3);
    REQUIRE(g.is_multilinear());
    REQUIRE(g.terms().size() == 2);

    Polynomial f = parse_polynomial("(x1*x2)*(x3*x4) - (x1*x3)*(x2*x4)", Q, 4);
    REQUIRE(f.is_multilinear());
    REQUIRE(f.terms().size() == 2);

    REQUIRE(parse_polynomial("x2*x1 - x1*x2", Q, 2).is_zero());
    REQUIRE(parse_polynomial("0", Q, 2).is_zero());
}

TEST_CASE("parser error taxonomy")
{
    FieldSpec Q = FieldSpec::rationals();
    REQUIRE_THROWS_MATCHES(parse_polynomial("x1*x2*x3", Q, 3), Error,
                           Catch::Matchers::Predicate<Error>([](const Error& e) {
                               return e.code() == Err::AmbiguousProduct;
                           }));
    REQUIRE_NOTHROW(parse_polynomial("x1*x2*x3", Q, 3, AssocPolicy::Left));
    REQUIRE(parse_polynomial("x1*x2*x3", Q, 3, AssocPolicy::Left) ==
            parse_polynomial("(x1*x2)*x3", Q, 3));
    REQUIRE_THROWS_MATCHES(parse_polynomial("x4", Q, 3), Error,
                           Catch::Matchers::Predicate<Error>([](const Error& e) {
                               return e.code() == Err::UnknownVariable;
                           }));
    REQUIRE_THROWS_AS(parse_polynomial("x0", Q, 3), Error);
    try {
        parse_polynomial("x1 + ", Q, 1);
        FAIL("expected a syntax error");
    }
    catch (const SyntaxError& e) {
        REQUIRE(e.position() == 5);
    }
    REQUIRE_THROWS_AS(parse_polynomial("(x1*x2", Q, 2), SyntaxError);
    REQUIRE_THROWS_AS(parse_polynomial("3", Q, 1), SyntaxError); // constants are not terms
    REQUIRE_THROWS_AS(parse_polynomial("w*x1", Q, 1), Error);    // no omega in Q
}

TEST_CASE("canonical form")
{
    FieldSpec Q = FieldSpec::rationals();
    MonomialTree x1 = MonomialTree::leaf(0), x2 = MonomialTree::leaf(1),
                 x3 = MonomialTree::leaf(2), x4 = MonomialTree::leaf(3);

    SECTION("child order is applied")
    {
        MonomialTree raw = MonomialTree::raw_product(x2, x1);
        REQUIRE_FALSE(raw.is_canonical());
        REQUIRE(canonicalize(raw) == MonomialTree::product(x1, x2));
        MonomialTree swap = MonomialTree::raw_product(MonomialTree::raw_product(x3, x4),
                                                      MonomialTree::raw_product(x1, x2));
        REQUIRE(canonicalize(swap) ==
                MonomialTree::product(MonomialTree::product(x1, x2),
                                      MonomialTree::product(x3, x4)));
        REQUIRE(canonicalize(canonicalize(swap)) == canonicalize(swap)); // idempotent
    }
    SECTION("bracketings stay distinct")
    {
        MonomialTree left = MonomialTree::product(MonomialTree::product(x1, x2), x3);
        MonomialTree right = MonomialTree::product(x1, MonomialTree::product(x2, x3));
        REQUIRE(left != right);
        REQUIRE(MonomialTree::product(x4, left) != MonomialTree::product(x4, right));
    }
}

TEST_CASE("canonicalization preserves evaluation")
{
    FieldSpec F7 = FieldSpec::prime(7);
    AlgebraPtr m = rps_algebra(F7);
    Rng rng(60601);
    for (int i = 0; i < 1000; ++i) {
        int degree = 1 + static_cast<int>(rng.below(5));
        MonomialTree raw = random_raw_tree(3, degree, rng);
        std::vector<AlgebraElement> args;
        for (int v = 0; v < 3; ++v)
            args.push_back(random_algebra_element(m, rng));
        MonomialTree canon = canonicalize(raw);
        REQUIRE(oracle_form(raw) == oracle_form(canon));
        REQUIRE(oracle_eval(raw, args) == oracle_eval(canon, args));
        // equal oracle forms imply equal canonical keys and vice versa
        MonomialTree other = random_raw_tree(3, degree, rng);
        REQUIRE((oracle_form(other) == oracle_form(raw)) ==
                (canonicalize(other) == canon));
    }
}

TEST_CASE("multilinear monomial enumeration")
{
    SECTION("small cases explicitly")
    {
        auto m2 = enumerate_multilinear_monomials(2);
        REQUIRE(m2.size() == 1);
        REQUIRE(m2[0].str() == "x1*x2");
        auto m3 = enumerate_multilinear_monomials(3);
        REQUIRE(m3.size() == 3);
    }
    SECTION("matches the brute-force oracle up to degree 5")
    {
        for (int m = 1; m <= 5; ++m) {
            std::set<std::string> oracle = oracle_multilinear_forms(m);
            std::vector<MonomialTree> got = enumerate_multilinear_monomials(m);
            REQUIRE(got.size() == oracle.size());
            std::set<std::string> got_forms;
            for (const auto& t : got) {
                REQUIRE(t.multilinear_on(m));
                REQUIRE(t.is_canonical());
                got_forms.insert(oracle_form(t));
            }
            REQUIRE(got_forms == oracle);
        }
    }
    SECTION("counts match the closed formula for m = 1..7")
    {
        const std::size_t expected[] = {0, 1, 1, 3, 15, 105, 945, 10395};
        for (int m = 1; m <= 7; ++m) {
            REQUIRE(enumerate_multilinear_monomials(m).size() == expected[m]);
            REQUIRE(count_formula(m, MonomialKind::NonassocComm) == Int(expected[m]));
        }
    }
    SECTION("deterministic order")
    {
        auto a = enumerate_multilinear_monomials(4);
        auto b = enumerate_multilinear_monomials(4);
        for (std::size_t i = 0; i < a.size(); ++i)
            REQUIRE(a[i] == b[i]);
        REQUIRE(std::is_sorted(a.begin(), a.end(),
                               [](const MonomialTree& x, const MonomialTree& y) { return x < y; }));
    }
    SECTION("cap")
    {
        REQUIRE_THROWS_MATCHES(enumerate_multilinear_monomials(11), Error,
                               Catch::Matchers::Predicate<Error>([](const Error& e) {
                                   return e.code() == Err::CapExceeded;
                               }));
    }
}

TEST_CASE("one-variable monomial shapes")
{
    const std::size_t expected[] = {0, 1, 1, 1, 2, 3, 6}; // binary-shape counts by degree
    for (int d = 1; d <= 6; ++d) {
        auto trees = enumerate_unary_monomials(d);
        REQUIRE(trees.size() == expected[d]);
        std::set<std::string> forms;
        for (const auto& t : trees) {
            REQUIRE(t.degree() == d);
            REQUIRE(t.is_canonical());
            forms.insert(oracle_form(t));
        }
        REQUIRE(forms.size() == trees.size());
    }
}

TEST_CASE("counting formulas")
{
    REQUIRE(count_formula(4, MonomialKind::NonassocNoncomm) == Int(120)); // 24 * 5
    for (MonomialKind k : {MonomialKind::AssocNoncomm, MonomialKind::NonassocNoncomm,
                           MonomialKind::NonassocComm})
        REQUIRE(count_formula(1, k) == Int(1));
    REQUIRE(count_formula(5, MonomialKind::NonassocComm) == Int(105)); // 120*14/16
    REQUIRE(count_formula(6, MonomialKind::AssocNoncomm) == Int(720));
}

TEST_CASE("evaluation")
{
    FieldSpec Q = FieldSpec::rationals();
    AlgebraPtr m = rps_algebra(Q);
    AlgebraElement P = el(m, "P"), R = el(m, "R"), S = el(m, "S");

    SECTION("the two readings of the degree-3 example")
    {
        Polynomial gd = parse_polynomial("(x1*x2)*x3 - (x1*x3)*x2", Q, 3);
        REQUIRE(evaluate(gd, {P, R, S}) == S - R);
        Polynomial ga = parse_polynomial("(x1*x2)*x3 - x1*(x2*x3)", Q, 3);
        REQUIRE(evaluate(ga, {P, R, S}) == S - P);
    }
    SECTION("identity polynomial")
    {
        Polynomial id = parse_polynomial("x1", Q, 1);
        AlgebraElement a = parse_element("1+2*P-R", m);
        REQUIRE(evaluate(id, {a}) == a);
    }
    SECTION("one-variable degree-4 powers at P+R-2S")
    {
        AlgebraElement x = parse_element("P+R-2*S", m);
        REQUIRE(evaluate(parse_polynomial("(x1*x1)*(x1*x1)", Q, 1), {x}) ==
                (R - P).scaled(FieldElement::from_integer(Q, 9)));
        REQUIRE(evaluate(parse_polynomial("x1*(x1*(x1*x1))", Q, 1), {x}) ==
                (P - R).scaled(FieldElement::from_integer(Q, 9)));
    }
    SECTION("errors")
    {
        Polynomial g = parse_polynomial("(x1*x2)*x3 - (x1*x3)*x2", Q, 3);
        REQUIRE_THROWS_MATCHES(evaluate(g, {P, R}), Error,
                               Catch::Matchers::Predicate<Error>([](const Error& e) {
                                   return e.code() == Err::ArityMismatch;
                               }));
        AlgebraPtr m7 = rps_algebra(FieldSpec::prime(7));
        REQUIRE_THROWS_MATCHES(
            evaluate(g, {el(m7, "P"), el(m7, "R"), el(m7, "S")}), Error,
            Catch::Matchers::Predicate<Error>(
                [](const Error& e) { return e.code() == Err::FieldMismatch; }));
    }
}

TEST_CASE("substitution")
{
    FieldSpec Q = FieldSpec::rationals();
    AlgebraPtr m = rps_algebra(Q);
    Polynomial g = parse_polynomial("(x1*x2)*x3 - (x1*x3)*x2", Q, 3);
    Polynomial f = parse_polynomial("(x1*x2)*(x3*x4) - (x1*x3)*(x2*x4)", Q, 4);

    SECTION("the 12-variable composition")
    {
        Polynomial fg = substitute_disjoint(f, {g, g, g, g});
        REQUIRE(fg.arity() == 12);
        REQUIRE(fg.is_multilinear());
        REQUIRE(fg.terms().size() == 32); // 2 * 2^4 signed products survive
        for (const auto& [t, c] : fg.terms())
            REQUIRE((c == FieldElement::one(Q) || c == -FieldElement::one(Q)));
    }
    SECTION("identity outer")
    {
        Polynomial q = parse_polynomial("(x1*x2)*x3", Q, 3);
        REQUIRE(substitute(parse_polynomial("x1", Q, 1), {q}) == q);
    }
    SECTION("shared variables break multilinearity")
    {
        Polynomial outer = parse_polynomial("x1*x2", Q, 2);
        Polynomial x1 = parse_polynomial("x1", Q, 1);
        Polynomial r = substitute(outer, {x1, x1});
        REQUIRE(r == parse_polynomial("x1*x1", Q, 1));
        REQUIRE_FALSE(r.is_multilinear());
    }
    SECTION("substitution commutes with evaluation")
    {
        Rng rng(505);
        FieldSpec F7 = FieldSpec::prime(7);
        AlgebraPtr m7 = rps_algebra(F7);
        for (int trial = 0; trial < 50; ++trial) {
            Polynomial outer = random_multilinear_polynomial(F7, 2, rng);
            Polynomial in1 = random_multilinear_polynomial(F7, 3, rng);
            Polynomial in2 = random_multilinear_polynomial(F7, 3, rng);
            Polynomial composed = substitute(outer, {in1, in2});
            std::vector<AlgebraElement> args;
            for (int i = 0; i < 3; ++i)
                args.push_back(random_algebra_element(m7, rng));
            REQUIRE(evaluate(composed, args) ==
                    evaluate(outer, {evaluate(in1, args), evaluate(in2, args)}));
        }
    }
    SECTION("arity mismatch")
    {
        REQUIRE_THROWS_AS(substitute(f, {g, g}), Error);
    }
}

TEST_CASE("dual-number derivatives")
{
    FieldSpec Q = FieldSpec::rationals();
    AlgebraPtr m = rps_algebra(Q);

    SECTION("base cases")
    {
        Polynomial id = parse_polynomial("x1", Q, 1);
        AlgebraElement x = parse_element("P+R-2*S", m);
        AlgebraElement e = el(m, "P");
        auto [v, dv] = evaluate_dual(id, {x}, 0, e);
        REQUIRE(v == x);
        REQUIRE(dv == e);

        Polynomial sq = parse_polynomial("x1*x1", Q, 1);
        auto [v2, dv2] = evaluate_dual(sq, {x}, 0, e);
        REQUIRE(v2 == x * x);
        REQUIRE(dv2 == (x * e).scaled(FieldElement::from_integer(Q, 2)));
    }
    SECTION("degree-4 derivative against a finite-difference oracle over F31")
    {
        FieldSpec F = FieldSpec::prime(31);
        AlgebraPtr mf = rps_algebra(F);
        Polynomial p = parse_polynomial("(x1*x1)*(x1*x1)", F, 1);
        Rng rng(11811);
        for (int trial = 0; trial < 30; ++trial) {
            AlgebraElement x = random_algebra_element(mf, rng);
            AlgebraElement e = random_algebra_element(mf, rng);
            auto [val, der] = evaluate_dual(p, {x}, 0, e);
            // q(t) = p(x + t e) has degree 4 in t; the five-point stencil
            // (-25 q0 + 48 q1 - 36 q2 + 16 q3 - 3 q4)/12 recovers q'(0) exactly
            std::vector<AlgebraElement> q;
            for (int t = 0; t <= 4; ++t)
                q.push_back(evaluate(p, {x + e.scaled(FieldElement::from_integer(F, t))}));
            auto c = [&](long long n) { return FieldElement::from_integer(F, n); };
            AlgebraElement stencil = q[0].scaled(c(-25)) + q[1].scaled(c(48)) +
                                     q[2].scaled(c(-36)) + q[3].scaled(c(16)) +
                                     q[4].scaled(c(-3));
            REQUIRE(der == stencil.scaled(c(12).inv()));
            REQUIRE(val == q[0]);
        }
    }
    SECTION("additive in the direction, product rule on random pairs")
    {
        FieldSpec F = FieldSpec::prime(31);
        AlgebraPtr mf = rps_algebra(F);
        Rng rng(3333);
        Polynomial p = parse_polynomial("(x1*x2)*x1", F, 2, AssocPolicy::Reject);
        for (int trial = 0; trial < 100; ++trial) {
            std::vector<AlgebraElement> args{random_algebra_element(mf, rng),
                                             random_algebra_element(mf, rng)};
            AlgebraElement e1 = random_algebra_element(mf, rng);
            AlgebraElement e2 = random_algebra_element(mf, rng);
            auto d1 = evaluate_dual(p, args, 0, e1).second;
            auto d2 = evaluate_dual(p, args, 0, e2).second;
            auto d12 = evaluate_dual(p, args, 0, e1 + e2).second;
            REQUIRE(d12 == d1 + d2);
        }
    }
}

TEST_CASE("printing is canonical and parse-stable")
{
    for (const char* fname : {"Q(w)", "Fp2:5", "Fp:7", "Q"}) {
        FieldSpec F = FieldSpec::parse(fname);
        Rng rng(8888);
        for (int trial = 0; trial < 150; ++trial) {
            int m = 1 + static_cast<int>(rng.below(4));
            Polynomial p = random_multilinear_polynomial(F, m, rng);
            REQUIRE(parse_polynomial(p.str(), F, m) == p);
        }
    }
    FieldSpec Qw = FieldSpec::parse("Q(w)");
    REQUIRE(Polynomial(Qw, 2).str() == "0");
    REQUIRE(parse_polynomial("0", Qw, 2).is_zero());
}

TEST_CASE("degree predicates")
{
    FieldSpec Q = FieldSpec::rationals();
    Polynomial p = parse_polynomial("(x1*x1)*(x1*x1) + x1*(x1*(x1*x1))", Q, 1);
    REQUIRE(p.is_homogeneous(4));
    REQUIRE_FALSE(p.is_homogeneous(3));
    REQUIRE_FALSE(p.is_multilinear());
    REQUIRE(p.degree() == 4);
    Polynomial mixed = parse_polynomial("x1 + x1*x1", Q, 1);
    REQUIRE_FALSE(mixed.is_homogeneous(1));
    REQUIRE_FALSE(mixed.is_homogeneous(2));
    REQUIRE(Polynomial(Q, 1).is_multilinear()); // the zero polynomial, vacuously
}

TEST_CASE("comment stripping and variable shifting")
{
    REQUIRE(strip_comments("x1 # comment\n+ x2") == "x1  + x2");
    FieldSpec Q = FieldSpec::rationals();
    Polynomial g = parse_polynomial("(x1*x2)*x3", Q, 3);
    Polynomial s = shift_variables(g, 3, 6);
    REQUIRE(s.terms().begin()->first.str() == "x6*(x4*x5)");
}
