#ifndef RPS_VERIFY_HPP
#define RPS_VERIFY_HPP

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "rps/algebra.hpp"
#include "rps/classify.hpp"
#include "rps/pi.hpp"
#include "rps/poly.hpp"
#include "rps/rng.hpp"

namespace rps {

enum class ClaimStatus { Pass, Fail, Recorded };

inline const char* claim_status_name(ClaimStatus s)
{
    switch (s) {
        case ClaimStatus::Pass: return "PASS";
        case ClaimStatus::Fail: return "FAIL";
        case ClaimStatus::Recorded: return "RECORDED";
    }
    return "?";
}

struct ClaimResult {
    std::string id;
    std::string title;
    ClaimStatus status;
    std::string details;
};

struct VerifyOptions {
    std::uint64_t seed = 12345;
    int threads = 2;
    bool exhaustive_12var = false; // full 4^12 sweep instead of the seeded spot check
};

struct VerifyReport {
    std::vector<ClaimResult> claims;
    bool overall_pass = true;
};

// ---------------------------------------------------------------------------
// Individual claim checks. Each returns a ClaimResult and never throws; an
// exception inside a check is converted to a failure. The algebra-taking
// variants exist so a corrupted structure table can be injected in tests.

namespace verify_detail {

template <class Fn>
ClaimResult guard(const std::string& id, const std::string& title, Fn&& fn)
{
    try {
        return fn();
    }
    catch (const std::exception& e) {
        return ClaimResult{id, title, ClaimStatus::Fail, e.what()};
    }
}

inline ClaimResult pass(const std::string& id, const std::string& title, std::string details)
{
    return ClaimResult{id, title, ClaimStatus::Pass, std::move(details)};
}

inline ClaimResult fail(const std::string& id, const std::string& title, std::string details)
{
    return ClaimResult{id, title, ClaimStatus::Fail, std::move(details)};
}

inline Polynomial g_displayed(const FieldSpec& F)
{
    return parse_polynomial("(x1*x2)*x3-(x1*x3)*x2", F, 3);
}

inline Polynomial g_associator(const FieldSpec& F)
{
    return parse_polynomial("(x1*x2)*x3-x1*(x2*x3)", F, 3);
}

inline Polynomial f_pi(const FieldSpec& F)
{
    return parse_polynomial("(x1*x2)*(x3*x4)-(x1*x3)*(x2*x4)", F, 4);
}

} // namespace verify_detail

/// C1 (parameterized by the algebra so a corrupted table can be fed in).
inline ClaimResult claim_multiplication_table(const AlgebraPtr& m)
{
    using namespace verify_detail;
    const std::string id = "C1", title = "multiplication table and unit";
    return guard(id, title, [&]() {
        auto t0 = std::chrono::steady_clock::now();
        auto el = [&](const char* l) { return m->basis_element(*m->label_index(l)); };
        AlgebraElement P = el("P"), R = el("R"), S = el("S"), one = el("1");
        bool ok = R * P == P && P * S == S && S * R == R;
        for (const char* l : {"1", "P", "R", "S"}) {
            AlgebraElement e = el(l);
            ok = ok && e * e == e && one * e == e && e * one == e;
        }
        auto t1 = std::chrono::steady_clock::now();
        double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        if (!ok)
            return fail(id, title, "a product or unit law does not match");
        if (ms >= 1.0)
            return fail(id, title, "table check exceeded 1 ms");
        return pass(id, title, "R*P=P, P*S=S, S*R=R, idempotents, unit law; under 1 ms");
    });
}

/// C4 relations, parameterized for fault injection: U, V, W are recomputed
/// from the field but multiplied in the given algebra. The W-action
/// coefficients are checked exactly as stated in the criterion; on the true
/// table that check fails, and the diagnostic reports the computed action
/// (see claim_good_basis_computed for the relations that do hold).
inline ClaimResult claim_good_basis(const AlgebraPtr& m)
{
    using namespace verify_detail;
    const std::string id = "C4", title = "good basis relations";
    return guard(id, title, [&]() {
        const FieldSpec& F = m->field();
        GoodBasis gb = good_basis(F);
        auto lift = [&](const AlgebraElement& x) { return m->element(x.coords()); };
        AlgebraElement U = lift(gb.U), V = lift(gb.V), W = lift(gb.W);
        FieldElement w = omega_of(F);
        FieldElement w2 = w * w;
        FieldElement three_inv = FieldElement::from_integer(F, 3).inv();
        FieldElement two = FieldElement::from_integer(F, 2);
        FieldElement cu = (FieldElement::one(F) + two * w) * three_inv;
        FieldElement cv = (FieldElement::one(F) + two * w2) * three_inv;
        if (U * U != V)
            return fail(id, title, "U^2 != V over " + F.name());
        if (V * V != U)
            return fail(id, title, "V^2 != U over " + F.name());
        if (!(U * V).is_zero() || !(V * U).is_zero())
            return fail(id, title, "U*V != 0 over " + F.name());
        if (W * W != W)
            return fail(id, title, "W^2 != W over " + F.name());
        auto action_detail = [&](const char* name, const AlgebraElement& x,
                                 const AlgebraElement& wx, const FieldElement& stated,
                                 const FieldElement& computed) {
            std::string s = "W*" + std::string(name) + " = (" + computed.str() + ")*" + name +
                            " over " + F.name() + ", not the stated factor " + stated.str() +
                            " (which is the normalization constant of " + name + ")";
            if (wx != x.scaled(computed))
                s = "W*" + std::string(name) + " is not proportional to " + name + " over " +
                    F.name();
            return s;
        };
        FieldElement tu = (two + w) * three_inv;   // the computed action on U
        FieldElement tv = (two + w2) * three_inv;  // and on V
        if (W * U != U.scaled(cu))
            return fail(id, title, action_detail("U", U, W * U, cu, tu));
        if (W * V != V.scaled(cv))
            return fail(id, title, action_detail("V", V, W * V, cv, tv));
        std::vector<std::vector<FieldElement>> rows{U.coords(), V.coords(), W.coords()};
        if (matrix_rank(F, rows, m->dim()) != 3)
            return fail(id, title, "U, V, W are linearly dependent over " + F.name());
        return pass(id, title,
                    "U^2=V, V^2=U, UV=0, W^2=W, WU=((1+2w)/3)U, WV=((1+2w2)/3)V over " + F.name());
    });
}

/// The good-basis relations that hold on the true table, with the computed
/// W-action (2+w)/3 on U and (2+w^2)/3 on V (verified independently; the
/// stated (1+2w)/3, (1+2w2)/3 coincide with U's and V's normalization
/// constants and do not match the multiplication).
inline ClaimResult claim_good_basis_computed(const AlgebraPtr& m)
{
    using namespace verify_detail;
    const std::string id = "C4*", title = "good basis relations (computed W-action)";
    return guard(id, title, [&]() {
        const FieldSpec& F = m->field();
        GoodBasis gb = good_basis(F);
        auto lift = [&](const AlgebraElement& x) { return m->element(x.coords()); };
        AlgebraElement U = lift(gb.U), V = lift(gb.V), W = lift(gb.W);
        FieldElement w = omega_of(F);
        FieldElement three_inv = FieldElement::from_integer(F, 3).inv();
        FieldElement two = FieldElement::from_integer(F, 2);
        FieldElement tu = (two + w) * three_inv;
        FieldElement tv = (two + w * w) * three_inv;
        bool ok = U * U == V && V * V == U && (U * V).is_zero() && W * W == W &&
                  W * U == U.scaled(tu) && W * V == V.scaled(tv);
        std::vector<std::vector<FieldElement>> rows{U.coords(), V.coords(), W.coords()};
        ok = ok && matrix_rank(F, rows, m->dim()) == 3;
        if (!ok)
            return fail(id, title, "a computed relation fails over " + F.name());
        return pass(id, title,
                    "U^2=V, V^2=U, UV=0, W^2=W, WU=((2+w)/3)U, WV=((2+w2)/3)V, and U, V, W "
                    "independent over " +
                        F.name());
    });
}

// ---------------------------------------------------------------------------

/// Runs the whole claim checklist. Theorem-backed claims are pass/fail;
/// experiments are only recorded. Everything is reproducible from the seed.
inline VerifyReport run_verify(const VerifyOptions& opts = {})
{
    using namespace verify_detail;
    VerifyReport report;
    auto add = [&](ClaimResult r) {
        if (r.status == ClaimStatus::Fail)
            report.overall_pass = false;
        report.claims.push_back(std::move(r));
    };

    FieldSpec Q = FieldSpec::rationals();
    FieldSpec Qw = FieldSpec::omega_extension(Q);
    FieldSpec F7 = FieldSpec::prime(7);
    AlgebraPtr mq = rps_algebra(Q);

    // C1: multiplication table
    add(claim_multiplication_table(mq));

    // C2: non-associativity witness
    add(guard("C2", "non-associativity witness", [&]() {
        auto el = [&](const char* l) { return mq->basis_element(*mq->label_index(l)); };
        AlgebraElement P = el("P"), R = el("R"), S = el("S");
        AlgebraElement lhs = (P * R) * S;
        AlgebraElement rhs = P * (R * S);
        if (lhs == rhs)
            return fail("C2", "non-associativity witness", "(P*R)*S == P*(R*S)");
        if (lhs != S || rhs != P)
            return fail("C2", "non-associativity witness",
                        "expected (P*R)*S = S and P*(R*S) = P, got " + lhs.str() + " and " +
                            rhs.str());
        return pass("C2", "non-associativity witness", "(P*R)*S = S differs from P*(R*S) = P");
    }));

    // C3: Sc and trace are homomorphisms (1000 seeded pairs per field)
    add(guard("C3", "Sc and trace multiplicative", [&]() {
        for (const FieldSpec& F : {F7, Q, Qw}) {
            AlgebraPtr m = rps_algebra(F);
            Homomorphism tr = trace_hom(m);
            Homomorphism sc = sc_hom(m);
            Rng rng(opts.seed ^ 0x5c0fULL);
            for (int i = 0; i < 1000; ++i) {
                AlgebraElement x = random_algebra_element(m, rng);
                AlgebraElement y = random_algebra_element(m, rng);
                if (tr(x * y) != tr(x) * tr(y))
                    return fail("C3", "Sc and trace multiplicative",
                                "trace(xy) != trace(x)trace(y) over " + F.name() + " at x=" +
                                    x.str() + ", y=" + y.str());
                if (sc(x * y) != sc(x) * sc(y))
                    return fail("C3", "Sc and trace multiplicative",
                                "Sc(xy) != Sc(x)Sc(y) over " + F.name());
                if (tr(x + y) != tr(x) + tr(y) || sc(x + y) != sc(x) + sc(y))
                    return fail("C3", "Sc and trace multiplicative",
                                "linearity fails over " + F.name());
            }
        }
        return pass("C3", "Sc and trace multiplicative",
                    "1000 seeded pairs over each of Fp:7, Q, Q(w): exact equality");
    }));

    // C4: good basis over Q(w) and F7, exactly as stated. The W-action
    // coefficients as stated do not hold on the defined table (they repeat
    // the normalization constants of U and V); the check is kept faithful
    // and red, and C4* documents the relations that do hold.
    for (const FieldSpec& F : {Qw, F7}) {
        ClaimResult r = claim_good_basis(rps_algebra(F));
        ClaimResult rc = claim_good_basis_computed(rps_algebra(F));
        if (F == F7) {
            r.id = "C4b";
            rc.id = "C4b*";
        }
        add(std::move(r));
        add(std::move(rc));
    }

    // C5: automorphisms
    add(guard("C5", "automorphisms phi and psi", [&]() {
        AlgebraPtr mw = rps_algebra(Qw);
        AlgebraMap ph = phi(mw);
        if (!verify_automorphism(ph))
            return fail("C5", "automorphisms phi and psi", "phi fails verification");
        if (!ph.compose(ph).compose(ph).is_identity())
            return fail("C5", "automorphisms phi and psi", "phi^3 != id");
        GoodBasis gb = good_basis(Qw);
        FieldElement w = omega_of(Qw);
        if (ph(gb.U) != gb.U.scaled(w * w) || ph(gb.V) != gb.V.scaled(w) || ph(gb.W) != gb.W)
            return fail("C5", "automorphisms phi and psi",
                        "phi(U) != w2*U or phi(V) != w*V or phi(W) != W");
        auto el = [&](const char* l) { return mw->basis_element(*mw->label_index(l)); };
        if (ph(el("P")) != el("R") || ph(el("R")) != el("S") || ph(el("S")) != el("P"))
            return fail("C5", "automorphisms phi and psi", "phi does not rotate P->R->S->P");
        Subalgebra m0 = m0_subalgebra(Qw);
        AlgebraMap ps = psi_m0(m0.algebra);
        if (!verify_automorphism(ps))
            return fail("C5", "automorphisms phi and psi", "psi fails verification");
        if (!ps.compose(ps).is_identity())
            return fail("C5", "automorphisms phi and psi", "psi^2 != id");
        if (ps(m0.algebra->basis_element(0)) != m0.algebra->basis_element(1))
            return fail("C5", "automorphisms phi and psi", "psi does not swap U and V");
        AlgebraMap pss = psi_semilinear(mw);
        if (!verify_automorphism(pss))
            return fail("C5", "automorphisms phi and psi",
                        "semi-linear psi fails verification");
        return pass("C5", "automorphisms phi and psi",
                    "phi verified of order 3 with phi(U)=w2*U, phi(V)=w*V, phi(W)=W; psi swaps "
                    "U,V; semi-linear psi verified");
    }));

    // C6: the two readings of the degree-3 example
    add(guard("C6", "degree-3 example classification", [&]() {
        auto el = [&](const char* l) { return mq->basis_element(*mq->label_index(l)); };
        AlgebraElement P = el("P"), R = el("R"), S = el("S");
        Polynomial gd = g_displayed(Q);
        Polynomial ga = g_associator(Q);
        AlgebraElement vd = evaluate(gd, {P, R, S});
        AlgebraElement va = evaluate(ga, {P, R, S});
        if (vd != S - R)
            return fail("C6", "degree-3 example classification",
                        "(xy)z-(xz)y at (P,R,S) gave " + vd.str() + ", expected S-R");
        if (va != S - P)
            return fail("C6", "degree-3 example classification",
                        "(xy)z-x(yz) at (P,R,S) gave " + va.str() + ", expected S-P");
        ClassifyOptions copts{kDefaultTupleCap, opts.threads};
        ImageClass cd = classify_image(gd, mq, copts);
        ImageClass ca = classify_image(ga, mq, copts);
        if (cd.tag != ImageTag::Plane || cd.theorem_label != "M0")
            return fail("C6", "degree-3 example classification",
                        "(xy)z-(xz)y does not classify to the trace-zero plane");
        if (ca.tag != ImageTag::Plane || ca.theorem_label != "M0")
            return fail("C6", "degree-3 example classification",
                        "(xy)z-x(yz) does not classify to the trace-zero plane");
        return pass("C6", "degree-3 example classification",
                    "both readings reach the trace-zero plane; values at (P,R,S): S-R and S-P");
    }));

    // C7: f is an identity of the trace-zero plane, certified over Z
    add(guard("C7", "degree-4 identity of the trace-zero plane", [&]() {
        Subalgebra m0 = m0_subalgebra(Q); // integral basis (P-R, R-S)
        PIReport rep = is_pi(f_pi(Q), m0.algebra, kDefaultTupleCap, opts.threads);
        if (!rep.is_pi)
            return fail("C7", "degree-4 identity of the trace-zero plane",
                        "counterexample found");
        if (rep.tuples_checked != 16)
            return fail("C7", "degree-4 identity of the trace-zero plane",
                        "expected 16 tuples, swept " + std::to_string(rep.tuples_checked));
        if (!rep.integer_certified)
            return fail("C7", "degree-4 identity of the trace-zero plane",
                        "sweep was not integer-certified");
        return pass("C7", "degree-4 identity of the trace-zero plane",
                    "all 16 evaluations on (P-R, R-S) vanish over Z; holds over every field");
    }));

    // C8: the composed 12-variable identity
    add(guard("C8", "12-variable composed identity", [&]() {
        Polynomial f = f_pi(Q);
        Polynomial g = g_displayed(Q);
        Polynomial fg = substitute_disjoint(f, {g, g, g, g});
        if (fg.arity() != 12 || !fg.is_multilinear())
            return fail("C8", "12-variable composed identity",
                        "composition is not 12-variable multilinear");
        if (!coefficient_sum(fg).is_zero())
            return fail("C8", "12-variable composed identity", "coefficient sum is nonzero");
        if (opts.exhaustive_12var) {
            auto t0 = std::chrono::steady_clock::now();
            PIReport rep = is_pi(fg, mq, kDefaultTupleCap, opts.threads);
            auto t1 = std::chrono::steady_clock::now();
            double s = std::chrono::duration<double>(t1 - t0).count();
            if (!rep.is_pi)
                return fail("C8", "12-variable composed identity", "counterexample found");
            if (rep.tuples_checked != (1ull << 24) || !rep.integer_certified)
                return fail("C8", "12-variable composed identity", "sweep incomplete");
            if (s > 300.0)
                return fail("C8", "12-variable composed identity",
                            "full sweep exceeded the 5-minute target");
            return pass("C8", "12-variable composed identity",
                        "full 4^12 integer sweep: all 16777216 tuples vanish");
        }
        PIReport rep = is_pi_random(fg, mq, 100000, opts.seed ^ 0x12a7ULL);
        if (!rep.is_pi)
            return fail("C8", "12-variable composed identity",
                        "random spot check found a counterexample");
        return pass("C8", "12-variable composed identity",
                    "seeded 100000-tuple spot check clean (full sweep behind the exhaustive "
                    "flag)");
    }));

    // C9: monomial counts
    add(guard("C9", "monomial counting formulas", [&]() {
        const long expected[] = {0, 1, 1, 3, 15, 105, 945, 10395};
        for (int m = 1; m <= 7; ++m) {
            std::size_t n = enumerate_multilinear_monomials(m).size();
            if (Int(n) != count_formula(m, MonomialKind::NonassocComm) ||
                n != static_cast<std::size_t>(expected[m]))
                return fail("C9", "monomial counting formulas",
                            "commutative count mismatch at degree " + std::to_string(m));
        }
        // independent route: Catalan numbers by convolution recurrence
        std::vector<Int> cat{1};
        for (int n = 1; n <= 6; ++n) {
            Int c = 0;
            for (int i = 0; i < n; ++i)
                c += cat[static_cast<std::size_t>(i)] * cat[static_cast<std::size_t>(n - 1 - i)];
            cat.push_back(c);
        }
        Int fact = 1;
        for (int m = 1; m <= 6; ++m) {
            fact *= m;
            if (count_formula(m, MonomialKind::AssocNoncomm) != fact)
                return fail("C9", "monomial counting formulas",
                            "associative count mismatch at degree " + std::to_string(m));
            if (count_formula(m, MonomialKind::NonassocNoncomm) !=
                fact * cat[static_cast<std::size_t>(m - 1)])
                return fail("C9", "monomial counting formulas",
                            "non-commutative count mismatch at degree " + std::to_string(m));
        }
        return pass("C9", "monomial counting formulas",
                    "enumeration matches m!*C(m-1)*2^(1-m) for m=1..7 "
                    "(1,1,3,15,105,945,10395); m! and m!*C(m-1) for m<=6");
    }));

    // C10: existence threshold and the first nullspace beyond it
    add(guard("C10", "identity existence threshold", [&]() {
        // independent comparison against the frozen count table
        const Int counts[] = {0, 1, 1, 3, 15, 105, 945, 10395, 135135, 2027025, 34459425};
        const int expected_threshold[] = {0, 3, 5, 7, 9};
        for (int d = 1; d <= 4; ++d) {
            int direct = 0;
            for (int m = 1; m <= 10 && direct == 0; ++m) {
                Int power = 1;
                for (int e = 0; e < m + 1; ++e)
                    power *= d;
                if (counts[m] > power)
                    direct = m;
            }
            if (direct != expected_threshold[d] ||
                pi_existence_threshold(d, MonomialKind::NonassocComm) != direct)
                return fail("C10", "identity existence threshold",
                            "threshold mismatch at dimension " + std::to_string(d));
        }
        // at the d=2 threshold the nullspace must be nonzero and sound
        Subalgebra m0 = m0_subalgebra(Qw);
        NullspaceBasis ns = find_multilinear_pis(5, m0.algebra);
        if (ns.vectors.empty())
            return fail("C10", "identity existence threshold",
                        "empty nullspace at the d=2 threshold");
        for (const auto& p : ns.polynomials()) {
            PIReport rep = is_pi(p, m0.algebra, kDefaultTupleCap, opts.threads);
            if (!rep.is_pi)
                return fail("C10", "identity existence threshold",
                            "nullspace member fails the identity sweep: " + p.str());
        }
        return pass("C10", "identity existence threshold",
                    "thresholds 3, 5, 7, 9 for dimensions 1..4; degree-5 nullspace on the "
                    "2-dimensional plane has dimension " +
                        std::to_string(ns.vectors.size()) + " and every member passes the sweep");
    }));

    // C11: the degree-4 identity lies in the computed nullspace
    add(guard("C11", "nullspace membership of the degree-4 identity", [&]() {
        Subalgebra m0 = m0_subalgebra(Qw);
        NullspaceBasis ns = find_multilinear_pis(4, m0.algebra);
        if (!ns.contains(f_pi(Qw)))
            return fail("C11", "nullspace membership of the degree-4 identity",
                        "(x1*x2)*(x3*x4)-(x1*x3)*(x2*x4) is not in the nullspace");
        return pass("C11", "nullspace membership of the degree-4 identity",
                    "exact membership solve against a nullspace of dimension " +
                        std::to_string(ns.vectors.size()));
    }));

    // C12: the two degree-4 powers at P+R-2S
    add(guard("C12", "one-variable powers at P+R-2S", [&]() {
        AlgebraElement x = parse_element("P+R-2*S", mq);
        AlgebraElement sq2 = evaluate(parse_polynomial("(x1*x1)*(x1*x1)", Q, 1), {x});
        AlgebraElement nested = evaluate(parse_polynomial("x1*(x1*(x1*x1))", Q, 1), {x});
        auto el = [&](const char* l) { return mq->basis_element(*mq->label_index(l)); };
        AlgebraElement nine_rp = (el("R") - el("P")).scaled(FieldElement::from_integer(Q, 9));
        if (sq2 != nine_rp)
            return fail("C12", "one-variable powers at P+R-2S",
                        "(x^2)^2 gave " + sq2.str() + ", expected 9(R-P)");
        if (nested != -nine_rp)
            return fail("C12", "one-variable powers at P+R-2S",
                        "x(x(x^2)) gave " + nested.str() + ", expected 9(P-R)");
        return pass("C12", "one-variable powers at P+R-2S",
                    "(x^2)^2 = 9(R-P) and x(x(x^2)) = 9(P-R), exactly");
    }));

    // C13: over F2, equal-degree one-variable monomials coincide everywhere
    add(guard("C13", "characteristic-2 monomial coincidence", [&]() {
        FieldSpec F2 = FieldSpec::prime(2);
        AlgebraPtr m2 = rps_algebra(F2);
        std::vector<AlgebraElement> elements;
        for (int mask = 0; mask < 16; ++mask) {
            std::vector<FieldElement> coords;
            for (int b = 0; b < 4; ++b)
                coords.push_back(FieldElement::from_integer(F2, (mask >> b) & 1));
            elements.push_back(m2->element(std::move(coords)));
        }
        std::uint64_t comparisons = 0;
        for (int d = 1; d <= 6; ++d) {
            std::vector<MonomialTree> trees = enumerate_unary_monomials(d);
            std::vector<Polynomial> polys;
            for (const auto& t : trees) {
                Polynomial p(F2, 1);
                p.add_term(t, FieldElement::one(F2));
                polys.push_back(std::move(p));
            }
            for (std::size_t i = 0; i < polys.size(); ++i) {
                for (std::size_t j = i + 1; j < polys.size(); ++j) {
                    for (const auto& x : elements) {
                        ++comparisons;
                        if (evaluate(polys[i], {x}) != evaluate(polys[j], {x}))
                            return fail("C13", "characteristic-2 monomial coincidence",
                                        trees[i].str() + " and " + trees[j].str() +
                                            " differ at " + x.str());
                    }
                }
            }
        }
        return pass("C13", "characteristic-2 monomial coincidence",
                    "all equal-degree pairs up to degree 6 agree on all 16 elements (" +
                        std::to_string(comparisons) + " comparisons)");
    }));

    // C14: theorem conformance fuzzing
    add(guard("C14", "classification conformance fuzzing", [&]() {
        std::map<std::string, int> tally;
        for (const FieldSpec& F : {F7, Qw}) {
            AlgebraPtr m = rps_algebra(F);
            AlgebraPtr mt = rps_algebra(F, false);
            Subalgebra m0 = m0_subalgebra(F);
            Homomorphism tr = trace_hom(m);
            Homomorphism sc = sc_hom(m);
            Rng rng(opts.seed ^ 0xf22dULL);
            ClassifyOptions copts{kDefaultTupleCap, 1};
            for (int i = 0; i < 500; ++i) {
                int deg = 1 + static_cast<int>(rng.below(4));
                Polynomial p = random_multilinear_polynomial(F, deg, rng);
                ImageClass cm = classify_image(p, m, copts);
                if (cm.theorem_label != "0" && cm.theorem_label != "<P+w*R+w2*S>" &&
                    cm.theorem_label != "<P+w2*R+w*S>" && cm.theorem_label != "M0" &&
                    cm.theorem_label != "M")
                    return fail("C14", "classification conformance fuzzing",
                                "unital outcome " + cm.theorem_label);
                tally["M:" + cm.theorem_label]++;
                ImageClass c0 = classify_image(p, m0.algebra, copts);
                if (c0.theorem_label != "0" && c0.theorem_label != "M0")
                    return fail("C14", "classification conformance fuzzing",
                                "trace-zero plane outcome " + c0.theorem_label);
                tally["M0:" + c0.theorem_label]++;
                ImageClass ct = classify_image(p, mt, copts);
                if (ct.theorem_label != "0" && ct.theorem_label != "<U>" &&
                    ct.theorem_label != "<V>" && ct.theorem_label != "M0" &&
                    ct.theorem_label != "Zariski dense in Mtilde")
                    return fail("C14", "classification conformance fuzzing",
                                "non-unital outcome " + ct.theorem_label);
                tally["Mt:" + ct.theorem_label]++;
                if (coefficient_sum(p).is_zero()) {
                    for (const auto& w : cm.witnesses) {
                        if (!tr(w.value).is_zero() || !sc(w.value).is_zero())
                            return fail("C14", "classification conformance fuzzing",
                                        "zero-sum polynomial with witness outside the "
                                        "trace-zero plane");
                    }
                }
                else if (cm.tag != ImageTag::FullSpan || ct.tag != ImageTag::FullSpan) {
                    return fail("C14", "classification conformance fuzzing",
                                "nonzero coefficient sum without full span");
                }
            }
        }
        std::ostringstream os;
        os << "500 seeded polynomials per field over Fp:7 and Q(w); outcomes:";
        for (const auto& [k, v] : tally)
            os << " " << k << "=" << v;
        os << "; no violations";
        return pass("C14", "classification conformance fuzzing", os.str());
    }));

    // C15 (recorded): Jacobian ranks of one-variable polynomials with nonzero
    // coefficient sum, logged against the density conjecture
    add(guard("C15", "one-variable density probe", [&]() {
        Rng rng(opts.seed ^ 0xd13aULL);
        std::map<int, int> rank_tally;
        for (int trial = 0; trial < 20; ++trial) {
            int deg = 3 + static_cast<int>(rng.below(4));
            Polynomial p(Q, 1);
            for (;;) {
                p = Polynomial(Q, 1);
                for (const auto& t : enumerate_unary_monomials(deg))
                    p.add_term(t, FieldElement::from_integer(Q, rng.int_in(-3, 3)));
                if (p.is_zero())
                    continue;
                FieldElement sum = FieldElement::zero(Q);
                for (const auto& [t, c] : p.terms())
                    sum = sum + c;
                if (!sum.is_zero())
                    break;
            }
            rank_tally[estimate_dimension(p, mq, 6, rng.next())]++;
        }
        std::ostringstream os;
        os << "20 seeded one-variable polynomials, degrees 3-6; Jacobian rank lower bounds:";
        for (const auto& [r, n] : rank_tally)
            os << " rank" << r << "=" << n;
        os << " (conjectured dense rank is 4; recorded, not asserted)";
        return ClaimResult{"C15", "one-variable density probe", ClaimStatus::Recorded, os.str()};
    }));

    // recorded note: the two readings of the degree-3 example disagree
    report.claims.push_back(ClaimResult{
        "note-g", "degree-3 example definition note", ClaimStatus::Recorded,
        "(x1*x2)*x3-(x1*x3)*x2 evaluates to S-R at (P,R,S) while the associator "
        "(x1*x2)*x3-x1*(x2*x3) evaluates to S-P there; the printed worked example mixes the "
        "two readings. Both are nonzero trace-zero values, so the classification is the "
        "trace-zero plane either way; this build implements both."});

    // C15 is recorded, never a failure; recorded notes do not affect overall
    return report;
}

} // namespace rps

#endif // RPS_VERIFY_HPP
