// rps -- exact evaluation, image classification, and identity search for the
// rock-paper-scissors monad algebra and its subalgebras.

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <sys/stat.h>
#include <vector>

#include "rps/json_io.hpp"
#include "rps/verify.hpp"

namespace {

using namespace rps;

struct CommonOpts {
    std::string field = "Q";
    std::string algebra = "M";
    std::uint64_t seed = 12345;
    std::uint64_t cap = kDefaultTupleCap;
    int threads = 1;
    bool json = false;
    std::string assoc; // "" or "left"
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_algebra = true)
{
    cmd->add_option("--field", o.field, "Scalar field: Q | Fp:<p> | Q(w) | Fp2:<p>");
    if (with_algebra)
        cmd->add_option("--algebra", o.algebra, "Algebra: M | M0 | Mtilde | file:<path>");
    cmd->add_option("--seed", o.seed, "Seed for all randomized pieces");
    cmd->add_option("--cap", o.cap, "Basis-tuple cap for exhaustive sweeps");
    cmd->add_option("--threads", o.threads, "Worker cap for partitioned sweeps");
    cmd->add_flag("--json", o.json, "Machine-readable output");
    cmd->add_option("--assoc", o.assoc,
                    "Associativity policy for unbracketed products: left");
}

AssocPolicy assoc_policy(const CommonOpts& o)
{
    if (o.assoc.empty())
        return AssocPolicy::Reject;
    if (o.assoc == "left")
        return AssocPolicy::Left;
    throw Error(Err::BadInput, "unknown associativity policy '" + o.assoc + "'");
}

bool file_exists(const std::string& path)
{
    struct stat st {};
    return ::stat(path.c_str(), &st) == 0 && S_ISREG(st.st_mode);
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(Err::BadInput, "cannot read '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

/// --poly accepts an inline expression, a path to an existing file, or an
/// explicit file:<path>. Files are UTF-8 with '#' comments.
std::string load_poly_text(const std::string& arg)
{
    if (arg.rfind("file:", 0) == 0)
        return strip_comments(read_file(arg.substr(5)));
    if (file_exists(arg))
        return strip_comments(read_file(arg));
    return arg;
}

AlgebraPtr load_algebra(const CommonOpts& o, const FieldSpec& F)
{
    if (o.algebra == "M")
        return rps_algebra(F, true);
    if (o.algebra == "Mtilde")
        return rps_algebra(F, false);
    if (o.algebra == "M0")
        return m0_subalgebra(F).algebra;
    if (o.algebra.rfind("file:", 0) == 0) {
        std::string path = o.algebra.substr(5);
        Json j = Json::parse(read_file(path));
        return algebra_from_json(j, F, o.algebra);
    }
    throw Error(Err::BadInput,
                "unknown algebra '" + o.algebra + "' (expected M | M0 | Mtilde | file:<path>)");
}

Json config_json(const CommonOpts& o)
{
    Json j;
    j["field"] = o.field;
    j["algebra"] = o.algebra;
    j["seed"] = o.seed;
    j["cap"] = o.cap;
    j["threads"] = o.threads;
    return j;
}

void print_config(const CommonOpts& o)
{
    std::cout << "# field=" << o.field << " algebra=" << o.algebra << " seed=" << o.seed
              << " cap=" << o.cap << " threads=" << o.threads << "\n";
}

void emit(const CommonOpts& o, Json body)
{
    if (o.json) {
        Json out;
        out["config"] = config_json(o);
        for (auto& [k, v] : body.items())
            out[k] = std::move(v);
        std::cout << out.dump(2) << "\n";
    }
}

std::vector<AlgebraElement> parse_args_list(const std::string& text, const AlgebraPtr& alg)
{
    std::vector<AlgebraElement> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t semi = text.find(';', start);
        std::string piece =
            semi == std::string::npos ? text.substr(start) : text.substr(start, semi - start);
        if (!piece.empty())
            out.push_back(parse_element(piece, alg));
        if (semi == std::string::npos)
            break;
        start = semi + 1;
    }
    if (out.empty())
        throw Error(Err::BadInput, "no arguments given");
    return out;
}

// ---------------------------------------------------------------------------

int run_eval(const CommonOpts& o, const std::string& poly_arg, const std::string& args_arg)
{
    FieldSpec F = FieldSpec::parse(o.field);
    AlgebraPtr alg = load_algebra(o, F);
    std::vector<AlgebraElement> args = parse_args_list(args_arg, alg);
    Polynomial p = parse_polynomial(load_poly_text(poly_arg), F,
                                    static_cast<int>(args.size()), assoc_policy(o));
    AlgebraElement value = evaluate(p, args);
    if (o.json) {
        Json body;
        body["polynomial"] = p.str();
        Json ja = Json::array();
        for (const auto& a : args)
            ja.push_back(a.str());
        body["args"] = std::move(ja);
        body["value"] = value.str();
        emit(o, std::move(body));
    }
    else {
        print_config(o);
        std::cout << p.str() << " at (";
        for (std::size_t i = 0; i < args.size(); ++i)
            std::cout << (i ? "; " : "") << args[i].str();
        std::cout << ") = " << value.str() << "\n";
    }
    return 0;
}

int run_classify(const CommonOpts& o_in, const std::string& poly_arg, bool exhaustive)
{
    CommonOpts o = o_in;
    if (exhaustive)
        o.cap = UINT64_MAX;
    FieldSpec F = FieldSpec::parse(o.field);
    AlgebraPtr alg = load_algebra(o, F);
    Polynomial p = parse_polynomial(load_poly_text(poly_arg), F, 0, assoc_policy(o));
    if (alg->kind() == AlgebraKind::Generic) {
        // custom tables get the raw span report; the theorems cover M, M0, Mtilde
        SpanReport rep = basis_span(p, alg, o.cap, o.threads);
        if (o.json) {
            emit(o, span_report_to_json(p, *alg, rep));
        }
        else {
            print_config(o);
            std::cout << "span dimension " << rep.dimension
                      << (rep.exhausted ? "" : " (grid truncated at the cap)") << "\n";
            for (const auto& b : rep.span_basis)
                std::cout << "  basis " << b.str() << "\n";
        }
        return 0;
    }
    try {
        ImageClass cls = classify_image(p, alg, ClassifyOptions{o.cap, o.threads});
        if (o.json) {
            emit(o, classification_to_json(p, *alg, cls));
        }
        else {
            print_config(o);
            std::cout << "class " << image_tag_name(cls.tag) << ", image " << cls.theorem_label
                      << " (span dimension " << cls.span_dim << ", coefficient sum "
                      << cls.coeff_sum.str() << ")\n";
            for (const auto& w : cls.witnesses) {
                std::cout << "  witness (";
                for (std::size_t i = 0; i < w.args.size(); ++i)
                    std::cout << (i ? "; " : "") << w.args[i].str();
                std::cout << ") = " << w.value.str() << "\n";
            }
        }
        return 0;
    }
    catch (const TheoremViolationError& e) {
        std::cerr << "THEOREM VIOLATION: " << e.what() << "\n";
        for (const auto& w : e.report().witnesses) {
            std::cerr << "  witness (";
            for (std::size_t i = 0; i < w.args.size(); ++i)
                std::cerr << (i ? "; " : "") << w.args[i].str();
            std::cerr << ") = " << w.value.str() << "\n";
        }
        return 1;
    }
}

int run_pi_check(const CommonOpts& o, const std::string& poly_arg, bool exhaustive,
                 std::uint64_t random_samples)
{
    FieldSpec F = FieldSpec::parse(o.field);
    AlgebraPtr alg = load_algebra(o, F);
    Polynomial p = parse_polynomial(load_poly_text(poly_arg), F, 0, assoc_policy(o));
    PIReport rep = random_samples > 0 ? is_pi_random(p, alg, random_samples, o.seed)
                                      : is_pi(p, alg, o.cap, o.threads, exhaustive);
    if (o.json) {
        emit(o, pi_report_to_json(p, *alg, rep));
    }
    else {
        print_config(o);
        if (rep.is_pi) {
            std::cout << (rep.exhaustive ? "identity confirmed" : "no counterexample found")
                      << " (" << rep.tuples_checked << " tuples"
                      << (rep.integer_certified ? ", integer-certified over every field" : "")
                      << ")\n";
        }
        else {
            std::cout << "refuted after " << rep.tuples_checked << " tuples\n";
            const Witness& w = *rep.counterexample;
            std::cout << "  counterexample (";
            for (std::size_t i = 0; i < w.args.size(); ++i)
                std::cout << (i ? "; " : "") << w.args[i].str();
            std::cout << ") = " << w.value.str() << "\n";
            if (!rep.counterexample_primes.empty()) {
                std::cout << "  value vanishes only modulo:";
                for (auto q : rep.counterexample_primes)
                    std::cout << " " << q;
                std::cout << "\n";
            }
        }
    }
    return rep.is_pi ? 0 : 1;
}

int run_pi_find(const CommonOpts& o, int degree)
{
    FieldSpec F = FieldSpec::parse(o.field);
    AlgebraPtr alg = load_algebra(o, F);
    NullspaceBasis ns = find_multilinear_pis(degree, alg, o.cap);
    if (o.json) {
        emit(o, nullspace_to_json(*alg, ns));
    }
    else {
        print_config(o);
        std::cout << "degree " << degree << ": " << ns.monomials.size() << " monomials, system "
                  << ns.system_rows << " x " << ns.monomials.size() << ", rank " << ns.system_rank
                  << ", nullspace dimension " << ns.vectors.size() << "\n";
        for (const auto& p : ns.polynomials())
            std::cout << p.str() << "\n";
    }
    return 0;
}

int run_count(const CommonOpts& o, int degree, const std::string& kind_name)
{
    MonomialKind kind;
    if (kind_name == "assoc_noncomm")
        kind = MonomialKind::AssocNoncomm;
    else if (kind_name == "nonassoc_noncomm")
        kind = MonomialKind::NonassocNoncomm;
    else if (kind_name == "nonassoc_comm")
        kind = MonomialKind::NonassocComm;
    else
        throw Error(Err::BadInput, "unknown kind '" + kind_name +
                                       "' (assoc_noncomm | nonassoc_noncomm | nonassoc_comm)");
    Int n = count_formula(degree, kind);
    if (o.json) {
        Json body;
        body["degree"] = degree;
        body["kind"] = kind_name;
        body["count"] = n.str();
        emit(o, std::move(body));
    }
    else {
        print_config(o);
        std::cout << n.str() << "\n";
    }
    return 0;
}

int run_dim_estimate(const CommonOpts& o, const std::string& poly_arg, int samples)
{
    FieldSpec F = FieldSpec::parse(o.field);
    AlgebraPtr alg = load_algebra(o, F);
    Polynomial p = parse_polynomial(load_poly_text(poly_arg), F, 0, assoc_policy(o));
    int rank = estimate_dimension(p, alg, samples, o.seed);
    if (o.json) {
        Json body;
        body["polynomial"] = p.str();
        body["samples"] = samples;
        body["jacobian_rank"] = rank;
        body["note"] = "lower bound for the dimension of the image's Zariski closure";
        emit(o, std::move(body));
    }
    else {
        print_config(o);
        std::cout << "max Jacobian rank over " << samples << " samples: " << rank
                  << " (lower bound for the closure dimension)\n";
    }
    return 0;
}

int run_paper_verify(const CommonOpts& o, bool exhaustive)
{
    VerifyOptions vo;
    vo.seed = o.seed;
    vo.threads = o.threads;
    vo.exhaustive_12var = exhaustive;
    VerifyReport rep = run_verify(vo);
    if (o.json) {
        Json claims = Json::array();
        for (const auto& c : rep.claims) {
            Json j;
            j["id"] = c.id;
            j["claim"] = c.title;
            j["status"] = claim_status_name(c.status);
            j["details"] = c.details;
            claims.push_back(std::move(j));
        }
        Json body;
        body["claims"] = std::move(claims);
        body["overall"] = rep.overall_pass ? "pass" : "fail";
        emit(o, std::move(body));
    }
    else {
        print_config(o);
        for (const auto& c : rep.claims)
            std::cout << claim_status_name(c.status) << "  " << c.id << "  " << c.title << " -- "
                      << c.details << "\n";
        std::cout << (rep.overall_pass ? "overall: pass" : "overall: FAIL") << "\n";
    }
    return rep.overall_pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"exact computer algebra for the rock-paper-scissors monad algebra"};
    app.require_subcommand(1);

    CommonOpts o;
    std::string poly_arg, args_arg, kind_name = "nonassoc_comm";
    int degree = 0, samples = 20;
    bool exhaustive = false;
    std::uint64_t random_samples = 0;

    CLI::App* eval = app.add_subcommand("eval", "evaluate a polynomial at given elements");
    add_common(eval, o);
    eval->add_option("--poly", poly_arg, "polynomial (inline, path, or file:<path>)")->required();
    eval->add_option("--args", args_arg, "semicolon-separated elements, e.g. \"P+R-2*S;1\"")
        ->required();

    CLI::App* classify = app.add_subcommand("classify", "classify the image of a multilinear polynomial");
    add_common(classify, o);
    classify->add_option("--poly", poly_arg, "polynomial")->required();
    classify->add_flag("--exhaustive", exhaustive, "allow span grids beyond the tuple cap");

    CLI::App* picheck = app.add_subcommand("pi-check", "check whether a polynomial is an identity");
    add_common(picheck, o);
    picheck->add_option("--poly", poly_arg, "polynomial")->required();
    picheck->add_flag("--exhaustive", exhaustive, "allow sweeps beyond the tuple cap");
    picheck->add_option("--random", random_samples,
                        "seeded spot check on this many random tuples instead of the full sweep");

    CLI::App* pifind = app.add_subcommand("pi-find", "basis of multilinear identities of a degree");
    add_common(pifind, o);
    pifind->add_option("--degree", degree, "multilinear degree m")->required();

    CLI::App* count = app.add_subcommand("count-monomials", "multilinear monomial counts");
    add_common(count, o, false);
    count->add_option("--degree", degree, "degree m")->required();
    count->add_option("--kind", kind_name, "assoc_noncomm | nonassoc_noncomm | nonassoc_comm");

    CLI::App* dimest = app.add_subcommand("dim-estimate", "Jacobian-rank lower bound for the image dimension");
    add_common(dimest, o);
    dimest->add_option("--poly", poly_arg, "polynomial")->required();
    dimest->add_option("--samples", samples, "number of seeded sample points");

    CLI::App* verify = app.add_subcommand("paper-verify", "re-run the full claim checklist");
    add_common(verify, o, false);
    verify->add_flag("--exhaustive", exhaustive, "run the full 4^12 sweep instead of the spot check");

    try {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (eval->parsed())
            return run_eval(o, poly_arg, args_arg);
        if (classify->parsed())
            return run_classify(o, poly_arg, exhaustive);
        if (picheck->parsed())
            return run_pi_check(o, poly_arg, exhaustive, random_samples);
        if (pifind->parsed())
            return run_pi_find(o, degree);
        if (count->parsed())
            return run_count(o, degree, kind_name);
        if (dimest->parsed())
            return run_dim_estimate(o, poly_arg, samples);
        if (verify->parsed())
            return run_paper_verify(o, exhaustive);
    }
    catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
