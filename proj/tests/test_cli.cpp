#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include "rps/poly.hpp"

namespace {

struct RunResult {
    int exit_code;
    std::string out;
};

RunResult run_cli(const std::string& args)
{
    std::string cmd = std::string(RPS_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0)
        out.append(buf, n);
    int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

bool contains(const std::string& hay, const std::string& needle)
{
    return hay.find(needle) != std::string::npos;
}

} // namespace

TEST_CASE("classify subcommand")
{
    RunResult r = run_cli("classify --poly \"(x1*x2)*x3-(x1*x3)*x2\" --algebra M --field \"Q(w)\"");
    REQUIRE(r.exit_code == 0);
    REQUIRE(contains(r.out, "M0"));
    REQUIRE(contains(r.out, "# field=Q(w) algebra=M")); // reproducibility line
}

TEST_CASE("JSON output is byte-identical across reruns")
{
    std::string line =
        "classify --poly \"(x1*x2)*x3-(x1*x3)*x2\" --algebra M --field \"Q(w)\" --json";
    RunResult a = run_cli(line);
    RunResult b = run_cli(line);
    REQUIRE(a.exit_code == 0);
    REQUIRE(a.out == b.out);
    REQUIRE(contains(a.out, "\"theorem_label\": \"M0\""));
    REQUIRE(contains(a.out, "\"config\""));

    std::string pline = "pi-check --poly \"(x1*x2)*(x3*x4)-(x1*x3)*(x2*x4)\" --algebra M0 "
                        "--field Q --json";
    REQUIRE(run_cli(pline).out == run_cli(pline).out);
}

TEST_CASE("pi-check exit codes")
{
    RunResult confirmed = run_cli(
        "pi-check --poly \"(x1*x2)*(x3*x4)-(x1*x3)*(x2*x4)\" --algebra M0 --field Q");
    REQUIRE(confirmed.exit_code == 0);
    REQUIRE(contains(confirmed.out, "integer-certified"));

    RunResult refuted = run_cli(
        "pi-check --poly \"(x1*x2)*(x3*x4)-(x1*x3)*(x2*x4)\" --algebra M --field Q");
    REQUIRE(refuted.exit_code == 1);
    REQUIRE(contains(refuted.out, "counterexample"));

    RunResult usage = run_cli("pi-check --algebra M --field Q");
    REQUIRE(usage.exit_code == 2);

    RunResult badfield = run_cli("pi-check --poly x1 --algebra M --field Zp:4");
    REQUIRE(badfield.exit_code == 2);
}

TEST_CASE("count-monomials and eval")
{
    RunResult count = run_cli("count-monomials --degree 4 --kind nonassoc_comm");
    REQUIRE(count.exit_code == 0);
    REQUIRE(contains(count.out, "15"));

    RunResult eval = run_cli("eval --poly \"x1*x1\" --algebra M --field Q --args \"P+R-2*S\"");
    REQUIRE(eval.exit_code == 0);
    REQUIRE(contains(eval.out, "3*P-3*R"));
}

TEST_CASE("pi-find emits identities in the polynomial grammar")
{
    RunResult r = run_cli("pi-find --degree 4 --algebra M0 --field \"Q(w)\"");
    REQUIRE(r.exit_code == 0);
    REQUIRE(contains(r.out, "nullspace dimension"));
    // every emitted line after the header must re-parse
    rps::FieldSpec Qw = rps::FieldSpec::parse("Q(w)");
    std::istringstream is(r.out);
    std::string line;
    int parsed = 0;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#' || line.find("degree") == 0)
            continue;
        REQUIRE_NOTHROW(rps::parse_polynomial(line, Qw, 4));
        ++parsed;
    }
    REQUIRE(parsed > 0);
}

TEST_CASE("dim-estimate runs")
{
    RunResult r = run_cli("dim-estimate --poly \"(x1*x1)*(x1*x1)\" --algebra M --field Q "
                          "--samples 4 --seed 5");
    REQUIRE(r.exit_code == 0);
    REQUIRE(contains(r.out, "Jacobian rank"));
}

TEST_CASE("polynomial files and custom algebra files")
{
    std::string polypath = "cli_test_poly.txt";
    {
        std::ofstream out(polypath);
        out << "# the degree-3 example\n(x1*x2)*x3 # bracketed\n - (x1*x3)*x2\n";
    }
    RunResult r = run_cli("classify --poly file:" + polypath + " --algebra M --field Q");
    REQUIRE(r.exit_code == 0);
    REQUIRE(contains(r.out, "M0"));

    std::string algpath = "cli_test_algebra.json";
    {
        std::ofstream out(algpath);
        out << R"({"basis": ["A", "B"], "unit": null,
                   "table": [[["0","1"],["0","0"]], [["0","0"],["1","0"]]]})";
    }
    RunResult r2 = run_cli("classify --poly \"x1\" --algebra file:" + algpath + " --field Q");
    REQUIRE(r2.exit_code == 0);
    REQUIRE(contains(r2.out, "span dimension 2"));

    std::remove(polypath.c_str());
    std::remove(algpath.c_str());
}

TEST_CASE("associativity policy flag")
{
    RunResult rejected = run_cli("eval --poly \"x1*x1*x1\" --algebra M --field Q --args \"P\"");
    REQUIRE(rejected.exit_code == 2);

    RunResult left =
        run_cli("eval --poly \"x1*x1*x1\" --algebra M --field Q --args \"P\" --assoc left");
    REQUIRE(left.exit_code == 0);
}
