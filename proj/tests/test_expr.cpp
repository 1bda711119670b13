#include <doctest.h>

#include <nj/expr.hpp>
#include <nj/rng.hpp>

#include <set>
#include <vector>

namespace {

double ev(const std::string& text, std::vector<double> x, nj::ParamEnv env = {}) {
    std::set<std::string> names;
    for (const auto& [k, v] : env) names.insert(k);
    auto e = nj::parse(text, x.size(), names);
    return nj::eval_real(e, x, env);
}

} // namespace

TEST_CASE("basic arithmetic and precedence") {
    CHECK(ev("x1^2", {3.0}) == doctest::Approx(9.0));
    CHECK(ev("x1+x2*x3", {1.0, 2.0, 3.0}) == doctest::Approx(7.0));
    CHECK(ev("(x1+x2)*x3", {1.0, 2.0, 3.0}) == doctest::Approx(9.0));
    CHECK(ev("x1-x2-x3", {10.0, 3.0, 2.0}) == doctest::Approx(5.0)); // left assoc
    CHECK(ev("2^3^2", {1.0}) == doctest::Approx(512.0));             // right assoc
    CHECK(ev("-2^2", {1.0}) == doctest::Approx(4.0)); // unary minus binds tighter
    CHECK(ev("1e-2 + 2.5E1", {1.0}) == doctest::Approx(25.01));
}

TEST_CASE("functions and parameters") {
    CHECK(ev("sin(x1)*cos(x2) + exp(0)", {0.0, 0.0}) == doctest::Approx(1.0));
    CHECK(ev("sqrt(x1)", {16.0}) == doctest::Approx(4.0));
    CHECK(ev("log(exp(x1))", {1.3}) == doctest::Approx(1.3));
    CHECK(ev("pow(x1, 3)", {2.0}) == doctest::Approx(8.0));
    CHECK(ev("pow(x1, 0.5)", {9.0}) == doctest::Approx(3.0)); // real exponent via exp/log
    CHECK(ev("a0 + a1*x1 + a2*x1^2", {5.0}, {{"a0", 1.0}, {"a1", 0.0}, {"a2", 0.0}}) ==
          doctest::Approx(1.0));
}

TEST_CASE("section 4 pole example") {
    CHECK(ev("x1*x2/(x1-x2)", {2.0, 1.0}) == doctest::Approx(2.0));
    CHECK_THROWS_AS((void)ev("x1*x2/(x1-x2)", {1.0, 1.0}), nj::domain_error);
}

TEST_CASE("syntax errors carry byte offsets") {
    try {
        (void)nj::parse("2*(x1", 3);
        FAIL("expected parse_error");
    } catch (const nj::parse_error& e) {
        CHECK(e.offset == 5);
    }
    CHECK_THROWS_AS((void)nj::parse("", 3), nj::parse_error);
    CHECK_THROWS_AS((void)nj::parse("x1 + ", 3), nj::parse_error);
    CHECK_THROWS_AS((void)nj::parse("x1 x2", 3), nj::parse_error);
    CHECK_THROWS_AS((void)nj::parse("1..2", 3), nj::parse_error);
}

TEST_CASE("unknown identifiers, coordinates out of range, arity errors") {
    CHECK_THROWS_AS((void)nj::parse("x4", 3), nj::parse_error);
    CHECK_THROWS_AS((void)nj::parse("x0", 3), nj::parse_error);
    CHECK_THROWS_AS((void)nj::parse("foo", 3), nj::parse_error);
    CHECK_THROWS_AS((void)nj::parse("tan(x1)", 3), nj::parse_error);
    CHECK_THROWS_AS((void)nj::parse("sin(x1, x2)", 3), nj::parse_error);
    CHECK_THROWS_AS((void)nj::parse("pow(x1)", 3), nj::parse_error);
    // declared parameters resolve; undeclared do not
    CHECK_NOTHROW((void)nj::parse("b1*x1", 3, {"b1"}));
    CHECK_THROWS_AS((void)nj::parse("b1*x1", 3), nj::parse_error);
}

TEST_CASE("unbound parameter at evaluation time") {
    auto e = nj::parse("b1*x1", 3, {"b1"});
    std::vector<double> x{1.0, 2.0, 3.0};
    CHECK_THROWS_AS((void)nj::eval_real(e, x, {}), nj::invalid_input);
}

TEST_CASE("round-trip: print . parse . print is a fixed point") {
    const std::vector<std::string> exprs = {
        "x1*x2 + sin(x3)",
        "-x1^2 + (x2 - x3)/x1",
        "pow(x1, 3) - sqrt(x2 + 5)",
        "x1*x2/(x1-x2) + b1*(1/(x1-x2))",
        "2^3^x1",
        "-(x1 + x2)*x3",
        "exp(log(x1 + 4)) - 1e-3",
    };
    for (const auto& s : exprs) {
        auto e1 = nj::parse(s, 3, {"b1"});
        std::string p1 = nj::to_string(e1);
        auto e2 = nj::parse(p1, 3, {"b1"});
        std::string p2 = nj::to_string(e2);
        CHECK(p1 == p2);
        // and the reprint evaluates identically
        std::vector<double> x{1.7, 0.4, -0.9};
        nj::ParamEnv env{{"b1", 2.0}};
        CHECK(nj::eval_real(e1, x, env) == nj::eval_real(e2, x, env));
    }
}

TEST_CASE("jet evaluation projects to real evaluation") {
    nj::SplitMix64 rng(8101);
    const std::string text = "sin(x1*x2) + x3^3/(x2 + 2) - exp(x1/4)";
    auto e = nj::parse(text, 3);
    for (int trial = 0; trial < 50; ++trial) {
        auto x = rng.point(3, -1.0, 1.0);
        const double real = nj::eval_real(e, x);
        auto seeds = nj::seed_jets(x);
        const double jet_val =
            nj::eval<nj::Jet2>(*e, std::span<const nj::Jet2>(seeds), {}).value();
        const double scale = std::max(1.0, std::abs(real));
        CHECK(std::abs(real - jet_val) / scale < 1e-14);
    }
}

TEST_CASE("integral ^ routes through pow_int (valid for negative bases)") {
    CHECK(ev("x1^3", {-2.0}) == doctest::Approx(-8.0));
    CHECK(ev("x1^2", {-2.0}) == doctest::Approx(4.0));
    // real exponent of a negative base must fail via log
    CHECK_THROWS_AS((void)ev("pow(x1, 0.5)", {-1.0}), nj::domain_error);
}
