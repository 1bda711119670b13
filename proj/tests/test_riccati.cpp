#include <doctest.h>

#include <nj/riccati.hpp>
#include <nj/rng.hpp>

#include <cmath>
#include <set>
#include <vector>

namespace rc = nj::riccati;

namespace {

std::vector<double> random_domain_point(nj::SplitMix64& rng, double min_gap = 0.0) {
    for (;;) {
        auto x = rng.point(4, -2.0, 2.0);
        if (!rc::in_domain(x)) continue;
        bool separated = true;
        for (std::size_t i = 0; i < 4 && separated; ++i)
            for (std::size_t k = i + 1; k < 4; ++k)
                if (std::abs(x[i] - x[k]) < min_gap) separated = false;
        if (separated) return x;
    }
}

} // namespace

TEST_CASE("H2 at b1 = 0, x = (0,1,2,3) is -3.5") {
    rc::RiccatiParams p{0.0, 0.0, 0.0, 0.0};
    std::vector<double> x{0.0, 1.0, 2.0, 3.0};
    CHECK(rc::hamiltonian_l(2, x, p) == doctest::Approx(-3.5).epsilon(1e-14));
}

TEST_CASE("dH2/dx1 at b1 = 0, x = (0,1,2,3) is -1") {
    rc::RiccatiParams p{0.0, 0.0, 0.0, 0.0};
    std::vector<double> x{0.0, 1.0, 2.0, 3.0};
    auto H = rc::hamiltonian_field(2, p);
    CHECK(H.jet_at(x).grad(0) == doctest::Approx(-1.0).epsilon(1e-13));
}

TEST_CASE("F factors") {
    std::vector<double> x{0.0, 1.0, 2.0, 3.0};
    CHECK(rc::f_factor(2, 2, x) == doctest::Approx(-0.25).epsilon(1e-14));
    CHECK(rc::f_factor(2, 1, x) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(rc::f_factor(3, 1, x) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(rc::f_factor(4, 2, x) == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("hamiltonian expression text matches the direct evaluation") {
    nj::SplitMix64 rng(501);
    nj::ParamEnv env{{"b1", 1.5}};
    rc::RiccatiParams p{0.0, 0.0, 0.0, 1.5};
    for (std::size_t l = 2; l <= 4; ++l) {
        auto e = nj::parse(rc::hamiltonian_expr(l), 4, {"b1"});
        for (int t = 0; t < 10; ++t) {
            auto x = random_domain_point(rng);
            CHECK(nj::eval_real(e, x, env) ==
                  doctest::Approx(rc::hamiltonian_l(l, x, p)).epsilon(1e-12));
        }
    }
}

TEST_CASE("factorization on the family: exact for j < l, opposite sign for j > l") {
    std::vector<double> xref{0.0, 1.0, 2.0, 3.0};

    // frozen example: b1 = 2, l = 2, j = 1
    {
        auto p = rc::RiccatiParams::family(2.0);
        auto rep = rc::verify_factorization(2, 1, xref, p);
        CHECK(std::abs(rep.measured - rep.predicted) <=
              1e-12 * std::max(1.0, std::abs(rep.predicted)));
    }

    nj::SplitMix64 rng(502);
    for (double b1 : {1.0, 2.0}) {
        auto p = rc::RiccatiParams::family(b1);
        CHECK(p.on_family());
        for (int t = 0; t < 25; ++t) {
            auto x = random_domain_point(rng);
            for (std::size_t l = 2; l <= 4; ++l)
                for (std::size_t j = 1; j <= 4; ++j) {
                    if (j == l) continue;
                    auto rep = rc::verify_factorization(l, j, x, p);
                    const double expected = (j < l) ? rep.predicted : -rep.predicted;
                    const double scale = std::max(1.0, std::abs(expected));
                    CHECK(std::abs(rep.measured - expected) / scale < 1e-10);
                }
        }
    }
}

TEST_CASE("b1 = 0: measured derivative is -+(x^l)^2 F_lj by orientation") {
    auto p = rc::RiccatiParams::family(0.0);
    nj::SplitMix64 rng(503);
    for (int t = 0; t < 10; ++t) {
        auto x = random_domain_point(rng);
        for (std::size_t l = 2; l <= 4; ++l)
            for (std::size_t j = 1; j <= 4; ++j) {
                if (j == l) continue;
                auto rep = rc::verify_factorization(l, j, x, p);
                const double xl = x[l - 1];
                const double orient = (j < l) ? -1.0 : 1.0;
                const double expected = orient * xl * xl * rc::f_factor(l, j, x);
                const double scale = std::max(1.0, std::abs(expected));
                CHECK(std::abs(rep.measured - expected) / scale < 1e-10);
            }
    }
}

TEST_CASE("off the family the ratio is generically not 1") {
    rc::RiccatiParams p{0.7, 0.3, 0.5, 1.0}; // arbitrary, off-family
    CHECK(!p.on_family());
    std::vector<double> x{0.0, 1.0, 2.0, 3.0};
    auto rep = rc::verify_factorization(2, 1, x, p);
    CHECK(std::abs(rep.ratio - 1.0) > 1e-3);
}

TEST_CASE("conformal ratios agree across components on the family") {
    nj::SplitMix64 rng(504);
    for (double b1 : {1.0, 2.0}) {
        auto p = rc::RiccatiParams::family(b1);
        for (int t = 0; t < 20; ++t) {
            auto x = random_domain_point(rng, 0.05);
            try {
                CHECK(rc::conformal_spread(p, x) < 1e-9);
            } catch (const nj::domain_error&) {
                // near-degenerate bracket; excluded point
            }
        }
    }
}

TEST_CASE("installed conformal factor reproduces the Riccati dynamics") {
    nj::SplitMix64 rng(505);
    for (double b1 : {1.0, 2.0}) {
        auto p = rc::RiccatiParams::family(b1);
        auto sys = rc::riccati_system(p);
        for (int t = 0; t < 20; ++t) {
            auto x = random_domain_point(rng, 0.05);
            std::vector<double> rhs, bracket(4);
            try {
                rhs = rc::riccati_rhs(x, p);
                for (std::size_t i = 0; i < 4; ++i) {
                    std::vector<nj::ScalarField> args = sys.hamiltonians;
                    args.push_back(nj::ScalarField::coordinate(4, i));
                    bracket[i] = nj::lambda_bracket(sys.structure, args, x);
                }
            } catch (const nj::domain_error&) {
                continue; // near-degenerate point
            }
            for (std::size_t i = 0; i < 4; ++i) {
                const double scale = std::max(1.0, std::abs(rhs[i]));
                CHECK(std::abs(bracket[i] - rhs[i]) / scale < 1e-9);
            }
        }
    }
}

TEST_CASE("riccati HJ PDE assembles and evaluates") {
    auto p = rc::RiccatiParams::family(1.0);
    auto pde = rc::riccati_hj(p);
    CHECK(pde.base_dim == 3);
    std::vector<double> xN{0.0, 1.0, 2.0};
    auto A = pde.coeffs(xN, 3.0);
    CHECK(A.size() == 3);
    for (double a : A) CHECK(std::isfinite(a));
    CHECK(std::isfinite(pde.source(xN, 3.0)));
}

TEST_CASE("domain guards") {
    rc::RiccatiParams p = rc::RiccatiParams::family(1.0);
    std::vector<double> bad{0.0, 0.0, 1.0, 2.0};
    CHECK(!rc::in_domain(bad));
    CHECK_THROWS_AS((void)rc::hamiltonian_l(2, bad, p), nj::domain_error);
    CHECK_THROWS_AS((void)rc::riccati_rhs(bad, p), nj::domain_error);
    CHECK_THROWS_AS((void)rc::f_factor(1, 2, bad), nj::domain_error);
    std::vector<double> close{0.0, 1e-12, 1.0, 2.0};
    CHECK(!rc::in_domain(close));
    std::vector<double> ok{0.0, 1.0, 2.0, 3.0};
    CHECK(rc::in_domain(ok));
    CHECK_THROWS_AS((void)rc::hamiltonian_l(5, ok, p), nj::invalid_input);
    std::vector<double> three{0.0, 1.0, 2.0};
    CHECK_THROWS_AS((void)rc::hamiltonian_l(2, three, p), nj::invalid_input);
}
