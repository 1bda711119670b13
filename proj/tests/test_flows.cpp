#include <doctest.h>

#include <nj/flows.hpp>

#include <cmath>
#include <vector>

namespace {

// the worked field (-x1, -x2, 1) with closed-form flow
std::vector<double> decay_field(std::span<const double> y) {
    return {-y[0], -y[1], 1.0};
}

double final_error(double h) {
    auto traj = nj::integrate(decay_field, std::vector<double>{1.0, 1.0, 0.0}, 0.0, 1.0, h);
    const auto& f = traj.final_state();
    const double e1 = std::exp(-1.0);
    return std::max({std::abs(f[0] - e1), std::abs(f[1] - e1), std::abs(f[2] - 1.0)});
}

} // namespace

TEST_CASE("exponential decay matches the closed form to 1e-9") {
    CHECK(final_error(1e-3) < 1e-9);
    auto traj = nj::integrate(decay_field, std::vector<double>{1.0, 1.0, 0.0}, 0.0, 1.0, 1e-3);
    CHECK(traj.times.front() == 0.0);
    CHECK(traj.times.back() == 1.0);
}

TEST_CASE("zero field gives a constant trajectory") {
    auto zero = [](std::span<const double> y) { return std::vector<double>(y.size(), 0.0); };
    auto traj = nj::integrate(zero, std::vector<double>{1.0, -2.0}, 0.0, 0.3, 0.01);
    for (const auto& s : traj.states) {
        CHECK(s[0] == 1.0);
        CHECK(s[1] == -2.0);
    }
}

TEST_CASE("RK4 order: halving h cuts the error by ~16x; O(h^4) within factor 2") {
    const double e1 = final_error(1e-2);
    const double e2 = final_error(5e-3);
    const double e3 = final_error(2.5e-3);
    CHECK(e1 / e2 == doctest::Approx(16.0).epsilon(0.5));
    // ratios consistent with order 4 within a factor of 2
    for (double ratio : {e1 / e2, e2 / e3}) {
        CHECK(ratio > 8.0);
        CHECK(ratio < 32.0);
    }
}

TEST_CASE("final time is hit exactly when h does not divide the interval") {
    auto traj = nj::integrate(decay_field, std::vector<double>{1.0, 1.0, 0.0}, 0.0, 0.35, 0.1);
    CHECK(traj.times.back() == 0.35);
    CHECK(traj.states.back()[2] == doctest::Approx(0.35).epsilon(1e-12));
}

TEST_CASE("time reversal returns near the start") {
    auto forward = nj::integrate(decay_field, std::vector<double>{1.0, 1.0, 0.0}, 0.0, 1.0, 1e-3);
    auto reversed_field = [](std::span<const double> y) {
        auto v = decay_field(y);
        for (double& c : v) c = -c;
        return v;
    };
    auto back = nj::integrate(reversed_field, forward.final_state(), 0.0, 1.0, 1e-3);
    const double one_way = final_error(1e-3);
    for (std::size_t i = 0; i < 3; ++i) {
        const double target = (i < 2) ? 1.0 : 0.0;
        CHECK(std::abs(back.final_state()[i] - target) < 10.0 * std::max(one_way, 1e-12));
    }
}

TEST_CASE("divergence guard raises with the failure time") {
    auto blowup = [](std::span<const double> y) {
        return std::vector<double>{y[0] * y[0]};
    };
    // dx/dt = x^2 from x = 1 blows up at t = 1
    CHECK_THROWS_AS(
        (void)nj::integrate(blowup, std::vector<double>{1.0}, 0.0, 2.0, 1e-3),
        nj::divergence_error);
}

TEST_CASE("argument validation") {
    std::vector<double> x0{1.0};
    auto zero = [](std::span<const double> y) { return std::vector<double>(y.size(), 0.0); };
    CHECK_THROWS_AS((void)nj::integrate(zero, x0, 0.0, 1.0, 0.0), nj::invalid_input);
    CHECK_THROWS_AS((void)nj::integrate(zero, x0, 1.0, 1.0, 0.1), nj::invalid_input);
}
