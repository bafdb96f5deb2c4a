#include "hawkes/control.hpp"
#include "hawkes/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <string>

using namespace hawkes;
using doctest::Approx;

namespace {

double golden_section_max(const std::function<double(double)>& f, double a, double b) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    while (b - a > 1e-12) {
        if (f(c) > f(d)) {
            b = d;
        } else {
            a = c;
        }
        c = b - inv_phi * (b - a);
        d = a + inv_phi * (b - a);
    }
    return 0.5 * (a + b);
}

// Interior optimum: golden-section search on |h'(w)|, which is unimodal with its minimum at the root.
double reference_fraction(double lam, const MarketSpec& m) {
    auto slope = [&](double w) {
        return (m.mu - m.r) - m.sigma * m.sigma * w + lam * m.gamma_jump / (1.0 + m.gamma_jump * w);
    };
    if (slope(0.0) <= 0.0) return 0.0;
    if (slope(1.0) >= 0.0) return 1.0;
    return golden_section_max([&](double w) { return -std::abs(slope(w)); }, 0.0, 1.0);
}

MarketSpec contagion_market() {
    MarketSpec m;
    m.kernel = Kernel::exp_sum({0.25, 0.5}, {1.0, 2.0});
    return m;
}

ValueOptions quick_options(std::size_t n_paths) {
    ValueOptions o;
    o.horizon_trunc = 40.0;
    o.dt = 0.02;
    o.n_paths = n_paths;
    return o;
}

}  // namespace

TEST_CASE("Merton fraction without jumps") {
    MarketSpec m;
    m.gamma_jump = 0.0;
    const auto p = psi_hat(3.0, m);
    const double w = (m.mu - m.r) / (m.sigma * m.sigma);
    CHECK(p.omega == Approx(w).epsilon(1e-12));
    CHECK(p.value == Approx(((m.mu - m.r) * w - 0.5 * m.sigma * m.sigma * w * w) / m.rho).epsilon(1e-12));

    m.sigma = 0.2;
    CHECK(psi_hat(0.0, m).omega == 1.0);
    m.mu = 0.0;
    CHECK(psi_hat(0.0, m).omega == 0.0);
}

TEST_CASE("no excess return means no investment") {
    MarketSpec m;
    m.mu = m.r;
    for (double lam : {0.1, 1.0, 5.0}) {
        const auto p = psi_hat(lam, m);
        CHECK(p.omega == 0.0);
        CHECK(p.value == 0.0);
    }
}

TEST_CASE("quadratic root matches a golden-section search") {
    MarketSpec m;
    m.mu = 0.08;
    m.r = 0.03;
    m.sigma = 0.2;
    m.gamma_jump = -0.1;
    for (double lam : {0.0, 0.3, 1.0, 2.0}) {
        const auto p = psi_hat(lam, m);
        const double ref = reference_fraction(lam, m);
        CHECK(std::abs(p.omega - ref) <= 1e-8);
        CHECK(p.value == Approx(investment_gain(ref, lam, m) / m.rho).epsilon(1e-10));
    }
    m.gamma_jump = 0.5;
    const auto p = psi_hat(2.0, m);
    CHECK(p.omega == 1.0);
    m.sigma = 1.5;
    CHECK(std::abs(psi_hat(0.7, m).omega - reference_fraction(0.7, m)) <= 1e-8);
}

TEST_CASE("optimal fraction is monotone in the intensity") {
    MarketSpec down;
    MarketSpec up;
    up.gamma_jump = 0.2;
    up.mu = 0.05;
    double prev_down = 2.0;
    double prev_up = -1.0;
    for (double lam = 0.0; lam <= 8.0; lam += 0.05) {
        const auto d = psi_hat(lam, down);
        const auto u = psi_hat(lam, up);
        CHECK(d.omega <= prev_down);
        CHECK(u.omega >= prev_up);
        CHECK(d.value >= 0.0);
        CHECK(u.value >= 0.0);
        prev_down = d.omega;
        prev_up = u.omega;
    }
    CHECK_THROWS_AS(psi_hat(-0.1, down), DomainError);
}

TEST_CASE("market validation") {
    MarketSpec m;
    CHECK_NOTHROW(validate(m));
    m.rho = 0.0;
    CHECK_THROWS_AS(validate(m), DomainError);
    m = MarketSpec{};
    m.sigma = 0.0;
    CHECK_THROWS_AS(validate(m), DomainError);
    m = MarketSpec{};
    m.gamma_jump = -1.0;
    CHECK_THROWS_AS(validate(m), DomainError);
    m = MarketSpec{};
    m.x0_wealth = -1.0;
    CHECK_THROWS_AS(validate(m), DomainError);
    m = MarketSpec{};
    m.kernel = Kernel::exp_sum({2.0}, {1.0});
    CHECK_THROWS_AS(value_closed_form(m, quick_options(10)), DomainError);
}

TEST_CASE("deterministic intensity has an exact value") {
    MarketSpec m;
    m.kernel = Kernel::exp_sum({0.0}, {1.0});
    const auto v = value_closed_form(m, quick_options(100));
    const double h = psi_hat(m.lambda0, m).value * m.rho;
    const double exact = (std::log(m.x0_wealth) + std::log(m.rho)) / m.rho + (m.r - m.rho + h) / (m.rho * m.rho);
    CHECK(v.se == 0.0);
    CHECK(std::abs(v.value - exact) <= v.tail_bound + 1e-9);
}

TEST_CASE("truncation horizon must control the tail") {
    auto o = quick_options(10);
    o.horizon_trunc = 5.0;
    try {
        static_cast<void>(value_closed_form(contagion_market(), o));
        FAIL("expected a horizon error");
    } catch (const DomainError& e) {
        CHECK(std::string(e.what()).find("too short") != std::string::npos);
    }
    const double need = required_horizon(contagion_market(), o.lambda_max, o.tail_tolerance);
    o.horizon_trunc = need + 0.1;
    CHECK_NOTHROW(static_cast<void>(value_closed_form(contagion_market(), o)));
}

TEST_CASE("cash-only policy has a closed-form value") {
    MarketSpec m = contagion_market();
    auto o = quick_options(20);
    o.horizon_trunc = 80.0;
    const auto v = policy_simulation_value(m, constant_policy(m.rho, 0.0), o);
    const double exact = (std::log(m.x0_wealth) + std::log(m.rho)) / m.rho + (m.r - m.rho) / (m.rho * m.rho);
    CHECK(v.value == Approx(exact).epsilon(1e-5));
    CHECK(v.se < 1e-6);
    CHECK(v.tail_bound < 1e-4);
}

TEST_CASE("policy validation") {
    MarketSpec m = contagion_market();
    CHECK_THROWS_AS(policy_simulation_value(m, constant_policy(m.rho, 1.5), quick_options(5)), DomainError);
    CHECK_THROWS_AS(policy_simulation_value(m, constant_policy(0.0, 0.5), quick_options(5)), DomainError);
}

TEST_CASE("value sign convention agrees with the policy simulation") {
    const MarketSpec m = contagion_market();
    const auto o = quick_options(2000);
    const auto cf = value_closed_form(m, o);
    const auto sim = policy_simulation_value(m, optimal_policy(m), o);
    const double se = std::hypot(cf.se, sim.se);
    CHECK(std::abs(cf.value - sim.value) <= 3.0 * se + cf.tail_bound + sim.tail_bound);

    // Opposite signs on both the constant and the intensity integral.
    const double integral = cf.value - value_constant(m);
    const double flipped =
        (std::log(m.x0_wealth) + 1.0 - m.r / m.rho - std::log(m.rho)) / m.rho - integral;
    CHECK(std::abs(flipped - sim.value) > 10.0 * se + 1.0);
}
