#include "hawkes/diagnostics.hpp"
#include "hawkes/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace hawkes;
using doctest::Approx;

TEST_CASE("linear Hawkes stability verdicts") {
    const auto model = linear_hawkes(1.0);
    const auto stable = check_assumptions(model, Kernel::exp_sum({0.5}, {1.0}));
    CHECK(stable.stability_product == Approx(0.5).epsilon(1e-12));
    CHECK(stable.L_psi == Approx(1.0));
    CHECK(stable.Eb == 1.0);
    CHECK(stable.stability_verdict == Verdict::pass);
    CHECK(stable.overall == Verdict::pass);

    const auto unstable = check_assumptions(model, Kernel::exp_sum({5.0}, {1.0}));
    CHECK(unstable.stability_product == Approx(5.0));
    CHECK(unstable.overall == Verdict::fail);
    CHECK(exit_code(unstable.overall) == 2);

    const auto edge = check_assumptions(model, Kernel::exp_sum({0.99}, {1.0}));
    CHECK(edge.overall == Verdict::unknown);
    CHECK(exit_code(edge.overall) == 3);
}

TEST_CASE("non-monotone kernel example") {
    const auto r = check_assumptions(hawkes_ou(), nonmonotone_kernel());
    CHECK(r.L_psi == Approx(1.0));
    CHECK(r.phi_l1 == Approx(1.721635764).epsilon(1e-8));
    CHECK(r.stability_product == Approx(r.phi_l1));
    CHECK(r.stability_verdict == Verdict::fail);
    CHECK(r.gronwall_ok);
    CHECK(r.nu_sup <= 1.0);
    CHECK_THROWS_AS(intensity_bound(r), DomainError);
    // Halving the kernel brings the product below one.
    const auto half = check_assumptions(hawkes_ou(), nonmonotone_kernel().scaled(0.5));
    CHECK(half.stability_verdict == Verdict::pass);
    CHECK(intensity_bound(half) == Approx(1.0 / (1.0 - 0.5 * 1.721635764)).epsilon(1e-8));
}

TEST_CASE("verdict is monotone in kernel scale") {
    const auto model = linear_hawkes(1.0);
    auto rank = [](Verdict v) { return v == Verdict::pass ? 0 : v == Verdict::unknown ? 1 : 2; };
    int prev = 0;
    for (double c = 0.1; c < 4.0; c *= 1.15) {
        const auto r = check_assumptions(model, Kernel::exp_sum({c}, {1.0}));
        CHECK(rank(r.stability_verdict) >= prev);
        prev = rank(r.stability_verdict);
    }
    CHECK(prev == 2);
}

TEST_CASE("assumption failures are reported") {
    auto model = linear_hawkes(1.0);
    model.lambda_inf = [](double, double x) { return x; };
    const auto r = check_assumptions(model, Kernel::exp_sum({0.5}, {1.0}));
    CHECK(r.lipschitz_verdict == Verdict::fail);
    CHECK_FALSE(r.notes.empty());

    auto wide = linear_hawkes(1.0);
    wide.nu = constant(1.5);
    CHECK(check_assumptions(wide, Kernel::exp_sum({0.1}, {1.0})).stability_verdict == Verdict::fail);

    auto decreasing = linear_hawkes(1.0);
    decreasing.psi = JumpRate{"neg", [](double u) { return std::exp(-u); }, std::nullopt};
    CHECK(check_assumptions(decreasing, Kernel::exp_sum({0.1}, {1.0})).stability_verdict == Verdict::fail);

    auto moving = hawkes_ou();
    moving.gronwall = {GronwallCase::Kind::state_free, 0.0};
    CHECK(check_assumptions(moving, Kernel::exp_sum({0.1}, {1.0})).gronwall_verdict == Verdict::fail);
}

TEST_CASE("report renderings") {
    const auto r = check_assumptions(linear_hawkes(1.0), Kernel::exp_sum({0.5}, {1.0}));
    std::ostringstream text;
    write_report_text(text, r);
    CHECK(text.str().find("stability_product") != std::string::npos);
    CHECK(text.str().find("PASS") != std::string::npos);
    std::ostringstream csv;
    write_report_csv(csv, r);
    CHECK(csv.str().rfind("key,value\n", 0) == 0);
    CHECK(csv.str().find("stability_product,0.5\n") != std::string::npos);
}

TEST_CASE("resolvent of an exponential kernel has closed form") {
    const double eta = 0.5;
    const double beta = 1.0;
    const auto q = resolvent(Kernel::exp_sum({eta}, {beta}), 1e-3, 10.0);
    double sup = 0.0;
    for (std::size_t i = 0; i < q.values.size(); ++i) {
        const double t = static_cast<double>(i) * q.dt;
        sup = std::max(sup, std::abs(q.values[i] - eta * std::exp(-(beta - eta) * t)));
    }
    CHECK(sup < 1e-6);
    CHECK(q(2.5) == Approx(eta * std::exp(-(beta - eta) * 2.5)).epsilon(1e-6));
}

TEST_CASE("resolvent fixed point and mass identity") {
    const auto kernel = Kernel::exp_sum({0.2, 0.3}, {1.0, 2.5});
    const double norm = l1_norm(kernel);
    const double dt = 2e-3;
    const auto q = resolvent(kernel, dt, 30.0);
    std::vector<double> phi(q.values.size());
    for (std::size_t i = 0; i < phi.size(); ++i) phi[i] = kernel(static_cast<double>(i) * dt);
    const auto conv = trapezoid_convolve(phi, q.values, dt);
    double residual = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) residual = std::max(residual, std::abs(q.values[i] - phi[i] - conv[i]));
    CHECK(residual < 1e-8);

    double mass = 0.0;
    for (std::size_t i = 0; i < q.values.size(); ++i) mass += q.values[i];
    mass = dt * (mass - 0.5 * (q.values.front() + q.values.back()));
    CHECK(mass == Approx(norm / (1.0 - norm)).epsilon(1e-6));
}

TEST_CASE("resolvent edge cases") {
    const auto zero = resolvent(Kernel::zero(), 0.01, 5.0);
    for (double v : zero.values) CHECK(v == 0.0);
    CHECK(zero.terms == 1);
    CHECK_THROWS_AS(resolvent(Kernel::exp_sum({1.0}, {1.0}), 0.01, 5.0), DivergentSeries);
    CHECK_THROWS_AS(resolvent(nonmonotone_kernel(), 0.01, 5.0), DivergentSeries);
}

TEST_CASE("intensity bound") {
    CHECK(intensity_bound(linear_hawkes(1.0), Kernel::exp_sum({0.5}, {1.0})) == Approx(2.0));
    CHECK(intensity_bound(linear_hawkes(0.0), Kernel::exp_sum({0.5}, {1.0})) == 0.0);
    CHECK_THROWS_AS(intensity_bound(linear_hawkes(1.0), Kernel::exp_sum({2.0}, {1.0})), DomainError);
}
