#include "fixtures.hpp"
#include "hawkes/errors.hpp"
#include "hawkes/lift.hpp"
#include "hawkes/simulate.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

using namespace hawkes;
using doctest::Approx;

TEST_CASE("zero kernel gives a constant intensity") {
    const auto model = poisson_model(1.5);
    const auto d = make_driver(4, 0.1, 20.0, 2.0, model.marks);
    const auto path = simulate_volterra(model, Kernel::zero(), d);
    for (double l : path.lambda) CHECK(l == 1.5);
    CHECK(path.x.back() == static_cast<double>(path.jumps.size()));
    CHECK(path.candidates == d.poisson_points.size());
}

TEST_CASE("accepted atoms are exactly those below the intensity") {
    const auto model = poisson_model(1.0);
    const auto d = make_driver(8, 0.5, 50.0, 3.0, model.marks);
    const auto path = simulate_volterra(model, Kernel::zero(), d);
    std::size_t expected = 0;
    for (const auto& p : d.poisson_points) expected += p.theta <= 1.0 ? 1 : 0;
    CHECK(path.jumps.size() == expected);
}

TEST_CASE("intensity above lambda_max raises instead of clipping") {
    const auto model = linear_hawkes(1.0);
    const auto kernel = Kernel::exp_sum({0.5}, {1.0});
    bool raised = false;
    for (std::uint64_t seed = 0; seed < 20 && !raised; ++seed) {
        const auto d = make_driver(seed, 0.1, 20.0, 1.2, model.marks);
        try {
            simulate_volterra(model, kernel, d);
        } catch (const DominationViolated& e) {
            raised = true;
            CHECK(std::string(e.what()).find("lambda_max") != std::string::npos);
            CHECK(e.intensity > 1.2);
        }
    }
    CHECK(raised);
}

TEST_CASE("non-finite coefficients raise a numeric error") {
    auto model = poisson_model(1.0);
    model.mu = [](double t, double) { return t > 1.0 ? std::numeric_limits<double>::quiet_NaN() : 0.0; };
    const auto d = make_driver(1, 0.1, 2.0, 2.0, model.marks);
    CHECK_THROWS_AS(simulate_volterra(model, Kernel::zero(), d), NumericError);
}

TEST_CASE("simulation is deterministic") {
    const auto model = hawkes_ou();
    const auto d = make_driver(21, 0.01, 10.0, 9.0, model.marks);
    CHECK(simulate_volterra(model, nonmonotone_kernel(), d) == simulate_volterra(model, nonmonotone_kernel(), d));
}

TEST_CASE("Volterra and lifted engines agree on exponential sums") {
    const auto model = hawkes_ou();
    const auto kernel = fixtures::phi3();
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto d = make_driver(seed, 0.01, 10.0, 9.0, model.marks);
        const auto v = simulate_volterra(model, kernel, d);
        const auto l = simulate_lifted(model, kernel, d);
        REQUIRE(v.jumps.size() == l.jumps.size());
        for (std::size_t i = 0; i < v.jumps.size(); ++i) CHECK(v.jumps[i].point_index == l.jumps[i].point_index);
        double sup = 0.0;
        for (std::size_t i = 0; i < v.x.size(); ++i) sup = std::max(sup, std::abs(v.x[i] - l.x[i]));
        CHECK(sup <= 1e-10);
        CHECK(l.kernel_terms <= v.kernel_terms + 3 * d.timeline.size() + 3);
    }
}

TEST_CASE("moment estimates for a Poisson process") {
    const auto model = poisson_model(2.0);
    std::vector<PathRecord> paths;
    for (std::uint64_t s = 0; s < 200; ++s)
        paths.push_back(simulate_volterra(model, Kernel::zero(), make_driver(s, 0.5, 5.0, 3.0, model.marks)));
    const auto m = estimate_moments(paths, 1.0);
    CHECK(m.sup_mean_lambda == Approx(2.0));
    CHECK(m.sup_mean_lambda_sq == Approx(4.0));
    CHECK(m.sup_mean_lambda_se == Approx(0.0));
    // X is the counting process, so sup |X| = N_T with mean 10.
    CHECK(std::abs(m.sup_abs_x_p - 10.0) < 4.0 * m.sup_abs_x_p_se);

    const auto single = estimate_moments(std::span(paths).first(1), 2.0);
    CHECK(std::isnan(single.sup_abs_x_p_se));
    CHECK_THROWS_AS(estimate_moments(std::span<const PathRecord>{}, 1.0), DomainError);
    CHECK_THROWS_AS(MomentAccumulator(0.5), DomainError);
}

TEST_CASE("path and jump CSV layout") {
    const auto model = linear_hawkes(1.0);
    const auto kernel = Kernel::exp_sum({0.5}, {1.0});
    const auto d = make_driver(2, 0.5, 2.0, 20.0, model.marks);
    const auto path = simulate_lifted(model, kernel, d);
    std::ostringstream os;
    write_path_csv(os, path);
    CHECK(os.str().rfind("t,x,lambda,xi_1\n0,0,1,0\n", 0) == 0);
    std::ostringstream js;
    write_jumps_csv(js, path);
    CHECK(js.str().rfind("t,y,dx\n", 0) == 0);
}
