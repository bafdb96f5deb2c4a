#include "hawkes/errors.hpp"
#include "hawkes/experiments.hpp"
#include "fixtures.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

using namespace hawkes;
using doctest::Approx;

namespace {

ModelSpec capped_affine() {
    AffineParams p;
    p.drift_linear = -0.5;
    p.sigma = 1.0;
    p.psi = JumpRate::capped(7.0);
    return affine_model(p);
}

CouplingOptions small_run(std::size_t n_paths, double horizon = 5.0) {
    CouplingOptions o;
    o.horizon = horizon;
    o.dt = 0.01;
    o.lambda_max = 9.0;
    o.n_paths = n_paths;
    o.allow_unstable = true;
    return o;
}

}  // namespace

TEST_CASE("identical kernels give zero coupled error") {
    const auto phi = fixtures::phi3();
    const auto r = coupled_error(hawkes_ou(), phi, phi, small_run(40));
    CHECK(r.row.err_X == 0.0);
    CHECK(r.row.err_lambda == 0.0);
    CHECK(r.row.same_event_paths == 40);
    CHECK(r.row.rejected == 0);
    CHECK(r.samples.size() == 40);
}

TEST_CASE("paths with the same accepted events have the same X") {
    const auto r = coupled_error(hawkes_ou(), nonmonotone_kernel(), fixtures::phi3(), small_run(60));
    std::size_t same = 0;
    for (const auto& s : r.samples) {
        if (s.same_events) {
            ++same;
            CHECK(s.sup_dx == 0.0);
        } else {
            CHECK(s.sup_dx > 0.0);
        }
    }
    CHECK(same == r.row.same_event_paths);
    CHECK(same > 0);
    CHECK(same < r.samples.size());
}

TEST_CASE("sup difference grows with the horizon path by path") {
    const auto model = capped_affine();
    const auto phi = power_law_kernel(1.0, 3.0);
    const auto approx = fit_l1(phi, 2, 0.5).kernel();
    const auto shorter = coupled_error(model, phi, approx, small_run(30, 5.0));
    const auto longer = coupled_error(model, phi, approx, small_run(30, 10.0));
    REQUIRE(shorter.samples.size() == longer.samples.size());
    for (std::size_t i = 0; i < shorter.samples.size(); ++i) {
        CHECK(shorter.samples[i].seed == longer.samples[i].seed);
        CHECK(shorter.samples[i].sup_dx <= longer.samples[i].sup_dx);
    }
    CHECK(shorter.row.err_X <= longer.row.err_X);
}

TEST_CASE("rejected paths are replaced by fresh seeds") {
    const auto model = linear_hawkes(1.0);
    const auto phi = Kernel::exp_sum({0.5}, {1.0});
    auto o = small_run(50, 20.0);
    o.lambda_max = 4.0;
    o.max_rejection_rate = 1.0;
    const auto r = coupled_error(model, phi, Kernel::exp_sum({0.45}, {1.0}), o);
    CHECK(r.row.rejected > 0);
    CHECK(r.samples.size() == 50);
    const bool fresh = std::any_of(r.samples.begin(), r.samples.end(), [](const CoupledSample& s) { return s.seed >= 50; });
    CHECK(fresh);

    o.max_rejection_rate = 0.0;
    CHECK_THROWS_AS(coupled_error(model, phi, Kernel::exp_sum({0.45}, {1.0}), o), DominationViolated);
}

TEST_CASE("unstable kernels need an explicit opt-in") {
    auto o = small_run(5);
    o.allow_unstable = false;
    CHECK_THROWS_AS(coupled_error(hawkes_ou(), nonmonotone_kernel(), fixtures::phi3(), o), DomainError);
}

TEST_CASE("results do not depend on the thread count") {
    const auto model = hawkes_ou();
    auto o = small_run(70);
    o.threads = 1;
    const auto one = coupled_error(model, nonmonotone_kernel(), fixtures::phi2(), o);
    o.threads = 3;
    const auto three = coupled_error(model, nonmonotone_kernel(), fixtures::phi2(), o);
    CHECK(one.samples == three.samples);
    CHECK(one.row.err_X == three.row.err_X);
    CHECK(one.row.err_lambda_se == three.row.err_lambda_se);
}

TEST_CASE("shared reference run matches single comparisons") {
    const auto model = hawkes_ou();
    const auto o = small_run(25);
    const auto both = coupled_errors(model, nonmonotone_kernel(), {fixtures::phi2(), fixtures::phi3()}, o);
    REQUIRE(both.size() == 2);
    CHECK(both[0].samples == coupled_error(model, nonmonotone_kernel(), fixtures::phi2(), o).samples);
    CHECK(both[1].samples == coupled_error(model, nonmonotone_kernel(), fixtures::phi3(), o).samples);
}

TEST_CASE("kernel distance oracles") {
    // e^{-t} - 2 e^{-2t} changes sign at log 2; both pieces carry mass 1/4.
    const auto d = kernel_distance(Kernel::exp_sum({1.0}, {1.0}), Kernel::exp_sum({2.0}, {2.0}));
    CHECK(d.l1 == Approx(0.5).epsilon(1e-12));
    CHECK(d.l2_sq == Approx(1.0 / 6.0).epsilon(1e-12));
    CHECK(kernel_distance(fixtures::phi3(), fixtures::phi3()).l1 == 0.0);

    const auto phi = nonmonotone_kernel();
    const auto fit = fit_l2(phi, 3, 0.5);
    const auto g = kernel_distance(phi, fit.kernel());
    CHECK(g.l1 == Approx(l1_error(phi, fit.eta, 0.5)).epsilon(1e-6));
    CHECK(g.l2_sq == Approx(l2_error_sq(phi, fit.eta, 0.5)).epsilon(1e-6));
}

TEST_CASE("ladder fitting") {
    StudyOptions o;
    CHECK_THROWS_AS(fit_ladder(nonmonotone_kernel(), o), DomainError);
    CHECK(fit_method_from_string("l2") == FitMethod::l2);
    CHECK_THROWS_AS(fit_method_from_string("l3"), DomainError);

    o.n_list = {2};
    o.method = FitMethod::l2;
    const auto own = fit_ladder(Kernel::ladder({0.3, -0.1}, 0.5), o);
    CHECK(own[0].l2_error_sq < 1e-20);
    CHECK(own[0].eta[0] == Approx(0.3).epsilon(1e-10));

    o.method = FitMethod::l1;
    o.n_list = {1, 2, 3};
    const auto fits = fit_ladder(nonmonotone_kernel(), o);
    REQUIRE(fits.size() == 3);
    for (std::size_t i = 1; i < fits.size(); ++i) CHECK(fits[i].l1_error < fits[i - 1].l1_error);
}

TEST_CASE("single-path study reports missing standard errors") {
    StudyOptions o;
    o.n_list = {2};
    o.coupling = small_run(1);
    const auto study = convergence_study(hawkes_ou(), nonmonotone_kernel(), o);
    REQUIRE(study.rows.size() == 1);
    CHECK(std::isnan(study.rows[0].err_X_se));
    std::ostringstream os;
    write_convergence_csv(os, study);
    const std::string text = os.str();
    CHECK(text.find("n,l1_dist,l2_dist_sq,err_X,err_X_se,err_lambda,err_lambda_se,horizon,n_paths,rejected") !=
          std::string::npos);
    CHECK(text.find(",NA,") != std::string::npos);
    CHECK(text.find("nan") == std::string::npos);
}

TEST_CASE("convergence study rows follow the ladder") {
    StudyOptions o;
    o.n_list = {1, 2, 3};
    o.coupling = small_run(60, 10.0);
    o.coupling.allow_unstable = false;
    const auto study = convergence_study(capped_affine(), power_law_kernel(1.0, 3.0), o);
    REQUIRE(study.rows.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(study.rows[i].n == o.n_list[i]);
        CHECK(study.rows[i].n_paths == 60);
        CHECK(study.rows[i].l1_dist == Approx(kernel_distance(power_law_kernel(1.0, 3.0), study.fits[i].kernel()).l1));
    }
    CHECK(study.rows[2].l1_dist < study.rows[0].l1_dist);
    CHECK(study.rows[2].err_X < study.rows[0].err_X);
    CHECK(study.slope_err_X > 0.0);
    std::ostringstream os;
    write_samples_csv(os, study);
    CHECK(os.str().rfind("n,seed,sup_dx,dlambda,same_events", 0) == 0);
}
