#include "hawkes/control.hpp"

#include "hawkes/csv.hpp"
#include "hawkes/diagnostics.hpp"
#include "hawkes/errors.hpp"
#include "hawkes/lift.hpp"
#include "hawkes/parallel.hpp"
#include "hawkes/stats.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <optional>
#include <tuple>

namespace hawkes {

void validate(const MarketSpec& mkt) {
    if (!(mkt.rho > 0.0)) throw DomainError("market: rho must be > 0");
    if (!(mkt.x0_wealth > 0.0)) throw DomainError("market: x0_wealth must be > 0");
    if (!(mkt.sigma > 0.0)) throw DomainError("market: sigma must be > 0");
    if (!(mkt.gamma_jump > -1.0)) throw DomainError("market: gamma_jump must be > -1 so that 1 + gamma omega > 0 on [0, 1]");
    if (!(mkt.lambda0 >= 0.0)) throw DomainError("market: lambda0 must be >= 0");
    if (!std::isfinite(mkt.mu) || !std::isfinite(mkt.r)) throw DomainError("market: mu and r must be finite");
}

ModelSpec market_intensity_model(const MarketSpec& mkt) {
    ModelSpec m;
    m.name = "market";
    m.mu = constant(0.0);
    m.sigma = constant(0.0);
    m.gamma = constant(1.0);
    m.nu = constant(1.0);
    m.lambda_inf = constant(0.0);
    m.psi = JumpRate::shifted_positive(mkt.lambda0);
    m.state_independent_intensity = true;
    return m;
}

double investment_gain(double omega, double lam, const MarketSpec& mkt) {
    const double excess = mkt.mu - mkt.r;
    const double jump = lam == 0.0 ? 0.0 : lam * std::log1p(mkt.gamma_jump * omega);
    return excess * omega - 0.5 * mkt.sigma * mkt.sigma * omega * omega + jump;
}

namespace {

double gain_slope(double omega, double lam, const MarketSpec& mkt) {
    return (mkt.mu - mkt.r) - mkt.sigma * mkt.sigma * omega + lam * mkt.gamma_jump / (1.0 + mkt.gamma_jump * omega);
}

// Root of a w^2 + b w + c in (0, 1), if any.
std::optional<double> root_in_unit(double a, double b, double c) {
    if (std::abs(a) < 1e-14) {
        if (b == 0.0) return std::nullopt;
        const double w = -c / b;
        return w > 0.0 && w < 1.0 ? std::optional<double>(w) : std::nullopt;
    }
    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) return std::nullopt;
    const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
    for (double w : {q / a, q == 0.0 ? 0.0 : c / q})
        if (w > 0.0 && w < 1.0) return w;
    return std::nullopt;
}

}  // namespace

PsiHat psi_hat(double lam, const MarketSpec& mkt) {
    if (!(lam >= 0.0)) throw DomainError("psi_hat: intensity must be >= 0, got " + csv::number(lam));
    if (!(mkt.gamma_jump > -1.0)) throw DomainError("psi_hat: 1 + gamma omega <= 0 on [0, 1]");
    if (!(mkt.rho > 0.0) || !(mkt.sigma > 0.0)) throw DomainError("psi_hat: rho and sigma must be > 0");
    const double K = 1.0 / mkt.rho;

    // h is strictly concave, so h' decreases on [0, 1].
    double omega = 0.0;
    if (gain_slope(0.0, lam, mkt) <= 0.0) {
        omega = 0.0;
    } else if (gain_slope(1.0, lam, mkt) >= 0.0) {
        omega = 1.0;
    } else {
        // ((mu - r) - sigma^2 w)(1 + gamma w) + lam gamma = 0
        const double s2 = mkt.sigma * mkt.sigma;
        const double g = mkt.gamma_jump;
        const double ex = mkt.mu - mkt.r;
        const auto root = root_in_unit(-s2 * g, ex * g - s2, ex + lam * g);
        if (root) {
            omega = *root;
        } else {
            const auto best = boost::math::tools::brent_find_minima(
                [&](double w) { return -investment_gain(w, lam, mkt); }, 0.0, 1.0, 52);
            omega = best.first;
        }
    }
    return {K * investment_gain(omega, lam, mkt), omega};
}

double value_constant(const MarketSpec& mkt) {
    return (std::log(mkt.x0_wealth) + std::log(mkt.rho) - 1.0 + mkt.r / mkt.rho) / mkt.rho;
}

namespace {

void require_stable_market(const MarketSpec& mkt) {
    const auto report = check_assumptions(market_intensity_model(mkt), mkt.kernel);
    if (report.stability_verdict == Verdict::fail)
        throw DomainError("market kernel fails the stability condition (||phi||_1 = " + csv::number(report.phi_l1) + ")");
}

double max_psi_hat(const MarketSpec& mkt, double lambda_cap) {
    // sup_omega of functions affine in lambda is convex in lambda: the maximum sits at an endpoint.
    return std::max(psi_hat(0.0, mkt).value, psi_hat(lambda_cap, mkt).value);
}

double log_drift(const MarketSpec& mkt, double c, double omega, double lam) {
    return mkt.r - c + (mkt.mu - mkt.r) * omega - 0.5 * mkt.sigma * mkt.sigma * omega * omega +
           lam * std::log1p(mkt.gamma_jump * omega);
}

double intensity_of(const MarketSpec& mkt, std::span<const double> xi) {
    const auto& e = mkt.kernel.as_exp_sum();
    double u = mkt.lambda0;
    for (std::size_t k = 0; k < xi.size(); ++k) u += e.eta[k] * xi[k];
    return std::max(u, 0.0);
}

void check_options(const ValueOptions& opts) {
    if (!(opts.horizon_trunc > 0.0)) throw DomainError("horizon_trunc must be > 0");
    if (opts.n_paths == 0) throw DomainError("n_paths must be >= 1");
}

}  // namespace

double required_horizon(const MarketSpec& mkt, double lambda_cap, double tolerance) {
    const double top = max_psi_hat(mkt, lambda_cap) / mkt.rho;
    if (top <= tolerance) return 0.0;
    return std::log(top / tolerance) / mkt.rho;
}

ValueEstimate value_closed_form(const MarketSpec& mkt, const ValueOptions& opts) {
    validate(mkt);
    check_options(opts);
    require_stable_market(mkt);
    static_cast<void>(mkt.kernel.as_exp_sum());

    ValueEstimate est;
    est.tail_bound = std::exp(-mkt.rho * opts.horizon_trunc) * max_psi_hat(mkt, opts.lambda_max) / mkt.rho;
    if (est.tail_bound > opts.tail_tolerance)
        throw DomainError("horizon_trunc " + csv::number(opts.horizon_trunc) + " too short: tail bound " +
                          csv::number(est.tail_bound) + " > " + csv::number(opts.tail_tolerance) +
                          "; need horizon_trunc >= " +
                          csv::number(required_horizon(mkt, opts.lambda_max, opts.tail_tolerance)));

    const auto model = market_intensity_model(mkt);
    const auto& e = mkt.kernel.as_exp_sum();
    const bool deterministic = std::all_of(e.eta.begin(), e.eta.end(), [](double v) { return v == 0.0; });
    const std::size_t n = deterministic ? 1 : opts.n_paths;

    RunningStat stat;
    run_indexed<double>(
        n, opts.threads,
        [&](std::size_t i) {
            const auto driver = make_driver(opts.seed0 + i, opts.dt, opts.horizon_trunc, opts.lambda_max, model.marks);
            const auto path = simulate_lifted(model, mkt.kernel, driver);
            double integral = 0.0;
            double prev = psi_hat(path.lambda[0], mkt).value;
            for (std::size_t k = 1; k < path.times.size(); ++k) {
                const double cur = std::exp(-mkt.rho * path.times[k]) * psi_hat(path.lambda[k], mkt).value;
                integral += 0.5 * (path.times[k] - path.times[k - 1]) * (prev + cur);
                prev = cur;
            }
            return integral;
        },
        [&](std::size_t, double&& v) { stat.add(v); });

    est.value = value_constant(mkt) + stat.mean();
    est.se = deterministic ? 0.0 : stat.standard_error();
    est.n_paths = opts.n_paths;
    return est;
}

Policy optimal_policy(const MarketSpec& mkt) { return consumption_policy(mkt, mkt.rho); }

Policy consumption_policy(const MarketSpec& mkt, double consumption) {
    Policy p;
    p.name = consumption == mkt.rho ? "optimal" : "consumption_" + csv::number(consumption);
    p.consumption = [consumption](const PolicyState&) { return consumption; };
    p.fraction = [mkt](const PolicyState& s) { return psi_hat(s.lambda, mkt).omega; };
    return p;
}

Policy constant_policy(double consumption, double fraction) {
    Policy p;
    p.name = "constant_c" + csv::number(consumption) + "_w" + csv::number(fraction);
    p.consumption = [consumption](const PolicyState&) { return consumption; };
    p.fraction = [fraction](const PolicyState&) { return fraction; };
    return p;
}

ValueEstimate policy_simulation_value(const MarketSpec& mkt, const Policy& policy, const ValueOptions& opts) {
    validate(mkt);
    check_options(opts);
    require_stable_market(mkt);
    const auto model = market_intensity_model(mkt);
    const auto& kernel = mkt.kernel.as_exp_sum();
    const double rho = mkt.rho;
    const double T = opts.horizon_trunc;

    auto decide = [&](const PolicyState& s) {
        const double c = policy.consumption(s);
        const double w = policy.fraction(s);
        if (!(c > 0.0)) throw DomainError("policy " + policy.name + ": consumption must be > 0");
        if (!(w >= 0.0 && w <= 1.0)) throw DomainError("policy " + policy.name + ": fraction must lie in [0, 1]");
        return std::pair{c, w};
    };

    RunningStat stat;
    double sup_drift = 0.0;
    run_indexed<std::pair<double, double>>(
        opts.n_paths, opts.threads,
        [&](std::size_t i) {
            const auto driver = make_driver(opts.seed0 + i, opts.dt, T, opts.lambda_max, model.marks);
            std::vector<double> xi(kernel.size(), 0.0);
            double t = 0.0;
            double log_x = std::log(mkt.x0_wealth);
            double lam = intensity_of(mkt, xi);
            auto [c, w] = decide({t, mkt.x0_wealth, lam, xi});
            double value = 0.0;
            double path_sup_drift = 0.0;

            LiftOptions lo;
            lo.observer = [&](const StepInfo& info) {
                const double h = info.node->t - t;
                const double start = std::exp(-rho * t) * (std::log(c) + log_x);
                log_x += (mkt.r + (mkt.mu - mkt.r) * w - c - 0.5 * mkt.sigma * mkt.sigma * w * w) * h +
                         mkt.sigma * w * info.node->dw;
                const double end = std::exp(-rho * info.node->t) * (std::log(c) + log_x);
                value += 0.5 * h * (start + end);
                if (info.accepted) log_x += std::log1p(mkt.gamma_jump * w);
                if (!std::isfinite(log_x)) throw NumericError("wealth left (0, inf) at t=" + csv::number(info.node->t));
                t = info.node->t;
                xi.assign(info.xi_plus.begin(), info.xi_plus.end());
                lam = intensity_of(mkt, xi);
                std::tie(c, w) = decide({t, std::exp(log_x), lam, xi});
            };
            simulate_lifted(model, mkt.kernel, driver, lo);

            const double a_T = log_drift(mkt, c, w, lam);
            value += std::exp(-rho * T) / rho * (std::log(c) + log_x) + std::exp(-rho * T) / (rho * rho) * a_T;
            path_sup_drift = std::max(std::abs(log_drift(mkt, c, w, 0.0)), std::abs(log_drift(mkt, c, w, opts.lambda_max)));
            return std::pair{value, path_sup_drift};
        },
        [&](std::size_t, std::pair<double, double>&& r) {
            stat.add(r.first);
            sup_drift = std::max(sup_drift, r.second);
        });

    ValueEstimate est;
    est.value = stat.mean();
    est.se = stat.standard_error();
    est.tail_bound = std::exp(-rho * T) / (rho * rho) * sup_drift;
    est.n_paths = opts.n_paths;
    return est;
}

}  // namespace hawkes
