#pragma once

#include "hawkes/kernel.hpp"
#include "hawkes/model.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>

namespace hawkes {

/// Log-utility investor with a risky asset whose jumps are driven by a self-exciting intensity
///   lambda_t = max(lambda0 + eta . xi_t, 0),
/// wealth dX/X- = (r + (mu - r) omega - c) dt + sigma omega dW + gamma omega dN.
struct MarketSpec {
    double mu = 0.13;
    double r = 0.03;
    double sigma = 0.4;
    double gamma_jump = -0.1;
    double rho = 0.2;
    double x0_wealth = 1.0;
    double lambda0 = 0.5;
    Kernel kernel = Kernel::zero();
};

/// Throws DomainError unless rho > 0, x0_wealth > 0, sigma > 0, gamma_jump > -1, lambda0 >= 0.
void validate(const MarketSpec& mkt);

/// Intensity dynamics of the market as a ModelSpec (X counts the jumps).
ModelSpec market_intensity_model(const MarketSpec& mkt);

/// h(omega) = (mu - r) omega - sigma^2 omega^2 / 2 + lam log(1 + gamma omega).
double investment_gain(double omega, double lam, const MarketSpec& mkt);

struct PsiHat {
    double value = 0.0;  ///< K sup_{omega in [0,1]} h(omega), K = 1/rho
    double omega = 0.0;  ///< maximiser
};

/// Interior optimum from the quadratic h'(omega) = 0, clamped to [0, 1]; Brent search when the
/// quadratic degenerates.
PsiHat psi_hat(double lam, const MarketSpec& mkt);

/// (1/rho)(log x0 + log rho - 1 + r/rho): the part of the value that does not depend on the intensity.
double value_constant(const MarketSpec& mkt);

struct ValueOptions {
    double horizon_trunc = 40.0;
    double dt = 0.01;
    double lambda_max = 12.0;
    std::size_t n_paths = 10000;
    std::uint64_t seed0 = 0;
    std::size_t threads = 1;
    /// value_closed_form refuses horizons whose tail bound exceeds this.
    double tail_tolerance = 1e-3;
};

struct ValueEstimate {
    double value = 0.0;
    double se = 0.0;
    double tail_bound = 0.0;
    std::size_t n_paths = 0;
};

/// V = value_constant + int_0^T e^{-rho t} E[psi_hat(lambda_t)] dt. The intensity is simulated with
/// the lifted engine and the time integral taken by the trapezoid rule on the grid. The tail
/// bound is e^{-rho T} max psi_hat / rho over lambda in [0, lambda_max].
ValueEstimate value_closed_form(const MarketSpec& mkt, const ValueOptions& opts);

/// Horizon at which value_closed_form's tail bound equals `tolerance`.
double required_horizon(const MarketSpec& mkt, double lambda_cap, double tolerance);

struct PolicyState {
    double t = 0.0;
    double wealth = 0.0;
    double lambda = 0.0;
    std::span<const double> xi;
};

struct Policy {
    std::string name;
    std::function<double(const PolicyState&)> consumption;  ///< c > 0
    std::function<double(const PolicyState&)> fraction;     ///< omega in [0, 1]
};

/// c = rho, omega = argmax h at the current intensity.
Policy optimal_policy(const MarketSpec& mkt);
Policy constant_policy(double consumption, double fraction);
/// c = consumption, omega = argmax h at the current intensity.
Policy consumption_policy(const MarketSpec& mkt, double consumption);

/// E int_0^inf e^{-rho t} log(c_t X_t) dt by simulation of log-wealth on the driver's time line.
/// Beyond T the policy is frozen at its state at T: the contribution
/// e^{-rho T}/rho log(c_T X_T) + e^{-rho T}/rho^2 a_T is added per path, and the reported tail
/// bound is e^{-rho T}/rho^2 sup |a| over lambda in [0, lambda_max], where a is the log-wealth drift.
ValueEstimate policy_simulation_value(const MarketSpec& mkt, const Policy& policy, const ValueOptions& opts);

}  // namespace hawkes
