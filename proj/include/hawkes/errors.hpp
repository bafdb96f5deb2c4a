#pragma once

#include <stdexcept>
#include <string>

namespace hawkes {

/// Kernel is not finite or not integrable on its support.
struct InvalidKernel : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Gram matrix of the exponential ladder exceeds the configured condition threshold.
struct IllConditioned : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The running intensity exceeded the dominating level of the noise driver.
struct DominationViolated : std::runtime_error {
    DominationViolated(double time, double intensity, double lambda_max)
        : std::runtime_error("intensity " + std::to_string(intensity) + " at t=" + std::to_string(time) +
                             " exceeds lambda_max=" + std::to_string(lambda_max) +
                             "; increase lambda_max to at least sup(lambda_inf) + sup(psi)"),
          time(time),
          intensity(intensity),
          lambda_max(lambda_max) {}
    DominationViolated(const std::string& message, double lambda_max)
        : std::runtime_error(message), time(0.0), intensity(0.0), lambda_max(lambda_max) {}

    double time;
    double intensity;
    double lambda_max;
};

/// NaN/inf produced by a coefficient, or a non-positive wealth.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Argument outside the operation's domain.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

/// Neumann series for the resolvent does not converge.
struct DivergentSeries : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace hawkes
