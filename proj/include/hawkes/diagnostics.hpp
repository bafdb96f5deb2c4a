#pragma once

#include "hawkes/kernel.hpp"
#include "hawkes/model.hpp"

#include <limits>
#include <ostream>
#include <string>
#include <vector>

namespace hawkes {

enum class Verdict { pass, fail, unknown };

std::string to_string(Verdict v);

/// CLI exit status for a verdict: 0 pass, 2 fail, 3 unknown.
int exit_code(Verdict v);

/// Deterministic sample grid used for the Lipschitz and sign checks.
struct SamplingBox {
    double t_min = 0.0;
    double t_max = 10.0;
    std::size_t t_samples = 11;
    double x_min = -10.0;
    double x_max = 10.0;
    std::size_t x_samples = 401;
    /// Argument range for psi. NaN picks 0 when the kernel, nu and b(Y) are sampled nonnegative
    /// (the convolution cannot go below 0) and -u_max otherwise.
    double u_min = std::numeric_limits<double>::quiet_NaN();
    double u_max = 20.0;
    std::size_t u_samples = 4001;
};

struct LipschitzEstimate {
    std::string coefficient;
    double value = 0.0;  ///< max divided difference in x: a lower bound of the true constant
};

struct AssumptionReport {
    std::vector<LipschitzEstimate> lipschitz;  ///< mu, sigma, gamma, nu
    double L_lambda = 0.0;
    double L_psi = 0.0;
    double Eb = 0.0;
    double phi_l1 = 0.0;
    double stability_product = 0.0;
    double lambda_bar = 0.0;  ///< sampled sup of lambda_inf
    double lambda_inf_min = 0.0;
    double psi_at_zero = 0.0;
    double psi_range_min = 0.0;  ///< range on which psi was sampled
    double psi_range_max = 0.0;
    double nu_sup = 0.0;
    bool psi_nonnegative = true;
    bool psi_nondecreasing = true;
    bool gronwall_ok = false;
    Verdict lipschitz_verdict = Verdict::pass;  ///< baseline intensity part of the Lipschitz assumption
    Verdict stability_verdict = Verdict::pass;
    Verdict gronwall_verdict = Verdict::pass;
    Verdict overall = Verdict::pass;
    SamplingBox box;
    std::vector<std::string> notes;
};

/// PASS below 95% of a threshold, FAIL above 105%, UNKNOWN in between.
Verdict classify_below(double value, double threshold);

AssumptionReport check_assumptions(const ModelSpec& model, const Kernel& kernel, const SamplingBox& box = {});

void write_report_text(std::ostream& os, const AssumptionReport& r);
void write_report_csv(std::ostream& os, const AssumptionReport& r);

/// Q = sum_{n>=1} phi^{(n)} tabulated on t_i = i dt.
struct Resolvent {
    double dt = 0.0;
    std::vector<double> values;
    std::size_t terms = 0;

    /// Linear interpolation on the grid.
    [[nodiscard]] double operator()(double t) const;
};

/// Trapezoidal convolution powers summed until the newest term's L1 mass drops below `tolerance`.
/// Throws DivergentSeries when ||phi||_1 >= 1.
Resolvent resolvent(const Kernel& kernel, double dt, double horizon, double tolerance = 1e-10);

/// Trapezoidal convolution of two sequences on the same grid.
std::vector<double> trapezoid_convolve(const std::vector<double>& a, const std::vector<double>& b, double dt);

/// A priori bound sup_t E[lambda_t] <= (lambda_bar + psi(0)) / (1 - L E b(Y) ||phi||_1).
/// Throws DomainError when the stability product is >= 1.
double intensity_bound(const ModelSpec& model, const Kernel& kernel, const SamplingBox& box = {});
double intensity_bound(const AssumptionReport& report);

}  // namespace hawkes
