#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace hawkes {

/// Quantities below e^{-5} are treated as negligible when choosing truncation defaults.
inline constexpr double kNegligible = 6.737946999085467e-03;

/// phi(t) = sum_k eta_k exp(-beta_k t), with 0 < beta_1 < ... < beta_n.
struct ExpSum {
    std::vector<double> eta;
    std::vector<double> beta;

    [[nodiscard]] std::size_t size() const { return eta.size(); }
    [[nodiscard]] double operator()(double t) const;
};

/// How the integral of a general kernel beyond `t_cut` is obtained.
enum class TailRule {
    zero,       ///< kernel is identically zero past t_cut (tabulated kernels)
    integrate,  ///< the analytic tail is integrated on [t_cut, inf) by exp-sinh quadrature
};

struct GeneralKernel {
    std::string name;
    std::function<double(double)> eval;
    double t_cut = 200.0;
    TailRule tail = TailRule::integrate;
};

/// Memory kernel: either a black-box function on [0, inf) or an explicit exponential sum.
class Kernel {
public:
    static Kernel exp_sum(std::vector<double> eta, std::vector<double> beta);
    /// eta_k attached to the ladder beta_base * k, k = 1..n.
    static Kernel ladder(std::vector<double> eta, double beta_base);
    static Kernel general(std::string name, std::function<double(double)> eval, double t_cut = 200.0,
                          TailRule tail = TailRule::integrate);
    /// Linear interpolation through (t_i, phi_i); zero past the last abscissa.
    static Kernel tabulated(std::vector<double> t, std::vector<double> values);
    static Kernel zero();

    [[nodiscard]] double operator()(double t) const;
    [[nodiscard]] bool is_exp_sum() const { return std::holds_alternative<ExpSum>(repr_); }
    [[nodiscard]] const ExpSum& as_exp_sum() const;
    [[nodiscard]] const GeneralKernel* as_general() const { return std::get_if<GeneralKernel>(&repr_); }
    [[nodiscard]] std::string describe() const;

    /// Same kernel multiplied by `factor`.
    [[nodiscard]] Kernel scaled(double factor) const;

private:
    explicit Kernel(std::variant<GeneralKernel, ExpSum> repr) : repr_(std::move(repr)) {}

    std::variant<GeneralKernel, ExpSum> repr_;
};

/// (1 - t) / (1 + t^2.5): excites for t < 1, inhibits afterwards, O(t^-1.5) tail.
Kernel nonmonotone_kernel();

/// scale * (1 + t)^(-exponent), exponent > 1; L1 norm scale / (exponent - 1).
Kernel power_law_kernel(double scale, double exponent);

inline constexpr double kInfiniteHorizon = std::numeric_limits<double>::infinity();

/// int_0^inf |phi(t)| dt.
double l1_norm(const Kernel& k);

/// int_0^H |phi(t)| dt on a finite window (H = inf gives l1_norm).
double l1_norm(const Kernel& k, double horizon);

/// int_0^H exp(-s t) phi(t) dt; exact for exponential sums.
double laplace_moment(const Kernel& k, double s, double horizon = kInfiniteHorizon);

/// I(eta) = int_0^H (sum_k eta_k e^{-beta k t} - phi(t))^2 dt.
double l2_error_sq(const Kernel& k, std::span<const double> eta, double beta_base,
                   double horizon = kInfiniteHorizon);

/// J(eta) = int_0^H |sum_k eta_k e^{-beta k t} - phi(t)| dt.
double l1_error(const Kernel& k, std::span<const double> eta, double beta_base,
                double horizon = kInfiniteHorizon);

struct FitResult {
    std::vector<double> eta;
    double beta_base = 0.0;
    std::size_t n = 0;
    double l1_error = 0.0;
    double l2_error_sq = 0.0;
    double hilbert_condition = 1.0;
    double horizon = kInfiniteHorizon;
    bool converged = true;
    std::size_t evaluations = 0;

    [[nodiscard]] Kernel kernel() const { return Kernel::ladder(eta, beta_base); }
};

struct FitOptions {
    /// Fit window [0, horizon]; infinite by default.
    double horizon = kInfiniteHorizon;
    double condition_threshold = 1e12;
    // L1 search only.
    std::size_t max_evaluations = 20000;
    double step_tolerance = 1e-7;
    double relative_tolerance = 1e-12;
};

/// Gram matrix of the ladder e^{-beta k t} on [0, H]; 1/(beta (i+j)) for H = inf.
std::vector<double> ladder_gram(std::size_t n, double beta_base, double horizon = kInfiniteHorizon);

/// Least-squares fit: solves M_H eta = v by Cholesky.
FitResult fit_l2(const Kernel& phi, std::size_t n, double beta_base, const FitOptions& opts = {});

/// Minimises J by compass search along the Gram eigenbasis, starting from `init` or the L2 fit.
FitResult fit_l1(const Kernel& phi, std::size_t n, double beta_base,
                 const std::optional<std::vector<double>>& init = std::nullopt, const FitOptions& opts = {});

/// n, beta, eta..., l1_error, l2_error_sq, condition
std::vector<std::string> fit_csv_row(const FitResult& fit);

}  // namespace hawkes
