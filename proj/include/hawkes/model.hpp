#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace hawkes {

/// Coefficient function (t, x) -> value.
using Coefficient = std::function<double(double, double)>;

inline Coefficient constant(double c) {
    return [c](double, double) { return c; };
}

/// b(y) applied to a mark before it enters the intensity.
enum class MarkTransform { one, identity, absolute };

double apply(MarkTransform b, double y);
std::string to_string(MarkTransform b);
MarkTransform mark_transform_from_string(const std::string& name);

/// Distribution m of the marks y attached to the Poisson points.
class MarkDistribution {
public:
    enum class Kind { point_mass, exponential, normal, empirical };

    static MarkDistribution point_mass(double value = 1.0);
    static MarkDistribution exponential(double rate);
    /// Normal(mean, sd) truncated to mean +- truncation * sd.
    static MarkDistribution normal(double mean, double sd, double truncation = 8.0);
    static MarkDistribution empirical(std::vector<double> values);

    [[nodiscard]] double sample(std::mt19937_64& rng) const;

    /// int f(y) m(dy): exact for point masses and empirical marks, 64-point Gauss-Legendre on the
    /// effective support otherwise.
    [[nodiscard]] double expectation(const std::function<double(double)>& f) const;

    [[nodiscard]] Kind kind() const { return kind_; }
    [[nodiscard]] std::string describe() const;

private:
    MarkDistribution(Kind kind, std::vector<double> params) : kind_(kind), params_(std::move(params)) {}

    Kind kind_;
    std::vector<double> params_;
};

/// psi: nondecreasing, nonnegative jump-rate function.
struct JumpRate {
    std::string name;
    std::function<double(double)> eval;
    std::optional<double> upper_bound;

    double operator()(double u) const { return eval(u); }

    static JumpRate identity();
    static JumpRate positive_part();
    /// min(max(u, 0), cap)
    static JumpRate capped(double cap);
    static JumpRate zero();
    /// max(u + shift, 0)
    static JumpRate shifted_positive(double shift);
};

/// Which branch of the growth assumption the model relies on.
struct GronwallCase {
    enum class Kind { psi_bounded, state_free };
    Kind kind = Kind::state_free;
    double psi_bound = std::numeric_limits<double>::infinity();
};

/// All coefficients of the Hawkes jump-diffusion
///   dX = mu dt + sigma dW + y gamma(t, X-) dN,
///   lambda_t = lambda_inf(t, X_t-) + psi( sum_{s<t} phi(t - s) b(y_s) nu(s, X_s-) ).
struct ModelSpec {
    std::string name = "custom";
    Coefficient mu = constant(0.0);
    Coefficient sigma = constant(0.0);
    Coefficient gamma = constant(1.0);
    Coefficient nu = constant(1.0);
    Coefficient lambda_inf = constant(1.0);
    JumpRate psi = JumpRate::identity();
    MarkTransform b = MarkTransform::one;
    MarkDistribution marks = MarkDistribution::point_mass(1.0);
    double x0 = 0.0;
    GronwallCase gronwall{};
    /// lambda_inf and nu do not depend on x (enables the state-independent intensity bounds).
    bool state_independent_intensity = false;
};

struct HawkesOuParams {
    double mean_reversion = 0.5;
    double sigma = 1.0;
    double gamma_scale = 40.0;
    double gamma_curvature = 16.0;
    double lambda_inf = 1.0;
    double psi_cap = 7.0;
    double nu_floor = 0.2;
    double nu_width = 0.1;
    double x0 = 0.0;
};

/// dX = -a X dt + s dW + gamma(X-) dN with gamma(x) = -40x/(1+16x^2),
/// lambda = 1 + ((.)_+ ^ 7)(int phi nu(X)), nu(x) = 0.2 + 0.8 exp(-0.1 x^2).
ModelSpec hawkes_ou(const HawkesOuParams& p = {});

struct AffineParams {
    double drift_const = 0.0;
    double drift_linear = 0.0;
    double sigma = 0.0;
    double gamma = 1.0;
    double nu = 1.0;
    double lambda_inf = 1.0;
    JumpRate psi = JumpRate::identity();
    double x0 = 0.0;
};

/// Constant-coefficient model with affine drift; intensity independent of X.
ModelSpec affine_model(const AffineParams& p);

/// psi = identity, nu = b = gamma = 1, X counts the jumps.
ModelSpec linear_hawkes(double lambda0);

/// psi = 0: homogeneous Poisson process of the given rate, X counts the jumps.
ModelSpec poisson_model(double rate);

}  // namespace hawkes
