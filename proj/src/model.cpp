#include "hawkes/model.hpp"

#include "hawkes/csv.hpp"
#include "hawkes/errors.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>

namespace hawkes {

double apply(MarkTransform b, double y) {
    switch (b) {
        case MarkTransform::one: return 1.0;
        case MarkTransform::identity: return y;
        case MarkTransform::absolute: return std::abs(y);
    }
    return 1.0;
}

std::string to_string(MarkTransform b) {
    switch (b) {
        case MarkTransform::one: return "one";
        case MarkTransform::identity: return "identity";
        case MarkTransform::absolute: return "abs";
    }
    return "one";
}

MarkTransform mark_transform_from_string(const std::string& name) {
    if (name == "one" || name == "constant") return MarkTransform::one;
    if (name == "identity") return MarkTransform::identity;
    if (name == "abs" || name == "absolute") return MarkTransform::absolute;
    throw DomainError("unknown mark transform '" + name + "' (expected one, identity, abs)");
}

MarkDistribution MarkDistribution::point_mass(double value) {
    if (!std::isfinite(value)) throw DomainError("point mass must be finite");
    return {Kind::point_mass, {value}};
}

MarkDistribution MarkDistribution::exponential(double rate) {
    if (!(rate > 0.0)) throw DomainError("exponential marks need rate > 0");
    return {Kind::exponential, {rate}};
}

MarkDistribution MarkDistribution::normal(double mean, double sd, double truncation) {
    if (!(sd > 0.0) || !(truncation > 0.0)) throw DomainError("normal marks need sd > 0 and truncation > 0");
    return {Kind::normal, {mean, sd, truncation}};
}

MarkDistribution MarkDistribution::empirical(std::vector<double> values) {
    if (values.empty()) throw DomainError("empirical marks need at least one value");
    return {Kind::empirical, std::move(values)};
}

double MarkDistribution::sample(std::mt19937_64& rng) const {
    switch (kind_) {
        case Kind::point_mass: return params_[0];
        case Kind::exponential: return std::exponential_distribution<double>(params_[0])(rng);
        case Kind::normal: {
            std::normal_distribution<double> z(0.0, 1.0);
            for (;;) {
                const double v = z(rng);
                if (std::abs(v) <= params_[2]) return params_[0] + params_[1] * v;
            }
        }
        case Kind::empirical: {
            std::uniform_int_distribution<std::size_t> pick(0, params_.size() - 1);
            return params_[pick(rng)];
        }
    }
    return 0.0;
}

double MarkDistribution::expectation(const std::function<double(double)>& f) const {
    using GL = boost::math::quadrature::gauss<double, 64>;
    switch (kind_) {
        case Kind::point_mass: return f(params_[0]);
        case Kind::exponential: {
            const double rate = params_[0];
            const double upper = 40.0 / rate;
            const double mass = -std::expm1(-rate * upper);
            const double value = GL::integrate([&](double y) { return f(y) * rate * std::exp(-rate * y); }, 0.0, upper);
            return value / mass;
        }
        case Kind::normal: {
            const double m = params_[0];
            const double s = params_[1];
            const double k = params_[2];
            // Density in standard units, split at 0 so the peak is resolved.
            auto density = [](double z) { return std::exp(-0.5 * z * z); };
            const double mass = GL::integrate(density, -k, 0.0) + GL::integrate(density, 0.0, k);
            auto g = [&](double z) { return f(m + s * z) * density(z); };
            const double value = GL::integrate(g, -k, 0.0) + GL::integrate(g, 0.0, k);
            if (!std::isfinite(value)) throw NumericError("mark integral is not finite");
            return value / mass;
        }
        case Kind::empirical: {
            double total = 0.0;
            for (double y : params_) total += f(y);
            return total / static_cast<double>(params_.size());
        }
    }
    return 0.0;
}

std::string MarkDistribution::describe() const {
    switch (kind_) {
        case Kind::point_mass: return "point_mass(" + csv::number(params_[0]) + ")";
        case Kind::exponential: return "exponential(" + csv::number(params_[0]) + ")";
        case Kind::normal:
            return "normal(" + csv::number(params_[0]) + ", " + csv::number(params_[1]) + ", +-" +
                   csv::number(params_[2]) + "sd)";
        case Kind::empirical: return "empirical(" + std::to_string(params_.size()) + " values)";
    }
    return "?";
}

JumpRate JumpRate::identity() {
    return {"identity", [](double u) { return u; }, std::nullopt};
}

JumpRate JumpRate::positive_part() {
    return {"positive_part", [](double u) { return std::max(u, 0.0); }, std::nullopt};
}

JumpRate JumpRate::capped(double cap) {
    if (!(cap >= 0.0)) throw DomainError("psi cap must be >= 0");
    return {"capped(" + csv::number(cap) + ")", [cap](double u) { return std::clamp(u, 0.0, cap); }, cap};
}

JumpRate JumpRate::zero() {
    return {"zero", [](double) { return 0.0; }, 0.0};
}

JumpRate JumpRate::shifted_positive(double shift) {
    return {"shifted_positive(" + csv::number(shift) + ")", [shift](double u) { return std::max(u + shift, 0.0); },
            std::nullopt};
}

ModelSpec hawkes_ou(const HawkesOuParams& p) {
    ModelSpec m;
    m.name = "hawkes_ou";
    m.mu = [a = p.mean_reversion](double, double x) { return -a * x; };
    m.sigma = constant(p.sigma);
    m.gamma = [s = p.gamma_scale, c = p.gamma_curvature](double, double x) { return -(s * x) / (1.0 + c * x * x); };
    m.nu = [f = p.nu_floor, w = p.nu_width](double, double x) { return f + (1.0 - f) * std::exp(-w * x * x); };
    m.lambda_inf = constant(p.lambda_inf);
    m.psi = JumpRate::capped(p.psi_cap);
    m.b = MarkTransform::one;
    m.marks = MarkDistribution::point_mass(1.0);
    m.x0 = p.x0;
    m.gronwall = {GronwallCase::Kind::psi_bounded, p.psi_cap};
    return m;
}

ModelSpec affine_model(const AffineParams& p) {
    ModelSpec m;
    m.name = "affine";
    m.mu = [c = p.drift_const, l = p.drift_linear](double, double x) { return c + l * x; };
    m.sigma = constant(p.sigma);
    m.gamma = constant(p.gamma);
    m.nu = constant(p.nu);
    m.lambda_inf = constant(p.lambda_inf);
    m.psi = p.psi;
    m.x0 = p.x0;
    m.state_independent_intensity = true;
    if (p.psi.upper_bound) {
        m.gronwall = {GronwallCase::Kind::psi_bounded, *p.psi.upper_bound};
    } else {
        m.gronwall = {GronwallCase::Kind::state_free, std::numeric_limits<double>::infinity()};
    }
    return m;
}

ModelSpec linear_hawkes(double lambda0) {
    AffineParams p;
    p.lambda_inf = lambda0;
    p.psi = JumpRate::identity();
    ModelSpec m = affine_model(p);
    m.name = "linear_hawkes";
    return m;
}

ModelSpec poisson_model(double rate) {
    AffineParams p;
    p.lambda_inf = rate;
    p.psi = JumpRate::zero();
    ModelSpec m = affine_model(p);
    m.name = "poisson";
    return m;
}

}  // namespace hawkes
