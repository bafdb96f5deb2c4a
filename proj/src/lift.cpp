#include "hawkes/lift.hpp"

#include "engine.hpp"
#include "hawkes/csv.hpp"

#include <cmath>
#include <sstream>

namespace hawkes {

namespace {

class LiftedMemory {
public:
    static constexpr bool kLifted = true;

    LiftedMemory(const ExpSum& kernel, std::vector<double> xi) : kernel_(kernel), xi_(std::move(xi)) {}

    void advance(double h) {
        for (std::size_t k = 0; k < xi_.size(); ++k) xi_[k] *= std::exp(-kernel_.beta[k] * h);
    }

    double excitation(double, std::size_t& terms) const {
        double total = 0.0;
        for (std::size_t k = 0; k < xi_.size(); ++k) total += kernel_.eta[k] * xi_[k];
        terms += xi_.size();
        return total;
    }

    void add(double, double weight) {
        for (double& v : xi_) v += weight;
    }

    [[nodiscard]] std::vector<double> state() const { return xi_; }
    [[nodiscard]] std::span<const double> state_view() const { return xi_; }

private:
    const ExpSum& kernel_;
    std::vector<double> xi_;
};

constexpr double kFiniteDifferenceStep = 1e-5;

}  // namespace

PathRecord simulate_lifted(const ModelSpec& model, const Kernel& kernel, const NoiseDriver& driver,
                           const LiftOptions& opts) {
    const ExpSum& e = kernel.as_exp_sum();
    detail::EngineStart start;
    start.x = model.x0;
    start.t_stop = opts.t_stop;
    std::vector<double> xi(e.size(), 0.0);
    if (opts.initial) {
        if (opts.initial->xi.size() != e.size())
            throw DomainError("initial lifted state has " + std::to_string(opts.initial->xi.size()) +
                              " auxiliary components, kernel has " + std::to_string(e.size()));
        start.t = opts.initial->t;
        start.x = opts.initial->x;
        xi = opts.initial->xi;
    }
    LiftedMemory memory(e, std::move(xi));
    return detail::run_engine(model, driver, memory, start, opts);
}

LiftedState last_state(const PathRecord& path) {
    if (path.times.empty()) throw DomainError("empty path record");
    LiftedState s;
    s.t = path.times.back();
    s.x = path.x.back();
    if (!path.xi.empty()) s.xi = path.xi.back();
    return s;
}

void write_state_csv(std::ostream& os, const LiftedState& s) {
    std::vector<std::string> row{csv::number(s.t), csv::number(s.x)};
    for (double v : s.xi) row.push_back(csv::number(v));
    csv::write_row(os, row);
}

LiftedState read_state_csv(const std::string& row) {
    std::vector<double> values;
    std::stringstream ss(row);
    std::string cell;
    while (std::getline(ss, cell, ',')) values.push_back(std::stod(cell));
    if (values.size() < 2) throw DomainError("lifted state row needs at least t,x");
    LiftedState s;
    s.t = values[0];
    s.x = values[1];
    s.xi.assign(values.begin() + 2, values.end());
    return s;
}

double apply_generator(const ModelSpec& model, const Kernel& kernel, const TestFunction& g, const LiftedState& s) {
    const ExpSum& e = kernel.as_exp_sum();
    if (s.xi.size() != e.size()) throw DomainError("state dimension does not match the kernel");
    if (!g.value) throw DomainError("test function has no value");
    const double t = s.t;
    const double x = s.x;
    const auto& xi = s.xi;
    const double h = kFiniteDifferenceStep;

    const double g0 = g.value(t, x, xi);
    const double gt = g.d_t ? g.d_t(t, x, xi) : (g.value(t + h, x, xi) - g.value(t - h, x, xi)) / (2.0 * h);
    const double gx = g.d_x ? g.d_x(t, x, xi) : (g.value(t, x + h, xi) - g.value(t, x - h, xi)) / (2.0 * h);
    const double gxx =
        g.d_xx ? g.d_xx(t, x, xi) : (g.value(t, x + h, xi) - 2.0 * g0 + g.value(t, x - h, xi)) / (h * h);

    double decay = 0.0;
    std::vector<double> shifted = xi;
    for (std::size_t k = 0; k < xi.size(); ++k) {
        double gk = 0.0;
        if (g.d_xi) {
            gk = g.d_xi(t, x, xi, k);
        } else {
            shifted[k] = xi[k] + h;
            const double up = g.value(t, x, shifted);
            shifted[k] = xi[k] - h;
            const double down = g.value(t, x, shifted);
            shifted[k] = xi[k];
            gk = (up - down) / (2.0 * h);
        }
        decay += e.beta[k] * xi[k] * gk;
    }

    double excitation = 0.0;
    for (std::size_t k = 0; k < xi.size(); ++k) excitation += e.eta[k] * xi[k];
    const double lam = model.lambda_inf(t, x) + model.psi(excitation);
    const double gam = model.gamma(t, x);
    const double nu = model.nu(t, x);
    const double jump = model.marks.expectation([&](double y) {
        std::vector<double> after = xi;
        const double w = nu * apply(model.b, y);
        for (double& v : after) v += w;
        return g.value(t, x + gam * y, after) - g0;
    });
    if (!std::isfinite(jump)) throw NumericError("mark integral in the generator is not finite");

    const double sig = model.sigma(t, x);
    return gt + model.mu(t, x) * gx - decay + 0.5 * sig * sig * gxx + lam * jump;
}

}  // namespace hawkes
