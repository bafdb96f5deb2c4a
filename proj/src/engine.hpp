#pragma once

// Shared thinning/Euler loop behind simulate_volterra and simulate_lifted. The two differ only in
// how the convolution  sum_{s_i < t} phi(t - s_i) c_i  is carried (the Memory policy).

#include "hawkes/errors.hpp"
#include "hawkes/lift.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace hawkes::detail {

inline void check_finite(double v, const char* what, double t) {
    if (!std::isfinite(v)) throw NumericError(std::string("non-finite ") + what + " at t=" + std::to_string(t));
}

struct EngineStart {
    double t = 0.0;
    double x = 0.0;
    double t_stop = std::numeric_limits<double>::infinity();
};

template <class Memory>
PathRecord run_engine(const ModelSpec& model, const NoiseDriver& driver, Memory& memory, const EngineStart& start,
                      const SimulationOptions& opts) {
    PathRecord rec;
    const bool lifted = Memory::kLifted;
    auto intensity = [&](double t, double x) {
        const double excitation = memory.excitation(t, rec.kernel_terms);
        const double lam = model.lambda_inf(t, x) + model.psi(excitation);
        check_finite(lam, "intensity", t);
        if (lam < 0.0) throw NumericError("negative intensity " + std::to_string(lam) + " at t=" + std::to_string(t));
        if (lam > driver.lambda_max) throw DominationViolated(t, lam, driver.lambda_max);
        return lam;
    };
    auto record_grid = [&](double t, double x, double lam) {
        rec.times.push_back(t);
        rec.x.push_back(x);
        rec.lambda.push_back(lam);
        if (lifted) rec.xi.push_back(memory.state());
    };

    double t = start.t;
    double x = start.x;
    record_grid(t, x, intensity(t, x));

    std::vector<double> xi_minus;
    for (const TimelineNode& node : driver.timeline) {
        if (node.t <= start.t) continue;
        if (node.t > start.t_stop) break;

        const double h = node.t - t;
        const double drift = model.mu(t, x);
        const double vol = model.sigma(t, x);
        check_finite(drift, "drift", t);
        check_finite(vol, "volatility", t);
        const double t_prev = t;
        x += drift * h + vol * node.dw;
        t = node.t;
        memory.advance(h);

        const double x_minus = x;
        const double lam = intensity(t, x);
        if (opts.observer && lifted) xi_minus = memory.state();

        bool accepted = false;
        if (node.is_point()) {
            ++rec.candidates;
            const PoissonPoint& p = driver.poisson_points[node.point_index];
            if (p.theta <= lam) {
                accepted = true;
                const double weight = apply(model.b, p.y) * model.nu(t, x);
                const double dx = p.y * model.gamma(t, x);
                check_finite(weight, "jump weight", t);
                check_finite(dx, "jump size", t);
                x += dx;
                memory.add(t, weight);
                rec.jumps.push_back({t, p.y, dx, weight, node.point_index});
            }
        }
        if (node.is_grid()) record_grid(t, x, lam);
        if (opts.record_nodes) rec.node_x.push_back(x);
        if (opts.observer) {
            StepInfo info;
            info.node = &node;
            info.t_prev = t_prev;
            info.x_minus = x_minus;
            info.x_plus = x;
            info.lambda_minus = lam;
            info.accepted = accepted;
            if (lifted) {
                info.xi_minus = xi_minus;
                info.xi_plus = memory.state_view();
            }
            opts.observer(info);
        }
    }
    return rec;
}

}  // namespace hawkes::detail
