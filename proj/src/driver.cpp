#include "hawkes/driver.hpp"

#include "hawkes/errors.hpp"

#include <cmath>
#include <random>

namespace hawkes {

namespace {

enum Stream : std::uint32_t { kBrownian = 0, kPoisson = 1, kBridge = 2 };

std::mt19937_64 make_stream(std::uint64_t seed, Stream stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), 0x9e3779b9u};
    return std::mt19937_64(seq);
}

std::vector<double> make_grid(double dt, double horizon) {
    const double ratio = horizon / dt;
    auto steps = static_cast<std::size_t>(std::llround(ratio));
    if (steps == 0 || std::abs(ratio - static_cast<double>(steps)) > 1e-9 * ratio)
        steps = static_cast<std::size_t>(std::ceil(ratio));
    std::vector<double> grid(steps + 1);
    for (std::size_t k = 0; k <= steps; ++k) grid[k] = std::min(static_cast<double>(k) * dt, horizon);
    grid.back() = horizon;
    return grid;
}

}  // namespace

NoiseDriver make_driver(std::uint64_t seed, double dt, double horizon, double lambda_max,
                        const MarkDistribution& marks) {
    if (!(dt > 0.0)) throw DomainError("driver: dt must be > 0");
    if (!(horizon > 0.0)) throw DomainError("driver: horizon must be > 0");
    if (!(lambda_max > 0.0)) throw DomainError("driver: lambda_max must be > 0");

    NoiseDriver d;
    d.seed = seed;
    d.dt = dt;
    d.horizon = horizon;
    d.lambda_max = lambda_max;
    d.grid = make_grid(dt, horizon);

    auto brownian = make_stream(seed, kBrownian);
    std::normal_distribution<double> z(0.0, 1.0);
    d.brownian_increments.resize(d.grid.size() - 1);
    for (std::size_t k = 0; k + 1 < d.grid.size(); ++k)
        d.brownian_increments[k] = std::sqrt(d.grid[k + 1] - d.grid[k]) * z(brownian);

    auto poisson = make_stream(seed, kPoisson);
    std::exponential_distribution<double> gap(lambda_max);
    std::uniform_real_distribution<double> level(0.0, lambda_max);
    for (double t = gap(poisson); t <= horizon; t += gap(poisson)) {
        PoissonPoint p;
        p.t = t;
        p.theta = level(poisson);
        p.y = marks.sample(poisson);
        d.poisson_points.push_back(p);
    }

    // Merge grid and atoms; W at the atoms is filled in by sequential Brownian-bridge sampling
    // inside each grid cell, conditioned on the cell's grid increment.
    auto bridge = make_stream(seed, kBridge);
    d.timeline.reserve(d.grid.size() + d.poisson_points.size());
    std::size_t next_point = 0;
    for (std::size_t k = 0; k + 1 < d.grid.size(); ++k) {
        const double t_end = d.grid[k + 1];
        const double w_end = d.brownian_increments[k];
        double s_prev = d.grid[k];
        double w_prev = 0.0;
        while (next_point < d.poisson_points.size() && d.poisson_points[next_point].t <= t_end) {
            const double s = d.poisson_points[next_point].t;
            const double remaining = t_end - s_prev;
            const double mean = w_prev + (s - s_prev) / remaining * (w_end - w_prev);
            const double var = (s - s_prev) * (t_end - s) / remaining;
            const double w = mean + std::sqrt(std::max(var, 0.0)) * z(bridge);
            TimelineNode node;
            node.t = s;
            node.dw = w - w_prev;
            node.point_index = next_point;
            d.timeline.push_back(node);
            s_prev = s;
            w_prev = w;
            ++next_point;
        }
        TimelineNode node;
        node.t = t_end;
        node.dw = w_end - w_prev;
        node.grid_index = k + 1;
        d.timeline.push_back(node);
    }
    return d;
}

}  // namespace hawkes
