#pragma once

#include "hawkes/model.hpp"

#include <cstdint>
#include <vector>

namespace hawkes {

/// One atom (t, theta, y) of the dominated Poisson measure, theta uniform on [0, lambda_max].
struct PoissonPoint {
    double t = 0.0;
    double theta = 0.0;
    double y = 0.0;

    bool operator==(const PoissonPoint&) const = default;
};

/// A node of the merged time line (grid times and Poisson points, ordered).
/// `dw` is the Brownian increment since the previous node.
struct TimelineNode {
    double t = 0.0;
    double dw = 0.0;
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
    std::size_t grid_index = npos;   ///< set for grid nodes
    std::size_t point_index = npos;  ///< set for Poisson candidates

    [[nodiscard]] bool is_grid() const { return grid_index != npos; }
    [[nodiscard]] bool is_point() const { return point_index != npos; }

    bool operator==(const TimelineNode&) const = default;
};

/// Reproducible realisation of (W, Pi) on [0, horizon] x [0, lambda_max].
/// Grid increments, Poisson atoms and the Brownian-bridge refinements at the atoms come from
/// three independent streams seeded from `seed`, so the grid Brownian path does not depend on
/// lambda_max.
struct NoiseDriver {
    std::uint64_t seed = 0;
    double dt = 0.0;
    double horizon = 0.0;
    double lambda_max = 0.0;
    std::vector<double> grid;                  ///< t_0 = 0, ..., t_N = horizon
    std::vector<double> brownian_increments;   ///< W(t_{k+1}) - W(t_k), size N
    std::vector<PoissonPoint> poisson_points;  ///< ordered by t
    std::vector<TimelineNode> timeline;        ///< all nodes with t > 0

    bool operator==(const NoiseDriver&) const = default;
};

NoiseDriver make_driver(std::uint64_t seed, double dt, double horizon, double lambda_max,
                        const MarkDistribution& marks);

}  // namespace hawkes
