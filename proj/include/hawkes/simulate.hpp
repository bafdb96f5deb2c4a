#pragma once

#include "hawkes/driver.hpp"
#include "hawkes/kernel.hpp"
#include "hawkes/model.hpp"

#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

namespace hawkes {

/// An accepted atom of the driver.
struct JumpEvent {
    double t = 0.0;
    double y = 0.0;
    double dx = 0.0;           ///< y * gamma(t, X_t-)
    double dexcitation = 0.0;  ///< b(y) * nu(t, X_t-), the weight the jump carries into the intensity
    std::size_t point_index = 0;

    bool operator==(const JumpEvent&) const = default;
};

/// Simulated trajectory sampled on the driver grid.
struct PathRecord {
    std::vector<double> times;
    std::vector<double> x;
    std::vector<double> lambda;  ///< left limits at the grid times
    std::vector<JumpEvent> jumps;
    std::vector<std::vector<double>> xi;  ///< auxiliary states per grid time (lifted runs only)
    std::vector<double> node_x;           ///< X after every time-line node, when requested
    std::size_t candidates = 0;           ///< Poisson atoms examined
    std::size_t kernel_terms = 0;         ///< kernel-term evaluations spent on intensities

    bool operator==(const PathRecord&) const = default;
};

/// Per-node view handed to observers. `*_minus` is the state just before the node's atom is
/// resolved, `*_plus` just after; the two coincide at grid nodes and rejected atoms.
struct StepInfo {
    const TimelineNode* node = nullptr;
    double t_prev = 0.0;
    double x_minus = 0.0;
    double x_plus = 0.0;
    double lambda_minus = 0.0;
    bool accepted = false;
    std::span<const double> xi_minus;
    std::span<const double> xi_plus;
};

using StepObserver = std::function<void(const StepInfo&)>;

struct SimulationOptions {
    bool record_nodes = false;
    StepObserver observer;
};

/// Euler-Maruyama on the merged time line with exact thinning of the driver's atoms; the intensity
/// is recomputed from the full jump history at every node, O(#jumps) per evaluation.
/// Throws DominationViolated when lambda exceeds driver.lambda_max.
PathRecord simulate_volterra(const ModelSpec& model, const Kernel& kernel, const NoiseDriver& driver,
                             const SimulationOptions& opts = {});

/// Monte Carlo summary of a path collection.
struct MomentSummary {
    double p = 1.0;
    std::size_t n_paths = 0;
    double sup_abs_x_p = 0.0;  ///< E[sup_t |X_t|^p]
    double sup_abs_x_p_se = 0.0;
    double sup_mean_lambda = 0.0;  ///< sup_t E[lambda_t]
    double sup_mean_lambda_se = 0.0;
    double sup_mean_lambda_time = 0.0;
    double sup_mean_lambda_sq = 0.0;  ///< sup_t E[lambda_t^2]
    double sup_mean_lambda_sq_se = 0.0;
};

/// Streaming accumulator behind estimate_moments; paths must share the grid.
class MomentAccumulator {
public:
    explicit MomentAccumulator(double p);
    void add(const PathRecord& path);
    [[nodiscard]] MomentSummary summary() const;
    [[nodiscard]] std::size_t count() const { return count_; }
    /// Pointwise mean and standard error of lambda on the grid.
    [[nodiscard]] std::vector<double> mean_lambda() const;
    [[nodiscard]] std::vector<double> mean_lambda_se() const;

private:
    double p_;
    std::size_t count_ = 0;
    double sup_sum_ = 0.0;
    double sup_sum_sq_ = 0.0;
    std::vector<double> lambda_sum_, lambda_sum_sq_, lambda2_sum_, lambda2_sum_sq_;
};

/// Standard errors are NaN for a single path.
MomentSummary estimate_moments(std::span<const PathRecord> paths, double p);

/// `t,x,lambda[,xi_1..xi_n]`
void write_path_csv(std::ostream& os, const PathRecord& path);
/// `t,y,dx`
void write_jumps_csv(std::ostream& os, const PathRecord& path);

}  // namespace hawkes
