#pragma once

#include "hawkes/simulate.hpp"

#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace hawkes {

/// (t, X_t, xi_t) of the Markov system; xi_k decays at rate beta_k and jumps by b(y) nu(t, X_t-).
struct LiftedState {
    double t = 0.0;
    double x = 0.0;
    std::vector<double> xi;

    bool operator==(const LiftedState&) const = default;
};

struct LiftOptions : SimulationOptions {
    /// Resume from this state; atoms and grid nodes at or before `initial->t` are skipped.
    std::optional<LiftedState> initial;
    /// Nodes after t_stop are not processed.
    double t_stop = std::numeric_limits<double>::infinity();
};

/// Same dynamics as simulate_volterra for an exponential-sum kernel, with the convolution carried
/// by the auxiliary states: O(n) per intensity evaluation, exact exponential decay between nodes.
/// Throws std::invalid_argument when the kernel is not an exponential sum.
PathRecord simulate_lifted(const ModelSpec& model, const Kernel& kernel, const NoiseDriver& driver,
                           const LiftOptions& opts = {});

/// State at the last recorded grid time of a lifted run.
LiftedState last_state(const PathRecord& path);

/// `t,x,xi_1..xi_n` single row.
void write_state_csv(std::ostream& os, const LiftedState& s);
LiftedState read_state_csv(const std::string& row);

/// Smooth test function g(t, x, xi) with the derivatives the generator needs. Missing
/// derivatives fall back to central differences with step 1e-5.
struct TestFunction {
    std::function<double(double, double, const std::vector<double>&)> value;
    std::function<double(double, double, const std::vector<double>&)> d_t;
    std::function<double(double, double, const std::vector<double>&)> d_x;
    std::function<double(double, double, const std::vector<double>&)> d_xx;
    /// k-th partial derivative in xi
    std::function<double(double, double, const std::vector<double>&, std::size_t)> d_xi;
};

/// A g(t, x, xi) = g_t + mu g_x - sum_k beta_k xi_k g_{xi_k} + sigma^2/2 g_xx
///               + (lambda_inf + psi(eta . xi)) int [g(t, x + gamma y, xi + nu b(y) 1) - g] m(dy).
/// Requires lambda_inf smooth in (t, x).
double apply_generator(const ModelSpec& model, const Kernel& kernel, const TestFunction& g, const LiftedState& s);

}  // namespace hawkes
