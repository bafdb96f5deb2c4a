#pragma once

#include "hawkes/kernel.hpp"
#include "hawkes/model.hpp"
#include "hawkes/simulate.hpp"

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace hawkes {

struct CouplingOptions {
    double horizon = 10.0;
    double dt = 0.01;
    double lambda_max = 10.0;
    std::size_t n_paths = 1000;
    std::uint64_t seed0 = 0;
    std::size_t threads = 1;
    /// Skip the stability precondition (bounded-psi models cannot explode even when it fails).
    bool allow_unstable = false;
    /// Fraction of rejected (domination-violating) paths tolerated before giving up.
    double max_rejection_rate = 0.01;
};

/// Outcome of one coupled path pair.
struct CoupledSample {
    std::uint64_t seed = 0;
    double sup_dx = 0.0;   ///< max |X~ - X| over grid and atom times
    double dlambda = 0.0;  ///< |lambda~_T - lambda_T|
    bool same_events = false;

    bool operator==(const CoupledSample&) const = default;
};

struct ConvergenceRow {
    std::size_t n = 0;
    double l1_dist = 0.0;
    double l2_dist_sq = 0.0;
    double err_X = 0.0;
    double err_X_se = 0.0;
    double err_lambda = 0.0;
    double err_lambda_se = 0.0;
    double horizon = 0.0;
    std::size_t n_paths = 0;
    std::size_t rejected = 0;
    std::size_t same_event_paths = 0;
};

struct CoupledResult {
    ConvergenceRow row;
    std::vector<CoupledSample> samples;
};

/// Lifted engine for exponential sums, Volterra engine otherwise.
PathRecord simulate_path(const ModelSpec& model, const Kernel& kernel, const NoiseDriver& driver,
                         const SimulationOptions& opts = {});

/// ||a - b||_1 and ||a - b||_2^2 on [0, inf).
struct KernelDistance {
    double l1 = 0.0;
    double l2_sq = 0.0;
};
KernelDistance kernel_distance(const Kernel& a, const Kernel& b);

/// Runs phi and phi_tilde on one shared driver per seed seed0 + i. Paths on which either run
/// violates domination are replaced by seeds seed0 + n_paths + r, r = 0, 1, ...
CoupledResult coupled_error(const ModelSpec& model, const Kernel& phi, const Kernel& phi_tilde,
                            const CouplingOptions& opts);

/// Same coupling against several approximations at once; the reference path is simulated once
/// per seed and a rejection in any run drops the seed for every row.
std::vector<CoupledResult> coupled_errors(const ModelSpec& model, const Kernel& phi,
                                          const std::vector<Kernel>& approximations, const CouplingOptions& opts);

enum class FitMethod { l1, l2 };

std::string to_string(FitMethod m);
FitMethod fit_method_from_string(const std::string& name);

struct StudyOptions {
    double beta_base = 0.5;
    std::vector<std::size_t> n_list;
    FitMethod method = FitMethod::l1;
    FitOptions fit;
    /// Start each L1 fit from the previous ladder's coefficients.
    bool warm_start = true;
    CouplingOptions coupling;
};

struct ConvergenceStudy {
    std::vector<FitResult> fits;
    std::vector<ConvergenceRow> rows;
    std::vector<std::vector<CoupledSample>> samples;
    double slope_err_X = 0.0;       ///< log-log slope of err_X against l1_dist
    double slope_err_lambda = 0.0;  ///< log-log slope of err_lambda against l1_dist
};

std::vector<FitResult> fit_ladder(const Kernel& phi, const StudyOptions& opts);

ConvergenceStudy convergence_study(const ModelSpec& model, const Kernel& phi, const StudyOptions& opts);

/// Standard errors that are undefined (single path) are written as this sentinel.
inline constexpr const char* kMissing = "NA";

void write_convergence_csv(std::ostream& os, const ConvergenceStudy& study);
void write_samples_csv(std::ostream& os, const ConvergenceStudy& study);

}  // namespace hawkes
