#include "hawkes/experiments.hpp"

#include "hawkes/csv.hpp"
#include "hawkes/diagnostics.hpp"
#include "hawkes/errors.hpp"
#include "hawkes/lift.hpp"
#include "hawkes/parallel.hpp"
#include "hawkes/quadrature.hpp"
#include "hawkes/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>

namespace hawkes {

PathRecord simulate_path(const ModelSpec& model, const Kernel& kernel, const NoiseDriver& driver,
                         const SimulationOptions& opts) {
    if (kernel.is_exp_sum()) {
        LiftOptions lo;
        lo.record_nodes = opts.record_nodes;
        lo.observer = opts.observer;
        return simulate_lifted(model, kernel, driver, lo);
    }
    return simulate_volterra(model, kernel, driver, opts);
}

KernelDistance kernel_distance(const Kernel& a, const Kernel& b) {
    if (a.is_exp_sum() && b.is_exp_sum()) {
        std::map<double, double> merged;
        for (std::size_t k = 0; k < a.as_exp_sum().size(); ++k) merged[a.as_exp_sum().beta[k]] += a.as_exp_sum().eta[k];
        for (std::size_t k = 0; k < b.as_exp_sum().size(); ++k) merged[b.as_exp_sum().beta[k]] -= b.as_exp_sum().eta[k];
        std::vector<double> eta, beta;
        for (const auto& [rate, coef] : merged) {
            beta.push_back(rate);
            eta.push_back(coef);
        }
        KernelDistance d;
        d.l1 = l1_norm(Kernel::exp_sum(eta, beta));
        for (std::size_t i = 0; i < eta.size(); ++i)
            for (std::size_t j = 0; j < eta.size(); ++j) d.l2_sq += eta[i] * eta[j] / (beta[i] + beta[j]);
        d.l2_sq = std::max(d.l2_sq, 0.0);
        return d;
    }
    double t_cut = 200.0;
    if (const auto* g = a.as_general()) t_cut = std::max(t_cut, g->t_cut);
    if (const auto* g = b.as_general()) t_cut = std::max(t_cut, g->t_cut);
    auto diff = [&](double t) { return a(t) - b(t); };
    KernelDistance d;
    d.l1 = l1_norm(Kernel::general("difference", diff, t_cut, TailRule::integrate));
    auto sq = [&](double t) {
        const double v = diff(t);
        return v * v;
    };
    d.l2_sq = quad::integrate_panels(sq, 0.0, t_cut) + quad::integrate_tail(sq, t_cut);
    return d;
}

namespace {

void require_stable(const ModelSpec& model, const Kernel& k, const CouplingOptions& opts) {
    if (opts.allow_unstable) return;
    const auto report = check_assumptions(model, k);
    if (report.stability_verdict == Verdict::fail)
        throw DomainError("kernel " + k.describe() + " fails the stability condition (product " +
                          csv::number(report.stability_product) + "); set allow_unstable to run anyway");
}

double sup_difference(const PathRecord& a, const PathRecord& b) {
    double sup = 0.0;
    for (std::size_t i = 0; i < a.x.size() && i < b.x.size(); ++i) sup = std::max(sup, std::abs(a.x[i] - b.x[i]));
    for (std::size_t i = 0; i < a.node_x.size() && i < b.node_x.size(); ++i)
        sup = std::max(sup, std::abs(a.node_x[i] - b.node_x[i]));
    return sup;
}

bool same_events(const PathRecord& a, const PathRecord& b) {
    if (a.jumps.size() != b.jumps.size()) return false;
    for (std::size_t i = 0; i < a.jumps.size(); ++i)
        if (a.jumps[i].point_index != b.jumps[i].point_index) return false;
    return true;
}

using PathSamples = std::optional<std::vector<CoupledSample>>;

PathSamples run_seed(const ModelSpec& model, const Kernel& phi, const std::vector<Kernel>& approximations,
                     const CouplingOptions& opts, std::uint64_t seed) {
    const auto driver = make_driver(seed, opts.dt, opts.horizon, opts.lambda_max, model.marks);
    SimulationOptions so;
    so.record_nodes = true;
    try {
        const auto reference = simulate_path(model, phi, driver, so);
        std::vector<CoupledSample> out;
        out.reserve(approximations.size());
        for (const auto& k : approximations) {
            const auto path = simulate_path(model, k, driver, so);
            CoupledSample s;
            s.seed = seed;
            s.sup_dx = sup_difference(reference, path);
            s.dlambda = std::abs(reference.lambda.back() - path.lambda.back());
            s.same_events = same_events(reference, path);
            out.push_back(s);
        }
        return out;
    } catch (const DominationViolated&) {
        return std::nullopt;
    }
}

}  // namespace

std::vector<CoupledResult> coupled_errors(const ModelSpec& model, const Kernel& phi,
                                          const std::vector<Kernel>& approximations, const CouplingOptions& opts) {
    if (opts.n_paths == 0) throw DomainError("coupled_error: n_paths must be >= 1");
    require_stable(model, phi, opts);
    for (const auto& k : approximations) require_stable(model, k, opts);

    const std::size_t m = approximations.size();
    std::vector<CoupledResult> results(m);
    std::vector<RunningStat> err_x(m), err_l(m);
    std::size_t rejected = 0;
    std::size_t accepted = 0;
    auto take = [&](std::vector<CoupledSample>&& samples) {
        for (std::size_t j = 0; j < m; ++j) {
            err_x[j].add(samples[j].sup_dx);
            err_l[j].add(samples[j].dlambda);
            if (samples[j].same_events) ++results[j].row.same_event_paths;
            results[j].samples.push_back(samples[j]);
        }
        ++accepted;
    };
    const auto max_rejected = static_cast<std::size_t>(std::floor(opts.max_rejection_rate * static_cast<double>(opts.n_paths)));
    auto reject = [&] {
        ++rejected;
        if (rejected > max_rejected)
            throw DominationViolated("more than " + csv::number(100.0 * opts.max_rejection_rate) +
                                         "% of coupled paths exceeded lambda_max=" + csv::number(opts.lambda_max) +
                                         "; increase lambda_max",
                                     opts.lambda_max);
    };

    run_indexed<PathSamples>(
        opts.n_paths, opts.threads,
        [&](std::size_t i) { return run_seed(model, phi, approximations, opts, opts.seed0 + i); },
        [&](std::size_t, PathSamples&& s) {
            if (s) {
                take(std::move(*s));
            } else {
                reject();
            }
        });
    for (std::uint64_t r = 0; accepted < opts.n_paths; ++r) {
        const std::uint64_t seed = opts.seed0 + opts.n_paths + r;
        auto s = run_seed(model, phi, approximations, opts, seed);
        if (s) {
            take(std::move(*s));
        } else {
            reject();
        }
    }

    for (std::size_t j = 0; j < m; ++j) {
        auto& row = results[j].row;
        const auto dist = kernel_distance(approximations[j], phi);
        row.n = approximations[j].is_exp_sum() ? approximations[j].as_exp_sum().size() : 0;
        row.l1_dist = dist.l1;
        row.l2_dist_sq = dist.l2_sq;
        row.err_X = err_x[j].mean();
        row.err_X_se = err_x[j].standard_error();
        row.err_lambda = err_l[j].mean();
        row.err_lambda_se = err_l[j].standard_error();
        row.horizon = opts.horizon;
        row.n_paths = accepted;
        row.rejected = rejected;
    }
    return results;
}

CoupledResult coupled_error(const ModelSpec& model, const Kernel& phi, const Kernel& phi_tilde,
                            const CouplingOptions& opts) {
    return coupled_errors(model, phi, {phi_tilde}, opts).front();
}

std::string to_string(FitMethod m) { return m == FitMethod::l1 ? "l1" : "l2"; }

FitMethod fit_method_from_string(const std::string& name) {
    if (name == "l1") return FitMethod::l1;
    if (name == "l2") return FitMethod::l2;
    throw DomainError("unknown fit method '" + name + "' (expected l1 or l2)");
}

std::vector<FitResult> fit_ladder(const Kernel& phi, const StudyOptions& opts) {
    if (opts.n_list.empty()) throw DomainError("n_list must not be empty");
    std::vector<FitResult> fits;
    std::optional<std::vector<double>> previous;
    for (std::size_t n : opts.n_list) {
        if (opts.method == FitMethod::l2) {
            fits.push_back(fit_l2(phi, n, opts.beta_base, opts.fit));
            continue;
        }
        auto best = fit_l1(phi, n, opts.beta_base, std::nullopt, opts.fit);
        if (opts.warm_start && previous && previous->size() <= n) {
            auto warm = fit_l1(phi, n, opts.beta_base, previous, opts.fit);
            if (warm.l1_error < best.l1_error) best = std::move(warm);
        }
        previous = best.eta;
        fits.push_back(std::move(best));
    }
    return fits;
}

ConvergenceStudy convergence_study(const ModelSpec& model, const Kernel& phi, const StudyOptions& opts) {
    ConvergenceStudy study;
    study.fits = fit_ladder(phi, opts);
    std::vector<Kernel> approximations;
    for (const auto& f : study.fits) approximations.push_back(f.kernel());
    auto results = coupled_errors(model, phi, approximations, opts.coupling);

    std::vector<double> l1, ex, el;
    for (std::size_t j = 0; j < results.size(); ++j) {
        results[j].row.n = study.fits[j].n;
        l1.push_back(results[j].row.l1_dist);
        ex.push_back(results[j].row.err_X);
        el.push_back(results[j].row.err_lambda);
        study.rows.push_back(results[j].row);
        study.samples.push_back(std::move(results[j].samples));
    }
    study.slope_err_X = log_log_slope(l1, ex);
    study.slope_err_lambda = log_log_slope(l1, el);
    return study;
}

namespace {

std::string number_or_missing(double v) { return std::isnan(v) ? kMissing : csv::number(v); }

}  // namespace

void write_convergence_csv(std::ostream& os, const ConvergenceStudy& study) {
    csv::write_meta(os, "slope_err_X", number_or_missing(study.slope_err_X));
    csv::write_meta(os, "slope_err_lambda", number_or_missing(study.slope_err_lambda));
    csv::write_row(os, {"n", "l1_dist", "l2_dist_sq", "err_X", "err_X_se", "err_lambda", "err_lambda_se", "horizon",
                        "n_paths", "rejected"});
    for (const auto& r : study.rows) {
        csv::write_row(os, {std::to_string(r.n), csv::number(r.l1_dist), csv::number(r.l2_dist_sq), csv::number(r.err_X),
                            number_or_missing(r.err_X_se), csv::number(r.err_lambda), number_or_missing(r.err_lambda_se),
                            csv::number(r.horizon), std::to_string(r.n_paths), std::to_string(r.rejected)});
    }
}

void write_samples_csv(std::ostream& os, const ConvergenceStudy& study) {
    csv::write_row(os, {"n", "seed", "sup_dx", "dlambda", "same_events"});
    for (std::size_t j = 0; j < study.rows.size(); ++j) {
        for (const auto& s : study.samples[j]) {
            csv::write_row(os, {std::to_string(study.rows[j].n), std::to_string(s.seed), csv::number(s.sup_dx),
                                csv::number(s.dlambda), s.same_events ? "1" : "0"});
        }
    }
}

}  // namespace hawkes
