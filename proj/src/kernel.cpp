#include "hawkes/kernel.hpp"

#include "hawkes/csv.hpp"
#include "hawkes/errors.hpp"
#include "hawkes/quadrature.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace hawkes {

double ExpSum::operator()(double t) const {
    if (t < 0.0) return 0.0;
    double s = 0.0;
    for (std::size_t k = 0; k < eta.size(); ++k) s += eta[k] * std::exp(-beta[k] * t);
    return s;
}

Kernel Kernel::exp_sum(std::vector<double> eta, std::vector<double> beta) {
    if (eta.size() != beta.size()) throw InvalidKernel("expsum: eta and beta must have equal length");
    for (std::size_t k = 0; k < beta.size(); ++k) {
        if (!std::isfinite(eta[k]) || !std::isfinite(beta[k])) throw InvalidKernel("expsum: non-finite parameter");
        if (beta[k] <= 0.0) throw InvalidKernel("expsum: decay rates must be > 0");
        if (k > 0 && beta[k] <= beta[k - 1]) throw InvalidKernel("expsum: decay rates must be strictly increasing");
    }
    return Kernel(ExpSum{std::move(eta), std::move(beta)});
}

Kernel Kernel::ladder(std::vector<double> eta, double beta_base) {
    if (!(beta_base > 0.0)) throw DomainError("ladder: beta must be > 0");
    std::vector<double> beta(eta.size());
    for (std::size_t k = 0; k < eta.size(); ++k) beta[k] = beta_base * static_cast<double>(k + 1);
    return exp_sum(std::move(eta), std::move(beta));
}

Kernel Kernel::general(std::string name, std::function<double(double)> eval, double t_cut, TailRule tail) {
    if (!eval) throw InvalidKernel("general kernel '" + name + "' has no evaluator");
    if (!(t_cut > 0.0)) throw InvalidKernel("general kernel '" + name + "': t_cut must be > 0");
    return Kernel(GeneralKernel{std::move(name), std::move(eval), t_cut, tail});
}

Kernel Kernel::tabulated(std::vector<double> t, std::vector<double> values) {
    if (t.size() != values.size() || t.size() < 2) throw InvalidKernel("tabulated kernel needs >= 2 (t, phi) rows");
    if (t.front() != 0.0) throw InvalidKernel("tabulated kernel must start at t = 0");
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!std::isfinite(t[i]) || !std::isfinite(values[i])) throw InvalidKernel("tabulated kernel: non-finite entry");
        if (i > 0 && t[i] <= t[i - 1]) throw InvalidKernel("tabulated kernel: abscissae must increase");
    }
    const double t_end = t.back();
    auto eval = [ts = std::move(t), vs = std::move(values)](double x) {
        if (x >= ts.back()) return x == ts.back() ? vs.back() : 0.0;
        const auto it = std::upper_bound(ts.begin(), ts.end(), x);
        const auto i = static_cast<std::size_t>(it - ts.begin());
        const double w = (x - ts[i - 1]) / (ts[i] - ts[i - 1]);
        return (1.0 - w) * vs[i - 1] + w * vs[i];
    };
    return general("tabulated", std::move(eval), t_end, TailRule::zero);
}

Kernel Kernel::zero() { return exp_sum({0.0}, {1.0}); }

double Kernel::operator()(double t) const {
    if (const auto* e = std::get_if<ExpSum>(&repr_)) return (*e)(t);
    return std::get<GeneralKernel>(repr_).eval(t);
}

const ExpSum& Kernel::as_exp_sum() const {
    if (const auto* e = std::get_if<ExpSum>(&repr_)) return *e;
    throw std::invalid_argument("kernel '" + describe() + "' is not a sum of exponentials");
}

std::string Kernel::describe() const {
    if (const auto* g = std::get_if<GeneralKernel>(&repr_)) return g->name;
    const auto& e = std::get<ExpSum>(repr_);
    std::ostringstream os;
    os << "expsum(";
    for (std::size_t k = 0; k < e.size(); ++k) {
        if (k) os << " + ";
        os << csv::number(e.eta[k]) << "*exp(-" << csv::number(e.beta[k]) << "t)";
    }
    os << ")";
    return os.str();
}

Kernel Kernel::scaled(double factor) const {
    if (const auto* e = std::get_if<ExpSum>(&repr_)) {
        ExpSum s = *e;
        for (double& v : s.eta) v *= factor;
        return Kernel(std::move(s));
    }
    GeneralKernel g = std::get<GeneralKernel>(repr_);
    g.eval = [f = g.eval, factor](double t) { return factor * f(t); };
    g.name = csv::number(factor) + "*" + g.name;
    return Kernel(std::move(g));
}

Kernel nonmonotone_kernel() {
    return Kernel::general(
        "nonmonotone", [](double t) { return (1.0 - t) / (1.0 + std::pow(t, 2.5)); }, 200.0,
        TailRule::integrate);
}

Kernel power_law_kernel(double scale, double exponent) {
    if (!(exponent > 1.0)) throw InvalidKernel("power_law: exponent must be > 1 for integrability");
    if (!std::isfinite(scale)) throw InvalidKernel("power_law: non-finite scale");
    return Kernel::general(
        "power_law", [scale, exponent](double t) { return t < 0.0 ? 0.0 : scale * std::pow(1.0 + t, -exponent); },
        200.0, TailRule::integrate);
}

namespace {

// Sum of two exponential sums (b scaled by `sign`), merging equal rates and dropping zeros.
ExpSum merge(const ExpSum& a, const ExpSum& b, double sign) {
    std::map<double, double> terms;
    for (std::size_t k = 0; k < a.size(); ++k) terms[a.beta[k]] += a.eta[k];
    for (std::size_t k = 0; k < b.size(); ++k) terms[b.beta[k]] += sign * b.eta[k];
    ExpSum out;
    for (const auto& [beta, eta] : terms) {
        if (eta == 0.0) continue;
        out.beta.push_back(beta);
        out.eta.push_back(eta);
    }
    return out;
}

ExpSum ladder_sum(std::span<const double> eta, double beta_base) {
    ExpSum s;
    for (std::size_t k = 0; k < eta.size(); ++k) {
        s.eta.push_back(eta[k]);
        s.beta.push_back(beta_base * static_cast<double>(k + 1));
    }
    return s;
}

// int_a^b exp(-rate t) dt for b possibly infinite.
double exp_integral(double rate, double a, double b) {
    if (std::isinf(b)) return std::exp(-rate * a) / rate;
    return (std::exp(-rate * a) - std::exp(-rate * b)) / rate;
}

// Point past which the slowest surviving term dominates and the sum keeps its sign.
double dominance_time(const ExpSum& s) {
    std::size_t lead = 0;
    while (lead < s.size() && s.eta[lead] == 0.0) ++lead;
    if (lead >= s.size()) return 0.0;
    double t_hi = 0.0;
    const double n = static_cast<double>(s.size());
    for (std::size_t k = lead + 1; k < s.size(); ++k) {
        const double ratio = n * std::abs(s.eta[k] / s.eta[lead]);
        if (ratio > 1.0) t_hi = std::max(t_hi, std::log(ratio) / (s.beta[k] - s.beta[lead]));
    }
    return t_hi + 1.0;
}

// int_0^H |s(t)| dt using the exact antiderivative on each constant-sign piece.
double exp_sum_l1(const ExpSum& s, double horizon) {
    if (s.size() == 0) return 0.0;
    auto antiderivative = [&](double t) {
        if (std::isinf(t)) return 0.0;
        double F = 0.0;
        for (std::size_t k = 0; k < s.size(); ++k) F -= s.eta[k] / s.beta[k] * std::exp(-s.beta[k] * t);
        return F;
    };
    const double scan_end = std::min(horizon, dominance_time(s));
    std::vector<double> cuts{0.0};
    for (double r : quad::sign_changes(s, 0.0, scan_end, 4096)) {
        if (r > cuts.back() && r < horizon) cuts.push_back(r);
    }
    cuts.push_back(horizon);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        total += std::abs(antiderivative(cuts[i + 1]) - antiderivative(cuts[i]));
    return total;
}

// int_0^H s(t)^2 dt from the Gram form.
double exp_sum_l2_sq(const ExpSum& s, double horizon) {
    double total = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = 0; j < s.size(); ++j)
            total += s.eta[i] * s.eta[j] * exp_integral(s.beta[i] + s.beta[j], 0.0, horizon);
    return std::max(total, 0.0);
}

// Integral of f (or |f|) over [0, H] for a residual with the support data of a general kernel.
double integrate_general(const quad::Integrand& f, const GeneralKernel& g, double horizon, bool absolute) {
    const double body_end = std::min(horizon, g.t_cut);
    double total = absolute ? quad::integrate_abs(f, 0.0, body_end) : quad::integrate_panels(f, 0.0, body_end);
    if (horizon > g.t_cut && g.tail == TailRule::integrate) {
        if (std::isinf(horizon)) {
            total += absolute ? quad::integrate_tail([&](double t) { return std::abs(f(t)); }, g.t_cut)
                              : quad::integrate_tail(f, g.t_cut);
        } else {
            total += absolute ? quad::integrate_abs(f, g.t_cut, horizon) : quad::integrate(f, g.t_cut, horizon);
        }
    }
    if (!std::isfinite(total)) throw InvalidKernel("kernel '" + g.name + "' is not integrable");
    return total;
}

void check_horizon(double horizon) {
    if (!(horizon > 0.0)) throw DomainError("fit horizon must be > 0");
}

}  // namespace

double l1_norm(const Kernel& k) { return l1_norm(k, kInfiniteHorizon); }

double l1_norm(const Kernel& k, double horizon) {
    check_horizon(horizon);
    if (k.is_exp_sum()) return exp_sum_l1(k.as_exp_sum(), horizon);
    const auto& g = *k.as_general();
    return integrate_general(g.eval, g, horizon, true);
}

double laplace_moment(const Kernel& k, double s, double horizon) {
    check_horizon(horizon);
    if (k.is_exp_sum()) {
        const auto& e = k.as_exp_sum();
        double total = 0.0;
        for (std::size_t i = 0; i < e.size(); ++i) total += e.eta[i] * exp_integral(e.beta[i] + s, 0.0, horizon);
        return total;
    }
    const auto& g = *k.as_general();
    return integrate_general([&](double t) { return std::exp(-s * t) * g.eval(t); }, g, horizon, false);
}

double l2_error_sq(const Kernel& k, std::span<const double> eta, double beta_base, double horizon) {
    if (!(beta_base > 0.0)) throw DomainError("beta must be > 0");
    check_horizon(horizon);
    const ExpSum approx = ladder_sum(eta, beta_base);
    if (k.is_exp_sum()) return exp_sum_l2_sq(merge(approx, k.as_exp_sum(), -1.0), horizon);
    const auto& g = *k.as_general();
    return integrate_general(
        [&](double t) {
            const double r = approx(t) - g.eval(t);
            return r * r;
        },
        g, horizon, false);
}

double l1_error(const Kernel& k, std::span<const double> eta, double beta_base, double horizon) {
    if (!(beta_base > 0.0)) throw DomainError("beta must be > 0");
    check_horizon(horizon);
    const ExpSum approx = ladder_sum(eta, beta_base);
    if (k.is_exp_sum()) return exp_sum_l1(merge(approx, k.as_exp_sum(), -1.0), horizon);
    const auto& g = *k.as_general();
    return integrate_general([&](double t) { return approx(t) - g.eval(t); }, g, horizon, true);
}

std::vector<double> ladder_gram(std::size_t n, double beta_base, double horizon) {
    std::vector<double> gram(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            gram[i * n + j] = exp_integral(beta_base * static_cast<double>(i + j + 2), 0.0, horizon);
    return gram;
}

namespace {

struct GramSystem {
    Eigen::MatrixXd matrix;
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd eigenvectors;
    double condition = 1.0;
};

GramSystem analyse_gram(std::size_t n, double beta_base, const FitOptions& opts) {
    const auto flat = ladder_gram(n, beta_base, opts.horizon);
    GramSystem sys;
    sys.matrix = Eigen::Map<const Eigen::MatrixXd>(flat.data(), static_cast<Eigen::Index>(n),
                                                   static_cast<Eigen::Index>(n));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sys.matrix);
    sys.eigenvalues = eig.eigenvalues();
    sys.eigenvectors = eig.eigenvectors();
    const double lo = sys.eigenvalues.minCoeff();
    const double hi = sys.eigenvalues.maxCoeff();
    sys.condition = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
    if (!(sys.condition <= opts.condition_threshold)) {
        std::ostringstream os;
        os << "Gram matrix of the ladder (n=" << n << ", beta=" << beta_base << ") has condition "
           << sys.condition << " above threshold " << opts.condition_threshold;
        throw IllConditioned(os.str());
    }
    return sys;
}

void check_fit_args(std::size_t n, double beta_base) {
    if (n < 1) throw DomainError("fit needs n >= 1");
    if (!(beta_base > 0.0)) throw DomainError("fit needs beta > 0");
}

}  // namespace

FitResult fit_l2(const Kernel& phi, std::size_t n, double beta_base, const FitOptions& opts) {
    check_fit_args(n, beta_base);
    check_horizon(opts.horizon);
    (void)l1_norm(phi, opts.horizon);  // throws on non-integrable kernels

    const GramSystem sys = analyse_gram(n, beta_base, opts);
    Eigen::VectorXd v(static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < n; ++j)
        v[static_cast<Eigen::Index>(j)] = laplace_moment(phi, beta_base * static_cast<double>(j + 1), opts.horizon);

    Eigen::LLT<Eigen::MatrixXd> llt(sys.matrix);
    if (llt.info() != Eigen::Success) throw IllConditioned("Cholesky factorisation of the Gram matrix failed");
    const Eigen::VectorXd eta = llt.solve(v);

    FitResult out;
    out.eta.assign(eta.data(), eta.data() + eta.size());
    out.beta_base = beta_base;
    out.n = n;
    out.horizon = opts.horizon;
    out.hilbert_condition = sys.condition;
    out.l1_error = l1_error(phi, out.eta, beta_base, opts.horizon);
    out.l2_error_sq = l2_error_sq(phi, out.eta, beta_base, opts.horizon);
    return out;
}

FitResult fit_l1(const Kernel& phi, std::size_t n, double beta_base, const std::optional<std::vector<double>>& init,
                 const FitOptions& opts) {
    check_fit_args(n, beta_base);
    check_horizon(opts.horizon);

    std::vector<double> eta;
    if (init) {
        if (init->size() > n) throw DomainError("fit_l1: initial guess longer than n");
        eta = *init;
        eta.resize(n, 0.0);
    } else {
        eta = fit_l2(phi, n, beta_base, opts).eta;
    }
    const GramSystem sys = analyse_gram(n, beta_base, opts);

    // Search directions: Gram eigenvectors scaled to unit L2 norm as functions.
    std::vector<Eigen::VectorXd> directions;
    for (Eigen::Index k = sys.eigenvalues.size() - 1; k >= 0; --k)
        directions.push_back(sys.eigenvectors.col(k) / std::sqrt(sys.eigenvalues[k]));

    std::size_t evals = 0;
    auto objective = [&](const std::vector<double>& e) {
        ++evals;
        return l1_error(phi, e, beta_base, opts.horizon);
    };

    double best = objective(eta);
    double step = std::max(0.5 * std::sqrt(l2_error_sq(phi, eta, beta_base, opts.horizon)), 1e-4);
    bool converged = best == 0.0;
    std::vector<double> trial(n);
    while (!converged && evals < opts.max_evaluations) {
        const double sweep_start = best;
        for (const auto& d : directions) {
            for (double sign : {1.0, -1.0}) {
                for (std::size_t i = 0; i < n; ++i) trial[i] = eta[i] + sign * step * d[static_cast<Eigen::Index>(i)];
                const double value = objective(trial);
                if (value < best) {
                    best = value;
                    eta = trial;
                    break;
                }
            }
        }
        if (sweep_start - best <= opts.relative_tolerance * sweep_start) step *= 0.5;
        converged = step < opts.step_tolerance || best == 0.0;
    }

    FitResult out;
    out.eta = std::move(eta);
    out.beta_base = beta_base;
    out.n = n;
    out.horizon = opts.horizon;
    out.hilbert_condition = sys.condition;
    out.l1_error = best;
    out.l2_error_sq = l2_error_sq(phi, out.eta, beta_base, opts.horizon);
    out.converged = converged;
    out.evaluations = evals;
    return out;
}

std::vector<std::string> fit_csv_row(const FitResult& fit) {
    std::vector<std::string> row{std::to_string(fit.n), csv::number(fit.beta_base)};
    for (double e : fit.eta) row.push_back(csv::number(e));
    row.push_back(csv::number(fit.l1_error));
    row.push_back(csv::number(fit.l2_error_sq));
    row.push_back(csv::number(fit.hilbert_condition));
    return row;
}

}  // namespace hawkes
