#include "hawkes/diagnostics.hpp"

#include "hawkes/csv.hpp"
#include "hawkes/errors.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>

namespace hawkes {

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "PASS";
        case Verdict::fail: return "FAIL";
        case Verdict::unknown: return "UNKNOWN";
    }
    return "UNKNOWN";
}

int exit_code(Verdict v) {
    switch (v) {
        case Verdict::pass: return 0;
        case Verdict::fail: return 2;
        case Verdict::unknown: return 3;
    }
    return 3;
}

Verdict classify_below(double value, double threshold) {
    if (!std::isfinite(value)) return Verdict::fail;
    if (value < 0.95 * threshold) return Verdict::pass;
    if (value > 1.05 * threshold) return Verdict::fail;
    return Verdict::unknown;
}

namespace {

std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> out(std::max<std::size_t>(n, 2));
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(out.size() - 1);
    return out;
}

double lipschitz_in_x(const Coefficient& f, const std::vector<double>& ts, const std::vector<double>& xs) {
    double best = 0.0;
    for (double t : ts) {
        double prev = f(t, xs[0]);
        for (std::size_t i = 1; i < xs.size(); ++i) {
            const double cur = f(t, xs[i]);
            best = std::max(best, std::abs(cur - prev) / (xs[i] - xs[i - 1]));
            prev = cur;
        }
    }
    return best;
}

Verdict worst(Verdict a, Verdict b) {
    if (a == Verdict::fail || b == Verdict::fail) return Verdict::fail;
    if (a == Verdict::unknown || b == Verdict::unknown) return Verdict::unknown;
    return Verdict::pass;
}

}  // namespace

AssumptionReport check_assumptions(const ModelSpec& model, const Kernel& kernel, const SamplingBox& box) {
    AssumptionReport r;
    r.box = box;
    const auto ts = linspace(box.t_min, box.t_max, box.t_samples);
    const auto xs = linspace(box.x_min, box.x_max, box.x_samples);

    r.lipschitz = {{"mu", lipschitz_in_x(model.mu, ts, xs)},
                   {"sigma", lipschitz_in_x(model.sigma, ts, xs)},
                   {"gamma", lipschitz_in_x(model.gamma, ts, xs)},
                   {"nu", lipschitz_in_x(model.nu, ts, xs)}};
    r.L_lambda = lipschitz_in_x(model.lambda_inf, ts, xs);

    r.lambda_bar = -std::numeric_limits<double>::infinity();
    r.lambda_inf_min = std::numeric_limits<double>::infinity();
    r.nu_sup = 0.0;
    for (double t : ts) {
        for (double x : xs) {
            const double l = model.lambda_inf(t, x);
            r.lambda_bar = std::max(r.lambda_bar, l);
            r.lambda_inf_min = std::min(r.lambda_inf_min, l);
            r.nu_sup = std::max(r.nu_sup, std::abs(model.nu(t, x)));
        }
    }

    double u_min = box.u_min;
    if (std::isnan(u_min)) {
        bool nonnegative = model.marks.expectation([&](double y) { return apply(model.b, y) < 0.0 ? 1.0 : 0.0; }) == 0.0;
        for (double t : ts)
            for (double x : xs) nonnegative = nonnegative && model.nu(t, x) >= 0.0;
        const double t_end = std::max(50.0, box.t_max);
        for (double t : linspace(0.0, t_end, 5001)) nonnegative = nonnegative && kernel(t) >= 0.0;
        u_min = nonnegative ? 0.0 : -box.u_max;
    }
    r.psi_range_min = u_min;
    r.psi_range_max = box.u_max;
    const auto us = linspace(u_min, box.u_max, box.u_samples);
    double psi_prev = model.psi(us[0]);
    double psi_max = psi_prev;
    r.psi_nonnegative = psi_prev >= 0.0;
    for (std::size_t i = 1; i < us.size(); ++i) {
        const double cur = model.psi(us[i]);
        r.L_psi = std::max(r.L_psi, std::abs(cur - psi_prev) / (us[i] - us[i - 1]));
        if (cur < psi_prev) r.psi_nondecreasing = false;
        if (cur < 0.0) r.psi_nonnegative = false;
        psi_max = std::max(psi_max, cur);
        psi_prev = cur;
    }
    r.psi_at_zero = model.psi(0.0);

    r.Eb = model.marks.expectation([&](double y) { return apply(model.b, y); });
    r.phi_l1 = l1_norm(kernel);
    r.stability_product = r.L_psi * r.Eb * r.phi_l1;

    // Baseline intensity: nonnegative with Lipschitz constant < 1 (a warning-level check).
    r.lipschitz_verdict = r.lambda_inf_min < 0.0 ? Verdict::fail : classify_below(r.L_lambda, 1.0);
    if (r.lipschitz_verdict != Verdict::pass)
        r.notes.push_back("baseline intensity: sampled L_lambda=" + csv::number(r.L_lambda) +
                          ", min=" + csv::number(r.lambda_inf_min) + " (needs >= 0 and L_lambda < 1)");

    // Stability: psi >= 0 nondecreasing, |nu| <= 1, L E b(Y) ||phi||_1 < 1.
    r.stability_verdict = classify_below(r.stability_product, 1.0);
    if (!r.psi_nonnegative || !r.psi_nondecreasing) {
        r.stability_verdict = Verdict::fail;
        r.notes.push_back("psi is not nonnegative and nondecreasing on the sample grid");
    }
    if (r.nu_sup > 1.0 + 1e-12) {
        r.stability_verdict = Verdict::fail;
        r.notes.push_back("|nu| exceeds 1 on the sample grid: " + csv::number(r.nu_sup));
    }
    if (r.stability_verdict != Verdict::pass)
        r.notes.push_back("stability product L*Eb*||phi||_1 = " + csv::number(r.stability_product));

    // Growth: psi bounded, or gamma and nu free of x.
    if (model.gronwall.kind == GronwallCase::Kind::psi_bounded) {
        r.gronwall_ok = std::isfinite(model.gronwall.psi_bound) && psi_max <= model.gronwall.psi_bound + 1e-12;
        if (!r.gronwall_ok) r.notes.push_back("psi exceeds its declared bound " + csv::number(model.gronwall.psi_bound));
    } else {
        const double lg = r.lipschitz[2].value;
        const double ln = r.lipschitz[3].value;
        r.gronwall_ok = lg == 0.0 && ln == 0.0;
        if (!r.gronwall_ok) r.notes.push_back("gamma or nu depends on x although the model declares them state-free");
    }
    r.gronwall_verdict = r.gronwall_ok ? Verdict::pass : Verdict::fail;
    r.overall = worst(worst(r.lipschitz_verdict, r.stability_verdict), r.gronwall_verdict);
    return r;
}

void write_report_text(std::ostream& os, const AssumptionReport& r) {
    auto line = [&](const std::string& key, const std::string& value) {
        os << std::left << std::setw(28) << key << value << '\n';
    };
    line("box t", "[" + csv::number(r.box.t_min) + ", " + csv::number(r.box.t_max) + "]");
    line("box x", "[" + csv::number(r.box.x_min) + ", " + csv::number(r.box.x_max) + "]");
    for (const auto& l : r.lipschitz) line("lipschitz(" + l.coefficient + ")", csv::number(l.value));
    line("L_lambda", csv::number(r.L_lambda));
    line("psi range", "[" + csv::number(r.psi_range_min) + ", " + csv::number(r.psi_range_max) + "]");
    line("L_psi", csv::number(r.L_psi));
    line("E b(Y)", csv::number(r.Eb));
    line("||phi||_1", csv::number(r.phi_l1));
    line("stability_product", csv::number(r.stability_product));
    line("lambda_bar + psi(0)", csv::number(r.lambda_bar + r.psi_at_zero));
    line("baseline intensity", to_string(r.lipschitz_verdict));
    line("stability", to_string(r.stability_verdict));
    line("growth", to_string(r.gronwall_verdict));
    line("overall", to_string(r.overall));
    for (const auto& n : r.notes) os << "note: " << n << '\n';
}

void write_report_csv(std::ostream& os, const AssumptionReport& r) {
    csv::write_row(os, {"key", "value"});
    for (const auto& l : r.lipschitz) csv::write_row(os, {"lipschitz_" + l.coefficient, csv::number(l.value)});
    csv::write_row(os, {"L_lambda", csv::number(r.L_lambda)});
    csv::write_row(os, {"L_psi", csv::number(r.L_psi)});
    csv::write_row(os, {"Eb", csv::number(r.Eb)});
    csv::write_row(os, {"phi_l1", csv::number(r.phi_l1)});
    csv::write_row(os, {"stability_product", csv::number(r.stability_product)});
    csv::write_row(os, {"lambda_bar", csv::number(r.lambda_bar)});
    csv::write_row(os, {"psi_at_zero", csv::number(r.psi_at_zero)});
    csv::write_row(os, {"gronwall_ok", r.gronwall_ok ? "true" : "false"});
    csv::write_row(os, {"verdict_baseline", to_string(r.lipschitz_verdict)});
    csv::write_row(os, {"verdict_stability", to_string(r.stability_verdict)});
    csv::write_row(os, {"verdict_growth", to_string(r.gronwall_verdict)});
    csv::write_row(os, {"verdict_overall", to_string(r.overall)});
}

double Resolvent::operator()(double t) const {
    if (values.empty() || t < 0.0) return 0.0;
    const double pos = t / dt;
    const auto i = static_cast<std::size_t>(pos);
    if (i + 1 >= values.size()) return values.back();
    const double w = pos - static_cast<double>(i);
    return (1.0 - w) * values[i] + w * values[i + 1];
}

std::vector<double> trapezoid_convolve(const std::vector<double>& a, const std::vector<double>& b, double dt) {
    const std::size_t n = std::min(a.size(), b.size());
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j <= i; ++j) s += a[i - j] * b[j];
        s -= 0.5 * (a[i] * b[0] + a[0] * b[i]);
        out[i] = dt * s;
    }
    return out;
}

namespace {

double trapezoid_l1(const std::vector<double>& v, double dt) {
    if (v.size() < 2) return 0.0;
    double s = 0.0;
    for (double x : v) s += std::abs(x);
    s -= 0.5 * (std::abs(v.front()) + std::abs(v.back()));
    return dt * s;
}

}  // namespace

Resolvent resolvent(const Kernel& kernel, double dt, double horizon, double tolerance) {
    if (!(dt > 0.0) || !(horizon > dt)) throw DomainError("resolvent needs 0 < dt < horizon");
    const double norm = l1_norm(kernel);
    if (norm >= 1.0)
        throw DivergentSeries("resolvent series diverges: ||phi||_1 = " + csv::number(norm) + " >= 1");

    const auto n = static_cast<std::size_t>(std::llround(horizon / dt)) + 1;
    std::vector<double> phi(n);
    for (std::size_t i = 0; i < n; ++i) phi[i] = kernel(static_cast<double>(i) * dt);

    Resolvent q;
    q.dt = dt;
    q.values = phi;
    q.terms = 1;
    std::vector<double> term = phi;
    constexpr std::size_t kMaxTerms = 100000;
    while (trapezoid_l1(term, dt) >= tolerance) {
        if (q.terms >= kMaxTerms) throw DivergentSeries("resolvent series did not reach tolerance");
        term = trapezoid_convolve(phi, term, dt);
        for (std::size_t i = 0; i < n; ++i) q.values[i] += term[i];
        ++q.terms;
    }
    return q;
}

double intensity_bound(const AssumptionReport& report) {
    if (!(report.stability_product < 1.0))
        throw DomainError("intensity bound needs L*Eb*||phi||_1 < 1, got " + csv::number(report.stability_product));
    return (report.lambda_bar + report.psi_at_zero) / (1.0 - report.stability_product);
}

double intensity_bound(const ModelSpec& model, const Kernel& kernel, const SamplingBox& box) {
    return intensity_bound(check_assumptions(model, kernel, box));
}

}  // namespace hawkes
