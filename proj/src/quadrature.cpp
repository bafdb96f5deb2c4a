#include "hawkes/quadrature.hpp"

#include "hawkes/errors.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace hawkes::quad {

namespace {

constexpr int kSamplesPerPanel = 64;
constexpr unsigned kMaxDepth = 12;
constexpr double kAbsoluteTolerance = 1e-14;

// Bisection until the Kronrod error estimate meets max(abs_tol, rel_tol * |I|).
double adaptive(const Integrand& f, double a, double b, double rel_tol, double abs_tol, unsigned depth) {
    double err = 0.0;
    const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 0, 0.0, &err);
    if (depth == 0 || err <= std::max(abs_tol, rel_tol * std::abs(value))) return value;
    const double mid = 0.5 * (a + b);
    return adaptive(f, a, mid, rel_tol, 0.5 * abs_tol, depth - 1) +
           adaptive(f, mid, b, rel_tol, 0.5 * abs_tol, depth - 1);
}

}  // namespace

double integrate(const Integrand& f, double a, double b, double tol) {
    if (!(b > a)) return 0.0;
    const double value = adaptive(f, a, b, tol, kAbsoluteTolerance, kMaxDepth);
    if (!std::isfinite(value)) throw InvalidKernel("non-finite integrand on [" + std::to_string(a) + ", " +
                                                   std::to_string(b) + "]");
    return value;
}

std::vector<double> geometric_panels(double a, double b, double first_width, double growth) {
    std::vector<double> edges{a};
    double width = first_width;
    double t = a;
    while (t + width < b) {
        t += width;
        edges.push_back(t);
        width *= growth;
    }
    edges.push_back(b);
    return edges;
}

double integrate_panels(const Integrand& f, double a, double b, double tol) {
    const auto edges = geometric_panels(a, b);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) total += integrate(f, edges[i], edges[i + 1], tol);
    return total;
}

std::vector<double> sign_changes(const Integrand& f, double a, double b, int samples) {
    std::vector<double> roots;
    double t_prev = a;
    double f_prev = f(a);
    for (int i = 1; i <= samples; ++i) {
        const double t = (i == samples) ? b : a + (b - a) * i / samples;
        const double ft = f(t);
        if (!std::isfinite(ft)) throw InvalidKernel("non-finite kernel sample at t=" + std::to_string(t));
        if (ft == 0.0) {
            roots.push_back(t);
        } else if (f_prev != 0.0 && (f_prev < 0.0) != (ft < 0.0)) {
            std::uintmax_t iters = 100;
            const auto bracket = boost::math::tools::toms748_solve(
                f, t_prev, t, f_prev, ft, boost::math::tools::eps_tolerance<double>(52), iters);
            roots.push_back(0.5 * (bracket.first + bracket.second));
        }
        t_prev = t;
        f_prev = ft;
    }
    return roots;
}

double integrate_abs(const Integrand& f, double a, double b, double tol) {
    if (!(b > a)) return 0.0;
    const auto edges = geometric_panels(a, b);
    std::vector<double> cuts{a};
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        for (double r : sign_changes(f, edges[i], edges[i + 1], kSamplesPerPanel)) {
            if (r > cuts.back()) cuts.push_back(r);
        }
        if (edges[i + 1] > cuts.back()) cuts.push_back(edges[i + 1]);
    }
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) total += std::abs(integrate(f, cuts[i], cuts[i + 1], tol));
    return total;
}

double integrate_tail(const Integrand& f, double a, double tol) {
    boost::math::quadrature::exp_sinh<double> integrator;
    double err = 0.0;
    double l1 = 0.0;
    const double value = integrator.integrate(
        [&](double t) { return f(t); }, a, std::numeric_limits<double>::infinity(), std::sqrt(tol), &err, &l1);
    if (!std::isfinite(value) || err > 1e-6 * std::max(1.0, l1))
        throw InvalidKernel("non-integrable tail beyond t=" + std::to_string(a));
    return value;
}

}  // namespace hawkes::quad
