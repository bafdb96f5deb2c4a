#pragma once

#include <functional>
#include <vector>

namespace hawkes::quad {

using Integrand = std::function<double(double)>;

/// Adaptive 31-point Gauss-Kronrod on [a, b].
double integrate(const Integrand& f, double a, double b, double tol = 1e-12);

/// Split [a, b] into panels whose widths grow geometrically from `first_width`.
/// Panels are where sign changes are searched and adaptive refinement restarts.
std::vector<double> geometric_panels(double a, double b, double first_width = 0.5, double growth = 2.0);

/// Integral over panels, each refined adaptively.
double integrate_panels(const Integrand& f, double a, double b, double tol = 1e-12);

/// Integral of |f| on [a, b]: sign changes are bracketed on a sample grid per panel,
/// polished with TOMS 748 and each constant-sign piece is integrated separately.
double integrate_abs(const Integrand& f, double a, double b, double tol = 1e-12);

/// Integral of f on [a, inf) by exp-sinh quadrature.
double integrate_tail(const Integrand& f, double a, double tol = 1e-12);

/// Roots of f on [a, b] found by sign changes on a uniform sample of `samples` points.
std::vector<double> sign_changes(const Integrand& f, double a, double b, int samples);

}  // namespace hawkes::quad
