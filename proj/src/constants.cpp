#include "fraclab/constants.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "fraclab/error.hpp"
#include "fraclab/quadrature.hpp"

namespace fraclab {

namespace {

void check_admissible(int n, double s, double p) {
    if (n != 1 && n != 2) throw ConfigError("dimension must be 1 or 2");
    if (!(s > 0.0 && s < 1.0)) throw ConfigError("s must lie in (0, 1)");
    if (!(p >= 1.0)) throw ConfigError("p must be at least 1");
    if (!(p * s < 1.0)) throw ConfigError("constants need p s < 1");
}

// Both kernels are written in d = 1 - r so that nothing cancels as r -> 1.
// For n = 2 the substitution tan(t/2) = c y with c = d/(1 + r) gives
//   int_0^pi (1 - 2r cos t + r^2)^(-l) dt = 2 c d^(-2l) int_0^inf g(y) dy,
//   g(y) = (1 + y^2)^(-l) (1 + c^2 y^2)^(l-1),
// which varies on the scales y ~ 1 and y ~ K = 1/c only. The range is split
// at 1 and K; [1, K] is integrated in log y and [K, inf) after y = K/x, where
// it becomes K (x^2 + K^2)^(-l) (1 + x^2)^(l-1) on (0, 1].
double phi_from_gap(int n, double ps, double d) {
    if (n == 1) return std::pow(d, -1.0 - ps) + std::pow(2.0 - d, -1.0 - ps);
    const double l = 0.5 * (2.0 + ps);
    const double c = d / (2.0 - d);
    const double k = 1.0 / c;
    auto g = [&](double y) { return std::pow(1.0 + y * y, -l) * std::pow(1.0 + c * c * y * y, l - 1.0); };
    auto mid = [&](double u) {
        const double y = std::exp(u);
        return g(y) * y;
    };
    auto far = [&](double x) { return k * std::pow(x * x + k * k, -l) * std::pow(1.0 + x * x, l - 1.0); };
    const double log_k = std::log(k);
    std::vector<double> pts;
    for (double u = 0.0; u < log_k; u += 2.0) pts.push_back(u);
    pts.push_back(log_k);
    double inner = quad::gauss_kronrod(g, 0.0, 1.0, 1e-12, 10).value;
    if (pts.size() > 1) inner += quad::gauss_kronrod(mid, pts, 1e-12, 10).value;
    inner += quad::gauss_kronrod(far, 0.0, 1.0, 1e-12, 10).value;
    return 4.0 * c * std::pow(d, -2.0 * l) * inner;
}

}  // namespace

double sphere_measure(int n) {
    if (n == 1) return 2.0;
    if (n == 2) return 2.0 * std::numbers::pi;
    throw ConfigError("dimension must be 1 or 2");
}

double unit_ball_measure(int n) { return sphere_measure(n) / n; }

double phi(int n, double s, double p, double r) {
    if (!(r > 0.0 && r < 1.0)) throw DomainError("phi needs r in (0, 1)");
    check_admissible(n, s, p);
    return phi_from_gap(n, p * s, 1.0 - r);
}

ConstantValue c_constant(int n, double s, double p) {
    check_admissible(n, s, p);
    const double ps = p * s;
    const double a = (n - ps) / p;
    // |1 - r^a|^p phi(r) written in d = 1 - r.
    auto base = [&](double d) {
        const double gap = -std::expm1(a * std::log1p(-d));
        return std::pow(gap, p) * phi_from_gap(n, ps, d);
    };

    // [0, 1/2]: r = v^(1/ps) absorbs r^(ps-1) dr = dv / ps.
    const double v_end = std::pow(0.5, ps);
    auto left = [&](double v) {
        const double r = std::pow(v, 1.0 / ps);
        return r > 0.0 ? base(1.0 - r) / ps : 0.0;
    };
    // [1/2, 1]: d = w^(1/q), q = p - ps, absorbs the d^(q - 1) endpoint behaviour.
    const double q = p - ps;
    const double w_end = std::pow(0.5, q);
    // The transformed integrand has a finite limit at w = 0; below d = 1e-10 it
    // is frozen; the integrand varies by O(d) there.
    const double w_min = std::pow(1e-10, q);
    auto right = [&](double w) {
        w = std::max(w, w_min);
        const double d = std::pow(w, 1.0 / q);
        const double r = 1.0 - d;
        return std::pow(r, ps - 1.0) * base(d) * d / (q * w);
    };
    const auto lo = quad::tanh_sinh(left, 0.0, v_end, 1e-10);
    const auto hi = quad::tanh_sinh(right, 0.0, w_end, 1e-10);
    ConstantValue out{2.0 * (lo.value + hi.value), 2.0 * (lo.error + hi.error)};
    if (!(out.value > 0.0) || !std::isfinite(out.value) || out.error > 1e-6 * out.value)
        throw NumericalError("C quadrature did not converge (value " + std::to_string(out.value) +
                             ", error estimate " + std::to_string(out.error) + ")");
    return out;
}

double sobolev_constant(int n, double s, double p) {
    const double c = c_constant(n, s, p).value;
    const double p_star = n * p / (n - s * p);
    return (p / p_star) * std::pow(n / sphere_measure(n), s * p / n) / c;
}

double ball_perimeter(int n, double s, double radius) {
    if (!(radius > 0.0)) throw DomainError("ball radius must be positive");
    const double unit = std::pow(unit_ball_measure(n), (n - s) / n) / (2.0 * sobolev_constant(n, s, 1.0));
    return std::pow(radius, n - s) * unit;
}

double calibrable_radius(int n, double s) {
    const double two_s = 2.0 * sobolev_constant(n, s, 1.0);
    const double from_sobolev = std::pow(two_s, -1.0 / s) * std::pow(unit_ball_measure(n), -1.0 / n);
    const double h_unit = ball_perimeter(n, s, 1.0) / unit_ball_measure(n);
    const double from_cheeger = std::pow(h_unit, 1.0 / s);
    if (std::fabs(from_sobolev - from_cheeger) > 1e-10 * from_sobolev)
        throw NumericalError("calibrable radius formulas disagree");
    return from_sobolev;
}

SharpConstants sharp_constants(int n, double s, double p) {
    SharpConstants k;
    k.n = n;
    k.s = s;
    k.p = p;
    const auto c = c_constant(n, s, p);
    k.c = c.value;
    k.c_error = c.error;
    k.p_star = n * p / (n - s * p);
    k.omega = sphere_measure(n);
    k.ball_measure = unit_ball_measure(n);
    k.sobolev = (p / k.p_star) * std::pow(n / k.omega, s * p / n) / k.c;
    k.ball_perimeter_unit = ball_perimeter(n, s, 1.0);
    k.calibrable_radius = calibrable_radius(n, s);
    return k;
}

}  // namespace fraclab
