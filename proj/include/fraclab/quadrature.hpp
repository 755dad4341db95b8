#pragma once

#include <functional>
#include <span>

namespace fraclab::quad {

struct Result {
    double value = 0.0;
    double error = 0.0;  // estimated absolute error
};

/// Adaptive 15-point Gauss-Kronrod on [a, b].
Result gauss_kronrod(const std::function<double(double)>& f, double a, double b,
                     double rel_tol = 1e-12, unsigned max_depth = 30);

/// Same, summed over consecutive breakpoints [pts[0], pts[1]], [pts[1], pts[2]], ...
Result gauss_kronrod(const std::function<double(double)>& f, std::span<const double> pts,
                     double rel_tol = 1e-12, unsigned max_depth = 30);

/// Double-exponential (tanh-sinh) rule on [a, b]; tolerates algebraic endpoint
/// singularities. The integrand is never evaluated at the endpoints.
Result tanh_sinh(const std::function<double(double)>& f, double a, double b, double rel_tol = 1e-10);

/// Gauss-Legendre nodes and weights on [0, 1].
struct Rule {
    std::span<const double> nodes;
    std::span<const double> weights;
};
Rule gauss_legendre_unit(int points);

}  // namespace fraclab::quad
