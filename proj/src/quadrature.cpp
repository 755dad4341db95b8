#include "fraclab/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <array>
#include <cmath>
#include <stdexcept>

namespace fraclab::quad {

Result gauss_kronrod(const std::function<double(double)>& f, double a, double b,
                     double rel_tol, unsigned max_depth) {
    using boost::math::quadrature::gauss_kronrod;
    Result r;
    r.value = gauss_kronrod<double, 15>::integrate(f, a, b, max_depth, rel_tol, &r.error);
    return r;
}

Result gauss_kronrod(const std::function<double(double)>& f, std::span<const double> pts,
                     double rel_tol, unsigned max_depth) {
    Result total;
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
        const Result piece = gauss_kronrod(f, pts[k], pts[k + 1], rel_tol, max_depth);
        total.value += piece.value;
        total.error += piece.error;
    }
    return total;
}

Result tanh_sinh(const std::function<double(double)>& f, double a, double b, double rel_tol) {
    // The rule grows its abscissa tables lazily, so each thread keeps its own.
    thread_local boost::math::quadrature::tanh_sinh<double> rule;
    Result r;
    double l1 = 0.0;
    r.value = rule.integrate(f, a, b, rel_tol, &r.error, &l1);
    return r;
}

namespace {

template <int N>
struct UnitRule {
    std::array<double, N> x{};
    std::array<double, N> w{};
    UnitRule() {
        using G = boost::math::quadrature::gauss<double, N>;
        // boost stores the non-negative half of the symmetric rule on [-1, 1]
        const auto& abscissa = G::abscissa();
        const auto& weights = G::weights();
        int k = 0;
        for (std::size_t i = 0; i < abscissa.size(); ++i) {
            const double t = abscissa[i];
            if (t == 0.0) {
                x[k] = 0.5;
                w[k] = 0.5 * weights[i];
                ++k;
                continue;
            }
            x[k] = 0.5 * (1.0 - t);
            w[k] = 0.5 * weights[i];
            ++k;
            x[k] = 0.5 * (1.0 + t);
            w[k] = 0.5 * weights[i];
            ++k;
        }
    }
};

}  // namespace

Rule gauss_legendre_unit(int points) {
    static const UnitRule<4> r4;
    static const UnitRule<8> r8;
    static const UnitRule<12> r12;
    switch (points) {
        case 4: return {r4.x, r4.w};
        case 8: return {r8.x, r8.w};
        case 12: return {r12.x, r12.w};
        default: throw std::invalid_argument("gauss_legendre_unit: supported sizes are 4, 8, 12");
    }
}

}  // namespace fraclab::quad
