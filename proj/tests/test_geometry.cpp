#include <doctest.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "fraclab/domain_grid.hpp"
#include "fraclab/energy.hpp"
#include "fraclab/error.hpp"
#include "fraclab/geometry.hpp"

using namespace fraclab;
namespace bq = boost::math::quadrature;

namespace {

// Independent Cheeger oracle: recursive include/exclude enumeration with
// perimeters summed straight from the kernel weights.
struct Enumerator {
    const KernelSet& k;
    const LoadField& f;
    double m;
    std::vector<char> cur;
    double best = std::numeric_limits<double>::infinity();

    double ratio(const std::vector<char>& a) const {
        double per = 0.0, vol = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (!a[i]) continue;
            per += k.tail(i);
            vol += f.values[i] * m;
            for (std::size_t j = 0; j < a.size(); ++j)
                if (!a[j]) per += k.pair(i, j);
        }
        return vol > 0.0 ? per / vol : std::numeric_limits<double>::infinity();
    }
    void run(std::size_t i) {
        if (i == cur.size()) {
            best = std::min(best, ratio(cur));
            return;
        }
        cur[i] = 0;
        run(i + 1);
        cur[i] = 1;
        run(i + 1);
    }
};

struct Instance {
    Grid grid;
    KernelSet kernel;
    LoadField load;
};

Instance random_instance(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> dim(1, 2), len(2, 12), side(1, 3);
    std::uniform_real_distribution<double> s(0.2, 0.8), fv(0.0, 2.0);
    const int n = dim(rng);
    const double sv = s(rng);
    Grid g = n == 1 ? build_grid(DomainSpec::interval(0.0, len(rng) * 0.5, 0.5))
                    : build_grid(DomainSpec::box({0.0, 0.0}, {side(rng) + 1.0, side(rng) + 0.0}, 1.0));
    Instance in{g, build_kernel(g, n + sv), {}};
    for (std::size_t i = 0; i < g.size(); ++i) in.load.values.push_back(fv(rng));
    in.load.values[0] += 0.1;
    in.load.nonnegative = true;
    return in;
}

// Lebesgue integral of |z|^(-2-s) over [u0, u1] x [v0, inf) with v0 > 0.
double strip(double u0, double u1, double v0, double s) {
    const double l = 1.0 + 0.5 * s;
    auto outer = [&](double u) {
        bq::exp_sinh<double> es;
        return es.integrate([&](double v) { return std::pow(u * u + (v0 + v) * (v0 + v), -l); }, 0.0,
                            std::numeric_limits<double>::infinity(), 1e-13);
    };
    return bq::gauss_kronrod<double, 31>::integrate(outer, u0, u1, 15, 1e-13);
}

double half_plane_integral(double a, double s) {
    // int_{u > 0} int_{v > a} |z|^(-2-s)
    const double b = std::sqrt(std::numbers::pi) * std::tgamma(0.5 + 0.5 * s) / std::tgamma(1.0 + 0.5 * s);
    return 0.5 * b * std::pow(a, -s) / s;
}

}  // namespace

TEST_CASE("brute force Cheeger matches an independent enumeration") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 20; ++trial) {
        const auto in = random_instance(rng);
        CAPTURE(trial);
        const auto bf = brute_force_cheeger(in.grid, in.load, in.kernel);
        Enumerator e{in.kernel, in.load, in.grid.cell_measure, std::vector<char>(in.grid.size(), 0)};
        e.run(0);
        CHECK(bf.h == doctest::Approx(e.best).epsilon(1e-12));
        CHECK(e.ratio(bf.witness) == doctest::Approx(e.best).epsilon(1e-12));
        std::uniform_real_distribution<double> d(0.0, 1.0);
        std::vector<double> u(in.grid.size());
        for (auto& v : u) v = d(rng);
        CHECK(threshold_cheeger(u, in.load, in.grid, in.kernel).h >= bf.h);
    }
}

TEST_CASE("Cheeger edge cases") {
    const Grid g = build_grid(DomainSpec::interval(0.0, 2.0, 0.5));
    const KernelSet k = build_kernel(g, 1.5);
    const LoadField f = LoadField::constant(g, 1.0);
    const auto bf = brute_force_cheeger(g, f, k);
    // for constant load the whole interval is best
    for (char c : bf.witness) CHECK(c == 1);
    CHECK(bf.h == doctest::Approx(perimeter(bf.witness, k) / 2.0).epsilon(1e-14));
    CHECK_THROWS_AS(brute_force_cheeger(g, f, k, 3), ConfigError);
    CHECK_THROWS_AS(brute_force_cheeger(g, LoadField::constant(g, 0.0), k), ConfigError);

    const std::vector<double> zero(g.size(), 0.0);
    CHECK_THROWS_AS(threshold_cheeger(zero, f, g, k), DomainError);
    std::vector<double> u{1.0, 2.0, 2.0, 1.0};
    const auto th = threshold_cheeger(u, f, g, k);
    CHECK(th.candidates.size() == 2);
    CHECK(th.h == doctest::Approx(bf.h).epsilon(1e-14));
    u[0] = -1.0;
    CHECK_THROWS_AS(threshold_cheeger(u, f, g, k), DomainError);
}

TEST_CASE("witness order prefers the smaller ratio, then the smaller index list") {
    const SetMask a{1, 0, 1}, b{0, 1, 1};
    CHECK(cheeger_less(1.0, b, 2.0, a));
    CHECK(cheeger_less(1.0, a, 1.0, b));
    CHECK_FALSE(cheeger_less(1.0, b, 1.0, a));
}

TEST_CASE("perimeter and set functional") {
    const Grid g = build_grid(DomainSpec::box({0.0, 0.0}, {1.0, 1.0}, 0.25));
    const KernelSet k = build_kernel(g, 2.5);
    const LoadField f = LoadField::constant(g, 2.0);
    SetMask e(g.size(), 0), c(g.size(), 0);
    for (std::size_t i = 0; i < g.size(); ++i) (i % 3 ? e : c)[i] = 1;
    CHECK(perimeter(SetMask(g.size(), 0), k) == 0.0);
    CHECK(set_functional(e, f, g, k) == doctest::Approx(perimeter(e, k) - 2.0 * g.cell_measure * 10).epsilon(1e-14));
    // Per(E) + Per(Omega \ E) = Per(Omega) + 2 sum_{E x (Omega \ E)} w
    double cross = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        for (std::size_t j = 0; j < g.size(); ++j)
            if (e[i] && c[j]) cross += k.pair(i, j);
    CHECK(perimeter(e, k) + perimeter(c, k) ==
          doctest::Approx(perimeter(SetMask(g.size(), 1), k) + 2.0 * cross).epsilon(1e-12));
}

TEST_CASE("mean curvature of an interval has the closed form") {
    for (double s : {0.3, 0.5, 0.8}) {
        const Grid g = build_grid(DomainSpec::interval(-1.0, 1.0, 0.25));
        const SetMask all(g.size(), 1);
        const double expect = 2.0 * std::pow(2.0, -s) / s;
        CHECK(mean_curvature(g, all, g.size() - 1, s) == doctest::Approx(expect).epsilon(1e-12));
        CHECK(mean_curvature(g, all, 0, Face::MinusX, s) == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("mean curvature of a square against the half-plane closed form") {
    const double s = 0.5;
    const Grid g = build_grid(DomainSpec::box({-1.0, -1.0}, {1.0, 1.0}, 0.25));
    const SetMask all(g.size(), 1);
    for (int j : {0, 3, 5}) {
        const long c = g.find({7, j});
        REQUIRE(c >= 0);
        const double y0 = g.cells[c].center[1];
        const double at = 1.0 - y0, ab = 1.0 + y0;
        // Pi \ E = {u > 0, v > at} + {u > 0, v < -ab} + {u > 2, -ab < v < at}, u = 1 - x, v = y - y0
        const double b = std::sqrt(std::numbers::pi) * std::tgamma(0.5 + 0.5 * s) / std::tgamma(1.0 + 0.5 * s);
        const double far_band = b * std::pow(2.0, -s) / s - (half_plane_integral(at, s) - strip(0.0, 2.0, at, s)) -
                                (half_plane_integral(ab, s) - strip(0.0, 2.0, ab, s));
        const double expect = 2.0 * (half_plane_integral(at, s) + half_plane_integral(ab, s) + far_band);
        CHECK(mean_curvature(g, all, c, Face::PlusX, s) == doctest::Approx(expect).epsilon(1e-9));
    }
}

TEST_CASE("mean curvature of an L-shaped set against strip cubature") {
    const double s = 0.4;
    const Grid g = build_grid(DomainSpec::box({0.0, 0.0}, {2.0, 2.0}, 0.5));
    SetMask e(g.size(), 0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto x = g.cells[i].center;
        e[i] = x[0] < 1.0 || x[1] < 1.0;
    }
    const long c = g.find({3, 1});
    REQUIRE(c >= 0);
    const double y0 = 0.75;
    // Pi = {x < 2}; Pi \ E = {x < 0} + {0 < x < 2, y < 0} + {0 < x < 2, y > 2} + (1, 2) x (1, 2)
    const double b = std::sqrt(std::numbers::pi) * std::tgamma(0.5 + 0.5 * s) / std::tgamma(1.0 + 0.5 * s);
    const double left = b * std::pow(2.0, -s) / s;
    const double below = strip(0.0, 2.0, y0, s);
    const double above = strip(0.0, 2.0, 2.0 - y0, s);
    const double notch = strip(0.0, 1.0, 1.0 - y0, s) - strip(0.0, 1.0, 2.0 - y0, s);
    const double expect = 2.0 * (left + below + above + notch);
    CHECK(mean_curvature(g, e, c, Face::PlusX, s) == doctest::Approx(expect).epsilon(1e-8));
}

TEST_CASE("mean curvature scales like h^-s and validates input") {
    const SetMask all(8, 1);
    const Grid g1 = build_grid(DomainSpec::interval(0.0, 8.0, 1.0));
    const Grid g2 = build_grid(DomainSpec::interval(0.0, 4.0, 0.5));
    CHECK(mean_curvature(g2, all, 7, 0.5) == doctest::Approx(std::pow(0.5, -0.5) * mean_curvature(g1, all, 7, 0.5)).epsilon(1e-12));
    SetMask some(8, 0);
    some[2] = 1;
    CHECK_THROWS_AS(mean_curvature(g1, some, 3, 0.5), DomainError);
    CHECK_THROWS_AS(mean_curvature(g1, all, 3, 0.5), DomainError);
    CHECK_THROWS_AS(mean_curvature(g1, all, 7, Face::PlusY, 0.5), DomainError);
    CHECK(mean_curvature(g1, some, 2, 0.5) > 0.0);
}
