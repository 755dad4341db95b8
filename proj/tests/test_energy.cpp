#include <doctest.h>

#include <cmath>
#include <random>
#include <tuple>
#include <vector>

#include "fraclab/domain_grid.hpp"
#include "fraclab/energy.hpp"
#include "fraclab/error.hpp"
#include "fraclab/geometry.hpp"

using namespace fraclab;

namespace {

std::vector<double> distinct_field(std::size_t n, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> d(lo, hi);
    std::vector<double> u(n);
    for (auto& v : u) v = d(rng);
    return u;
}

LoadField random_load(const Grid& g, std::mt19937_64& rng) {
    LoadField f;
    std::uniform_real_distribution<double> d(0.1, 2.0);
    for (std::size_t i = 0; i < g.size(); ++i) f.values.push_back(d(rng));
    f.nonnegative = true;
    return f;
}

}  // namespace

TEST_CASE("gradient matches central differences") {
    std::mt19937_64 rng(11);
    const Grid g2 = build_grid(DomainSpec::box({0.0, 0.0}, {1.0, 0.75}, 0.25));
    const Grid g1 = build_grid(DomainSpec::interval(0.0, 2.0, 0.2));
    for (auto [n, s, p] : {std::tuple{2, 0.3, 1.1}, std::tuple{2, 0.3, 1.25}, std::tuple{1, 0.2, 1.5}}) {
        CAPTURE(p);
        const Grid& g = n == 2 ? g2 : g1;
        const KernelSet k = build_kernel(g, kernel_exponent(n, s, p));
        for (int trial = 0; trial < 5; ++trial) {
            const auto u = distinct_field(g.size(), rng);
            const LoadField f = random_load(g, rng);
            const auto grad = gradient(u, f, g, k, p);
            for (std::size_t i = 0; i < u.size(); ++i) {
                auto up = u, um = u;
                up[i] += 1e-6;
                um[i] -= 1e-6;
                const double fd =
                    (total_energy(up, f, g, k, p).total - total_energy(um, f, g, k, p).total) / 2e-6;
                CHECK(grad[i] == doctest::Approx(fd).epsilon(1e-6));
            }
        }
    }
}

TEST_CASE("gradient of the zero problem vanishes and p <= 1 is refused") {
    const Grid g = build_grid(DomainSpec::interval(0.0, 1.0, 0.25));
    const KernelSet k = build_kernel(g, 1.8);
    const std::vector<double> u(g.size(), 0.0);
    const LoadField f = LoadField::constant(g, 0.0);
    for (double v : gradient(u, f, g, k, 1.2)) CHECK(v == 0.0);
    CHECK_THROWS_WITH_AS(gradient(u, f, g, k, 1.0), "nonsmooth regime: use certify module", DomainError);
}

TEST_CASE("one-cell seminorm and gradient closed forms") {
    const Grid g = build_grid(DomainSpec::interval(0.0, 1.0, 1.0));
    const KernelSet k1 = build_kernel(g, 1.5);
    const std::vector<double> one{1.0};
    // 2 * int_0^1 int_{R \ (0,1)} |x - y|^(-3/2) = 2 * 2 / (s (1 - s)) = 16
    CHECK(seminorm(one, k1, 1.0) == doctest::Approx(16.0).epsilon(1e-6));

    const double p = 1.3;
    const KernelSet kp = build_kernel(g, kernel_exponent(1, 0.5, p));
    const LoadField f = LoadField::constant(g, 1.0);
    const double t = kp.tail(0);
    const double ustar = std::pow(1.0 / t, 1.0 / (p - 1.0));
    const std::vector<double> u{ustar};
    CHECK(std::abs(gradient(u, f, g, kp, p)[0]) < 1e-12);
}

TEST_CASE("homogeneity") {
    std::mt19937_64 rng(5);
    const Grid g = build_grid(DomainSpec::interval(-1.0, 1.0, 0.125));
    const KernelSet k = build_kernel(g, kernel_exponent(1, 0.4, 1.2));
    const auto u = distinct_field(g.size(), rng);
    for (double lam : {0.0, 0.5, 3.0}) {
        std::vector<double> v(u);
        for (auto& x : v) x *= lam;
        CHECK(seminorm_pow(v, k, 1.2) == doctest::Approx(std::pow(lam, 1.2) * seminorm_pow(u, k, 1.2)).epsilon(1e-13));
    }
    const KernelSet k1 = build_kernel(g, 1.4);
    const LoadField f = LoadField::constant(g, 0.7);
    std::vector<double> v(u);
    for (auto& x : v) x *= 2.5;
    CHECK(total_energy(v, f, g, k1, 1.0).total == doctest::Approx(2.5 * total_energy(u, f, g, k1, 1.0).total).epsilon(1e-13));
    CHECK(total_energy(std::vector<double>(g.size(), 0.0), f, g, k1, 1.0).total == 0.0);
}

TEST_CASE("energy breakdown is consistent") {
    std::mt19937_64 rng(8);
    const Grid g = build_grid(DomainSpec::interval(0.0, 2.0, 0.25));
    const KernelSet k = build_kernel(g, kernel_exponent(1, 0.5, 1.25));
    const auto u = distinct_field(g.size(), rng);
    const LoadField f = random_load(g, rng);
    const auto e = total_energy(u, f, g, k, 1.25);
    CHECK(e.kinetic == doctest::Approx(std::pow(e.seminorm, 1.25) / (2 * 1.25)).epsilon(1e-13));
    CHECK(e.total == doctest::Approx(e.kinetic - e.load).epsilon(1e-13));
    std::vector<double> grad(g.size());
    const auto e2 = energy_and_gradient(u, f, g, k, 1.25, grad);
    CHECK(e2.total == doctest::Approx(e.total).epsilon(1e-14));
    const auto g2 = gradient(u, f, g, k, 1.25);
    for (std::size_t i = 0; i < grad.size(); ++i) CHECK(grad[i] == doctest::Approx(g2[i]).epsilon(1e-14));
}

TEST_CASE("indicator energy at p = 1 equals the set functional") {
    std::mt19937_64 rng(3);
    const Grid g = build_grid(DomainSpec::ball(2, {0.0, 0.0}, 1.0, 0.25));
    const KernelSet k = build_kernel(g, 2.5);
    const LoadField f = random_load(g, rng);
    std::bernoulli_distribution coin(0.5);
    for (int trial = 0; trial < 10; ++trial) {
        SetMask m(g.size());
        std::vector<double> u(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) u[i] = m[i] = coin(rng);
        CHECK(total_energy(u, f, g, k, 1.0).total == doctest::Approx(set_functional(m, f, g, k)).epsilon(1e-13));
    }
}

TEST_CASE("convexity and positive truncation") {
    std::mt19937_64 rng(21);
    const Grid g = build_grid(DomainSpec::interval(-1.0, 1.0, 0.125));
    for (double p : {1.0, 1.2, 1.3}) {
        const KernelSet k = build_kernel(g, kernel_exponent(1, 0.5, p));
        const LoadField f = random_load(g, rng);
        for (int trial = 0; trial < 20; ++trial) {
            const auto u = distinct_field(g.size(), rng);
            const auto v = distinct_field(g.size(), rng);
            std::vector<double> mid(g.size()), plus(g.size());
            for (std::size_t i = 0; i < g.size(); ++i) {
                mid[i] = 0.5 * (u[i] + v[i]);
                plus[i] = std::max(u[i], 0.0);
            }
            const double fu = total_energy(u, f, g, k, p).total;
            const double fv = total_energy(v, f, g, k, p).total;
            const double scale = total_energy(u, f, g, k, p).kinetic + total_energy(v, f, g, k, p).kinetic + 1.0;
            CHECK(total_energy(mid, f, g, k, p).total <= 0.5 * (fu + fv) + 1e-12 * scale);
            if (p == 1.0) CHECK(total_energy(plus, f, g, k, p).total <= fu);
        }
    }
}

TEST_CASE("Hoelder embedding between the two seminorms") {
    std::mt19937_64 rng(17);
    const Grid g = build_grid(DomainSpec::interval(-2.0, 2.0, 0.125));
    const KernelSet k1 = build_kernel(g, 1.5);
    for (double p : {1.05, 1.2, 1.3}) {
        const KernelSet kp = build_kernel(g, kernel_exponent(1, 0.5, p));
        const double m = holder_measure(k1, kp, p);
        CHECK(m > 0.0);
        int violations = 0;
        for (int trial = 0; trial < 50; ++trial) {
            const auto u = distinct_field(g.size(), rng);
            if (seminorm(u, k1, 1.0) > seminorm(u, kp, p) * std::pow(m, (p - 1.0) / p)) ++violations;
        }
        CHECK(violations == 0);
    }
    CHECK_THROWS_AS(holder_measure(k1, k1, 1.0), DomainError);
}

TEST_CASE("co-area decomposition") {
    std::mt19937_64 rng(4);
    const Grid g = build_grid(DomainSpec::box({0.0, 0.0}, {1.0, 1.0}, 0.25));
    const KernelSet k = build_kernel(g, 2.5);
    const LoadField f = random_load(g, rng);

    SUBCASE("zero field") {
        const auto levels = coarea_decompose(std::vector<double>(g.size(), 0.0), f, g, k);
        CHECK(levels.empty());
    }
    SUBCASE("indicator") {
        SetMask m(g.size(), 0);
        m[1] = m[2] = m[6] = 1;
        std::vector<double> u(m.begin(), m.end());
        const auto levels = coarea_decompose(u, f, g, k);
        REQUIRE(levels.size() == 1);
        CHECK(levels[0].perimeter == perimeter(m, k));
        CHECK(levels[0].volume == weighted_volume(m, f, g));
    }
    SUBCASE("plateau fields") {
        std::uniform_int_distribution<int> lv(0, 3);
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<double> u(g.size());
            for (auto& v : u) v = 0.5 * lv(rng);
            const auto sums = coarea_sums(coarea_decompose(u, f, g, k));
            CHECK(sums.perimeter == doctest::Approx(0.5 * seminorm(u, k, 1.0)).epsilon(1e-12));
            CHECK(sums.volume == doctest::Approx(total_energy(u, f, g, k, 1.0).load).epsilon(1e-12));
        }
    }
    SUBCASE("negative field") {
        std::vector<double> u(g.size(), 1.0);
        u[3] = -0.1;
        CHECK_THROWS_AS(coarea_decompose(u, f, g, k), DomainError);
    }
}

TEST_CASE("load validation") {
    const Grid g = build_grid(DomainSpec::interval(0.0, 1.0, 0.25));
    LoadField f = LoadField::constant(g, 1.0);
    CHECK_NOTHROW(f.validate(g));
    f.values.pop_back();
    CHECK_THROWS_AS(f.validate(g), ConfigError);
    LoadField z = LoadField::constant(g, 0.0);
    z.nonnegative = true;
    CHECK_THROWS_WITH_AS(z.validate(g), "weighted volume degenerate", ConfigError);
}
