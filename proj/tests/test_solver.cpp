#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "fraclab/domain_grid.hpp"
#include "fraclab/energy.hpp"
#include "fraclab/error.hpp"
#include "fraclab/solver.hpp"

using namespace fraclab;

namespace {

struct Problem {
    Grid grid;
    KernelSet kernel;
    LoadField load;
};

Problem interval_problem(double a, double b, double h, double s, double p, double f = 1.0) {
    Problem pr{build_grid(DomainSpec::interval(a, b, h)), {}, {}};
    pr.kernel = build_kernel(pr.grid, kernel_exponent(1, s, p));
    pr.load = LoadField::constant(pr.grid, f);
    pr.load.nonnegative = f > 0.0;
    return pr;
}

}  // namespace

TEST_CASE("zero load gives the zero field") {
    auto pr = interval_problem(0.0, 1.0, 0.125, 0.5, 1.2, 0.0);
    SolveConfig cfg;
    cfg.p = 1.2;
    const auto sol = solve_p(pr.grid, pr.kernel, pr.load, cfg);
    for (double v : sol.u) CHECK(v == 0.0);
    CHECK(sol.energy.total == 0.0);
}

TEST_CASE("one cell has the closed-form minimiser") {
    for (double p : {1.05, 1.2, 1.3}) {
        CAPTURE(p);
        auto pr = interval_problem(0.0, 1.0, 1.0, 0.5, p, 0.3);
        SolveConfig cfg;
        cfg.p = p;
        const auto sol = solve_p(pr.grid, pr.kernel, pr.load, cfg);
        const double t = pr.kernel.tail(0);
        CHECK(sol.u[0] == doctest::Approx(std::pow(0.3 / t, 1.0 / (p - 1.0))).epsilon(1e-9));
    }
}

TEST_CASE("minimiser properties on an interval") {
    for (double p : {1.1, 1.3}) {
        CAPTURE(p);
        auto pr = interval_problem(-2.0, 2.0, 0.125, 0.5, p);
        SolveConfig cfg;
        cfg.p = p;
        const auto sol = solve_p(pr.grid, pr.kernel, pr.load, cfg);
        const auto& u = sol.u;

        // energy trace never increases and ends at or below the zero field
        for (std::size_t k = 1; k < sol.energy_trace.size(); ++k)
            CHECK(sol.energy_trace[k] <= sol.energy_trace[k - 1]);
        CHECK(sol.energy.total <= 0.0);
        CHECK(*std::min_element(u.begin(), u.end()) >= 0.0);

        // d/dlambda F(lambda u) = 0 at lambda = 1: (1/2)[u]^p = int f u
        const auto e = total_energy(u, pr.load, pr.grid, pr.kernel, p);
        CHECK(0.5 * seminorm_pow(u, pr.kernel, p) == doctest::Approx(e.load).epsilon(1e-6));

        // reflection symmetry of the data carries over
        const double umax = *std::max_element(u.begin(), u.end());
        for (std::size_t i = 0; i < u.size(); ++i) CHECK(std::abs(u[i] - u[u.size() - 1 - i]) <= 1e-6 * umax);

        const double fm = pr.grid.cell_measure;
        // Near-ties can stop the iteration at rounding level before the gradient test.
        if (!sol.precision_limited) CHECK(kkt_residual(u, pr.load, pr.grid, pr.kernel, p) <= 1e-6 * fm);
        CHECK(sol.grad_norm == doctest::Approx(kkt_residual(u, pr.load, pr.grid, pr.kernel, p)));
    }
}

TEST_CASE("projected gradient agrees with Newton on a small problem") {
    auto pr = interval_problem(0.0, 2.0, 0.25, 0.4, 1.3);
    SolveConfig cfg;
    cfg.p = 1.3;
    cfg.s = 0.4;
    // an asymmetric load keeps the minimiser free of exact ties
    for (std::size_t i = 0; i < pr.load.values.size(); ++i) pr.load.values[i] = 1.0 + 0.3 * i;
    const auto newton = solve_p(pr.grid, pr.kernel, pr.load, cfg);
    cfg.method = SolverMethod::ProjectedGradient;
    const auto pg = solve_p(pr.grid, pr.kernel, pr.load, cfg);
    for (std::size_t i = 0; i < newton.u.size(); ++i) CHECK(pg.u[i] == doctest::Approx(newton.u[i]).epsilon(1e-6));
    cfg.step_init = StepInit::Unit;
    cfg.max_iterations = 200000;
    const auto unit = solve_p(pr.grid, pr.kernel, pr.load, cfg);
    CHECK(unit.energy.total == doctest::Approx(newton.energy.total).epsilon(1e-9));
}

TEST_CASE("warm start reaches the same minimiser") {
    auto pr = interval_problem(-1.0, 1.0, 0.125, 0.5, 1.2);
    SolveConfig cfg;
    cfg.p = 1.2;
    const auto cold = solve_p(pr.grid, pr.kernel, pr.load, cfg);
    std::vector<double> guess(pr.grid.size(), 1.0);
    const auto warm = solve_p(pr.grid, pr.kernel, pr.load, cfg, std::span<const double>(guess));
    for (std::size_t i = 0; i < cold.u.size(); ++i) CHECK(warm.u[i] == doctest::Approx(cold.u[i]).epsilon(1e-6));
}

TEST_CASE("ray scaling and the residual at zero") {
    auto pr = interval_problem(0.0, 1.0, 0.25, 0.5, 1.2);
    const std::vector<double> zero(pr.grid.size(), 0.0);
    CHECK(kkt_residual(zero, pr.load, pr.grid, pr.kernel, 1.2) == doctest::Approx(pr.grid.cell_measure));
    const std::vector<double> v{0.2, 1.0, 0.7, 0.1};
    const double lam = optimal_ray_scale(v, pr.load, pr.grid, pr.kernel, 1.2);
    auto at = [&](double l) {
        std::vector<double> w(v);
        for (auto& x : w) x *= l;
        return total_energy(w, pr.load, pr.grid, pr.kernel, 1.2).total;
    };
    CHECK(at(lam) <= at(lam * 1.001));
    CHECK(at(lam) <= at(lam * 0.999));
    const LoadField neg = LoadField::constant(pr.grid, -1.0);
    CHECK(optimal_ray_scale(v, neg, pr.grid, pr.kernel, 1.2) == 0.0);
}

TEST_CASE("invalid configurations") {
    auto pr = interval_problem(0.0, 1.0, 0.25, 0.5, 1.2);
    SolveConfig cfg;
    cfg.p = 1.0;
    CHECK_THROWS_AS(solve_p(pr.grid, pr.kernel, pr.load, cfg), ConfigError);
    cfg.p = 1.4;  // above (n + 1)/(n + s) = 4/3
    CHECK_THROWS_AS(solve_p(pr.grid, pr.kernel, pr.load, cfg), ConfigError);
    cfg.p = 1.3;  // kernel built for 1.2
    CHECK_THROWS_AS(solve_p(pr.grid, pr.kernel, pr.load, cfg), ConfigError);
    cfg.p = 1.2;
    cfg.max_iterations = 0;
    CHECK_THROWS_AS(solve_p(pr.grid, pr.kernel, pr.load, cfg), ConfigError);
}

TEST_CASE("iteration budget exhaustion carries the last iterate") {
    auto pr = interval_problem(-2.0, 2.0, 0.125, 0.5, 1.1);
    SolveConfig cfg;
    cfg.p = 1.1;
    cfg.max_iterations = 2;
    cfg.method = SolverMethod::ProjectedGradient;
    try {
        solve_p(pr.grid, pr.kernel, pr.load, cfg);
        FAIL("expected SolveError");
    } catch (const SolveError& e) {
        CHECK(e.last().u.size() == pr.grid.size());
        CHECK(e.last().iterations == 2);
    }
}
