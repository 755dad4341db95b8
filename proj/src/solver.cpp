#include "fraclab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "fraclab/kernels.hpp"

namespace fraclab {

void SolveConfig::validate(int dimension) const {
    if (!(s > 0.0 && s < 1.0)) throw ConfigError("s must lie in (0, 1)");
    if (!(p > 1.0)) throw ConfigError("p must exceed 1 (p = 1 is handled by certificates)");
    if (!(p < p_upper_bound(dimension, s)))
        throw ConfigError("p violates s_p * p < 1: need p < (n + 1)/(n + s)");
    if (max_iterations < 1) throw ConfigError("max_iterations must be positive");
}

namespace {

double sup_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
}

double l1_norm(std::span<const double> u, const Grid& grid) {
    double acc = 0.0;
    for (double x : u) acc += std::fabs(x);
    return acc * grid.cell_measure;
}

Solution finish(ScalarField u, const EnergyBreakdown& e, int iters, double gnorm, const Grid& grid,
                double p, bool precision_limited = false, std::vector<double> trace = {}) {
    Solution sol;
    sol.energy_trace = std::move(trace);
    sol.precision_limited = precision_limited;
    sol.energy = e;
    sol.iterations = iters;
    sol.grad_norm = gnorm;
    sol.seminorm = e.seminorm;
    sol.seminorm_pow = std::pow(e.seminorm, p - 1.0);
    sol.l1 = l1_norm(u, grid);
    sol.u = std::move(u);
    return sol;
}

// Projected gradient: components pushing a clamped entry further below zero are dropped.
double projected_sup(std::span<const double> u, std::span<const double> g, bool project) {
    double m = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (project && u[i] <= 0.0 && g[i] > 0.0) continue;
        m = std::max(m, std::fabs(g[i]));
    }
    return m;
}

// dir = -H^{-1} g with the tie-floored Hessian. A diagonal shift is added if
// the factorisation loses definiteness to rounding.
void newton_direction(const KernelSet& kernel, std::span<const double> u, std::span<const double> g,
                      double p, double floor, std::vector<double>& hess, std::span<double> dir) {
    const auto n = static_cast<Eigen::Index>(u.size());
    kernels::omp::hessian(kernel, u, p, floor, hess);
    Eigen::Map<const Eigen::MatrixXd> H(hess.data(), n, n);
    Eigen::Map<const Eigen::VectorXd> grad(g.data(), n);
    Eigen::Map<Eigen::VectorXd> out(dir.data(), n);
    double shift = 0.0;
    const double scale = H.diagonal().cwiseAbs().maxCoeff();
    for (int attempt = 0; attempt < 20; ++attempt) {
        Eigen::LLT<Eigen::MatrixXd> llt(H + shift * Eigen::MatrixXd::Identity(n, n));
        if (llt.info() == Eigen::Success) {
            out = -llt.solve(grad);
            if (out.allFinite()) return;
        }
        shift = shift == 0.0 ? 1e-14 * scale : 10.0 * shift;
    }
    out = -grad;
}

// Minimiser of the p = 2 energy on the same weights: (L_w + diag t) u = f m.
// Its entries are untied except where symmetry forces ties, which keeps the
// floored Newton Hessian from freezing spurious plateaus at the start.
ScalarField quadratic_seed(const Grid& grid, const KernelSet& kernel, const LoadField& f) {
    const auto n = static_cast<Eigen::Index>(grid.size());
    std::vector<double> hess(static_cast<std::size_t>(n * n));
    const ScalarField ones(grid.size(), 1.0);
    // p = 2 makes the floored Hessian independent of u: exactly L_w + diag t.
    kernels::omp::hessian(kernel, ones, 2.0, 1.0, hess);
    Eigen::Map<const Eigen::MatrixXd> A(hess.data(), n, n);
    Eigen::VectorXd b(n);
    for (Eigen::Index i = 0; i < n; ++i) b[i] = f.values[static_cast<std::size_t>(i)] * grid.cell_measure;
    const Eigen::VectorXd x = Eigen::LLT<Eigen::MatrixXd>(A).solve(b);
    return ScalarField(x.data(), x.data() + n);
}

// Chains of values with consecutive gaps <= gap are replaced by their mean.
// Returns whether anything changed.
bool snap_ties(std::span<double> u, std::vector<std::size_t>& order, double gap) {
    const std::size_t n = u.size();
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return u[a] < u[b] || (u[a] == u[b] && a < b);
    });
    bool changed = false;
    std::size_t begin = 0;
    while (begin < n) {
        std::size_t end = begin + 1;
        while (end < n && u[order[end]] - u[order[end - 1]] <= gap) ++end;
        if (end - begin > 1) {
            double mean = 0.0;
            for (std::size_t k = begin; k < end; ++k) mean += u[order[k]];
            mean /= static_cast<double>(end - begin);
            for (std::size_t k = begin; k < end; ++k) {
                changed = changed || u[order[k]] != mean;
                u[order[k]] = mean;
            }
        }
        begin = end;
    }
    return changed;
}

// Size of the gradient change caused by rounding u to working precision:
// 16 eps max|u| times the largest row sum of the Hessian over untied pairs.
// Exactly tied pairs contribute exactly zero and are skipped.
double gradient_noise(const KernelSet& kernel, std::span<const double> u, double p) {
    double worst = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        double row = u[i] != 0.0 ? kernel.tail(i) * std::pow(std::fabs(u[i]), p - 2.0) : 0.0;
        for (std::size_t j = 0; j < u.size(); ++j) {
            const double d = std::fabs(u[i] - u[j]);
            if (j != i && d > 0.0) row += kernel.pair(i, j) * std::pow(d, p - 2.0);
        }
        worst = std::max(worst, (p - 1.0) * row);
    }
    return 16.0 * std::numeric_limits<double>::epsilon() * sup_norm(u) * worst;
}

}  // namespace

double optimal_ray_scale(std::span<const double> v, const LoadField& f, const Grid& grid,
                         const KernelSet& kernel, double p) {
    // F(lambda v) = lambda^p K - lambda L with K = (1/2p)[v]^p, L = int f v.
    const auto e = total_energy(v, f, grid, kernel, p);
    if (!(e.load > 0.0) || !(e.kinetic > 0.0)) return 0.0;
    return std::exp(std::log(e.load / (p * e.kinetic)) / (p - 1.0));
}

double kkt_residual(std::span<const double> u, const LoadField& f, const Grid& grid,
                    const KernelSet& kernel, double p) {
    return sup_norm(gradient(u, f, grid, kernel, p));
}

Solution solve_p(const Grid& grid, const KernelSet& kernel, const LoadField& f, const SolveConfig& cfg,
                 std::optional<std::span<const double>> initial) {
    cfg.validate(grid.dimension);
    f.validate(grid);
    const double p = cfg.p;
    const double expected = kernel_exponent(grid.dimension, cfg.s, p);
    if (std::fabs(kernel.exponent - expected) > 1e-12 * expected)
        throw ConfigError("kernel exponent does not match (n + s) p for this configuration");
    if (kernel.cells != grid.size()) throw ConfigError("kernel was built for another grid");

    const std::size_t n = grid.size();
    double load_scale = 0.0;
    for (double v : f.values) load_scale = std::max(load_scale, std::fabs(v) * grid.cell_measure);
    const double tol = cfg.grad_tol > 0.0 ? cfg.grad_tol : 1e-8 * load_scale;
    const bool project = f.nonnegative;

    ScalarField u(n, 0.0), g(n, 0.0);
    if (load_scale == 0.0) {
        const auto e = energy_and_gradient(u, f, grid, kernel, p, g);
        return finish(std::move(u), e, 0, 0.0, grid, p);
    }

    // Starting ray: the warm start if it carries load, otherwise the p = 2 solution.
    if (initial && initial->size() == n) u.assign(initial->begin(), initial->end());
    if (project)
        for (double& x : u) x = std::max(x, 0.0);
    double lambda = optimal_ray_scale(u, f, grid, kernel, p);
    if (lambda == 0.0) {
        u = quadratic_seed(grid, kernel, f);
        if (project)
            for (double& x : u) x = std::max(x, 0.0);
        lambda = optimal_ray_scale(u, f, grid, kernel, p);
    }
    for (double& x : u) x *= lambda;

    auto e = energy_and_gradient(u, f, grid, kernel, p, g);
    std::vector<double> trace{e.total};
    double gnorm = projected_sup(u, g, project);
    double last_decrease = std::numeric_limits<double>::infinity();
    double step = gnorm > 0.0 ? sup_norm(u) / gnorm : 1.0;
    if (!(step > 0.0) || !std::isfinite(step)) step = 1.0;

    const bool newton = cfg.method == SolverMethod::Newton;
    ScalarField trial(n), gtrial(n), dir(n), snapped(n), gsnapped(n);
    std::vector<std::size_t> order(n);
    std::vector<double> hess(newton ? n * n : 0);
    EnergyBreakdown et;
    constexpr double armijo = 1e-4;
    constexpr double eps = std::numeric_limits<double>::epsilon();

    // Backtracking from alpha along dir; leaves the accepted point in trial/gtrial/et.
    // Along a pair direction the energy behaves like |d|^p with p < 2, where
    // Newton overshoots the tie d = 0 instead of landing on it, so every trial
    // is also evaluated with near-ties merged and the lower energy wins.
    auto line_search = [&](double alpha) -> bool {
        for (int bt = 0; bt < 60; ++bt, alpha *= 0.5) {
            for (std::size_t i = 0; i < n; ++i) {
                double x = u[i] + alpha * dir[i];
                if (project && x < 0.0) x = 0.0;
                trial[i] = x;
            }
            et = energy_and_gradient(trial, f, grid, kernel, p, gtrial);
            snapped.assign(trial.begin(), trial.end());
            if (snap_ties(snapped, order, cfg.tie_floor * sup_norm(snapped))) {
                const auto es = energy_and_gradient(snapped, f, grid, kernel, p, gsnapped);
                if (es.total < et.total) {
                    et = es;
                    trial.swap(snapped);
                    gtrial.swap(gsnapped);
                }
            }
            double slope = 0.0;
            for (std::size_t i = 0; i < n; ++i) slope += g[i] * (trial[i] - u[i]);
            // Within a few ulps of F the Armijo test is noise: a non-increasing
            // step must then also shrink the gradient.
            const double resolution = 64.0 * eps * std::fabs(e.total);
            if (std::fabs(et.total - e.total) <= resolution && std::fabs(slope) <= resolution) {
                if (et.total <= e.total && projected_sup(trial, gtrial, project) < gnorm) return true;
            } else if (et.total <= e.total + armijo * slope) {
                return true;
            }
        }
        return false;
    };

    for (int it = 0; it < cfg.max_iterations; ++it) {
        if (last_decrease <= cfg.energy_tol) {
            if (gnorm <= tol) return finish(std::move(u), e, it, gnorm, grid, p, false, trace);
            if (gnorm <= gradient_noise(kernel, u, p))
                return finish(std::move(u), e, it, gnorm, grid, p, true, trace);
        }

        bool accepted = false;
        if (newton) {
            newton_direction(kernel, u, g, p, cfg.tie_floor * sup_norm(u), hess, dir);
            accepted = line_search(1.0);
        }
        if (!accepted) {
            for (std::size_t i = 0; i < n; ++i) dir[i] = -g[i];
            accepted = line_search(newton || cfg.step_init == StepInit::BarzilaiBorwein ? step : 1.0);
        }
        if (!accepted) {
            // No representable point along either direction lowers F or the gradient.
            if (gnorm <= tol) return finish(std::move(u), e, it, gnorm, grid, p, false, trace);
            return finish(std::move(u), e, it, gnorm, grid, p, true, trace);
        }

        double ss = 0.0, sy = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double ds = trial[i] - u[i];
            const double dy = gtrial[i] - g[i];
            ss += ds * ds;
            sy += ds * dy;
        }
        if (sy > 0.0 && ss > 0.0) step = ss / sy;
        last_decrease = (e.total - et.total) / std::max(std::fabs(et.total), std::numeric_limits<double>::min());
        if (!std::isfinite(et.total))
            throw SolveError("energy became non-finite", finish(std::move(u), e, it, gnorm, grid, p, false, trace));
        u.swap(trial);
        g.swap(gtrial);
        e = et;
        trace.push_back(e.total);
        gnorm = projected_sup(u, g, project);
    }
    if (gnorm <= tol) return finish(std::move(u), e, cfg.max_iterations, gnorm, grid, p, false, trace);
    throw SolveError("solver did not converge within max_iterations",
                     finish(std::move(u), e, cfg.max_iterations, gnorm, grid, p, false, trace));
}

}  // namespace fraclab
