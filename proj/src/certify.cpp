#include "fraclab/certify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fraclab/error.hpp"

namespace fraclab {

namespace {

double sign_of(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

void check_shapes(std::span<const double> u, const LoadField& f, const Grid& grid, const KernelSet& kernel) {
    if (u.size() != grid.size() || f.values.size() != grid.size() || kernel.cells != grid.size())
        throw ConfigError("field, load and kernel sizes must match the grid");
}

// r_i = sum_j w_ij z_ij + t_i zbar_i - f_i m_i. Each row is summed in index order.
void balance(const SignField& z, const LoadField& f, const Grid& grid, const KernelSet& kernel,
             std::span<double> r) {
    const long n = static_cast<long>(z.cells);
#pragma omp parallel for schedule(static)
    for (long li = 0; li < n; ++li) {
        const auto i = static_cast<std::size_t>(li);
        double acc = 0.0;
        for (std::size_t j = 0; j < z.cells; ++j)
            if (j != i) acc += kernel.pair(i, j) * z.z(i, j);
        r[i] = acc + kernel.tail(i) * z.exterior[i] - f.values[i] * grid.cell_measure;
    }
}

double sup_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double half_square(std::span<const double> v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return 0.5 * acc;
}

double balance_scale(const LoadField& f, const Grid& grid, const KernelSet& kernel) {
    double scale = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
        scale = std::max({scale, std::abs(f.values[i] * grid.cell_measure), kernel.tail(i)});
    return scale;
}

}  // namespace

Certificate build_certificate(std::span<const double> u, const LoadField& f, const Grid& grid,
                              const KernelSet& kernel, const CertifyOptions& opts) {
    check_shapes(u, f, grid, kernel);
    const std::size_t n = grid.size();
    Certificate cert;
    cert.z = SignField(n);
    cert.scale = balance_scale(f, grid, kernel);

    // Free variables: pairs (i, j), j < i, then cells. Fixed entries take the sign.
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    std::vector<std::size_t> cells;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            const double d = u[i] - u[j];
            if (std::abs(d) <= opts.tie_tol) pairs.emplace_back(i, j);
            else cert.z.set(i, j, sign_of(d));
        }
        if (std::abs(u[i]) <= opts.tie_tol) cells.push_back(i);
        else cert.z.exterior[i] = sign_of(u[i]);
    }
    cert.free_pairs = pairs.size();
    cert.free_cells = cells.size();
    const std::size_t m = pairs.size() + cells.size();

    std::vector<double> x(m, 0.0), g(m), trial(m), r(n), r_trial(n);
    auto load = [&](std::span<const double> v) {
        for (std::size_t k = 0; k < pairs.size(); ++k) cert.z.set(pairs[k].first, pairs[k].second, v[k]);
        for (std::size_t k = 0; k < cells.size(); ++k) cert.z.exterior[cells[k]] = v[pairs.size() + k];
    };
    auto grad = [&](std::span<const double> res) {
        for (std::size_t k = 0; k < pairs.size(); ++k) {
            const auto [i, j] = pairs[k];
            g[k] = kernel.pair(i, j) * (res[i] - res[j]);
        }
        for (std::size_t k = 0; k < cells.size(); ++k) g[pairs.size() + k] = kernel.tail(cells[k]) * res[cells[k]];
    };

    load(x);
    balance(cert.z, f, grid, kernel, r);
    double obj = half_square(r);
    cert.residual_history.push_back(std::sqrt(2.0 * obj));
    const double target = opts.eps_feas * cert.scale;

    // Lipschitz bound of the gradient: each variable touches at most two rows.
    double lip = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double row = kernel.tail(i);
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) row += kernel.pair(i, j);
        lip = std::max(lip, row);
    }
    double step = lip > 0.0 ? 1.0 / (2.0 * lip * lip) : 1.0;
    std::vector<double> x_prev, g_prev;

    int it = 0;
    while (m > 0 && sup_abs(r) > target && it < opts.max_iterations) {
        grad(r);
        if (!x_prev.empty()) {
            double sy = 0.0, ss = 0.0;
            for (std::size_t k = 0; k < m; ++k) {
                const double sk = x[k] - x_prev[k], yk = g[k] - g_prev[k];
                sy += sk * yk;
                ss += sk * sk;
            }
            if (sy > 0.0) step = ss / sy;
        }
        bool accepted = false;
        for (int halving = 0; halving < 60 && !accepted; ++halving, step *= 0.5) {
            double decrease = 0.0;
            for (std::size_t k = 0; k < m; ++k) {
                trial[k] = std::clamp(x[k] - step * g[k], -1.0, 1.0);
                decrease += g[k] * (x[k] - trial[k]);
            }
            if (decrease <= 0.0) break;  // projected gradient vanishes: stationary
            load(trial);
            balance(cert.z, f, grid, kernel, r_trial);
            const double obj_trial = half_square(r_trial);
            if (obj_trial <= obj - 1e-4 * decrease) {
                accepted = true;
                x_prev = x;
                g_prev = g;
                x.swap(trial);
                r.swap(r_trial);
                obj = obj_trial;
            }
        }
        if (!accepted) {
            load(x);
            break;
        }
        ++it;
        cert.residual_history.push_back(std::sqrt(2.0 * obj));
    }
    load(x);
    balance(cert.z, f, grid, kernel, cert.z.residual);
    cert.iterations = it;
    cert.max_residual = sup_abs(cert.z.residual);
    cert.feasible = cert.max_residual <= target;
    return cert;
}

VerifyReport verify_certificate(std::span<const double> u, const SignField& z, const LoadField& f,
                                const Grid& grid, const KernelSet& kernel, double eps_feas, double tie_tol) {
    check_shapes(u, f, grid, kernel);
    if (z.cells != grid.size()) throw ConfigError("sign field size does not match the grid");
    const std::size_t n = grid.size();
    VerifyReport rep;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            const double v = z.z(i, j);
            if (std::abs(v) > 1.0) rep.violations.push_back({"box", i, j, std::abs(v) - 1.0});
            const double d = u[i] - u[j];
            if (std::abs(d) > tie_tol && v != sign_of(d))
                rep.violations.push_back({"sign", i, j, std::abs(v - sign_of(d))});
        }
        const double e = z.exterior[i];
        if (std::abs(e) > 1.0) rep.violations.push_back({"box", i, i, std::abs(e) - 1.0});
        if (std::abs(u[i]) > tie_tol && e != sign_of(u[i]))
            rep.violations.push_back({"exterior-sign", i, i, std::abs(e - sign_of(u[i]))});
    }
    std::vector<double> r(n);
    balance(z, f, grid, kernel, r);
    const double target = eps_feas * balance_scale(f, grid, kernel);
    for (std::size_t i = 0; i < n; ++i) {
        rep.max_residual = std::max(rep.max_residual, std::abs(r[i]));
        if (std::abs(r[i]) > target) rep.violations.push_back({"balance", i, i, std::abs(r[i])});
    }
    std::stable_sort(rep.violations.begin(), rep.violations.end(),
                     [](const Violation& a, const Violation& b) { return a.amount > b.amount; });
    rep.pass = rep.violations.empty();
    return rep;
}

PlateauReport plateau_measure(std::span<const double> u, const Grid& grid, double tau_rel) {
    if (!(tau_rel > 0.0 && tau_rel < 1.0)) throw ConfigError("plateau tolerance must lie in (0, 1)");
    if (u.size() != grid.size()) throw ConfigError("field size does not match the grid");
    PlateauReport rep;
    const double top = sup_abs(u);
    if (top == 0.0) {
        rep.degenerate = true;
        rep.measure = grid.total_measure;
        rep.fraction = 1.0;
        return rep;
    }
    const double level = (1.0 - tau_rel) * top;
    std::size_t count = 0;
    for (double v : u)
        if (std::abs(v) >= level) ++count;
    rep.measure = static_cast<double>(count) * grid.cell_measure;
    rep.fraction = rep.measure / grid.total_measure;
    return rep;
}

PairMass equal_pair_mass(std::span<const double> u, const Grid& grid, double tol_abs) {
    if (u.size() != grid.size()) throw ConfigError("field size does not match the grid");
    PairMass out;
    out.tol = tol_abs < 0.0 ? 1e-9 * sup_abs(u) : tol_abs;
    const std::size_t n = u.size();
    const double m = grid.cell_measure;
    // Sorting turns the near-equal pair count into a sliding window.
    std::vector<double> sorted(u.begin(), u.end());
    std::sort(sorted.begin(), sorted.end());
    double near_pairs = 0.0;
    std::size_t lo = 0;
    for (std::size_t k = 0; k < n; ++k) {
        while (sorted[k] - sorted[lo] > out.tol) ++lo;
        near_pairs += static_cast<double>(k - lo);
    }
    const double all_pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
    std::size_t small = 0;
    for (double v : u)
        if (std::abs(v) <= out.tol) ++small;

    const double omega = grid.total_measure;
    const double interior_num = near_pairs * m * m, interior_den = all_pairs * m * m;
    const double exterior_num = static_cast<double>(small) * m * omega, exterior_den = omega * omega;
    out.interior = interior_den > 0.0 ? interior_num / interior_den : 0.0;
    out.exterior = static_cast<double>(small) * m / omega;
    out.total = (interior_num + exterior_num) / (interior_den + exterior_den);
    return out;
}

}  // namespace fraclab
