#pragma once

// Per-row bodies shared by the serial and OpenMP kernels.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>

#include "fraclab/domain_grid.hpp"
#include "fraclab/kernels.hpp"

namespace fraclab::kernels::detail {

inline std::size_t row_start(std::size_t i) { return i * (i - 1) / 2; }

inline void pair_row(const Grid& grid, const OffsetTable& table, std::size_t i,
                     std::span<double> packed) {
    const LatticeIndex a = grid.cells[i].index;
    double* row = packed.data() + row_start(i);
    for (std::size_t j = 0; j < i; ++j) {
        const LatticeIndex b = grid.cells[j].index;
        row[j] = table.at(a[0] - b[0], a[1] - b[1]);
    }
}

inline double tail_row(const Grid& grid, const OffsetTable& table, int reach, double far_field,
                       std::size_t i) {
    const LatticeIndex a = grid.cells[i].index;
    const int ry = grid.dimension == 2 ? reach : 0;
    double near = 0.0;
    for (int dx = -reach; dx <= reach; ++dx) {
        for (int dy = -ry; dy <= ry; ++dy) {
            if (dx == 0 && dy == 0) continue;
            if (grid.find({a[0] + dx, a[1] + dy}) >= 0) continue;
            near += table.at(dx, dy);
        }
    }
    return near + far_field;
}

// |d|^p evaluated as |d|^(p-1) * |d| everywhere so that energies agree bit-for-bit
// between the energy-only and energy+gradient passes.
inline double abs_pow(double d, double p) {
    const double a = std::fabs(d);
    return a == 0.0 ? 0.0 : std::pow(a, p - 1.0) * a;
}

inline double power_row(const KernelSet& k, std::span<const double> u, double p, std::size_t i) {
    const double* w = k.packed_pairs.data() + row_start(i);
    const double ui = u[i];
    double acc = 0.0;
    for (std::size_t j = 0; j < i; ++j) acc += w[j] * abs_pow(ui - u[j], p);
    return acc;
}

struct RowGrad {
    double pair = 0.0;  // lower-triangle part of the power sum for this row
    double grad = 0.0;
};

inline RowGrad gradient_row(const KernelSet& k, std::span<const double> u, double p,
                            std::size_t i) {
    const std::size_t n = u.size();
    const double* w = k.packed_pairs.data() + row_start(i);
    const double ui = u[i];
    RowGrad r;
    for (std::size_t j = 0; j < i; ++j) {
        const double d = ui - u[j];
        const double a = std::fabs(d);
        if (a == 0.0) continue;
        const double q = std::pow(a, p - 1.0);
        r.pair += w[j] * (q * a);
        r.grad += w[j] * (d > 0 ? q : -q);
    }
    for (std::size_t j = i + 1; j < n; ++j) {
        const double d = ui - u[j];
        const double a = std::fabs(d);
        if (a == 0.0) continue;
        const double q = std::pow(a, p - 1.0);
        r.grad += k.packed_pairs[row_start(j) + i] * (d > 0 ? q : -q);
    }
    const double a = std::fabs(ui);
    if (a != 0.0) {
        const double q = std::pow(a, p - 1.0);
        r.grad += k.tails[i] * (ui > 0 ? q : -q);
    }
    return r;
}

inline double cut_row(const KernelSet& k, std::span<const char> mask, std::size_t i) {
    if (!mask[i]) return 0.0;
    const std::size_t n = mask.size();
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        if (j == i || mask[j]) continue;
        acc += k.pair(i, j);
    }
    return acc + k.tails[i];
}

}  // namespace fraclab::kernels::detail

namespace fraclab::kernels::detail {

inline void hessian_row(const KernelSet& k, std::span<const double> u, double p, double floor,
                        std::size_t i, std::span<double> hess) {
    const std::size_t n = u.size();
    double* row = hess.data() + i * n;
    double diag = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        const double a = std::max(std::fabs(u[i] - u[j]), floor);
        const double c = (p - 1.0) * k.pair(i, j) * std::pow(a, p - 2.0);
        row[j] = -c;
        diag += c;
    }
    const double a = std::max(std::fabs(u[i]), floor);
    row[i] = diag + (p - 1.0) * k.tails[i] * std::pow(a, p - 2.0);
}

}  // namespace fraclab::kernels::detail
