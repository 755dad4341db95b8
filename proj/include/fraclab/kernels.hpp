#pragma once

// Hot loops of the library. Each kernel has a plain serial reference and an
// OpenMP version. Both walk rows in the same order and reduce per-row
// partials serially, so results are bit-identical for any thread count.

#include <cstddef>
#include <span>
#include <vector>

#include "fraclab/domain_grid.hpp"

namespace fraclab::kernels {

/// Kernel weights of lattice offsets (|dx|, |dy|), already scaled to the grid spacing.
struct OffsetTable {
    int dimension = 1;
    int extent_x = 0;  // valid |dx| in [0, extent_x]
    int extent_y = 0;  // valid |dy| in [0, extent_y] (0 in 1-D)
    std::vector<double> values;

    double at(int dx, int dy) const {
        dx = dx < 0 ? -dx : dx;
        dy = dy < 0 ? -dy : dy;
        return values[static_cast<std::size_t>(dx) * (extent_y + 1) + dy];
    }
};

/// Result of one pass over the kernel graph for a field u and power p.
struct PowerSums {
    double pair = 0.0;  // sum_{i<j} w_ij |u_i - u_j|^p
    double tail = 0.0;  // sum_i t_i |u_i|^p
};

namespace serial {

void assemble_pairs(const Grid& grid, const OffsetTable& table, std::span<double> packed);
void assemble_tails(const Grid& grid, const OffsetTable& table, int reach, double far_field,
                    std::span<double> tails);

PowerSums power_sums(const KernelSet& kernel, std::span<const double> u, double p);

/// Power sums plus the kinetic gradient
/// g_i = sum_j w_ij |u_i - u_j|^(p-2)(u_i - u_j) + t_i |u_i|^(p-2) u_i.
PowerSums power_sums_gradient(const KernelSet& kernel, std::span<const double> u, double p,
                              std::span<double> grad);

/// sum_{i in E, j in Omega \ E} w_ij + sum_{i in E} t_i.
double cut_weight(const KernelSet& kernel, std::span<const char> mask);

/// Dense row-major Hessian of the kinetic energy, (p - 1) times the weighted
/// Laplacian with weights w_ij max(|u_i - u_j|, floor)^(p-2), plus the tail diagonal.
void hessian(const KernelSet& kernel, std::span<const double> u, double p, double floor,
             std::span<double> hess);

}  // namespace serial

namespace omp {

void assemble_pairs(const Grid& grid, const OffsetTable& table, std::span<double> packed);
void assemble_tails(const Grid& grid, const OffsetTable& table, int reach, double far_field,
                    std::span<double> tails);
PowerSums power_sums(const KernelSet& kernel, std::span<const double> u, double p);
PowerSums power_sums_gradient(const KernelSet& kernel, std::span<const double> u, double p,
                              std::span<double> grad);
double cut_weight(const KernelSet& kernel, std::span<const char> mask);
void hessian(const KernelSet& kernel, std::span<const double> u, double p, double floor,
             std::span<double> hess);

}  // namespace omp

/// Sets the OpenMP team size used by the omp kernels (n <= 0 keeps the runtime default).
void set_threads(int n);
int threads();

}  // namespace fraclab::kernels
