#include "fraclab/kernels.hpp"

#include <vector>

#include "kernel_rows.hpp"

namespace fraclab::kernels::serial {

void assemble_pairs(const Grid& grid, const OffsetTable& table, std::span<double> packed) {
    for (std::size_t i = 1; i < grid.size(); ++i) detail::pair_row(grid, table, i, packed);
}

void assemble_tails(const Grid& grid, const OffsetTable& table, int reach, double far_field,
                    std::span<double> tails) {
    for (std::size_t i = 0; i < grid.size(); ++i)
        tails[i] = detail::tail_row(grid, table, reach, far_field, i);
}

PowerSums power_sums(const KernelSet& kernel, std::span<const double> u, double p) {
    PowerSums s;
    for (std::size_t i = 0; i < u.size(); ++i) {
        s.pair += detail::power_row(kernel, u, p, i);
        s.tail += kernel.tails[i] * detail::abs_pow(u[i], p);
    }
    return s;
}

PowerSums power_sums_gradient(const KernelSet& kernel, std::span<const double> u, double p,
                              std::span<double> grad) {
    PowerSums s;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const auto r = detail::gradient_row(kernel, u, p, i);
        grad[i] = r.grad;
        s.pair += r.pair;
        s.tail += kernel.tails[i] * detail::abs_pow(u[i], p);
    }
    return s;
}

double cut_weight(const KernelSet& kernel, std::span<const char> mask) {
    double acc = 0.0;
    for (std::size_t i = 0; i < mask.size(); ++i) acc += detail::cut_row(kernel, mask, i);
    return acc;
}

}  // namespace fraclab::kernels::serial

namespace fraclab::kernels::serial {

void hessian(const KernelSet& kernel, std::span<const double> u, double p, double floor,
             std::span<double> hess) {
    for (std::size_t i = 0; i < u.size(); ++i) detail::hessian_row(kernel, u, p, floor, i, hess);
}

}  // namespace fraclab::kernels::serial
