#include "fraclab/kernels.hpp"

#include <omp.h>

#include <vector>

#include "kernel_rows.hpp"

namespace fraclab::kernels {

void set_threads(int n) {
    if (n > 0) omp_set_num_threads(n);
}

int threads() { return omp_get_max_threads(); }

namespace omp {

namespace {

// Row partials are reduced serially in row order after the parallel loop.
double ordered_sum(const std::vector<double>& parts) {
    double acc = 0.0;
    for (double v : parts) acc += v;
    return acc;
}

}  // namespace

void assemble_pairs(const Grid& grid, const OffsetTable& table, std::span<double> packed) {
    const long n = static_cast<long>(grid.size());
#pragma omp parallel for schedule(dynamic, 16)
    for (long i = 1; i < n; ++i) detail::pair_row(grid, table, static_cast<std::size_t>(i), packed);
}

void assemble_tails(const Grid& grid, const OffsetTable& table, int reach, double far_field,
                    std::span<double> tails) {
    const long n = static_cast<long>(grid.size());
#pragma omp parallel for schedule(dynamic, 4)
    for (long i = 0; i < n; ++i)
        tails[i] = detail::tail_row(grid, table, reach, far_field, static_cast<std::size_t>(i));
}

PowerSums power_sums(const KernelSet& kernel, std::span<const double> u, double p) {
    const long n = static_cast<long>(u.size());
    std::vector<double> pair(n), tail(n);
#pragma omp parallel for schedule(dynamic, 16)
    for (long i = 0; i < n; ++i) {
        pair[i] = detail::power_row(kernel, u, p, static_cast<std::size_t>(i));
        tail[i] = kernel.tails[i] * detail::abs_pow(u[i], p);
    }
    return {ordered_sum(pair), ordered_sum(tail)};
}

PowerSums power_sums_gradient(const KernelSet& kernel, std::span<const double> u, double p,
                              std::span<double> grad) {
    const long n = static_cast<long>(u.size());
    std::vector<double> pair(n), tail(n);
#pragma omp parallel for schedule(dynamic, 16)
    for (long i = 0; i < n; ++i) {
        const auto r = detail::gradient_row(kernel, u, p, static_cast<std::size_t>(i));
        grad[i] = r.grad;
        pair[i] = r.pair;
        tail[i] = kernel.tails[i] * detail::abs_pow(u[i], p);
    }
    return {ordered_sum(pair), ordered_sum(tail)};
}

double cut_weight(const KernelSet& kernel, std::span<const char> mask) {
    const long n = static_cast<long>(mask.size());
    std::vector<double> rows(n);
#pragma omp parallel for schedule(dynamic, 16)
    for (long i = 0; i < n; ++i) rows[i] = detail::cut_row(kernel, mask, static_cast<std::size_t>(i));
    return ordered_sum(rows);
}

}  // namespace omp
}  // namespace fraclab::kernels

namespace fraclab::kernels::omp {

void hessian(const KernelSet& kernel, std::span<const double> u, double p, double floor,
             std::span<double> hess) {
    const long n = static_cast<long>(u.size());
#pragma omp parallel for schedule(dynamic, 16)
    for (long i = 0; i < n; ++i)
        detail::hessian_row(kernel, u, p, floor, static_cast<std::size_t>(i), hess);
}

}  // namespace fraclab::kernels::omp
