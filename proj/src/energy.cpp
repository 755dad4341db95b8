#include "fraclab/energy.hpp"

#include <algorithm>
#include <cmath>

#include "fraclab/error.hpp"
#include "fraclab/kernels.hpp"

namespace fraclab {

void LoadField::validate(const Grid& grid) const {
    if (values.size() != grid.size()) throw ConfigError("load field size does not match grid");
    for (double v : values)
        if (!std::isfinite(v)) throw ConfigError("load field has non-finite entries");
    if (nonnegative) {
        bool positive = false;
        for (double v : values) {
            if (v < 0.0) throw ConfigError("load flagged nonnegative has a negative entry");
            positive = positive || v > 0.0;
        }
        if (!positive) throw ConfigError("weighted volume degenerate");
    }
}

LoadField LoadField::constant(const Grid& grid, double c) {
    LoadField f;
    f.values.assign(grid.size(), c);
    f.nonnegative = c >= 0.0;
    return f;
}

namespace {

EnergyBreakdown assemble(const kernels::PowerSums& sums, double load, double p) {
    EnergyBreakdown e;
    e.pair_sum = sums.pair;
    e.tail_sum = sums.tail;
    const double pow_sum = 2.0 * (sums.pair + sums.tail);
    e.seminorm = std::pow(pow_sum, 1.0 / p);
    e.kinetic = (sums.pair + sums.tail) / p;
    e.load = load;
    e.total = e.kinetic - e.load;
    return e;
}

double load_term(std::span<const double> u, const LoadField& f, const Grid& grid) {
    double acc = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) acc += f.values[i] * u[i];
    return acc * grid.cell_measure;
}

}  // namespace

double seminorm_pow(std::span<const double> u, const KernelSet& kernel, double p) {
    const auto s = kernels::omp::power_sums(kernel, u, p);
    return 2.0 * (s.pair + s.tail);
}

double seminorm(std::span<const double> u, const KernelSet& kernel, double p) {
    return std::pow(seminorm_pow(u, kernel, p), 1.0 / p);
}

double kinetic_energy(std::span<const double> u, const KernelSet& kernel, double p) {
    const auto s = kernels::omp::power_sums(kernel, u, p);
    return (s.pair + s.tail) / p;
}

EnergyBreakdown total_energy(std::span<const double> u, const LoadField& f, const Grid& grid,
                             const KernelSet& kernel, double p) {
    return assemble(kernels::omp::power_sums(kernel, u, p), load_term(u, f, grid), p);
}

EnergyBreakdown energy_and_gradient(std::span<const double> u, const LoadField& f, const Grid& grid,
                                    const KernelSet& kernel, double p, std::span<double> grad) {
    if (!(p > 1.0)) throw DomainError("nonsmooth regime: use certify module");
    const auto sums = kernels::omp::power_sums_gradient(kernel, u, p, grad);
    for (std::size_t i = 0; i < u.size(); ++i) grad[i] -= f.values[i] * grid.cell_measure;
    return assemble(sums, load_term(u, f, grid), p);
}

ScalarField gradient(std::span<const double> u, const LoadField& f, const Grid& grid,
                     const KernelSet& kernel, double p) {
    ScalarField g(u.size(), 0.0);
    energy_and_gradient(u, f, grid, kernel, p, g);
    return g;
}

double weighted_volume(std::span<const char> mask, const LoadField& f, const Grid& grid) {
    double acc = 0.0;
    for (std::size_t i = 0; i < mask.size(); ++i)
        if (mask[i]) acc += f.values[i];
    return acc * grid.cell_measure;
}

std::vector<CoareaLevel> coarea_decompose(std::span<const double> u, const LoadField& f,
                                          const Grid& grid, const KernelSet& kernel) {
    std::vector<double> levels;
    for (double v : u) {
        if (v < 0.0) throw DomainError("co-area decomposition needs a nonnegative field");
        if (v > 0.0) levels.push_back(v);
    }
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

    std::vector<CoareaLevel> out;
    out.reserve(levels.size());
    std::vector<char> mask(u.size(), 0);
    for (double t : levels) {
        for (std::size_t i = 0; i < u.size(); ++i) mask[i] = u[i] >= t;
        out.push_back({t, kernels::omp::cut_weight(kernel, mask), weighted_volume(mask, f, grid)});
    }
    return out;
}

CoareaSums coarea_sums(const std::vector<CoareaLevel>& levels) {
    CoareaSums s;
    double prev = 0.0;
    for (const auto& l : levels) {
        s.perimeter += (l.level - prev) * l.perimeter;
        s.volume += (l.level - prev) * l.volume;
        prev = l.level;
    }
    return s;
}

double holder_measure(const KernelSet& kernel_1, const KernelSet& kernel_p, double p) {
    if (!(p > 1.0)) throw DomainError("Hoelder measure needs p > 1");
    if (kernel_1.cells != kernel_p.cells || kernel_1.packed_pairs.size() != kernel_p.packed_pairs.size())
        throw ConfigError("kernels live on different grids");
    const double q = 1.0 / (p - 1.0);
    auto mu = [&](double w1, double wp) { return wp > 0.0 ? std::exp(q * (p * std::log(w1) - std::log(wp))) : 0.0; };
    double pairs = 0.0, tails = 0.0;
    for (std::size_t k = 0; k < kernel_1.packed_pairs.size(); ++k)
        pairs += mu(kernel_1.packed_pairs[k], kernel_p.packed_pairs[k]);
    for (std::size_t i = 0; i < kernel_1.tails.size(); ++i) tails += mu(kernel_1.tails[i], kernel_p.tails[i]);
    return 2.0 * pairs + 2.0 * tails;
}

}  // namespace fraclab
