#pragma once

#include <span>
#include <vector>

#include "fraclab/domain_grid.hpp"

namespace fraclab {

/// One value per cell; the field vanishes outside the domain.
using ScalarField = std::vector<double>;

/// Cell averages of the load f.
struct LoadField {
    std::vector<double> values;
    bool nonnegative = false;

    /// Checks size and, when flagged nonnegative, f >= 0 with some f_i > 0.
    void validate(const Grid& grid) const;

    static LoadField constant(const Grid& grid, double c);
};

/// Energy components of F(u) = (1/2p) [u]^p - int f u.
///
/// Factor convention, shared by every module: the seminorm integrates over
/// ordered pairs of R^n x R^n, so
///   [u]^p = 2 sum_{i<j} w_ij |u_i - u_j|^p + 2 sum_i t_i |u_i|^p.
struct EnergyBreakdown {
    double pair_sum = 0.0;  // sum_{i<j} w_ij |u_i - u_j|^p
    double tail_sum = 0.0;  // sum_i t_i |u_i|^p
    double seminorm = 0.0;  // (2 pair_sum + 2 tail_sum)^(1/p)
    double kinetic = 0.0;   // (pair_sum + tail_sum) / p
    double load = 0.0;      // sum_i f_i u_i m_i
    double total = 0.0;     // kinetic - load
};

/// [u] in W^{s,p}(R^n) for the kernel exponent (n + s) p.
double seminorm(std::span<const double> u, const KernelSet& kernel, double p);

/// The p-th power of the seminorm (avoids the 1/p root).
double seminorm_pow(std::span<const double> u, const KernelSet& kernel, double p);

EnergyBreakdown total_energy(std::span<const double> u, const LoadField& f, const Grid& grid,
                             const KernelSet& kernel, double p);

/// Kinetic energy (1/2p)[u]^p alone.
double kinetic_energy(std::span<const double> u, const KernelSet& kernel, double p);

/// Exact gradient of total_energy for p > 1:
/// g_i = sum_j w_ij |u_i - u_j|^(p-2)(u_i - u_j) + t_i |u_i|^(p-2) u_i - f_i m_i.
/// Throws DomainError("nonsmooth regime: use certify module") when p <= 1.
ScalarField gradient(std::span<const double> u, const LoadField& f, const Grid& grid,
                     const KernelSet& kernel, double p);

/// total_energy and gradient in one pass over the kernel.
EnergyBreakdown energy_and_gradient(std::span<const double> u, const LoadField& f, const Grid& grid,
                                    const KernelSet& kernel, double p, std::span<double> grad);

/// Weighted volume |E|_f = sum_{i in E} f_i m_i.
double weighted_volume(std::span<const char> mask, const LoadField& f, const Grid& grid);

struct CoareaLevel {
    double level = 0.0;      // t
    double perimeter = 0.0;  // Per_s({u >= t})
    double volume = 0.0;     // |{u >= t}|_f
};

/// Superlevel decomposition of a nonnegative field over its distinct positive
/// values t_1 < ... < t_k. With t_0 = 0,
///   sum (t_k - t_{k-1}) Per_s({u >= t_k}) = (1/2) [u]_{W^{s,1}},
///   sum (t_k - t_{k-1}) |{u >= t_k}|_f   = int f u.
/// Throws DomainError on negative entries.
std::vector<CoareaLevel> coarea_decompose(std::span<const double> u, const LoadField& f,
                                          const Grid& grid, const KernelSet& kernel);

/// Left-hand sides of the co-area identities from a decomposition.
struct CoareaSums {
    double perimeter = 0.0;
    double volume = 0.0;
};
CoareaSums coarea_sums(const std::vector<CoareaLevel>& levels);

/// Measure weights mu = (w_1^p / w_p)^(1/(p-1)) summed over pairs and tails
/// with the seminorm's factor 2, for kernels of exponent n + s and (n + s) p.
/// Each weight factors as w_1 = w_p^(1/p) mu^((p-1)/p), so Hoelder gives
///   [u]_{W^{s,1}} <= [u]_{W^{s_p,p}} M^((p-1)/p)
/// for every field.
double holder_measure(const KernelSet& kernel_1, const KernelSet& kernel_p, double p);

}  // namespace fraclab
