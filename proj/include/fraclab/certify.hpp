#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fraclab/domain_grid.hpp"
#include "fraclab/energy.hpp"

namespace fraclab {

/// Discrete sign field of the p = 1 weak formulation. Pair entries are stored
/// once, for j < i, so z_ji = -z_ij holds by construction. The per-cell balance is
///   sum_{j != i} w_ij z_ij + t_i zbar_i = f_i m_i.
struct SignField {
    std::size_t cells = 0;
    std::vector<double> packed;  // z_ij for j < i at i * (i - 1) / 2 + j
    std::vector<double> exterior;  // zbar_i
    std::vector<double> residual;  // balance residual per cell

    explicit SignField(std::size_t n = 0)
        : cells(n), packed(n * (n > 0 ? n - 1 : 0) / 2, 0.0), exterior(n, 0.0), residual(n, 0.0) {}

    double z(std::size_t i, std::size_t j) const {
        if (i == j) return 0.0;
        return i > j ? packed[i * (i - 1) / 2 + j] : -packed[j * (j - 1) / 2 + i];
    }
    void set(std::size_t i, std::size_t j, double v) {
        if (i > j) packed[i * (i - 1) / 2 + j] = v;
        else packed[j * (j - 1) / 2 + i] = -v;
    }
};

struct CertifyOptions {
    double eps_feas = 1e-8;
    /// Pairs with |u_i - u_j| <= tie_tol and cells with |u_i| <= tie_tol are free.
    /// Zero keeps the exact definition; computed fields near p = 1 need a rounding-level value.
    double tie_tol = 0.0;
    int max_iterations = 20000;
};

struct Certificate {
    SignField z;
    bool feasible = false;
    double max_residual = 0.0;  // max_i |r_i|
    double scale = 0.0;         // max_i max(|f_i m_i|, t_i)
    int iterations = 0;
    std::size_t free_pairs = 0;
    std::size_t free_cells = 0;
    std::vector<double> residual_history;  // ||r||_2 at the start and after each step
};

/// Fixes the entries determined by the signs of u, then minimises the squared
/// balance residual over the free entries in [-1, 1] by projected gradient.
/// Feasible iff max_i |r_i| <= eps_feas * scale. Never throws on infeasibility.
Certificate build_certificate(std::span<const double> u, const LoadField& f, const Grid& grid,
                              const KernelSet& kernel, const CertifyOptions& opts = {});

struct Violation {
    std::string kind;  // "box", "sign", "exterior-sign", "balance"
    std::size_t i = 0;
    std::size_t j = 0;  // pair partner; equals i for cell-level checks
    double amount = 0.0;
};

struct VerifyReport {
    bool pass = false;
    double max_residual = 0.0;
    std::vector<Violation> violations;  // worst first
};

/// Checks |z| <= 1, sign consistency with u (up to tie_tol) and the per-cell balance.
VerifyReport verify_certificate(std::span<const double> u, const SignField& z, const LoadField& f,
                                const Grid& grid, const KernelSet& kernel, double eps_feas = 1e-8,
                                double tie_tol = 0.0);

struct PlateauReport {
    double measure = 0.0;   // |{|u| >= (1 - tau) ||u||_inf}|
    double fraction = 0.0;  // measure / |Omega|
    bool degenerate = false;  // u identically zero: the whole domain is reported
};

PlateauReport plateau_measure(std::span<const double> u, const Grid& grid, double tau_rel);

struct PairMass {
    double interior = 0.0;  // sum m_i m_j over pairs i < j with |u_i - u_j| <= tol, over sum m_i m_j
    double exterior = 0.0;  // measure of cells with |u_i| <= tol, over |Omega|
    double total = 0.0;     // both, each exterior cell counted as a slab of measure |Omega|
    double tol = 0.0;
};

/// Negative tol_abs selects 1e-9 * ||u||_inf.
PairMass equal_pair_mass(std::span<const double> u, const Grid& grid, double tol_abs = -1.0);

}  // namespace fraclab
