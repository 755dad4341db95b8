#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fraclab/domain_grid.hpp"
#include "fraclab/energy.hpp"

namespace fraclab {

/// One flag per cell; E is the union of flagged cells.
using SetMask = std::vector<char>;

enum class CheegerMethod { BruteForce, Threshold };

std::string to_string(CheegerMethod m);

struct CheegerCandidate {
    double level = 0.0;  // threshold level (0 for brute force)
    double perimeter = 0.0;
    double volume = 0.0;
    double ratio = 0.0;
};

struct CheegerResult {
    double h = 0.0;
    SetMask witness;
    CheegerMethod method = CheegerMethod::BruteForce;
    std::vector<CheegerCandidate> candidates;  // threshold only, one per level
};

/// Per_s(E) = sum_{i in E, j in Omega \ E} w_ij + sum_{i in E} t_i for a kernel of exponent n + s.
double perimeter(std::span<const char> mask, const KernelSet& kernel);

/// P(E) = Per_s(E) - |E|_f.
double set_functional(std::span<const char> mask, const LoadField& f, const Grid& grid, const KernelSet& kernel);

/// Total order used to pick Cheeger witnesses: smaller ratio first, then the
/// lexicographically smaller sorted index list.
bool cheeger_less(double ha, std::span<const char> a, double hb, std::span<const char> b);

/// Exact minimum of Per_s(A)/|A|_f over all masks with |A|_f > 0.
/// Throws ConfigError above max_cells cells or when f has no positive mass.
CheegerResult brute_force_cheeger(const Grid& grid, const LoadField& f, const KernelSet& kernel,
                                  std::size_t max_cells = 20);

/// Minimum of the Cheeger ratio over superlevel sets {u >= t} with |{u >= t}|_f > 0.
/// Throws DomainError for negative or identically zero u.
CheegerResult threshold_cheeger(std::span<const double> u, const LoadField& f, const Grid& grid,
                                const KernelSet& kernel);

/// Outward faces of a lattice cell: +x, -x, +y, -y.
enum class Face { PlusX, MinusX, PlusY, MinusY };

/// Fractional mean curvature p.v. int (chi_{E^c} - chi_E)(y) |x - y|^(-n-s) dy at
/// the midpoint of an outward face of `cell`. The first face (in Face order) whose
/// neighbour lies outside E is used. Throws DomainError when the cell is not in E
/// or has no face on the boundary of E.
double mean_curvature(const Grid& grid, std::span<const char> mask, std::size_t cell, double s);
double mean_curvature(const Grid& grid, std::span<const char> mask, std::size_t cell, Face face, double s);

}  // namespace fraclab
