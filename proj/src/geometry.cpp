#include "fraclab/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "fraclab/error.hpp"
#include "fraclab/kernels.hpp"
#include "fraclab/quadrature.hpp"

namespace fraclab {

std::string to_string(CheegerMethod m) { return m == CheegerMethod::BruteForce ? "brute-force" : "threshold"; }

double perimeter(std::span<const char> mask, const KernelSet& kernel) {
    return kernels::omp::cut_weight(kernel, mask);
}

double set_functional(std::span<const char> mask, const LoadField& f, const Grid& grid, const KernelSet& kernel) {
    return perimeter(mask, kernel) - weighted_volume(mask, f, grid);
}

bool cheeger_less(double ha, std::span<const char> a, double hb, std::span<const char> b) {
    if (ha != hb) return ha < hb;
    // Sorted index lists compared lexicographically: at the first cell where the
    // masks differ, the set holding it is smaller unless the other set ends there.
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (bool(a[i]) == bool(b[i])) continue;
        const auto& other = a[i] ? b : a;
        const bool other_continues =
            std::any_of(other.begin() + static_cast<long>(i) + 1, other.end(), [](char c) { return c != 0; });
        const bool a_smaller = other_continues ? bool(a[i]) : !a[i];
        return a_smaller;
    }
    return false;
}

CheegerResult brute_force_cheeger(const Grid& grid, const LoadField& f, const KernelSet& kernel,
                                  std::size_t max_cells) {
    const std::size_t n = grid.size();
    if (n > max_cells || n >= 63)
        throw ConfigError("brute-force Cheeger limited to " + std::to_string(max_cells) +
                          " cells; use threshold_cheeger");
    if (f.values.size() != n) throw ConfigError("load field size does not match grid");
    double mass = 0.0;
    for (double v : f.values) {
        if (v < 0.0) throw ConfigError("Cheeger constant needs a nonnegative load");
        mass += v;
    }
    if (!(mass > 0.0)) throw ConfigError("weighted volume degenerate");

    const unsigned long long total = 1ULL << n;
    constexpr unsigned long long block = 1ULL << 12;
    const long blocks = static_cast<long>((total + block - 1) / block);
    std::vector<double> best_h(static_cast<std::size_t>(blocks), std::numeric_limits<double>::infinity());
    std::vector<SetMask> best_mask(static_cast<std::size_t>(blocks), SetMask(n, 0));

#pragma omp parallel for schedule(dynamic, 1)
    for (long b = 0; b < blocks; ++b) {
        SetMask mask(n, 0);
        double& bh = best_h[static_cast<std::size_t>(b)];
        SetMask& bm = best_mask[static_cast<std::size_t>(b)];
        const unsigned long long lo = static_cast<unsigned long long>(b) * block;
        const unsigned long long hi = std::min(total, lo + block);
        for (unsigned long long code = std::max(lo, 1ULL); code < hi; ++code) {
            for (std::size_t i = 0; i < n; ++i) mask[i] = static_cast<char>((code >> i) & 1ULL);
            const double vol = weighted_volume(mask, f, grid);
            if (!(vol > 0.0)) continue;
            const double h = kernels::serial::cut_weight(kernel, mask) / vol;
            if (cheeger_less(h, mask, bh, bm)) {
                bh = h;
                bm = mask;
            }
        }
    }

    CheegerResult out;
    out.method = CheegerMethod::BruteForce;
    out.h = std::numeric_limits<double>::infinity();
    out.witness.assign(n, 0);
    for (long b = 0; b < blocks; ++b) {
        const auto k = static_cast<std::size_t>(b);
        if (cheeger_less(best_h[k], best_mask[k], out.h, out.witness)) {
            out.h = best_h[k];
            out.witness = best_mask[k];
        }
    }
    return out;
}

CheegerResult threshold_cheeger(std::span<const double> u, const LoadField& f, const Grid& grid,
                                const KernelSet& kernel) {
    std::vector<double> levels;
    for (double v : u) {
        if (v < 0.0) throw DomainError("threshold Cheeger needs a nonnegative field");
        if (v > 0.0) levels.push_back(v);
    }
    if (levels.empty()) throw DomainError("threshold Cheeger needs a field that is not identically zero");
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

    CheegerResult out;
    out.method = CheegerMethod::Threshold;
    out.h = std::numeric_limits<double>::infinity();
    out.witness.assign(u.size(), 0);
    SetMask mask(u.size(), 0);
    for (double t : levels) {
        for (std::size_t i = 0; i < u.size(); ++i) mask[i] = u[i] >= t;
        const double vol = weighted_volume(mask, f, grid);
        if (!(vol > 0.0)) continue;
        const double per = perimeter(mask, kernel);
        const double ratio = per / vol;
        out.candidates.push_back({t, per, vol, ratio});
        if (cheeger_less(ratio, mask, out.h, out.witness)) {
            out.h = ratio;
            out.witness = mask;
        }
    }
    if (out.candidates.empty()) throw DomainError("no superlevel set carries positive weighted volume");
    return out;
}

namespace {

// Principal value by subtracting the tangent half-plane Pi at x, whose own
// principal value vanishes by symmetry:
//   H(x) = 2 ( int_{Pi \ E} K - int_{E \ Pi} K ).
// Neither set comes near x, so along each ray from x only the segments
// with rho bounded below contribute, each in closed form
// int_a^b rho^(-1-s) d rho = (a^-s - b^-s)/s. Work is in lattice units.
struct RayCaster {
    const Grid& grid;
    std::span<const char> mask;
    double s;
    std::array<double, 2> start{};  // lattice coordinates of x
    std::array<double, 2> normal{};
    std::array<int, 2> lo{}, hi{};  // inclusive lattice bounds of Omega

    bool in_set(LatticeIndex idx) const {
        const long k = grid.find(idx);
        return k >= 0 && mask[static_cast<std::size_t>(k)];
    }

    static double segment(double a, double b, double s) {
        const double tail = std::isinf(b) ? 0.0 : std::pow(b, -s);
        return (std::pow(a, -s) - tail) / s;
    }

    // Signed contribution of one direction: rays into Pi count the part outside E,
    // rays away from Pi subtract the part inside E.
    double ray(std::array<double, 2> dir) const {
        const int n = grid.dimension;
        const double into = dir[0] * normal[0] + dir[1] * normal[1];
        if (into == 0.0) return 0.0;
        const bool inward = into < 0.0;

        // Exit distance from the lattice box [lo, hi + 1]; beyond it nothing is in E.
        double exit = std::numeric_limits<double>::infinity();
        for (int a = 0; a < n; ++a) {
            if (dir[a] > 0.0) exit = std::min(exit, (hi[a] + 1 - start[a]) / dir[a]);
            if (dir[a] < 0.0) exit = std::min(exit, (lo[a] - start[a]) / dir[a]);
        }

        std::array<int, 2> cell{0, 0}, step{0, 0};
        std::array<double, 2> t_max{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
        std::array<double, 2> t_delta = t_max;
        for (int a = 0; a < n; ++a) {
            // Start cell: the one entered from x. On the face axis x is an integer.
            const double base = std::floor(start[a]);
            cell[a] = static_cast<int>(base);
            if (base == start[a] && dir[a] < 0.0) cell[a] -= 1;
            if (dir[a] > 0.0) {
                step[a] = 1;
                t_max[a] = (cell[a] + 1 - start[a]) / dir[a];
                t_delta[a] = 1.0 / dir[a];
            } else if (dir[a] < 0.0) {
                step[a] = -1;
                t_max[a] = (cell[a] - start[a]) / dir[a];
                t_delta[a] = -1.0 / dir[a];
            }
        }

        double acc = 0.0;
        double rho = 0.0;
        while (rho < exit) {
            const int axis = (n == 2 && t_max[1] < t_max[0]) ? 1 : 0;
            const double next = std::min(t_max[axis], exit);
            const bool member = in_set({cell[0], cell[1]});
            if (next > rho && rho > 0.0 && member != inward) acc += segment(rho, next, s);
            rho = next;
            cell[axis] += step[axis];
            t_max[axis] += t_delta[axis];
        }
        if (inward) acc += segment(std::max(exit, rho), std::numeric_limits<double>::infinity(), s);
        return inward ? acc : -acc;
    }
};

}  // namespace

double mean_curvature(const Grid& grid, std::span<const char> mask, std::size_t cell, Face face, double s) {
    if (!(s > 0.0 && s < 1.0)) throw ConfigError("s must lie in (0, 1)");
    if (cell >= grid.size() || mask.size() != grid.size()) throw DomainError("cell or mask does not match grid");
    if (!mask[cell]) throw DomainError("mean curvature needs a cell of the set");
    const int n = grid.dimension;
    if (n == 1 && (face == Face::PlusY || face == Face::MinusY)) throw DomainError("1-D cells have no y faces");

    const auto idx = grid.cells[cell].index;
    const int axis = (face == Face::PlusX || face == Face::MinusX) ? 0 : 1;
    const int sign = (face == Face::PlusX || face == Face::PlusY) ? 1 : -1;
    LatticeIndex neighbour = idx;
    neighbour[axis] += sign;
    {
        const long k = grid.find(neighbour);
        if (k >= 0 && mask[static_cast<std::size_t>(k)]) throw DomainError("face is not on the boundary of the set");
    }

    RayCaster rc{grid, mask, s};
    rc.lo = grid.lattice_lo();
    rc.hi = grid.lattice_hi();
    for (int a = 0; a < n; ++a) rc.start[a] = idx[a] + 0.5;
    rc.start[axis] = idx[axis] + (sign > 0 ? 1.0 : 0.0);
    rc.normal[axis] = sign;

    double lattice_value = 0.0;
    if (n == 1) {
        lattice_value = rc.ray({1.0, 0.0}) + rc.ray({-1.0, 0.0});
    } else {
        // theta is measured from the outward normal; tau is the normal rotated by +90 degrees.
        const std::array<double, 2> nu = rc.normal;
        const std::array<double, 2> tau{-nu[1], nu[0]};
        auto integrand = [&](double theta) {
            const double c = std::cos(theta), sn = std::sin(theta);
            return rc.ray({c * nu[0] + sn * tau[0], c * nu[1] + sn * tau[1]});
        };
        // The integrand kinks at directions through vertices of the boundary of E and
        // corners of the lattice box; splitting there keeps every piece smooth.
        constexpr double pi = std::numbers::pi;
        std::vector<double> pts{-pi / 2, 0.0, pi / 2, pi, 3 * pi / 2};
        auto add_vertex = [&](double vx, double vy) {
            const double dx = vx - rc.start[0], dy = vy - rc.start[1];
            if (dx == 0.0 && dy == 0.0) return;
            double theta = std::atan2(dx * tau[0] + dy * tau[1], dx * nu[0] + dy * nu[1]);
            if (theta < -pi / 2) theta += 2 * pi;
            pts.push_back(theta);
        };
        for (int vx : {rc.lo[0], rc.hi[0] + 1})
            for (int vy : {rc.lo[1], rc.hi[1] + 1}) add_vertex(vx, vy);
        for (int vx = rc.lo[0]; vx <= rc.hi[0] + 1; ++vx) {
            for (int vy = rc.lo[1]; vy <= rc.hi[1] + 1; ++vy) {
                int inside = 0;
                for (int cx : {vx - 1, vx})
                    for (int cy : {vy - 1, vy}) inside += rc.in_set({cx, cy});
                if (inside > 0 && inside < 4) add_vertex(vx, vy);
            }
        }
        std::sort(pts.begin(), pts.end());
        pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
        lattice_value = quad::gauss_kronrod(integrand, pts, 1e-10, 20).value;
    }
    // The kernel is homogeneous of degree -n - s: lattice units scale by h^-s.
    return 2.0 * std::pow(grid.h, -s) * lattice_value;
}

double mean_curvature(const Grid& grid, std::span<const char> mask, std::size_t cell, double s) {
    if (cell >= grid.size() || mask.size() != grid.size()) throw DomainError("cell or mask does not match grid");
    const auto idx = grid.cells[cell].index;
    const std::array<Face, 4> faces{Face::PlusX, Face::MinusX, Face::PlusY, Face::MinusY};
    const int count = grid.dimension == 1 ? 2 : 4;
    for (int k = 0; k < count; ++k) {
        LatticeIndex nb = idx;
        const int axis = k < 2 ? 0 : 1;
        nb[axis] += (k % 2 == 0) ? 1 : -1;
        const long j = grid.find(nb);
        if (j < 0 || !mask[static_cast<std::size_t>(j)]) return mean_curvature(grid, mask, cell, faces[k], s);
    }
    throw DomainError("cell has no face on the boundary of the set");
}

}  // namespace fraclab
