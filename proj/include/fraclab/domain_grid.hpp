#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace fraclab {

enum class ShapeKind { Interval, Box, Ball, BoxUnion };

struct AxisBox {
    std::array<double, 2> lo{};
    std::array<double, 2> hi{};
};

/// Bounded domain description. Shapes are snapped to a uniform lattice of
/// side `h` anchored at the lower corner of their bounding box; a cell
/// belongs to the domain when its center lies inside the shape.
struct DomainSpec {
    int dimension = 1;
    ShapeKind shape = ShapeKind::Interval;
    std::vector<AxisBox> boxes;  // Interval, Box: one entry. BoxUnion: one or more.
    std::array<double, 2> center{};  // Ball
    double radius = 0.0;             // Ball
    double h = 0.0;

    static DomainSpec interval(double a, double b, double h);
    static DomainSpec box(std::array<double, 2> lo, std::array<double, 2> hi, double h);
    static DomainSpec ball(int dimension, std::array<double, 2> center, double radius, double h);
    static DomainSpec box_union(int dimension, std::vector<AxisBox> boxes, double h);

    /// Throws ConfigError when the description is malformed.
    void validate() const;
};

using LatticeIndex = std::array<int, 2>;

struct Cell {
    std::array<double, 2> center{};
    LatticeIndex index{};
};

/// Uniform cell decomposition of a snapped domain. Cells are ordered
/// lexicographically by lattice index (x first, then y).
class Grid {
public:
    int dimension = 1;
    double h = 0.0;
    std::array<double, 2> origin{};  // lower corner of lattice cell (0, 0)
    std::vector<Cell> cells;
    double cell_measure = 0.0;  // h^n, identical for every cell
    double total_measure = 0.0;
    double diameter = 0.0;      // exact diameter of the union of cells
    std::array<double, 2> centroid{};
    double outer_radius = 0.0;  // exterior split radius R_out

    std::size_t size() const { return cells.size(); }

    /// Cell position for a lattice index, or -1 when that lattice cell is outside the domain.
    long find(LatticeIndex idx) const;

    /// Lattice bounds (inclusive) of the domain's cells.
    LatticeIndex lattice_lo() const { return lo_; }
    LatticeIndex lattice_hi() const { return hi_; }

    /// Cell centre coordinates of an arbitrary lattice index (inside or outside Ω).
    std::array<double, 2> lattice_center(LatticeIndex idx) const;

private:
    friend Grid build_grid(const DomainSpec& spec);
    void index_cells();

    LatticeIndex lo_{};
    LatticeIndex hi_{};
    std::vector<long> lookup_;  // dense over [lo_, hi_]
};

Grid build_grid(const DomainSpec& spec);

/// Quadrature weights of the kernel |x - y|^(-exponent) on a grid.
///
/// Pair weights are stored as the packed strict lower triangle:
/// entry (i, j) with j < i lives at i * (i - 1) / 2 + j.
struct KernelSet {
    int dimension = 1;
    double exponent = 0.0;
    int refine = 4;
    double h = 0.0;
    std::size_t cells = 0;
    std::vector<double> packed_pairs;
    std::vector<double> tails;

    double pair(std::size_t i, std::size_t j) const {
        return i > j ? packed_pairs[i * (i - 1) / 2 + j] : packed_pairs[j * (j - 1) / 2 + i];
    }
    double tail(std::size_t i) const { return tails[i]; }
};

/// Gagliardo kernel exponent (n + s) p. This equals n + s_p p for s_p = n + s - n / p.
double kernel_exponent(int n, double s, double p);

/// s_p = n + s - n / p.
double fractional_order(int n, double s, double p);

/// Admissible p range upper bound (n + 1) / (n + s), from s_p p = (n + s) p - n < 1.
double p_upper_bound(int n, double s);

/// Throws ConfigError("kernel exponent out of admissible range") unless n < exponent < n + 1.
void validate_exponent(int n, double exponent);

/// Integral of |y|^(-n - sigma) over {|y| > R}: omega_n / (sigma R^sigma).
double ball_tail(int n, double sigma, double radius);

/// Integral of |y|^(-n - sigma) over {|y|_inf > L} (complement of a cube of half-width L).
/// Equals ball_tail in one dimension.
double cube_tail(int n, double sigma, double half_width);

/// Weight of two unit lattice cells at integer offset `offset` (not zero) for the
/// given exponent. Touching cells use the exact self-similar reference integral,
/// other pairs within centre distance near_distance(refine) use Gauss-Legendre on
/// recursively split cells, and farther pairs the midpoint rule with its
/// second-order correction |k|^-a (1 + a (a + 2 - n) / (12 |k|^2)).
class LatticeWeights {
public:
    LatticeWeights(int dimension, double exponent, int refine);

    double unit(LatticeIndex offset) const;

    /// Exact integral of the kernel over two touching unit cells:
    /// face neighbours (kind 0) or, in 2-D, corner neighbours (kind 1).
    double touching(int kind) const { return touching_[kind]; }

    int dimension() const { return n_; }
    double exponent() const { return alpha_; }
    int refine() const { return refine_; }

private:
    int n_;
    double alpha_;
    int refine_;
    std::array<double, 2> touching_{};
};

/// Pairs with centre distance above this many cell sides use the corrected midpoint rule.
inline constexpr double near_distance(int refine) { return 2.0 * refine; }

KernelSet pair_weights(const Grid& grid, double exponent, int refine = 4);
std::vector<double> exterior_weights(const Grid& grid, double exponent, int refine = 4);

/// pair_weights and exterior_weights together.
KernelSet build_kernel(const Grid& grid, double exponent, int refine = 4);

}  // namespace fraclab
