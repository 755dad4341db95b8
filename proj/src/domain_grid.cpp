#include "fraclab/domain_grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fraclab/error.hpp"
#include "fraclab/kernels.hpp"
#include "fraclab/quadrature.hpp"

namespace fraclab {

DomainSpec DomainSpec::interval(double a, double b, double h) {
    DomainSpec d;
    d.dimension = 1;
    d.shape = ShapeKind::Interval;
    d.boxes = {AxisBox{{a, 0.0}, {b, 0.0}}};
    d.h = h;
    return d;
}

DomainSpec DomainSpec::box(std::array<double, 2> lo, std::array<double, 2> hi, double h) {
    DomainSpec d;
    d.dimension = 2;
    d.shape = ShapeKind::Box;
    d.boxes = {AxisBox{lo, hi}};
    d.h = h;
    return d;
}

DomainSpec DomainSpec::ball(int dimension, std::array<double, 2> center, double radius, double h) {
    DomainSpec d;
    d.dimension = dimension;
    d.shape = ShapeKind::Ball;
    d.center = center;
    d.radius = radius;
    d.h = h;
    return d;
}

DomainSpec DomainSpec::box_union(int dimension, std::vector<AxisBox> boxes, double h) {
    DomainSpec d;
    d.dimension = dimension;
    d.shape = ShapeKind::BoxUnion;
    d.boxes = std::move(boxes);
    d.h = h;
    return d;
}

void DomainSpec::validate() const {
    if (dimension != 1 && dimension != 2) throw ConfigError("dimension must be 1 or 2");
    if (!(h > 0.0) || !std::isfinite(h)) throw ConfigError("grid resolution h must be positive");
    if (shape == ShapeKind::Ball) {
        if (!(radius > 0.0) || !std::isfinite(radius)) throw ConfigError("ball radius must be positive");
        return;
    }
    if (boxes.empty()) throw ConfigError("domain needs at least one box");
    if ((shape == ShapeKind::Interval && dimension != 1) || (shape == ShapeKind::Box && dimension != 2))
        throw ConfigError("shape does not match dimension");
    if (shape != ShapeKind::BoxUnion && boxes.size() != 1)
        throw ConfigError("interval and box shapes take exactly one box");
    for (const auto& b : boxes) {
        for (int d = 0; d < dimension; ++d) {
            if (!(b.lo[d] < b.hi[d]) || !std::isfinite(b.lo[d]) || !std::isfinite(b.hi[d]))
                throw ConfigError("box has non-positive extent");
        }
    }
}

long Grid::find(LatticeIndex idx) const {
    for (int d = 0; d < 2; ++d)
        if (idx[d] < lo_[d] || idx[d] > hi_[d]) return -1;
    const long ny = hi_[1] - lo_[1] + 1;
    return lookup_[static_cast<std::size_t>((idx[0] - lo_[0]) * ny + (idx[1] - lo_[1]))];
}

std::array<double, 2> Grid::lattice_center(LatticeIndex idx) const {
    std::array<double, 2> c{};
    for (int d = 0; d < dimension; ++d) c[d] = origin[d] + (idx[d] + 0.5) * h;
    return c;
}

void Grid::index_cells() {
    lo_ = cells.front().index;
    hi_ = cells.front().index;
    for (const auto& c : cells) {
        for (int d = 0; d < 2; ++d) {
            lo_[d] = std::min(lo_[d], c.index[d]);
            hi_[d] = std::max(hi_[d], c.index[d]);
        }
    }
    const long nx = hi_[0] - lo_[0] + 1;
    const long ny = hi_[1] - lo_[1] + 1;
    lookup_.assign(static_cast<std::size_t>(nx * ny), -1);
    for (std::size_t k = 0; k < cells.size(); ++k) {
        const auto& idx = cells[k].index;
        lookup_[static_cast<std::size_t>((idx[0] - lo_[0]) * ny + (idx[1] - lo_[1]))] =
            static_cast<long>(k);
    }
}

Grid build_grid(const DomainSpec& spec) {
    spec.validate();
    const int n = spec.dimension;
    const double h = spec.h;

    std::array<double, 2> lo{}, hi{};
    if (spec.shape == ShapeKind::Ball) {
        for (int d = 0; d < n; ++d) {
            lo[d] = spec.center[d] - spec.radius;
            hi[d] = spec.center[d] + spec.radius;
        }
    } else {
        lo = spec.boxes.front().lo;
        hi = spec.boxes.front().hi;
        for (const auto& b : spec.boxes) {
            for (int d = 0; d < n; ++d) {
                lo[d] = std::min(lo[d], b.lo[d]);
                hi[d] = std::max(hi[d], b.hi[d]);
            }
        }
    }

    std::array<int, 2> counts{1, 1};
    for (int d = 0; d < n; ++d)
        counts[d] = std::max(1, static_cast<int>(std::ceil((hi[d] - lo[d]) / h - 1e-9)));

    Grid g;
    g.dimension = n;
    g.h = h;
    g.origin = lo;
    if (n == 1) g.origin[1] = 0.0;

    auto inside = [&](const std::array<double, 2>& c) {
        if (spec.shape == ShapeKind::Ball) {
            double r2 = 0.0;
            for (int d = 0; d < n; ++d) r2 += (c[d] - spec.center[d]) * (c[d] - spec.center[d]);
            return r2 < spec.radius * spec.radius;
        }
        for (const auto& b : spec.boxes) {
            bool in = true;
            for (int d = 0; d < n; ++d) in = in && c[d] > b.lo[d] && c[d] < b.hi[d];
            if (in) return true;
        }
        return false;
    };

    for (int ix = 0; ix < counts[0]; ++ix) {
        for (int iy = 0; iy < counts[1]; ++iy) {
            Cell cell;
            cell.index = {ix, iy};
            cell.center = g.lattice_center(cell.index);
            if (inside(cell.center)) g.cells.push_back(cell);
        }
    }
    if (g.cells.empty()) throw ConfigError("degenerate domain");

    g.index_cells();
    g.cell_measure = std::pow(h, n);
    g.total_measure = static_cast<double>(g.cells.size()) * g.cell_measure;

    // The farthest points of two cells are opposite corners.
    double diam2 = 0.0;
    for (std::size_t i = 0; i < g.cells.size(); ++i) {
        for (std::size_t j = i; j < g.cells.size(); ++j) {
            double d2 = 0.0;
            for (int d = 0; d < n; ++d) {
                const double e = std::fabs(g.cells[i].center[d] - g.cells[j].center[d]) + h;
                d2 += e * e;
            }
            diam2 = std::max(diam2, d2);
        }
    }
    g.diameter = std::sqrt(diam2);

    const auto lo_idx = g.lattice_lo();
    const auto hi_idx = g.lattice_hi();
    for (int d = 0; d < n; ++d)
        g.centroid[d] = g.origin[d] + 0.5 * (lo_idx[d] + hi_idx[d] + 1) * h;
    double far = 0.0;
    for (const auto& c : g.cells) {
        double r2 = 0.0;
        for (int d = 0; d < n; ++d) r2 += (c.center[d] - g.centroid[d]) * (c.center[d] - g.centroid[d]);
        far = std::max(far, std::sqrt(r2));
    }
    g.outer_radius = far + 2.0 * g.diameter;
    return g;
}

double kernel_exponent(int n, double s, double p) { return (n + s) * p; }

double fractional_order(int n, double s, double p) { return n + s - n / p; }

double p_upper_bound(int n, double s) { return (n + 1.0) / (n + s); }

void validate_exponent(int n, double exponent) {
    if (!(exponent > n) || !(exponent < n + 1)) throw ConfigError("kernel exponent out of admissible range");
}

namespace {

double sphere_area(int n) { return n == 1 ? 2.0 : 2.0 * std::numbers::pi; }

// Integral of |x - y|^(-alpha) over two separated boxes of side `size` with lower corners a, b.
double separated_pair(int n, double alpha, std::array<double, 2> a, std::array<double, 2> b,
                      double size) {
    double gap = 0.0;
    for (int d = 0; d < n; ++d) gap = std::max(gap, std::fabs(a[d] - b[d]) - size);
    if (gap < 2.0 * size) {
        const double half = 0.5 * size;
        double acc = 0.0;
        const int cy = n == 2 ? 2 : 1;
        for (int ax = 0; ax < 2; ++ax)
            for (int ay = 0; ay < cy; ++ay)
                for (int bx = 0; bx < 2; ++bx)
                    for (int by = 0; by < cy; ++by)
                        acc += separated_pair(n, alpha, {a[0] + ax * half, a[1] + ay * half},
                                              {b[0] + bx * half, b[1] + by * half}, half);
        return acc;
    }
    const auto rule = quad::gauss_legendre_unit(8);
    const std::size_t q = rule.nodes.size();
    double acc = 0.0;
    if (n == 1) {
        for (std::size_t i = 0; i < q; ++i)
            for (std::size_t j = 0; j < q; ++j) {
                const double dx = (a[0] + rule.nodes[i] * size) - (b[0] + rule.nodes[j] * size);
                acc += rule.weights[i] * rule.weights[j] * std::pow(std::fabs(dx), -alpha);
            }
        return acc * size * size;
    }
    for (std::size_t i0 = 0; i0 < q; ++i0)
        for (std::size_t i1 = 0; i1 < q; ++i1)
            for (std::size_t j0 = 0; j0 < q; ++j0)
                for (std::size_t j1 = 0; j1 < q; ++j1) {
                    const double dx = (a[0] + rule.nodes[i0] * size) - (b[0] + rule.nodes[j0] * size);
                    const double dy = (a[1] + rule.nodes[i1] * size) - (b[1] + rule.nodes[j1] * size);
                    const double w = rule.weights[i0] * rule.weights[i1] * rule.weights[j0] * rule.weights[j1];
                    acc += w * std::pow(dx * dx + dy * dy, -0.5 * alpha);
                }
    const double m = size * size;
    return acc * m * m;
}

int chebyshev_norm(LatticeIndex k) { return std::max(std::abs(k[0]), std::abs(k[1])); }

int touching_kind(LatticeIndex k) { return (k[0] != 0 && k[1] != 0) ? 1 : 0; }

}  // namespace

double ball_tail(int n, double sigma, double radius) {
    return sphere_area(n) / (sigma * std::pow(radius, sigma));
}

double cube_tail(int n, double sigma, double half_width) {
    if (n == 1) return ball_tail(1, sigma, half_width);
    // polar coordinates: the cube boundary sits at radius L / max(|cos|, |sin|)
    const auto r = quad::gauss_kronrod([sigma](double t) { return std::pow(std::cos(t), sigma); }, 0.0,
                                       0.25 * std::numbers::pi);
    return 8.0 * r.value / (sigma * std::pow(half_width, sigma));
}

LatticeWeights::LatticeWeights(int dimension, double exponent, int refine)
    : n_(dimension), alpha_(exponent), refine_(refine) {
    validate_exponent(n_, alpha_);
    if (refine_ < 1) throw ConfigError("refine must be at least 1");

    // Touching references by self-similarity: halving both cells produces
    // touching child pairs, each equal to 2^(alpha - 2n) times a reference,
    // plus separated child pairs that are smooth.
    const int kinds = n_ == 1 ? 1 : 2;
    const double q = std::pow(0.5, 2.0 * n_ - alpha_);
    std::array<std::array<double, 2>, 2> coeff{};
    std::array<double, 2> rhs{};
    const std::array<LatticeIndex, 2> config{LatticeIndex{1, 0}, LatticeIndex{1, 1}};
    const int cy = n_ == 2 ? 2 : 1;
    for (int kind = 0; kind < kinds; ++kind) {
        const LatticeIndex K = config[kind];
        for (int ax = 0; ax < 2; ++ax)
            for (int ay = 0; ay < cy; ++ay)
                for (int bx = 0; bx < 2; ++bx)
                    for (int by = 0; by < cy; ++by) {
                        const LatticeIndex kk{2 * K[0] + bx - ax, n_ == 2 ? 2 * K[1] + by - ay : 0};
                        if (chebyshev_norm(kk) == 1) {
                            coeff[kind][touching_kind(kk)] += q;
                        } else {
                            rhs[kind] += separated_pair(n_, alpha_, {0.5 * ax, 0.5 * ay},
                                                        {K[0] + 0.5 * bx, K[1] + 0.5 * by}, 0.5);
                        }
                    }
    }
    if (kinds == 1) {
        touching_[0] = rhs[0] / (1.0 - coeff[0][0]);
    } else {
        // (I - coeff) T = rhs, 2x2
        const double a00 = 1.0 - coeff[0][0], a01 = -coeff[0][1];
        const double a10 = -coeff[1][0], a11 = 1.0 - coeff[1][1];
        const double det = a00 * a11 - a01 * a10;
        touching_[0] = (rhs[0] * a11 - a01 * rhs[1]) / det;
        touching_[1] = (a00 * rhs[1] - a10 * rhs[0]) / det;
    }
}

double LatticeWeights::unit(LatticeIndex k) const {
    if (n_ == 1) k[1] = 0;
    if (chebyshev_norm(k) == 1) return touching_[touching_kind(k)];
    const double d2 = static_cast<double>(k[0]) * k[0] + static_cast<double>(k[1]) * k[1];
    const double near = near_distance(refine_);
    if (d2 > near * near) return std::pow(d2, -0.5 * alpha_) * (1.0 + alpha_ * (alpha_ + 2.0 - n_) / (12.0 * d2));
    return separated_pair(n_, alpha_, {0.0, 0.0}, {static_cast<double>(k[0]), static_cast<double>(k[1])}, 1.0);
}

namespace {

kernels::OffsetTable offset_table(const LatticeWeights& lw, double h, int ex, int ey) {
    kernels::OffsetTable t;
    t.dimension = lw.dimension();
    t.extent_x = ex;
    t.extent_y = ey;
    t.values.resize(static_cast<std::size_t>(ex + 1) * (ey + 1), 0.0);
    const double scale = std::pow(h, 2.0 * lw.dimension() - lw.exponent());
    for (int dx = 0; dx <= ex; ++dx)
        for (int dy = 0; dy <= ey; ++dy) {
            if (dx == 0 && dy == 0) continue;
            t.values[static_cast<std::size_t>(dx) * (ey + 1) + dy] = scale * lw.unit({dx, dy});
        }
    return t;
}

int exterior_reach(const Grid& grid) {
    return std::max(16, static_cast<int>(std::ceil(grid.outer_radius / grid.h)));
}

}  // namespace

KernelSet pair_weights(const Grid& grid, double exponent, int refine) {
    validate_exponent(grid.dimension, exponent);
    const LatticeWeights lw(grid.dimension, exponent, refine);
    const auto lo = grid.lattice_lo();
    const auto hi = grid.lattice_hi();
    const auto table = offset_table(lw, grid.h, hi[0] - lo[0], hi[1] - lo[1]);

    KernelSet k;
    k.dimension = grid.dimension;
    k.exponent = exponent;
    k.refine = refine;
    k.h = grid.h;
    k.cells = grid.size();
    k.packed_pairs.assign(grid.size() * (grid.size() - 1) / 2, 0.0);
    kernels::omp::assemble_pairs(grid, table, k.packed_pairs);
    return k;
}

std::vector<double> exterior_weights(const Grid& grid, double exponent, int refine) {
    validate_exponent(grid.dimension, exponent);
    const LatticeWeights lw(grid.dimension, exponent, refine);
    const int reach = exterior_reach(grid);
    const auto table = offset_table(lw, grid.h, reach, grid.dimension == 2 ? reach : 0);
    const double sigma = exponent - grid.dimension;
    // Cell average of the exterior integral beyond the reach cube, to second
    // order: F(c) + (h^2 / 24) Laplacian F(c), Laplacian |y|^-a = a (a + 2 - n) |y|^(-a-2).
    const double half_width = (reach + 0.5) * grid.h;
    const double far = grid.cell_measure *
                       (cube_tail(grid.dimension, sigma, half_width) +
                        grid.h * grid.h / 24.0 * exponent * (exponent + 2.0 - grid.dimension) *
                            cube_tail(grid.dimension, sigma + 2.0, half_width));
    std::vector<double> tails(grid.size(), 0.0);
    kernels::omp::assemble_tails(grid, table, reach, far, tails);
    return tails;
}

KernelSet build_kernel(const Grid& grid, double exponent, int refine) {
    KernelSet k = pair_weights(grid, exponent, refine);
    k.tails = exterior_weights(grid, exponent, refine);
    return k;
}

}  // namespace fraclab
