#include "fraclab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fraclab/constants.hpp"
#include "fraclab/error.hpp"
#include "fraclab/geometry.hpp"
#include "fraclab/io.hpp"
#include "fraclab/solver.hpp"

namespace fraclab {

LoadField make_load(const Grid& grid, const LoadSpec& spec) {
    LoadField f;
    f.values.assign(grid.size(), 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto& x = grid.cells[i].center;
        switch (spec.kind) {
            case LoadKind::Constant: f.values[i] = spec.value; break;
            case LoadKind::SubBox: {
                bool inside = true;
                for (int d = 0; d < grid.dimension; ++d)
                    inside = inside && x[d] >= spec.box.lo[d] && x[d] <= spec.box.hi[d];
                f.values[i] = inside ? spec.value : 0.0;
                break;
            }
            case LoadKind::Bump: {
                double r2 = 0.0;
                for (int d = 0; d < grid.dimension; ++d) r2 += (x[d] - spec.center[d]) * (x[d] - spec.center[d]);
                const double q = r2 / (spec.radius * spec.radius);
                f.values[i] = q < 1.0 ? spec.value * std::exp(1.0 - 1.0 / (1.0 - q)) : 0.0;
                break;
            }
        }
    }
    f.nonnegative = spec.value > 0.0;
    return f;
}

SweepTable run_sweep(const RunConfig& cfg) {
    cfg.validate();
    const Grid grid = build_grid(cfg.domain);
    const LoadField f = make_load(grid, cfg.load);
    const int n = grid.dimension;
    const double s = cfg.solver.s;

    SweepTable table;
    table.dimension = n;
    table.s = s;
    const KernelSet k1 = io::cached_kernel(cfg.domain, grid, n + s, cfg.refine, cfg.kernel_cache);
    std::vector<double> warm;
    for (double p : cfg.p_schedule) {
        SolveConfig sc = cfg.solver;
        sc.p = p;
        const KernelSet kp = io::cached_kernel(cfg.domain, grid, kernel_exponent(n, s, p), cfg.refine, cfg.kernel_cache);
        Solution sol;
        try {
            sol = warm.empty() ? solve_p(grid, kp, f, sc) : solve_p(grid, kp, f, sc, std::span<const double>(warm));
        } catch (const SolveError& e) {
            table.partial = true;
            table.failure = "p = " + io::format_double(p) + ": " + e.what();
            break;
        }
        SweepRecord r;
        r.p = p;
        r.s_p = fractional_order(n, s, p);
        r.l1 = sol.l1;
        r.seminorm_p = sol.seminorm;
        r.seminorm_p_pow = sol.seminorm_pow;
        r.seminorm_s1 = seminorm(sol.u, k1, 1.0);
        r.energy = sol.energy.total;
        r.iters = sol.iterations;
        r.precision_limited = sol.precision_limited;
        table.rows.push_back(r);
        warm = sol.u;
    }
    table.last_field = warm;
    return table;
}

std::string sweep_csv(const SweepTable& table) {
    std::ostringstream out;
    out << "p,s_p,l1,seminorm_p,seminorm_p_pow,seminorm_s1,energy,iters\n";
    for (const auto& r : table.rows) {
        for (double v : {r.p, r.s_p, r.l1, r.seminorm_p, r.seminorm_p_pow, r.seminorm_s1, r.energy})
            out << io::format_double(v) << ",";
        out << r.iters << "\n";
    }
    return out.str();
}

std::string gnuplot_script(const std::string& csv_name) {
    std::ostringstream g;
    g << "set datafile separator ','\n"
      << "set key autotitle columnhead\n"
      << "set xlabel 'p'\n"
      << "set logscale y\n"
      << "set multiplot layout 1,2\n"
      << "plot '" << csv_name << "' using 1:3 with linespoints title 'L1 norm', \\\n"
      << "     '" << csv_name << "' using 1:4 with linespoints title 'seminorm'\n"
      << "unset logscale y\n"
      << "plot '" << csv_name << "' using 1:5 with linespoints title '[u]^(p-1)'\n"
      << "unset multiplot\n";
    return g.str();
}

std::string to_string(Regime r) {
    switch (r) {
        case Regime::Vanishing: return "vanishing";
        case Regime::Critical: return "critical";
        case Regime::BlowUp: return "blow-up";
        case Regime::Inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

RegimeVerdict classify(const SweepTable& table, double h_ref, const ClassifyOptions& opts) {
    if (table.rows.size() < 3) throw ConfigError("classification needs at least three records");
    const auto& first = table.rows.front();
    const auto& last = table.rows.back();
    RegimeVerdict v;
    v.h_ref = h_ref;
    // All-zero rows (zero load) count as a full collapse.
    v.l1_ratio = first.l1 > 0.0 ? last.l1 / first.l1 : 0.0;
    v.seminorm_ratio = first.seminorm_p > 0.0 ? last.seminorm_p / first.seminorm_p : 0.0;
    v.last_pow = last.seminorm_p_pow;
    if (v.l1_ratio <= 1.0 / opts.factor && h_ref > 1.0 + opts.margin) {
        v.regime = Regime::Vanishing;
    } else if (v.seminorm_ratio >= opts.factor && h_ref < 1.0 - opts.margin) {
        v.regime = Regime::BlowUp;
    } else if (std::abs(h_ref - 1.0) <= opts.margin && std::abs(v.last_pow * h_ref - 1.0) <= opts.band) {
        v.regime = Regime::Critical;
    }
    return v;
}

double norm_reference(const Grid& grid, const LoadField& f, double s) {
    const int n = grid.dimension;
    const double q = n / s;
    double acc = 0.0;
    for (double v : f.values) acc += std::pow(std::abs(v), q) * grid.cell_measure;
    const double norm = std::pow(acc, 1.0 / q);
    if (norm == 0.0) return std::numeric_limits<double>::infinity();
    return 1.0 / (2.0 * sobolev_constant(n, s, 1.0) * norm);
}

CheegerReport cheeger_characterization(const SweepTable& table, double h_ref) {
    CheegerReport rep;
    if (table.rows.empty()) throw ConfigError("empty sweep table");
    rep.last_pow = table.rows.back().seminorm_p_pow;
    if (table.rows.size() > 1) rep.trend = rep.last_pow - table.rows[table.rows.size() - 2].seminorm_p_pow;
    const bool zero_fields = std::all_of(table.rows.begin(), table.rows.end(), [](const SweepRecord& r) { return r.l1 == 0.0; });
    if (!std::isfinite(h_ref) || !(h_ref > 0.0) || zero_fields) {
        rep.degenerate = true;
        return rep;
    }
    rep.target = 1.0 / h_ref;
    rep.deviation = std::abs(rep.last_pow - rep.target) / rep.target;
    return rep;
}

FaberKrahnReport faber_krahn_probe(const Grid& grid, double s, int refine, double tol) {
    const int n = grid.dimension;
    const KernelSet k = build_kernel(grid, n + s, refine);
    const LoadField one = LoadField::constant(grid, 1.0);
    FaberKrahnReport rep;
    rep.h = brute_force_cheeger(grid, one, k).h;
    rep.bound = std::pow(grid.total_measure, -s / n) / (2.0 * sobolev_constant(n, s, 1.0));
    rep.slack = rep.h - rep.bound;
    rep.holds = rep.h >= rep.bound * (1.0 - tol);
    return rep;
}

EnergyLimitReport energy_limit_probe(const Grid& grid, std::span<const double> u, double s,
                                     const std::vector<double>& schedule, int refine) {
    if (u.size() != grid.size()) throw ConfigError("field size does not match the grid");
    const int n = grid.dimension;
    EnergyLimitReport rep;
    rep.limit = kinetic_energy(u, build_kernel(grid, n + s, refine), 1.0);
    for (double p : schedule) {
        if (!(p > 1.0)) throw ConfigError("energy limit schedule needs p > 1");
        const KernelSet kp = build_kernel(grid, kernel_exponent(n, s, p), refine);
        EnergyLimitRow row;
        row.p = p;
        row.energy = kinetic_energy(u, kp, p);
        row.gap = std::abs(row.energy - rep.limit);
        row.rel_gap = rep.limit > 0.0 ? row.gap / rep.limit : row.gap;
        rep.rows.push_back(row);
    }
    rep.monotone = true;
    for (std::size_t k = 1; k < rep.rows.size(); ++k)
        rep.monotone = rep.monotone && rep.rows[k].gap <= rep.rows[k - 1].gap;
    rep.final_rel_gap = rep.rows.empty() ? 0.0 : rep.rows.back().rel_gap;
    return rep;
}

std::vector<double> hat_field(const Grid& grid) {
    std::vector<double> u(grid.size());
    const double half = 0.5 * grid.diameter;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double r2 = 0.0;
        for (int d = 0; d < grid.dimension; ++d) {
            const double dx = grid.cells[i].center[d] - grid.centroid[d];
            r2 += dx * dx;
        }
        u[i] = std::max(0.0, 1.0 - std::sqrt(r2) / half);
    }
    return u;
}

}  // namespace fraclab
