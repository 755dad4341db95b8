// fraclab command line: constants, solve, sweep, cheeger, certify, probe.
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <random>

#include "fraclab/certify.hpp"
#include "fraclab/config.hpp"
#include "fraclab/constants.hpp"
#include "fraclab/error.hpp"
#include "fraclab/experiments.hpp"
#include "fraclab/geometry.hpp"
#include "fraclab/io.hpp"
#include "fraclab/kernels.hpp"
#include "fraclab/solver.hpp"

using namespace fraclab;
using nlohmann::json;

namespace {

struct Common {
    std::string config;
    std::string out;
    int threads = 0;
    unsigned long long seed = 1;
};

std::string out_dir(const Common& c, const RunConfig* cfg) {
    if (!c.out.empty()) return c.out;
    return cfg ? cfg->output_dir : ".";
}

std::string in_dir(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

RunConfig require_config(const Common& c) {
    if (c.config.empty()) throw ConfigError("--config is required");
    return load_run_config(c.config);
}

json energy_json(const EnergyBreakdown& e) {
    return {{"pair_sum", e.pair_sum}, {"tail_sum", e.tail_sum}, {"seminorm", e.seminorm},
            {"kinetic", e.kinetic},   {"load", e.load},         {"total", e.total}};
}

json record_json(const SweepRecord& r) {
    return {{"p", r.p},
            {"s_p", r.s_p},
            {"l1", r.l1},
            {"seminorm_p", r.seminorm_p},
            {"seminorm_p_pow", r.seminorm_p_pow},
            {"seminorm_s1", r.seminorm_s1},
            {"energy", r.energy},
            {"iters", r.iters},
            {"precision_limited", r.precision_limited}};
}

void emit(const std::string& path, const json& doc) {
    io::write_text(path, doc.dump(2) + "\n");
    std::cout << doc.dump(2) << "\n";
}

int cmd_constants(int n, double s, double p, const Common& c) {
    const SharpConstants k = sharp_constants(n, s, p);
    json doc{{"n", n},
             {"s", s},
             {"p", p},
             {"C", k.c},
             {"C_error", k.c_error},
             {"S", k.sobolev},
             {"p_star", k.p_star},
             {"ball_perimeter_unit", k.ball_perimeter_unit},
             {"calibrable_radius", k.calibrable_radius}};
    if (c.out.empty()) std::cout << doc.dump(2) << "\n";
    else emit(in_dir(c.out, "constants.json"), doc);
    return 0;
}

int cmd_solve(const Common& c, double p_override) {
    const RunConfig cfg = require_config(c);
    const Grid grid = build_grid(cfg.domain);
    const LoadField f = make_load(grid, cfg.load);
    SolveConfig sc = cfg.solver;
    sc.p = p_override > 0.0 ? p_override : cfg.p_schedule.front();
    sc.validate(grid.dimension);
    const KernelSet k = io::cached_kernel(cfg.domain, grid, kernel_exponent(grid.dimension, sc.s, sc.p), cfg.refine,
                                          cfg.kernel_cache);
    const Solution sol = solve_p(grid, k, f, sc);
    const std::string dir = out_dir(c, &cfg);
    io::write_field_csv(in_dir(dir, "field.csv"), grid, sol.u);
    json doc{{"p", sc.p},
             {"s", sc.s},
             {"s_p", fractional_order(grid.dimension, sc.s, sc.p)},
             {"cells", grid.size()},
             {"iterations", sol.iterations},
             {"grad_norm", sol.grad_norm},
             {"precision_limited", sol.precision_limited},
             {"seminorm", sol.seminorm},
             {"seminorm_pow", sol.seminorm_pow},
             {"l1", sol.l1},
             {"energy", energy_json(sol.energy)}};
    emit(in_dir(dir, "solution.json"), doc);
    return 0;
}

int cmd_sweep(const Common& c) {
    const RunConfig cfg = require_config(c);
    const SweepTable table = run_sweep(cfg);
    const std::string dir = out_dir(c, &cfg);
    io::write_text(in_dir(dir, "sweep.csv"), sweep_csv(table));
    if (cfg.gnuplot) io::write_text(in_dir(dir, "sweep.gp"), gnuplot_script("sweep.csv"));

    const Grid grid = build_grid(cfg.domain);
    const double h_ref = norm_reference(grid, make_load(grid, cfg.load), cfg.solver.s);
    json doc{{"records", json::array()}, {"partial", table.partial}, {"failure", table.failure}};
    for (const auto& r : table.rows) doc["records"].push_back(record_json(r));
    doc["reference"] = {{"kind", "norm"}, {"h_ref", std::isfinite(h_ref) ? json(h_ref) : json("inf")}};
    if (table.rows.size() >= 3) {
        const RegimeVerdict v = classify(table, h_ref);
        doc["verdict"] = {{"regime", to_string(v.regime)},
                          {"l1_ratio", v.l1_ratio},
                          {"seminorm_ratio", v.seminorm_ratio},
                          {"last_pow", v.last_pow}};
        const CheegerReport ch = cheeger_characterization(table, h_ref);
        doc["cheeger"] = {{"last_pow", ch.last_pow},
                          {"target", ch.target},
                          {"deviation", ch.deviation},
                          {"trend", ch.trend},
                          {"degenerate", ch.degenerate}};
    }
    emit(in_dir(dir, "sweep.json"), doc);
    if (table.partial) {
        std::cerr << "sweep stopped early: " << table.failure << "\n";
        return 3;
    }
    return 0;
}

int cmd_cheeger(const Common& c, const std::string& method) {
    const RunConfig cfg = require_config(c);
    const Grid grid = build_grid(cfg.domain);
    const LoadField f = make_load(grid, cfg.load);
    const double s = cfg.solver.s;
    const KernelSet k1 = io::cached_kernel(cfg.domain, grid, grid.dimension + s, cfg.refine, cfg.kernel_cache);
    CheegerResult res;
    if (method == "brute") {
        res = brute_force_cheeger(grid, f, k1);
    } else {
        // Superlevel sets of u_p at the last scheduled p.
        const SweepTable table = run_sweep(cfg);
        if (table.rows.empty()) throw NumericalError("no solve completed: " + table.failure);
        res = threshold_cheeger(table.last_field, f, grid, k1);
    }
    const std::string dir = out_dir(c, &cfg);
    std::vector<double> mask(res.witness.begin(), res.witness.end());
    io::write_field_csv(in_dir(dir, "witness.csv"), grid, mask);
    json doc{{"method", to_string(res.method)}, {"h", res.h}, {"witness_cells", std::count(mask.begin(), mask.end(), 1.0)}};
    json cands = json::array();
    for (const auto& cd : res.candidates)
        cands.push_back({{"level", cd.level}, {"perimeter", cd.perimeter}, {"volume", cd.volume}, {"ratio", cd.ratio}});
    doc["candidates"] = cands;
    emit(in_dir(dir, "cheeger.json"), doc);
    return 0;
}

int cmd_certify(const Common& c, const std::string& field, double tie_tol, double eps) {
    const RunConfig cfg = require_config(c);
    const Grid grid = build_grid(cfg.domain);
    const LoadField f = make_load(grid, cfg.load);
    const KernelSet k1 =
        io::cached_kernel(cfg.domain, grid, grid.dimension + cfg.solver.s, cfg.refine, cfg.kernel_cache);
    const std::vector<double> u = io::read_field_csv(field, grid.size());
    CertifyOptions opts;
    opts.eps_feas = eps;
    opts.tie_tol = tie_tol;
    const Certificate cert = build_certificate(u, f, grid, k1, opts);
    const VerifyReport rep = verify_certificate(u, cert.z, f, grid, k1, eps, tie_tol);

    const std::string dir = out_dir(c, &cfg);
    std::ostringstream trip;
    trip << "i,j,z\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            const double z = cert.z.z(i, j);
            if (z != 0.0) trip << i << "," << j << "," << io::format_double(z) << "\n";
        }
        // Exterior entries use j = -1.
        if (cert.z.exterior[i] != 0.0) trip << i << ",-1," << io::format_double(cert.z.exterior[i]) << "\n";
    }
    io::write_text(in_dir(dir, "signfield.csv"), trip.str());
    json viol = json::array();
    for (std::size_t k = 0; k < std::min<std::size_t>(rep.violations.size(), 10); ++k) {
        const auto& v = rep.violations[k];
        viol.push_back({{"kind", v.kind}, {"i", v.i}, {"j", v.j}, {"amount", v.amount}});
    }
    const PlateauReport plateau = plateau_measure(u, grid, 0.01);
    const PairMass pairs = equal_pair_mass(u, grid);
    json doc{{"feasible", cert.feasible},
             {"verified", rep.pass},
             {"max_residual", cert.max_residual},
             {"scale", cert.scale},
             {"iterations", cert.iterations},
             {"free_pairs", cert.free_pairs},
             {"free_cells", cert.free_cells},
             {"violations", viol},
             {"plateau_fraction", plateau.fraction},
             {"equal_pair_interior", pairs.interior},
             {"equal_pair_exterior", pairs.exterior}};
    emit(in_dir(dir, "certify.json"), doc);
    return 0;
}

// Random unions of lattice cells: 1-D subsets of 12 slots, 2-D subsets of a 4 x 3 block.
int cmd_faber_krahn(const Common& c, int count, double s) {
    std::vector<DomainSpec> domains;
    if (!c.config.empty()) {
        domains.push_back(load_run_config(c.config).domain);
    } else {
        std::mt19937_64 rng(c.seed);
        for (int k = 0; k < count; ++k) {
            const int n = k % 2 == 0 ? 1 : 2;
            const int nx = n == 1 ? 12 : 4, ny = n == 1 ? 1 : 3;
            std::vector<AxisBox> boxes;
            std::bernoulli_distribution pick(0.5);
            for (int i = 0; i < nx; ++i)
                for (int j = 0; j < ny; ++j)
                    if (pick(rng)) boxes.push_back({{double(i), double(j)}, {i + 1.0, j + 1.0}});
            if (boxes.empty()) boxes.push_back({{0.0, 0.0}, {1.0, 1.0}});
            domains.push_back(DomainSpec::box_union(n, boxes, 1.0));
        }
    }
    json rows = json::array();
    bool all = true;
    for (const auto& d : domains) {
        const Grid g = build_grid(d);
        const FaberKrahnReport r = faber_krahn_probe(g, s);
        all = all && r.holds;
        rows.push_back({{"dimension", g.dimension}, {"cells", g.size()}, {"h", r.h}, {"bound", r.bound}, {"slack", r.slack},
                        {"holds", r.holds}});
    }
    json doc{{"s", s}, {"seed", c.seed}, {"instances", rows}, {"all_hold", all}};
    emit(in_dir(out_dir(c, nullptr), "faber_krahn.json"), doc);
    return 0;
}

int cmd_energy_limit(const Common& c) {
    DomainSpec d = DomainSpec::interval(-1.0, 1.0, 2.0 / 64);
    double s = 0.5;
    std::vector<double> schedule{1.3, 1.2, 1.1, 1.05, 1.02, 1.01};
    int refine = 4;
    if (!c.config.empty()) {
        const RunConfig cfg = load_run_config(c.config);
        d = cfg.domain;
        s = cfg.solver.s;
        schedule = cfg.p_schedule;
        refine = cfg.refine;
    }
    const Grid g = build_grid(d);
    const EnergyLimitReport r = energy_limit_probe(g, hat_field(g), s, schedule, refine);
    json rows = json::array();
    for (const auto& row : r.rows)
        rows.push_back({{"p", row.p}, {"energy", row.energy}, {"gap", row.gap}, {"rel_gap", row.rel_gap}});
    json doc{{"limit", r.limit}, {"rows", rows}, {"monotone", r.monotone}, {"final_rel_gap", r.final_rel_gap}};
    emit(in_dir(out_dir(c, nullptr), "energy_limit.json"), doc);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fractional p-Laplacian lab: p -> 1 asymptotics, Cheeger constants, sign certificates"};
    app.require_subcommand(1);
    Common common;
    app.add_option("--config", common.config, "run configuration (INI)");
    app.add_option("--out", common.out, "output directory (overrides [output] dir)");
    app.add_option("--threads", common.threads, "OpenMP team size")->check(CLI::NonNegativeNumber);
    app.add_option("--seed", common.seed, "random seed for probes");

    int n = 1;
    double s = 0.5, p = 1.0;
    auto* constants = app.add_subcommand("constants", "sharp Sobolev constants as JSON");
    constants->add_option("--n", n)->check(CLI::IsMember({1, 2}));
    constants->add_option("--s", s);
    constants->add_option("--p", p);

    double p_override = 0.0;
    auto* solve = app.add_subcommand("solve", "one solve at --p (default: first scheduled p)");
    solve->add_option("--p", p_override);

    auto* sweep = app.add_subcommand("sweep", "warm-started p sweep with regime verdict");

    std::string method = "brute";
    auto* cheeger = app.add_subcommand("cheeger", "(s,f)-Cheeger constant");
    cheeger->add_option("--method", method)->check(CLI::IsMember({"brute", "threshold"}));

    std::string field;
    double tie_tol = 0.0, eps = 1e-8;
    auto* certify = app.add_subcommand("certify", "sign-field certificate for a field CSV");
    certify->add_option("--field", field, "field CSV as written by solve")->required();
    certify->add_option("--tie-tol", tie_tol, "treat differences up to this as ties");
    certify->add_option("--eps", eps, "feasibility tolerance");

    auto* probe = app.add_subcommand("probe", "inequality and limit probes");
    probe->require_subcommand(1);
    int count = 10;
    double probe_s = 0.5;
    auto* fk = probe->add_subcommand("faber-krahn", "h_s >= |Omega|^(-s/n) / (2 S) on random small domains");
    fk->add_option("--count", count);
    fk->add_option("--s", probe_s);
    auto* el = probe->add_subcommand("energy-limit", "E_p^{s_p}(u) -> E_1^s(u) for a hat field");

    for (auto* sub : {constants, solve, sweep, cheeger, certify, fk, el}) {
        sub->add_option("--config", common.config, "run configuration (INI)");
        sub->add_option("--out", common.out, "output directory");
        sub->add_option("--threads", common.threads, "OpenMP team size");
        sub->add_option("--seed", common.seed, "random seed for probes");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        kernels::set_threads(common.threads);
        if (*constants) return cmd_constants(n, s, p, common);
        if (*solve) return cmd_solve(common, p_override);
        if (*sweep) return cmd_sweep(common);
        if (*cheeger) return cmd_cheeger(common, method);
        if (*certify) return cmd_certify(common, field, tie_tol, eps);
        if (*fk) return cmd_faber_krahn(common, count, probe_s);
        if (*el) return cmd_energy_limit(common);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
