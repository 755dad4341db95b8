#pragma once

#include <limits>
#include <string>
#include <vector>

#include "fraclab/config.hpp"
#include "fraclab/domain_grid.hpp"
#include "fraclab/energy.hpp"

namespace fraclab {

/// Cell-centre samples of the load descriptor.
LoadField make_load(const Grid& grid, const LoadSpec& spec);

struct SweepRecord {
    double p = 0.0;
    double s_p = 0.0;
    double l1 = 0.0;
    double seminorm_p = 0.0;      // [u_p]_{W^{s_p,p}}
    double seminorm_p_pow = 0.0;  // [u_p]^{p-1}
    double seminorm_s1 = 0.0;     // [u_p]_{W^{s,1}}
    double energy = 0.0;
    int iters = 0;
    bool precision_limited = false;
};

struct SweepTable {
    int dimension = 1;
    double s = 0.5;
    std::vector<SweepRecord> rows;
    bool partial = false;  // a solve failed; rows hold the completed prefix
    std::string failure;
    std::vector<double> last_field;  // u of the last completed row
};

/// One warm-started solve per scheduled p, in schedule order.
SweepTable run_sweep(const RunConfig& cfg);

/// Columns p, s_p, l1, seminorm_p, seminorm_p_pow, seminorm_s1, energy, iters; doubles as %.17g.
std::string sweep_csv(const SweepTable& table);

/// gnuplot script plotting the sweep CSV at `csv_name` against p.
std::string gnuplot_script(const std::string& csv_name);

enum class Regime { Vanishing, Critical, BlowUp, Inconclusive };
std::string to_string(Regime r);

struct ClassifyOptions {
    double factor = 10.0;  // required trend over the table
    double margin = 0.1;   // distance of h_ref from 1
    double band = 0.15;    // critical band around 1/h_ref
};

struct RegimeVerdict {
    Regime regime = Regime::Inconclusive;
    double l1_ratio = 0.0;        // final / initial
    double seminorm_ratio = 0.0;  // final / initial
    double last_pow = 0.0;        // [u_p]^{p-1} of the last row
    double h_ref = 0.0;
};

/// h_ref is the (s,f)-Cheeger constant or any quantity compared with 1 the same
/// way, such as norm_reference. Throws ConfigError below three records.
RegimeVerdict classify(const SweepTable& table, double h_ref, const ClassifyOptions& opts = {});

/// ||f||_{L^{n/s}} compared with 1/(2 S_{n,s}) as a ratio: (2 S_{n,s} ||f||_{n/s})^{-1}.
/// Infinite for f = 0.
double norm_reference(const Grid& grid, const LoadField& f, double s);

struct CheegerReport {
    double last_pow = 0.0;
    double target = 0.0;     // 1/h_ref
    double deviation = 0.0;  // |last_pow - target| / target
    double trend = 0.0;      // last_pow minus the previous row's value
    bool degenerate = false;  // zero load or zero fields: nothing to compare
};

CheegerReport cheeger_characterization(const SweepTable& table, double h_ref);

struct FaberKrahnReport {
    double h = 0.0;      // brute-force Cheeger constant for f = 1
    double bound = 0.0;  // |Omega|^{-s/n} / (2 S_{n,s})
    double slack = 0.0;  // h - bound
    bool holds = false;  // h >= bound (1 - tol)
};

/// Needs a brute-force-sized grid.
FaberKrahnReport faber_krahn_probe(const Grid& grid, double s, int refine = 4, double tol = 0.02);

struct EnergyLimitRow {
    double p = 0.0;
    double energy = 0.0;  // E_p^{s_p}(u)
    double gap = 0.0;     // |E_p^{s_p}(u) - E_1^s(u)|
    double rel_gap = 0.0;
};

struct EnergyLimitReport {
    double limit = 0.0;  // E_1^s(u) = (1/2)[u]_{W^{s,1}}
    std::vector<EnergyLimitRow> rows;
    bool monotone = false;  // gaps non-increasing along the schedule
    double final_rel_gap = 0.0;
};

EnergyLimitReport energy_limit_probe(const Grid& grid, std::span<const double> u, double s,
                                     const std::vector<double>& schedule, int refine = 4);

/// Hat profile u_i = max(0, 1 - |x_i - centroid| / (diameter / 2)).
std::vector<double> hat_field(const Grid& grid);

}  // namespace fraclab
