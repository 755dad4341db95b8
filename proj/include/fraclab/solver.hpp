#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fraclab/domain_grid.hpp"
#include "fraclab/energy.hpp"
#include "fraclab/error.hpp"

namespace fraclab {

enum class SolverMethod {
    /// Damped Newton on the exact energy with a dense Cholesky solve. Pair
    /// differences below tie_floor * max|u| are floored in the Hessian only.
    Newton,
    /// Projected gradient descent with Barzilai-Borwein steps.
    ProjectedGradient,
};

enum class StepInit {
    BarzilaiBorwein,  // BB1 step from the previous iterate pair
    Unit,             // restart every line search from step 1 (reference mode for tests)
};

struct SolveConfig {
    double p = 1.2;
    double s = 0.5;
    /// Absolute bound on the projected-gradient sup-norm. Non-positive means
    /// 1e-8 * max_i |f_i m_i|.
    double grad_tol = 0.0;
    double energy_tol = 1e-12;  // relative energy decrease of the last accepted step
    int max_iterations = 50000;
    SolverMethod method = SolverMethod::Newton;
    StepInit step_init = StepInit::BarzilaiBorwein;  // ProjectedGradient only
    double tie_floor = 1e-10;                        // Newton only

    /// Throws ConfigError unless 1 < p < (n + 1)/(n + s) and 0 < s < 1.
    void validate(int dimension) const;
};

struct Solution {
    ScalarField u;
    EnergyBreakdown energy;
    int iterations = 0;
    double grad_norm = 0.0;
    double seminorm = 0.0;      // [u]_{W^{s_p,p}}
    double seminorm_pow = 0.0;  // [u]^{p-1}
    double l1 = 0.0;            // ||u||_{L^1}
    /// The iteration stopped because no representable step lowers the energy
    /// or the gradient, with grad_norm above the tolerance. Near p = 1 the
    /// gradient is only Hoelder continuous across near-ties, and rounding u to
    /// one ulp can move it by more than the tolerance.
    bool precision_limited = false;
    std::vector<double> energy_trace;  // F at the start and after every accepted step
};

/// Solve failure that carries the last iterate.
class SolveError : public NumericalError {
public:
    SolveError(const std::string& what, Solution last) : NumericalError(what), last_(std::move(last)) {}
    const Solution& last() const { return last_; }

private:
    Solution last_;
};

/// Minimises F_p^{s_p} over fields vanishing outside the grid. When the load
/// is nonnegative the iteration is projected onto u >= 0, where the minimiser lives.
/// `initial` warm-starts the iteration; it is first rescaled along its own ray
/// to the energy-optimal multiple.
Solution solve_p(const Grid& grid, const KernelSet& kernel, const LoadField& f, const SolveConfig& cfg,
                 std::optional<std::span<const double>> initial = std::nullopt);

/// Sup-norm of the energy gradient.
double kkt_residual(std::span<const double> u, const LoadField& f, const Grid& grid,
                    const KernelSet& kernel, double p);

/// Minimiser of lambda -> F(lambda v) over lambda >= 0 for p > 1 (0 when the load term is non-positive).
double optimal_ray_scale(std::span<const double> v, const LoadField& f, const Grid& grid,
                         const KernelSet& kernel, double p);

}  // namespace fraclab
