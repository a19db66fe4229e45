#pragma once

#include "mems/branch.hpp"
#include "mems/types.hpp"

namespace mems {

struct NewtonParams {
    double tol_residual = 1e-10; // convergence on the residual max-norm
    int max_iter = 50;
    double barrier_margin = 1e-8; // iterates must keep max u <= 1 - barrier_margin
    double damping = 0.5;         // backtracking factor

    void validate() const;
};

/// Damped Newton solve of F(u, λ) = 0 at fixed λ.  Step lengths are
/// backtracked until the barrier max u <= 1 - δ_b holds and the residual
/// norm decreases.  Throws ConvergenceError when max_iter is exhausted
/// (the expected outcome for λ > λ*).
RadialField solve_at_lambda(double lambda, const RadialField& init, const ProblemSpec& spec,
                            const RadialGrid& grid, const NewtonParams& params = {});

/// Natural continuation of the minimal branch from (λ=0, u=0): increase λ
/// until Newton fails, halving the step near failure until it underflows
/// 1e-8.  Every accepted point is checked semi-stable (μ₁ > 0).
Branch minimal_branch(const ProblemSpec& spec, const RadialGrid& grid, double lambda_step,
                      const NewtonParams& params = {});

/// Solve the bordered system {F(u,λ) = 0, u(0) = u0_target} by Newton on
/// (u, λ): the branch near the singular limit is vertical in λ, so the
/// origin value is the only workable parameter there.  Returns (λ, u).
std::pair<double, RadialField> solve_at_origin_value(double u0_target, double lambda_guess,
                                                     const RadialField& init,
                                                     const ProblemSpec& spec,
                                                     const RadialGrid& grid,
                                                     const NewtonParams& params = {});

/// Minimal-branch state with max u at a prescribed level: ramp λ while the
/// branch is λ-parametrized, then march the origin value up to the target
/// with `solve_at_origin_value`.
std::pair<double, RadialField> solve_at_sup_target(double sup_target, const ProblemSpec& spec,
                                                   const RadialGrid& grid,
                                                   const NewtonParams& params = {});

} // namespace mems
