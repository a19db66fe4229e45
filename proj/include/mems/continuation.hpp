#pragma once

#include "mems/branch.hpp"
#include "mems/newton.hpp"
#include "mems/types.hpp"

namespace mems {

struct ContinuationParams {
    double ds0 = 0.05;    // initial arclength step
    double ds_min = 1e-9; // step floor; underflow terminates the trace
    double ds_max = 0.25;
    double grow = 1.3;   // step growth after an easy corrector
    double shrink = 0.5; // step reduction after a failure
    int max_corrector_iter = 8;
    double corrector_tol = 1e-10; // residual max-norm

    // Arclength metric ‖(du,dλ)‖² = theta_u‖du‖²_w + u0_weight·du(0)² + lambda_scale²·dλ².
    // The u(0) term keeps steps meaningful near singular profiles, where the
    // motion concentrates in a region of vanishing quadrature weight.
    double theta_u = 1.0;
    double u0_weight = 1.0;
    double lambda_scale = 1.0;

    double fold_tol = 1e-3;            // |μ| consistency bound at refined folds
    double fold_refine_dlambda = 1e-8; // bisection target for fold λ
    double fold_hysteresis = 1e-7;     // λ excursion (relative) confirming a turning point

    int l_max = 2;
    int k_max = 3;
    int max_steps = 20000;
    NewtonParams newton;

    void validate() const;
};

/// Pseudo-arclength continuation of F(u,λ) = 0 from (λ=0, u=0): secant
/// predictor, Newton corrector on the bordered system (block elimination
/// against the tridiagonal core), adaptive step.  Continues through the
/// first fold onto the unstable branch and stops at one of the Termination
/// events.  Folds are refined to |Δλ| ≤ fold_refine_dlambda by bisection on
/// the sign of the crossing sector-0 eigenvalue, re-solving the corrector.
Branch trace_branch(const ProblemSpec& spec, const RadialGrid& grid,
                    const ContinuationParams& params = {});

/// Sign-change scan of Δλ over recorded points (no refinement); exposed for
/// synthetic branch data.  Returns indices i such that a turning point lies
/// between points i-1 and i+1.
std::vector<int> detect_fold_candidates(const Branch& branch, double hysteresis = 0.0);

/// λ at the first fold if any, else the sup of λ over the branch.  Flagged
/// as a lower bound when the trace underflowed before any event.
double lambda_star(const Branch& branch);

/// λ₂* estimate: the first of {μ₂ zero crossing, second fold} along s, when
/// the trace reached either; empty otherwise.
std::optional<double> lambda_2_star(const Branch& branch);

} // namespace mems
