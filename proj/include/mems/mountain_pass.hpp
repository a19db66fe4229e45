#pragma once

#include <vector>

#include "mems/types.hpp"

namespace mems {

/// Regularized nonlinearity g_ε, its energy functional, and the numerical
/// mountain-pass search for the second solution near λ*.
///
/// g_ε matches 1/(1-u)² below u = 1-ε and continues with a C¹ power growth
/// u^p above, which makes the energy well defined on all of H¹₀ and restores
/// the Palais-Smale machinery (θ = (p+3)/2 > 2).

struct RegularizationParams {
    double eps = 0.1; // in (0,1)
    double p = 2.0;   // p > 1; subcritical p < (N+2)/(N-2) for N >= 3

    double theta() const { return 0.5 * (p + 3.0); }
    void validate(int N) const;
};

/// Default growth exponent: 2 for N <= 4, the smaller of 2 and the midpoint
/// of (1, (N+2)/(N-2)) above.
double default_growth_exponent(int N);

/// g_ε(u): 1/(1-u)² for u <= 1-ε, the matching C¹ power continuation above.
double g_eps(double u, const RegularizationParams& prm);

/// dg_ε/du.
double g_eps_prime(double u, const RegularizationParams& prm);

/// Antiderivative G_ε(u) = ∫_{-∞}^u g_ε, i.e. 1/(1-u) below the junction.
double G_eps(double u, const RegularizationParams& prm);

/// Sampled growth constant: max of g_ε(u)/(1+u^p) over u >= 0.
double growth_constant(const RegularizationParams& prm);

/// Smallest M >= 1-ε such that θ G_ε(u) <= u g_ε(u) for all sampled u >= M
/// (the Ambrosetti-Rabinowitz threshold), found by scanning.
double ar_threshold(const RegularizationParams& prm);

/// Energy J_{ε,λ}(u) = ½∫|∇u|² - λ∫ f G_ε(u) per unit sphere measure,
/// evaluated with the same discrete quadratic form as the operator (so the
/// discrete gradient is exact).
double energy(const RadialField& u, double lambda, const RegularizationParams& prm,
              const ProblemSpec& spec, const RadialGrid& grid);

/// L²(w)-gradient of the energy: -Δu - λ f g_ε(u).
RadialField energy_gradient(const RadialField& u, double lambda, const RegularizationParams& prm,
                            const ProblemSpec& spec, const RadialGrid& grid);

/// The low hill-side state w_ε = (1-ε)χ with χ a C¹ cutoff, 1 on [0, r_cut]
/// and 0 beyond 2 r_cut.
RadialField make_w_eps(const RegularizationParams& prm, const ProblemSpec& spec,
                       const RadialGrid& grid, double r_cut);

/// Starting from (1 - sup u_λ)/4, halve ε until J(w_ε) < J(u_λ) (the energy
/// of w_ε drops like -λ/ε² while u_λ stays put).  Throws ConvergenceError if
/// no admissible ε is found.
double choose_epsilon(double lambda, const RadialField& u_lambda, double p,
                      const ProblemSpec& spec, const RadialGrid& grid, double r_cut = 0.25);

struct PathParams {
    int nodes = 21;         // path states v_0..v_{nodes}
    int max_iters = 200000;
    double grad_tol = 1e-8; // weighted-norm termination on the max node
    double r_cut = 0.25;
    int reparam_every = 10;
};

struct MountainPassResult {
    RadialField critical_point;
    double level = 0.0;          // energy at the pass
    double grad_norm = 0.0;      // achieved gradient norm
    double residual_unreg = 0.0; // scaled unregularized residual at the point
    bool is_solution = false;    // post-checks passed: solves (S)_λ, max u <= 1-ε
    int iterations = 0;
    std::vector<double> path_energies;
};

/// Numerical mountain pass between u_λ and w_ε: descend the max-energy
/// interior node (H¹-preconditioned damped gradient), smooth its neighbours,
/// re-distribute nodes along equal energy-arclength, stop when the gradient
/// norm at the max node is below grad_tol.  Throws ConvergenceError on
/// stagnation.
MountainPassResult mp_search(double lambda, const RadialField& u_lambda,
                             const RegularizationParams& prm, const ProblemSpec& spec,
                             const RadialGrid& grid, const PathParams& path = {});

} // namespace mems
