#pragma once

#include "mems/tridiag.hpp"
#include "mems/types.hpp"

namespace mems {

/// Finite-volume discretization of the radial Laplacian on the unit ball,
/// its spherical-harmonic sectors, and the nonlinear residual/Jacobian of
///   F(u, λ) = -Δu - λ g0 r^α / (1-u)².
///
/// The operator acts on nodal values u_0..u_{n-1} with u(1) = 0 implied.
/// Sector l = 0 uses the origin regularity u'(0) = 0 (the origin node is an
/// unknown); sectors l >= 1 use u(0) = 0, so their matrices act on nodes
/// 1..n-1.  The flux form keeps every sector matrix self-adjoint with
/// respect to the cell volumes, which makes eigenvalue counts reliable.

/// Any evaluation with max u above this threshold is rejected outright;
/// clamping would silently corrupt continuation.
inline constexpr double kSingularGuard = 1.0 - 1e-12;

/// Throws SingularStateError (identifying the node) if max u >= 1 - 1e-12.
void check_below_barrier(const RadialField& u);

/// Negative sector-l Laplacian -Δ_l = -(u'' + (N-1)/r u' - l(l+N-2)/r² u)
/// as a tridiagonal matrix.  Size n for l = 0, size n-1 (nodes 1..n-1) for
/// l >= 1.
Tridiagonal sector_laplacian_matrix(const RadialGrid& grid, const ProblemSpec& spec, int l);

/// Action of the *signed* sector Laplacian Δ_l on a field (size n input for
/// l = 0, entries 1..n-1 used for l >= 1; returns same-size field).
RadialField apply_sector_laplacian(const RadialField& u, const RadialGrid& grid,
                                   const ProblemSpec& spec, int l);

/// Nonlinear residual F(u, λ) at the unknown nodes (size n).
RadialField residual(const RadialField& u, double lambda, const ProblemSpec& spec,
                     const RadialGrid& grid);

/// Sector-l linearization L_{u,λ} = -Δ_l - 2 λ g0 r^α/(1-u)³.  For l = 0
/// this is exactly ∂F/∂u.  `weights()` gives the cell volumes the matrix is
/// self-adjoint against; `symmetrized()` is the similarity-transformed
/// symmetric tridiagonal with the same spectrum.
struct SectorOperator {
    Tridiagonal matrix;
    std::vector<double> weight; // cell volumes of the active nodes
    int l = 0;
    int first_node = 0; // 0 for l == 0, 1 otherwise

    SymTridiagonal symmetrized() const;
};

SectorOperator jacobian(const RadialField& u, double lambda, const ProblemSpec& spec,
                        const RadialGrid& grid, int l);

/// Max-norm of a field.
double max_norm(const RadialField& v);

/// Convergence norm for residuals: max_i |F_i| · Δr_i², with Δr_i the local
/// spacing.  The raw residual scales like h⁻² (its double-precision noise
/// floor grows with refinement); this norm measures the solve error in
/// solution units, so a fixed tolerance is meaningful on every grid.
double scaled_residual_norm(const RadialField& F, const RadialGrid& grid);

} // namespace mems
