#pragma once

#include <vector>

namespace mems {

/// Nodal values of a radial function on grid nodes 0..n-1 (origin included);
/// the Dirichlet value u(1) = 0 at node n is implicit and never stored.
using RadialField = std::vector<double>;

/// Parameters of the continuous problem -Δu = λ f(r)/(1-u)² with the
/// power-law profile f(r) = g0 · r^α on the unit ball (N ≥ 2) or the
/// symmetric interval (-1,1) reduced to [0,1] (N = 1).
struct ProblemSpec {
    int N = 2;          // space dimension, >= 1
    double alpha = 0.0; // profile exponent, >= 0 (must be 0 when N == 1)
    double g0 = 1.0;    // profile amplitude, > 0

    void validate() const; // throws DomainError on violation

    /// f(r) = g0 * r^alpha, with the convention r^0 = 1 at r = 0.
    double profile(double r) const;
};

/// Uniform grid on [0,1] with the finite-volume geometry used by the radial
/// operator: face areas r^{N-1} at half nodes and exact cell volumes
/// ∫ r^{N-1} dr over each control cell.  Cell volumes double as quadrature
/// weights; they telescope to exactly 1/N.
struct RadialGrid {
    int n = 0;                     // number of intervals; nodes are 0..n
    double h = 0.0;                // nominal spacing 1/n
    std::vector<double> r;         // node radii, size n+1
    std::vector<double> dr;        // r_{i+1} - r_i, size n
    std::vector<double> face_area; // r_{i+1/2}^{N-1}, size n (face between i and i+1)
    std::vector<double> cell_vol;  // control-cell volumes, size n+1
    bool stretched = false;        // set when built with origin clustering

    /// Quadrature of Σ w_i v_i over unknown nodes 0..n-1 (v(1)=0 implied).
    double integrate(const RadialField& v) const;

    /// Weighted L² norm sqrt(Σ cell_vol_i v_i²) over unknown nodes.
    double weighted_norm(const RadialField& v) const;

    double weighted_dot(const RadialField& a, const RadialField& b) const;
};

/// Uniform grid: r_i = i/n.  Requires n >= 16.
RadialGrid build_grid(int n, const ProblemSpec& spec);

/// Grid clustered near the origin, r_i = (i/n)^stretch with stretch > 1;
/// intended for α > 0 where the profile and the extremal solution lose
/// regularity at r = 0.  Face areas / cell volumes follow the same
/// finite-volume construction on the non-uniform nodes.
RadialGrid build_stretched_grid(int n, const ProblemSpec& spec, double stretch);

double max_value(const RadialField& u);
int argmax_node(const RadialField& u);

} // namespace mems
