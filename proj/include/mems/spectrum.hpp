#pragma once

#include <vector>

#include "mems/radial_operator.hpp"
#include "mems/types.hpp"

namespace mems {

/// Eigenvalues of the linearized operator L_{u,λ} = -Δ - 2λ f(r)/(1-u)³
/// across spherical-harmonic sectors, merged into the global list
/// μ₁ ≤ μ₂ ≤ ... with multiplicities m_l = dim of degree-l harmonics, and
/// the resulting Morse index.

/// Multiplicity of the degree-l spherical-harmonic space in dimension N:
/// m_0 = 1, m_1 = N, m_l = C(N+l-1, l) - C(N+l-3, l-2).  For N = 1 the
/// sectors degenerate to the even/odd parity classes, both simple.
int sector_multiplicity(int N, int l);

/// k smallest eigenvalues of a symmetric tridiagonal matrix by bisection on
/// Sturm sequence counts; absolute accuracy 1e-10 * spectral scale.
std::vector<double> smallest_eigenvalues(const SymTridiagonal& T, int k);

/// Number of eigenvalues of T strictly below x (Sturm count).
int eigenvalue_count_below(const SymTridiagonal& T, double x);

/// k_max smallest eigenvalues of the sector-l linearization at (u, λ).
std::vector<double> sector_eigenvalues(const RadialField& u, double lambda,
                                       const ProblemSpec& spec, const RadialGrid& grid,
                                       int l, int k_max);

struct SectorSpectrum {
    int l = 0;
    int multiplicity = 1;
    std::vector<double> eigenvalues; // sorted ascending
    int negative_count = 0;          // exact count over the whole sector spectrum
};

struct SpectralResult {
    std::vector<SectorSpectrum> sectors;
    std::vector<double> merged; // μ₁ ≤ μ₂ ≤ ..., multiplicities expanded
    std::vector<int> merged_sector;
    int morse_index = 0;

    double mu1() const { return merged.empty() ? 0.0 : merged[0]; }
    double mu2() const { return merged.size() < 2 ? 0.0 : merged[1]; }
    int mu2_sector() const { return merged.size() < 2 ? -1 : merged_sector[1]; }
};

/// Sector spectra for l = 0..l_max (extended past l_max while negative
/// eigenvalues persist, so the Morse index is exact), merged global list,
/// Morse index.
SpectralResult morse_data(const RadialField& u, double lambda, const ProblemSpec& spec,
                          const RadialGrid& grid, int l_max = 2, int k_max = 3);

/// Eigenvector of a weighted-symmetrized operator for a computed eigenvalue,
/// by shifted inverse iteration; returned in pointwise (unsymmetrized) form,
/// normalized to weighted norm 1 with a nonnegative leading entry.
std::vector<double> smallest_eigenvector(const SymTridiagonal& S, double eigenvalue,
                                         const std::vector<double>& weight);

/// First (radial) eigenfunction of the sector-0 linearization, normalized to
/// weighted norm 1 and positive at the origin; paired with its eigenvalue.
std::pair<double, RadialField> first_radial_eigenpair(const RadialField& u, double lambda,
                                                      const ProblemSpec& spec,
                                                      const RadialGrid& grid);

} // namespace mems
