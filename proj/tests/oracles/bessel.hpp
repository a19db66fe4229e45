#pragma once

namespace oracles {

/// J_nu(x) by direct power series in long double; adequate for x <= 40 and
/// the small orders the tests need.
double bessel_j(double nu, double x);

/// k-th positive zero of J_nu (k >= 1), by McMahon bracketing + bisection.
double bessel_zero(double nu, int k);

/// Smallest Dirichlet eigenvalue of the sector-l radial Laplacian on the
/// unit ball in dimension N: the square of the first zero of J_{l+(N-2)/2}.
double dirichlet_eigenvalue(int N, int l, int k);

} // namespace oracles
