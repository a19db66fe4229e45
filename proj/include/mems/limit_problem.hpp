#pragma once

#include <string>
#include <vector>

#include "mems/types.hpp"

namespace mems {

/// The entire-space limit problem  ΔU = |y|^α / U²,  U ≥ C > 0, normalized
/// to U(0) = 1, U'(0) = 0: radial shooting solution, far-field power-law
/// amplitude, truncated-domain instability certificate and the Hardy-type
/// stability certificate for the singular profile.

enum class StabilityCertificate {
    unstable,     // a truncated Dirichlet mode with negative Rayleigh quotient exists
    hardy_stable, // the singular profile is certified stable via Hardy's inequality
    inconclusive,
};

std::string to_string(StabilityCertificate c);

struct LimitProfile {
    int N = 0;
    double alpha = 0.0;
    double R_max = 0.0;
    std::vector<double> r;  // log-spaced grid, r[0] = 0
    std::vector<double> U;  // profile values, U[0] = 1
    std::vector<double> dU; // radial derivative (for Hermite interpolation)

    double K_hat = 0.0;   // far-field amplitude of U / r^{(2+α)/3} (set by the fit)
    double mu1_hat = 0.0; // best (lowest) truncated Rayleigh quotient found
    StabilityCertificate certificate = StabilityCertificate::inconclusive;

    /// Cubic-Hermite evaluation; r must lie in [0, R_max].
    double value(double rr) const;
};

/// Integrate the radial ODE U'' + (N-1)/r U' = r^α/U² from the origin series
/// U = 1 + r^{α+2}/((α+2)(α+N)) + ... with an adaptive embedded Runge-Kutta
/// pair at relative tolerance 1e-10.  Requires R_max >= 100.
LimitProfile shoot(int N, double alpha, double R_max);

struct AmplitudeFit {
    double K_hat = 0.0;
    double rms_log_residual = 0.0;
    bool conclusive = false;
};

/// Least-squares fit of log U against ((2+α)/3)·log r over the last decade
/// of radii; stores K_hat in the profile.  The fit is flagged inconclusive
/// when the log-residual exceeds `residual_threshold`.
AmplitudeFit asymptotic_amplitude(LimitProfile& profile, double residual_threshold = 0.05);

struct InstabilityResult {
    double mu1_hat = 0.0;    // smallest Dirichlet eigenvalue on B_{R_test}
    double R_test = 0.0;
    std::vector<double> phi; // discrete minimizer on the certificate grid
    std::vector<double> phi_r;
    bool unstable = false;
};

/// Smallest eigenvalue of -Δ - 2 r^α/U³ on the ball of radius R_test with a
/// Dirichlet condition, computed from the weighted-symmetric sector-0
/// discretization.  By domain monotonicity this upper-bounds μ₁(U), so a
/// negative value is a certificate of linear instability.
InstabilityResult instability_certificate(const LimitProfile& profile, double R_test,
                                          int grid_n = 4000, double neg_tol = 1e-10);

/// Hardy comparison for the singular solution K r^{(2+α)/3}:
/// true iff 2/K³ ≤ (N-2)²/4 (identical to closed_forms::hardy_stability_check).
bool hardy_stability_certificate(int N, double alpha);

/// Run the certificates and record the result in the profile.
StabilityCertificate classify_stability(LimitProfile& profile, double R_test);

} // namespace mems
