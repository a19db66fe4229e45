#pragma once

#include <optional>

namespace mems {

/// Closed-form reference quantities for the radial problem
///   -Δu = λ g0 r^α / (1-u)²  on the unit ball.
///
/// These are exact expressions used as oracles by the numerical modules.
/// Every function raises DomainError outside its proven validity window
/// instead of extrapolating; values are reproducible to ±1e-12.
namespace closed_forms {

/// q₊ = 4 + 2√6, the critical exponent of the Moser-type iteration for the
/// limit problem.  Root of 8q + 8 - q² = 0.
double q_plus();

/// Critical profile exponent α_N = (3N - 14 - 4√6) / (4 + 2√6); separates the
/// singular extremal regime (α ≤ α_N) from the compact one (α > α_N).
/// Defined for N ≥ 8 only; strictly increasing in N.
double alpha_critical(int N);

/// Pull-in value λ* = (2+α)(3N+α-4)/9, valid for N ≥ 8 and 0 ≤ α ≤ α_N.
double lambda_star_explicit(int N, double alpha);

/// Extremal profile u*(r) = 1 - r^{(2+α)/3} on 0 ≤ r ≤ 1.
double u_star_explicit(double r, double alpha);

/// True iff 2·(2+α)(3N+α-4)/9 ≤ (N-2)²/4, i.e. the Hardy inequality certifies
/// stability of the singular profile.  Equivalent to N ≥ 8 and α ≤ α_N.
bool hardy_stability_check(int N, double alpha);

/// Amplitude K of the singular solution K·r^{(2+α)/3} of ΔU = r^α/U²:
/// K = (9 / ((2+α)(3N+α-4)))^{1/3}.  Satisfies 2/K³ = 2·λ*(N,α).
double singular_amplitude(int N, double alpha);

/// Bundle of everything above for one (N, α), for the CLI `formulas` command.
struct CriticalData {
    int N = 0;
    double alpha = 0.0;
    std::optional<double> alpha_N;             // defined only for N >= 8
    std::optional<double> lambda_star;         // defined only inside the proven window
    std::optional<double> K_singular;          // defined when (2+α)(3N+α-4) > 0
    double q_plus = 0.0;
    bool hardy_stable = false;
};

CriticalData critical_data(int N, double alpha);

} // namespace closed_forms
} // namespace mems
