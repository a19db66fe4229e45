#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mems/types.hpp"

namespace mems {

/// One accepted continuation point.
struct BranchPoint {
    double s = 0.0;      // cumulative arclength
    double lambda = 0.0;
    RadialField u;
    double u0 = 0.0;       // u at the origin
    double sup_norm = 0.0; // max u
    double mu1 = 0.0;      // smallest merged eigenvalue of L_{u,λ}
    double mu2 = 0.0;      // second merged eigenvalue
    int mu2_sector = -1;   // sector realizing μ₂
    int morse_index = 0;
    bool on_minimal = true; // before the first fold
    int post_fold_count = 0;
};

/// A refined turning point.
struct Fold {
    double s = 0.0;
    double lambda = 0.0;
    double u0 = 0.0;
    double mu_crossing = 0.0; // sector-0 eigenvalue that vanishes here
    int index = 0;            // 1 = first fold, 2 = second, ...
};

enum class Termination {
    barrier_reached,   // sup_norm exceeded 1 - 10·δ_b
    mu2_crossed_zero,  // μ₂ hit zero on the unstable segment
    second_fold,       // second turning point reached
    step_underflow,    // corrector kept failing below the minimal step
};

std::string to_string(Termination t);

/// Arclength-ordered solution curve with fold and event bookkeeping.
struct Branch {
    std::vector<BranchPoint> points;
    std::vector<Fold> folds; // strictly increasing in s
    double lambda_star_est = 0.0;
    bool lambda_star_is_lower_bound = false;
    std::optional<double> lambda_2_star_est;
    double lambda_2_star_mu2 = 0.0;       // |μ₂| at the refined event point
    bool lambda_2_star_ambiguous = false; // μ₂ crossing and second fold in one step
    Termination termination = Termination::step_underflow;
    std::string diagnostics;

    double sup_lambda() const;
};

} // namespace mems
