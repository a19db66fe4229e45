#include "mems/closed_forms.hpp"

#include <cmath>
#include <string>

#include "mems/errors.hpp"

namespace mems {
namespace closed_forms {

namespace {
const double kSqrt6 = std::sqrt(6.0);
}

double q_plus() { return 4.0 + 2.0 * kSqrt6; }

double alpha_critical(int N) {
    if (N < 8) {
        throw DomainError("alpha_critical: requires N >= 8 (threshold is negative and "
                          "unused below dimension 8), got N = " + std::to_string(N));
    }
    return (3.0 * N - 14.0 - 4.0 * kSqrt6) / (4.0 + 2.0 * kSqrt6);
}

double lambda_star_explicit(int N, double alpha) {
    if (N < 8) {
        throw DomainError("lambda_star_explicit: formula only proven for N >= 8, "
                          "got N = " + std::to_string(N));
    }
    if (alpha < 0.0 || alpha > alpha_critical(N)) {
        throw DomainError("lambda_star_explicit: formula only proven for 0 <= alpha <= alpha_N = " +
                          std::to_string(alpha_critical(N)) + ", got alpha = " +
                          std::to_string(alpha));
    }
    return (2.0 + alpha) * (3.0 * N + alpha - 4.0) / 9.0;
}

double u_star_explicit(double r, double alpha) {
    if (r < 0.0 || r > 1.0) {
        throw DomainError("u_star_explicit: r must lie in [0,1], got r = " + std::to_string(r));
    }
    if (alpha < 0.0) {
        throw DomainError("u_star_explicit: alpha must be >= 0");
    }
    return 1.0 - std::pow(r, (2.0 + alpha) / 3.0);
}

bool hardy_stability_check(int N, double alpha) {
    if (N < 2) {
        throw DomainError("hardy_stability_check: Hardy inequality needs N >= 2");
    }
    if (alpha < 0.0) {
        throw DomainError("hardy_stability_check: alpha must be >= 0");
    }
    const double two_lambda = 2.0 * (2.0 + alpha) * (3.0 * N + alpha - 4.0) / 9.0;
    const double hardy = 0.25 * (N - 2.0) * (N - 2.0);
    return two_lambda <= hardy;
}

double singular_amplitude(int N, double alpha) {
    const double denom = (2.0 + alpha) * (3.0 * N + alpha - 4.0);
    if (denom <= 0.0) {
        throw DomainError("singular_amplitude: (2+alpha)(3N+alpha-4) must be positive");
    }
    return std::cbrt(9.0 / denom);
}

CriticalData critical_data(int N, double alpha) {
    CriticalData out;
    out.N = N;
    out.alpha = alpha;
    out.q_plus = q_plus();
    if (N >= 8) {
        out.alpha_N = alpha_critical(N);
        if (alpha >= 0.0 && alpha <= *out.alpha_N) {
            out.lambda_star = lambda_star_explicit(N, alpha);
        }
    }
    if ((2.0 + alpha) * (3.0 * N + alpha - 4.0) > 0.0) {
        out.K_singular = singular_amplitude(N, alpha);
    }
    out.hardy_stable = (N >= 2) && hardy_stability_check(N, alpha);
    return out;
}

} // namespace closed_forms
} // namespace mems
