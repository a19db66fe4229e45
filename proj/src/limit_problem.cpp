#include "mems/limit_problem.hpp"

#include <algorithm>
#include <cmath>

#include "mems/closed_forms.hpp"
#include "mems/errors.hpp"
#include "mems/radial_operator.hpp"
#include "mems/spectrum.hpp"

namespace mems {

std::string to_string(StabilityCertificate c) {
    switch (c) {
        case StabilityCertificate::unstable: return "unstable";
        case StabilityCertificate::hardy_stable: return "hardy_stable";
        case StabilityCertificate::inconclusive: return "inconclusive";
    }
    return "unknown";
}

namespace {

struct Rhs {
    int N;
    double alpha;
    // state y = (U, U'); returns (U', U'' ) with U'' = r^α/U² - (N-1)/r U'
    void operator()(double r, const double y[2], double dy[2]) const {
        dy[0] = y[1];
        dy[1] = std::pow(r, alpha) / (y[0] * y[0]) - (N - 1) * y[1] / r;
    }
};

// One Dormand-Prince 5(4) step; returns the embedded error estimate.
double dp45_step(const Rhs& f, double r, const double y[2], double h, double out[2]) {
    static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static const double a21 = 1.0 / 5;
    static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
    static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    double k1[2], k2[2], k3[2], k4[2], k5[2], k6[2], k7[2], t[2];
    f(r, y, k1);
    for (int i = 0; i < 2; ++i) t[i] = y[i] + h * a21 * k1[i];
    f(r + c2 * h, t, k2);
    for (int i = 0; i < 2; ++i) t[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    f(r + c3 * h, t, k3);
    for (int i = 0; i < 2; ++i) t[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    f(r + c4 * h, t, k4);
    for (int i = 0; i < 2; ++i)
        t[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    f(r + c5 * h, t, k5);
    for (int i = 0; i < 2; ++i)
        t[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    f(r + h, t, k6);
    for (int i = 0; i < 2; ++i)
        out[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    f(r + h, out, k7);

    double err = 0.0;
    for (int i = 0; i < 2; ++i) {
        const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                              e7 * k7[i]);
        const double sc = 1e-12 + 1e-10 * std::max(std::abs(y[i]), std::abs(out[i]));
        err = std::max(err, std::abs(e) / sc);
    }
    return err;
}

} // namespace

LimitProfile shoot(int N, double alpha, double R_max) {
    if (N < 1) throw DomainError("shoot: need N >= 1");
    if (alpha < 0.0) throw DomainError("shoot: need alpha >= 0");
    if (R_max < 100.0) throw DomainError("shoot: need R_max >= 100");

    LimitProfile out;
    out.N = N;
    out.alpha = alpha;
    out.R_max = R_max;

    // output grid: origin plus log-spaced nodes
    const double r_first = 1e-4;
    const int per_decade = 120;
    const int n_out = static_cast<int>(std::ceil(per_decade * std::log10(R_max / r_first))) + 1;
    out.r.reserve(n_out + 1);
    out.U.reserve(n_out + 1);
    out.dU.reserve(n_out + 1);
    out.r.push_back(0.0);
    out.U.push_back(1.0);
    out.dU.push_back(0.0);

    const Rhs f{N, alpha};
    // series start at r0: U = 1 + r^{α+2}/((α+2)(α+N)), U' = r^{α+1}/(α+N)
    double r = 1e-6;
    double y[2] = {1.0 + std::pow(r, alpha + 2.0) / ((alpha + 2.0) * (alpha + N)),
                   std::pow(r, alpha + 1.0) / (alpha + N)};

    double h = 1e-7;
    int next_out = 0;
    double r_next = r_first;
    const int max_steps = 40'000'000;
    for (int step = 0; step < max_steps && r < R_max;) {
        bool hit_output = false;
        double h_try = h;
        if (r + h_try >= r_next) {
            h_try = r_next - r;
            hit_output = true;
        }
        double ynew[2];
        const double err = dp45_step(f, r, y, h_try, ynew);
        if (err <= 1.0) {
            r += h_try;
            y[0] = ynew[0];
            y[1] = ynew[1];
            ++step;
            if (!std::isfinite(y[0]) || !std::isfinite(y[1]) || y[0] <= 0.0) {
                throw ConvergenceError("shoot: integration broke down at r = " + std::to_string(r),
                                       y[0], step);
            }
            if (hit_output) {
                out.r.push_back(r);
                out.U.push_back(y[0]);
                out.dU.push_back(y[1]);
                ++next_out;
                r_next = r_first * std::pow(10.0, static_cast<double>(next_out) / per_decade);
                if (r_next > R_max) r_next = R_max;
            }
        }
        const double grow = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
        const double fac = std::clamp(grow, 0.2, 5.0);
        h = (hit_output && err <= 1.0) ? std::min(h * fac, h) : h_try * fac;
        h = std::min(h, 0.05 * std::max(r, 1e-6));
        h = std::max(h, 1e-12);
    }
    if (out.r.back() < R_max * (1.0 - 1e-9)) {
        throw ConvergenceError("shoot: step budget exhausted before R_max", out.r.back(), 0);
    }
    return out;
}

double LimitProfile::value(double rr) const {
    if (rr < 0.0 || rr > R_max * (1.0 + 1e-12)) {
        throw DomainError("LimitProfile::value: radius outside [0, R_max]");
    }
    const auto it = std::upper_bound(r.begin(), r.end(), rr);
    if (it == r.begin()) return U.front();
    if (it == r.end()) return U.back();
    const size_t j = static_cast<size_t>(it - r.begin());
    const double r0 = r[j - 1], r1 = r[j];
    const double w = r1 - r0;
    const double t = (rr - r0) / w;
    const double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
    const double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
    return h00 * U[j - 1] + h10 * w * dU[j - 1] + h01 * U[j] + h11 * w * dU[j];
}

AmplitudeFit asymptotic_amplitude(LimitProfile& profile, double residual_threshold) {
    if (profile.r.size() < 16) throw DomainError("asymptotic_amplitude: profile too short");
    const double r_hi = profile.R_max;
    const double r_lo = r_hi / 10.0;
    const double expo = (2.0 + profile.alpha) / 3.0;
    // least squares for c in log U = c + expo·log r over the last decade
    double sum = 0.0;
    int count = 0;
    for (size_t j = 0; j < profile.r.size(); ++j) {
        if (profile.r[j] < r_lo || profile.r[j] > r_hi) continue;
        sum += std::log(profile.U[j]) - expo * std::log(profile.r[j]);
        ++count;
    }
    AmplitudeFit fit;
    if (count < 8) throw DomainError("asymptotic_amplitude: too few points in the last decade");
    const double c = sum / count;
    double rss = 0.0;
    for (size_t j = 0; j < profile.r.size(); ++j) {
        if (profile.r[j] < r_lo || profile.r[j] > r_hi) continue;
        const double res = std::log(profile.U[j]) - expo * std::log(profile.r[j]) - c;
        rss += res * res;
    }
    fit.K_hat = std::exp(c);
    fit.rms_log_residual = std::sqrt(rss / count);
    fit.conclusive = fit.rms_log_residual <= residual_threshold;
    profile.K_hat = fit.K_hat;
    return fit;
}

InstabilityResult instability_certificate(const LimitProfile& profile, double R_test, int grid_n,
                                          double neg_tol) {
    if (R_test <= 0.0 || R_test > profile.R_max) {
        throw DomainError("instability_certificate: need 0 < R_test <= R_max");
    }
    // Solve the eigenproblem on the unit ball in the scaled variable
    // x = r/R_test: eig(-Δ_r - V(r)) = eig(-Δ_x - R² V(Rx)) / R².
    ProblemSpec unit;
    unit.N = profile.N;
    unit.alpha = 0.0; // profile handled through the potential below
    unit.g0 = 1.0;
    RadialGrid grid = build_grid(grid_n, unit);
    Tridiagonal T = sector_laplacian_matrix(grid, unit, 0);
    const double R2 = R_test * R_test;
    for (int i = 0; i < grid.n; ++i) {
        const double rr = grid.r[i] * R_test;
        const double Ui = profile.value(rr);
        T.diag[i] -= R2 * 2.0 * std::pow(rr, profile.alpha) / (Ui * Ui * Ui);
    }
    SectorOperator op;
    op.matrix = std::move(T);
    op.l = 0;
    op.first_node = 0;
    op.weight.assign(grid.cell_vol.begin(), grid.cell_vol.begin() + grid.n);
    SymTridiagonal S = op.symmetrized();
    const double mu_scaled = smallest_eigenvalues(S, 1)[0];

    InstabilityResult res;
    res.R_test = R_test;
    res.mu1_hat = mu_scaled / R2;
    res.unstable = res.mu1_hat < -neg_tol;
    // discrete minimizer (diagnostic output)
    res.phi_r.resize(grid.n);
    for (int i = 0; i < grid.n; ++i) res.phi_r[i] = grid.r[i] * R_test;
    res.phi = smallest_eigenvector(S, mu_scaled, op.weight);
    return res;
}

bool hardy_stability_certificate(int N, double alpha) {
    if (N < 2) throw DomainError("hardy_stability_certificate: needs N >= 2");
    const double K = closed_forms::singular_amplitude(N, alpha);
    return 2.0 / (K * K * K) <= 0.25 * (N - 2.0) * (N - 2.0);
}

StabilityCertificate classify_stability(LimitProfile& profile, double R_test) {
    InstabilityResult cert = instability_certificate(profile, R_test);
    profile.mu1_hat = cert.mu1_hat;
    if (cert.unstable) {
        profile.certificate = StabilityCertificate::unstable;
    } else if (profile.N >= 2 && hardy_stability_certificate(profile.N, profile.alpha)) {
        profile.certificate = StabilityCertificate::hardy_stable;
    } else {
        profile.certificate = StabilityCertificate::inconclusive;
    }
    return profile.certificate;
}

} // namespace mems
