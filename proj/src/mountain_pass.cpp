#include "mems/mountain_pass.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mems/errors.hpp"
#include "mems/radial_operator.hpp"

namespace mems {

void RegularizationParams::validate(int N) const {
    if (eps <= 0.0 || eps >= 1.0) throw DomainError("RegularizationParams: eps must lie in (0,1)");
    if (p <= 1.0) throw DomainError("RegularizationParams: p must exceed 1");
    if (N >= 3) {
        const double p_crit = static_cast<double>(N + 2) / (N - 2);
        if (p >= p_crit) {
            throw DomainError("RegularizationParams: p must be subcritical (< (N+2)/(N-2) = " +
                              std::to_string(p_crit) + ")");
        }
    }
}

double default_growth_exponent(int N) {
    if (N <= 4) return 2.0;
    const double p_crit = static_cast<double>(N + 2) / (N - 2);
    return std::min(2.0, 0.5 * (1.0 + p_crit));
}

namespace {
struct Coeffs {
    double c0, c2; // g_ε(u) = c0 + c2 u^p above the junction
};
Coeffs coeffs(const RegularizationParams& prm) {
    const double e = prm.eps, p = prm.p;
    const double om = 1.0 - e;
    return {1.0 / (e * e) - 2.0 * om / (p * e * e * e),
            2.0 / (p * e * e * e * std::pow(om, p - 1.0))};
}
} // namespace

double g_eps(double u, const RegularizationParams& prm) {
    if (u <= 1.0 - prm.eps) {
        const double om = 1.0 - u;
        return 1.0 / (om * om);
    }
    const auto [c0, c2] = coeffs(prm);
    return c0 + c2 * std::pow(u, prm.p);
}

double g_eps_prime(double u, const RegularizationParams& prm) {
    if (u <= 1.0 - prm.eps) {
        const double om = 1.0 - u;
        return 2.0 / (om * om * om);
    }
    const auto [c0, c2] = coeffs(prm);
    (void)c0;
    return c2 * prm.p * std::pow(u, prm.p - 1.0);
}

double G_eps(double u, const RegularizationParams& prm) {
    if (u <= 1.0 - prm.eps) return 1.0 / (1.0 - u);
    const auto [c0, c2] = coeffs(prm);
    const double a = 1.0 - prm.eps;
    return 1.0 / prm.eps + c0 * (u - a) +
           c2 * (std::pow(u, prm.p + 1.0) - std::pow(a, prm.p + 1.0)) / (prm.p + 1.0);
}

double growth_constant(const RegularizationParams& prm) {
    double c = 0.0;
    for (int i = 0; i <= 4000; ++i) {
        const double u = 100.0 * i / 4000.0;
        c = std::max(c, g_eps(u, prm) / (1.0 + std::pow(u, prm.p)));
    }
    const auto [c0, c2] = coeffs(prm);
    (void)c0;
    return std::max(c, c2); // tail ratio tends to c2
}

double ar_threshold(const RegularizationParams& prm) {
    // θ G_ε(u) - u g_ε(u) is eventually negative since θ < p+1; scan from the
    // junction outward for the last sign change.
    const double theta = prm.theta();
    double M = 1.0 - prm.eps;
    const double u_hi = 1000.0;
    const int steps = 20000;
    double last_bad = 0.0;
    for (int i = 0; i <= steps; ++i) {
        const double u = (1.0 - prm.eps) + (u_hi - (1.0 - prm.eps)) * i / steps;
        if (theta * G_eps(u, prm) > u * g_eps(u, prm)) last_bad = u;
    }
    M = std::max(M, last_bad * (1.0 + 1e-6));
    return M;
}

double energy(const RadialField& u, double lambda, const RegularizationParams& prm,
              const ProblemSpec& spec, const RadialGrid& grid) {
    Tridiagonal T = sector_laplacian_matrix(grid, spec, 0);
    RadialField Tu = T.apply(u);
    double quad = 0.0, pot = 0.0;
    for (int i = 0; i < grid.n; ++i) {
        quad += grid.cell_vol[i] * u[i] * Tu[i];
        pot += grid.cell_vol[i] * spec.profile(grid.r[i]) * G_eps(u[i], prm);
    }
    // boundary cell: u(1) = 0 is part of the state, G_eps(0) = 1
    pot += grid.cell_vol[grid.n] * spec.profile(1.0) * G_eps(0.0, prm);
    return 0.5 * quad - lambda * pot;
}

RadialField energy_gradient(const RadialField& u, double lambda, const RegularizationParams& prm,
                            const ProblemSpec& spec, const RadialGrid& grid) {
    Tridiagonal T = sector_laplacian_matrix(grid, spec, 0);
    RadialField g = T.apply(u);
    for (int i = 0; i < grid.n; ++i) {
        g[i] -= lambda * spec.profile(grid.r[i]) * g_eps(u[i], prm);
    }
    return g;
}

RadialField make_w_eps(const RegularizationParams& prm, const ProblemSpec& spec,
                       const RadialGrid& grid, double r_cut) {
    (void)spec;
    if (r_cut <= 0.0 || r_cut >= 0.5) throw DomainError("make_w_eps: need 0 < r_cut < 1/2");
    RadialField w(grid.n, 0.0);
    for (int i = 0; i < grid.n; ++i) {
        const double r = grid.r[i];
        double chi;
        if (r <= r_cut) {
            chi = 1.0;
        } else if (r >= 2.0 * r_cut) {
            chi = 0.0;
        } else {
            const double s = (r - r_cut) / r_cut; // in (0,1)
            chi = 1.0 - s * s * (3.0 - 2.0 * s);  // C¹ smoothstep
        }
        w[i] = (1.0 - prm.eps) * chi;
    }
    return w;
}

double choose_epsilon(double lambda, const RadialField& u_lambda, double p,
                      const ProblemSpec& spec, const RadialGrid& grid, double r_cut) {
    double eps = 0.25 * (1.0 - max_value(u_lambda));
    for (int it = 0; it < 40; ++it) {
        RegularizationParams prm{eps, p};
        const double J_min = energy(u_lambda, lambda, prm, spec, grid);
        RadialField w = make_w_eps(prm, spec, grid, r_cut);
        if (energy(w, lambda, prm, spec, grid) < J_min) return eps;
        eps *= 0.5;
    }
    throw ConvergenceError("choose_epsilon: no admissible regularization found", 0.0, 40);
}

namespace {

// equal energy-arclength redistribution of the interior path nodes; energy
// differences are normalized by the band width so deep tail states cannot
// soak up all the resolution
void reparametrize(std::vector<RadialField>& path, const std::vector<double>& E,
                   const RadialGrid& grid) {
    const int m = static_cast<int>(path.size()) - 1;
    double e_lo = E[0], e_hi = E[0];
    for (double e : E) {
        e_lo = std::min(e_lo, e);
        e_hi = std::max(e_hi, e);
    }
    const double e_scale = std::max(e_hi - e_lo, 1e-12);
    std::vector<double> cum(m + 1, 0.0);
    for (int j = 0; j < m; ++j) {
        RadialField d(grid.n);
        for (int i = 0; i < grid.n; ++i) d[i] = path[j + 1][i] - path[j][i];
        const double du = grid.weighted_norm(d);
        const double dE = (E[j + 1] - E[j]) / e_scale;
        cum[j + 1] = cum[j] + std::sqrt(du * du + dE * dE);
    }
    if (cum[m] <= 0.0) return;
    std::vector<RadialField> fresh(path.size());
    fresh[0] = path[0];
    fresh[m] = path[m];
    for (int j = 1; j < m; ++j) {
        const double target = cum[m] * j / m;
        int k = 0;
        while (k + 1 < m && cum[k + 1] < target) ++k;
        const double span = cum[k + 1] - cum[k];
        const double t = span > 0.0 ? (target - cum[k]) / span : 0.0;
        RadialField v(grid.n);
        for (int i = 0; i < grid.n; ++i) v[i] = (1.0 - t) * path[k][i] + t * path[k + 1][i];
        fresh[j] = std::move(v);
    }
    path = std::move(fresh);
}

} // namespace

MountainPassResult mp_search(double lambda, const RadialField& u_lambda,
                             const RegularizationParams& prm, const ProblemSpec& spec,
                             const RadialGrid& grid, const PathParams& pp) {
    prm.validate(spec.N);
    if (pp.nodes < 5) throw DomainError("mp_search: need at least 5 path nodes");

    RadialField w = make_w_eps(prm, spec, grid, pp.r_cut);
    const double J_min = energy(u_lambda, lambda, prm, spec, grid);
    const double J_w = energy(w, lambda, prm, spec, grid);
    if (J_w >= J_min) {
        throw DomainError("mp_search: J(w_eps) >= J(u_lambda); decrease eps or move lambda "
                          "closer to lambda*");
    }
    // Only the energy band just below J(u_λ) matters for the pass; states
    // sinking deeper than this floor are clipped to keep the path metric
    // and the reparametrization well scaled.
    const double floor_E = J_min - std::max(1.0, std::abs(J_min));

    const int m = pp.nodes;
    std::vector<RadialField> path(m + 1);
    for (int j = 0; j <= m; ++j) {
        const double t = static_cast<double>(j) / m;
        RadialField v(grid.n);
        for (int i = 0; i < grid.n; ++i) v[i] = (1.0 - t) * u_lambda[i] + t * w[i];
        path[j] = std::move(v);
    }

    Tridiagonal lap = sector_laplacian_matrix(grid, spec, 0); // descent preconditioner
    std::vector<double> E(m + 1);
    auto refresh_energies = [&]() {
        for (int j = 0; j <= m; ++j) E[j] = energy(path[j], lambda, prm, spec, grid);
    };
    refresh_energies();

    // truncate the tail at the first node below the energy floor: everything
    // past it is downhill and irrelevant for the pass
    auto clip_tail = [&]() {
        for (int j = 1; j <= m; ++j) {
            if (E[j] < floor_E) {
                if (j == m) return;
                std::vector<RadialField> fresh(m + 1);
                for (int k = 0; k <= m; ++k) {
                    const double pos = static_cast<double>(k) * j / m;
                    const int lo = std::min(static_cast<int>(pos), j - 1);
                    const double t = pos - lo;
                    RadialField v(grid.n);
                    for (int i = 0; i < grid.n; ++i)
                        v[i] = (1.0 - t) * path[lo][i] + t * path[lo + 1][i];
                    fresh[k] = std::move(v);
                }
                path = std::move(fresh);
                refresh_energies();
                return;
            }
        }
    };

    MountainPassResult res;
    double tau = 1.0;
    double best_gnorm = std::numeric_limits<double>::infinity();
    RadialField best_point;
    int best_iter = 0;
    const double coarse_tol = std::max(pp.grad_tol, 1e-3);
    int iter = 0;
    bool localized = false;

    for (; iter < pp.max_iters; ++iter) {
        clip_tail();
        int jmax = 1;
        for (int j = 1; j < m; ++j)
            if (E[j] > E[jmax]) jmax = j;

        RadialField g = energy_gradient(path[jmax], lambda, prm, spec, grid);
        const double gnorm = grid.weighted_norm(g);
        if (gnorm < best_gnorm) {
            best_gnorm = gnorm;
            best_point = path[jmax];
            best_iter = iter;
        }
        if (gnorm <= coarse_tol || (iter - best_iter > 400 && best_gnorm < 1e3)) {
            localized = true;
            break;
        }

        // H¹-preconditioned damped descent on the max node
        RadialField dir = lap.solve(g);
        double slope = 0.0;
        for (int i = 0; i < grid.n; ++i) slope += grid.cell_vol[i] * g[i] * dir[i];
        bool moved = false;
        for (int bt = 0; bt < 60; ++bt) {
            RadialField trial(grid.n);
            for (int i = 0; i < grid.n; ++i) trial[i] = path[jmax][i] - tau * dir[i];
            const double Et = energy(trial, lambda, prm, spec, grid);
            if (std::isfinite(Et) && Et <= E[jmax] - 1e-4 * tau * slope) {
                path[jmax] = std::move(trial);
                E[jmax] = Et;
                moved = true;
                tau = std::min(tau * 1.3, 10.0);
                break;
            }
            tau *= 0.5;
            if (tau < 1e-15) break;
        }
        if (!moved) {
            throw ConvergenceError("mp_search: descent stagnated at node " + std::to_string(jmax) +
                                       " with gradient norm " + std::to_string(gnorm),
                                   gnorm, iter);
        }

        // one smoothing sweep over the neighbours of the pass node
        for (int j : {jmax - 1, jmax + 1}) {
            if (j <= 0 || j >= m) continue;
            for (int i = 0; i < grid.n; ++i) {
                const double mid = 0.5 * (path[j - 1][i] + path[j + 1][i]);
                path[j][i] += 0.3 * (mid - path[j][i]);
            }
            E[j] = energy(path[j], lambda, prm, spec, grid);
        }

        if ((iter + 1) % pp.reparam_every == 0) {
            reparametrize(path, E, grid);
            refresh_energies();
        }
    }
    if (!localized) {
        throw ConvergenceError("mp_search: pass not localized within the iteration budget",
                               best_gnorm, iter);
    }

    // Newton polish on ∇J = 0 from the localized pass state; this is what
    // actually reaches the 1e-8 gradient target.  Drifting back into the
    // minimum is rejected.
    RadialField x = best_point;
    for (int it = 0; it < 60; ++it) {
        RadialField g = energy_gradient(x, lambda, prm, spec, grid);
        const double gnorm = grid.weighted_norm(g);
        if (gnorm <= pp.grad_tol) break;
        Tridiagonal H = sector_laplacian_matrix(grid, spec, 0);
        for (int i = 0; i < grid.n; ++i) {
            H.diag[i] -= lambda * spec.profile(grid.r[i]) * g_eps_prime(x[i], prm);
        }
        RadialField rhs(grid.n);
        for (int i = 0; i < grid.n; ++i) rhs[i] = -g[i];
        RadialField step = H.solve(rhs);
        double t = 1.0;
        for (int bt = 0; bt < 40; ++bt) {
            RadialField trial(grid.n);
            for (int i = 0; i < grid.n; ++i) trial[i] = x[i] + t * step[i];
            RadialField gt = energy_gradient(trial, lambda, prm, spec, grid);
            if (grid.weighted_norm(gt) < gnorm) {
                x = std::move(trial);
                break;
            }
            t *= 0.5;
            if (bt == 39) {
                throw ConvergenceError("mp_search: gradient polish stagnated", gnorm, it);
            }
        }
    }
    {
        RadialField du(grid.n);
        for (int i = 0; i < grid.n; ++i) du[i] = x[i] - u_lambda[i];
        if (grid.weighted_norm(du) < 1e-8) {
            throw ConvergenceError("mp_search: polish collapsed onto the minimal solution", 0.0,
                                   iter);
        }
    }

    res.critical_point = x;
    res.level = energy(x, lambda, prm, spec, grid);
    res.grad_norm = grid.weighted_norm(energy_gradient(x, lambda, prm, spec, grid));
    res.iterations = iter;
    res.path_energies = E;
    const double sup = max_value(res.critical_point);
    if (sup < kSingularGuard) {
        RadialField F = residual(res.critical_point, lambda, spec, grid);
        res.residual_unreg = scaled_residual_norm(F, grid);
        res.is_solution = sup <= 1.0 - prm.eps + 1e-10 && res.residual_unreg <= 1e-6 &&
                          res.grad_norm <= pp.grad_tol;
    } else {
        res.residual_unreg = std::numeric_limits<double>::infinity();
        res.is_solution = false;
    }
    return res;
}

} // namespace mems
