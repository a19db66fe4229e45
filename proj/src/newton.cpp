#include "mems/newton.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "mems/errors.hpp"
#include "mems/radial_operator.hpp"
#include "mems/spectrum.hpp"

namespace mems {

void NewtonParams::validate() const {
    if (tol_residual <= 0.0) throw DomainError("NewtonParams: tol_residual must be > 0");
    if (barrier_margin <= 0.0 || barrier_margin >= 1.0)
        throw DomainError("NewtonParams: barrier_margin must lie in (0,1)");
    if (max_iter < 1) throw DomainError("NewtonParams: max_iter must be >= 1");
    if (damping <= 0.0 || damping >= 1.0) throw DomainError("NewtonParams: damping must lie in (0,1)");
}

RadialField solve_at_lambda(double lambda, const RadialField& init, const ProblemSpec& spec,
                            const RadialGrid& grid, const NewtonParams& params) {
    params.validate();
    if (lambda < 0.0) throw DomainError("solve_at_lambda: lambda must be >= 0");
    RadialField u = init;
    if (static_cast<int>(u.size()) != grid.n) throw DomainError("solve_at_lambda: init size mismatch");
    if (max_value(u) > 1.0 - params.barrier_margin) {
        throw SingularStateError("solve_at_lambda: initial guess violates the barrier",
                                 argmax_node(u));
    }

    RadialField F = residual(u, lambda, spec, grid);
    double fnorm = scaled_residual_norm(F, grid);
    for (int iter = 0; iter < params.max_iter; ++iter) {
        if (fnorm <= params.tol_residual) {
            for (int i = 0; i < grid.n; ++i) {
                if (u[i] < -1e-9) {
                    throw ConvergenceError("solve_at_lambda: converged to a state with u < 0",
                                           fnorm, iter);
                }
                if (u[i] < 0.0) u[i] = 0.0; // roundoff-level negatives only
            }
            return u;
        }
        SectorOperator J = jacobian(u, lambda, spec, grid, 0);
        RadialField rhs(grid.n);
        for (int i = 0; i < grid.n; ++i) rhs[i] = -F[i];
        RadialField step = J.matrix.solve(rhs);

        double t = 1.0;
        bool accepted = false;
        for (int bt = 0; bt < 50; ++bt) {
            RadialField trial(grid.n);
            for (int i = 0; i < grid.n; ++i) trial[i] = u[i] + t * step[i];
            if (max_value(trial) > 1.0 - params.barrier_margin) {
                t *= params.damping;
                continue;
            }
            RadialField Ftrial = residual(trial, lambda, spec, grid);
            const double ftrial = scaled_residual_norm(Ftrial, grid);
            if (ftrial <= (1.0 - 1e-4 * t) * fnorm || ftrial <= params.tol_residual) {
                u = std::move(trial);
                F = std::move(Ftrial);
                fnorm = ftrial;
                accepted = true;
                break;
            }
            t *= params.damping;
        }
        if (!accepted) {
            throw ConvergenceError("solve_at_lambda: line search stagnated at lambda = " +
                                       std::to_string(lambda),
                                   fnorm, iter);
        }
    }
    if (fnorm <= params.tol_residual) return u;
    throw ConvergenceError("solve_at_lambda: no convergence within max_iter at lambda = " +
                               std::to_string(lambda) +
                               " (expected when lambda exceeds lambda*)",
                           fnorm, params.max_iter);
}

std::pair<double, RadialField> solve_at_origin_value(double u0_target, double lambda_guess,
                                                     const RadialField& init,
                                                     const ProblemSpec& spec,
                                                     const RadialGrid& grid,
                                                     const NewtonParams& params) {
    params.validate();
    if (u0_target <= 0.0 || u0_target >= 1.0)
        throw DomainError("solve_at_origin_value: target must lie in (0,1)");
    RadialField u = init;
    double lambda = lambda_guess;
    double fnorm = 0.0;
    for (int iter = 0; iter < params.max_iter; ++iter) {
        RadialField F = residual(u, lambda, spec, grid);
        fnorm = scaled_residual_norm(F, grid);
        if (fnorm <= params.tol_residual && std::abs(u[0] - u0_target) <= 1e-12) {
            return {lambda, u};
        }
        SectorOperator J = jacobian(u, lambda, spec, grid, 0);
        RadialField rhs(grid.n), flam(grid.n);
        for (int i = 0; i < grid.n; ++i) {
            rhs[i] = -F[i];
            const double om = 1.0 - u[i];
            flam[i] = -spec.profile(grid.r[i]) / (om * om);
        }
        RadialField z1 = J.matrix.solve(rhs);
        RadialField z2 = J.matrix.solve(flam);
        if (z2[0] == 0.0) {
            throw ConvergenceError("solve_at_origin_value: degenerate bordered system", fnorm,
                                   iter);
        }
        const double dlam = (z1[0] - (u0_target - u[0])) / z2[0];
        double tau = 1.0;
        bool moved = false;
        for (int bt = 0; bt < 50; ++bt) {
            RadialField trial(grid.n);
            for (int i = 0; i < grid.n; ++i) trial[i] = u[i] + tau * (z1[i] - dlam * z2[i]);
            const double lam_trial = lambda + tau * dlam;
            if (lam_trial >= 0.0 && max_value(trial) <= 1.0 - params.barrier_margin) {
                u = std::move(trial);
                lambda = lam_trial;
                moved = true;
                break;
            }
            tau *= params.damping;
        }
        if (!moved) {
            throw ConvergenceError("solve_at_origin_value: step rejected by the barrier", fnorm,
                                   iter);
        }
    }
    throw ConvergenceError("solve_at_origin_value: no convergence within max_iter", fnorm,
                           params.max_iter);
}

std::pair<double, RadialField> solve_at_sup_target(double sup_target, const ProblemSpec& spec,
                                                   const RadialGrid& grid,
                                                   const NewtonParams& params) {
    if (sup_target <= 0.0 || sup_target >= 1.0)
        throw DomainError("solve_at_sup_target: target must lie in (0,1)");
    // λ-ramp while the branch is mild
    double lambda = 0.0;
    RadialField u(grid.n, 0.0);
    double step = 0.25;
    const double handoff = std::min(0.5, sup_target);
    while (max_value(u) < handoff) {
        if (step < 1e-6) break;
        try {
            RadialField next = solve_at_lambda(lambda + step, u, spec, grid, params);
            if (max_value(next) > handoff + 0.2) {
                step *= 0.5;
                continue;
            }
            u = std::move(next);
            lambda += step;
        } catch (const std::runtime_error&) {
            step *= 0.5;
        }
    }
    // origin-value marching up to the target
    double u0 = std::max(u[0], 1e-3);
    while (u0 < sup_target) {
        u0 = std::min(sup_target, 1.0 - 0.7 * (1.0 - u0));
        auto [lam_next, u_next] = solve_at_origin_value(u0, lambda, u, spec, grid, params);
        lambda = lam_next;
        u = std::move(u_next);
    }
    return {lambda, std::move(u)};
}

Branch minimal_branch(const ProblemSpec& spec, const RadialGrid& grid, double lambda_step,
                      const NewtonParams& params) {
    params.validate();
    if (lambda_step <= 0.0) throw DomainError("minimal_branch: lambda_step must be > 0");

    Branch branch;
    double lambda = 0.0;
    RadialField u(grid.n, 0.0);

    auto record = [&](double lam, const RadialField& field) {
        SpectralResult sp = morse_data(field, lam, spec, grid);
        BranchPoint p;
        p.lambda = lam;
        p.u = field;
        p.u0 = field[0];
        p.sup_norm = max_value(field);
        p.mu1 = sp.mu1();
        p.mu2 = sp.mu2();
        p.mu2_sector = sp.mu2_sector();
        p.morse_index = sp.morse_index;
        p.on_minimal = true;
        if (!branch.points.empty()) {
            const BranchPoint& q = branch.points.back();
            double du2 = 0.0;
            RadialField diff(grid.n);
            for (int i = 0; i < grid.n; ++i) diff[i] = field[i] - q.u[i];
            du2 = grid.weighted_dot(diff, diff);
            p.s = q.s + std::sqrt(du2 + (lam - q.lambda) * (lam - q.lambda));
        }
        branch.points.push_back(std::move(p));
        return sp.mu1();
    };

    record(0.0, u);

    double step = lambda_step;
    while (step >= 1e-8) {
        const double lam_try = lambda + step;
        bool ok = false;
        RadialField next;
        try {
            next = solve_at_lambda(lam_try, u, spec, grid, params);
            ok = true;
        } catch (const ConvergenceError&) {
        } catch (const SingularStateError&) {
        }
        if (ok) {
            const double mu1 = record(lam_try, next);
            if (mu1 <= 0.0) {
                // stepped past the fold: discard and tighten
                branch.points.pop_back();
                step *= 0.5;
                continue;
            }
            lambda = lam_try;
            u = std::move(next);
            if (max_value(u) > 1.0 - 10.0 * params.barrier_margin) {
                branch.termination = Termination::barrier_reached;
                branch.lambda_star_est = branch.sup_lambda();
                return branch;
            }
        } else {
            step *= 0.5;
        }
    }
    branch.termination = Termination::step_underflow;
    branch.lambda_star_est = branch.sup_lambda();
    branch.lambda_star_is_lower_bound = true;
    branch.diagnostics = "natural continuation stopped: lambda step underflowed at lambda = " +
                         std::to_string(lambda);
    return branch;
}

} // namespace mems
