#include "mems/continuation.hpp"

#include <cmath>
#include <functional>
#include <string>
#include <utility>

#include "mems/errors.hpp"
#include "mems/radial_operator.hpp"
#include "mems/spectrum.hpp"

namespace mems {

void ContinuationParams::validate() const {
    newton.validate();
    if (ds0 <= 0.0 || ds_min <= 0.0 || ds_max < ds0)
        throw DomainError("ContinuationParams: need 0 < ds_min, 0 < ds0 <= ds_max");
    if (grow <= 1.0 || shrink <= 0.0 || shrink >= 1.0)
        throw DomainError("ContinuationParams: grow must exceed 1 and shrink lie in (0,1)");
    if (lambda_scale <= 0.0 || theta_u <= 0.0 || u0_weight < 0.0)
        throw DomainError("ContinuationParams: bad arclength metric weights");
    if (l_max < 1 || k_max < 2) throw DomainError("ContinuationParams: need l_max >= 1, k_max >= 2");
}

namespace {

struct CurvePoint {
    RadialField u;
    double lambda = 0.0;
};

// Predictor-corrector machinery shared by the stepper and the event
// refiners.  The corrector solves {F(u,λ)=0, <t, X - X_p>_metric = 0} by
// Newton with block elimination against the tridiagonal Jacobian.
class Stepper {
  public:
    Stepper(const ProblemSpec& spec, const RadialGrid& grid, const ContinuationParams& prm)
        : spec_(spec), grid_(grid), prm_(prm) {}

    const ContinuationParams& params() const { return prm_; }

    double metric_dist(const CurvePoint& a, const CurvePoint& b) const {
        double du2 = 0.0;
        for (int i = 0; i < grid_.n; ++i) {
            const double d = a.u[i] - b.u[i];
            du2 += grid_.cell_vol[i] * d * d;
        }
        const double d0 = a.u[0] - b.u[0];
        const double dl = a.lambda - b.lambda;
        return std::sqrt(prm_.theta_u * du2 + prm_.u0_weight * d0 * d0 +
                         prm_.lambda_scale * prm_.lambda_scale * dl * dl);
    }

    // Direction (not normalized) from a to b in state space.
    CurvePoint direction(const CurvePoint& a, const CurvePoint& b) const {
        CurvePoint t;
        t.u.resize(grid_.n);
        for (int i = 0; i < grid_.n; ++i) t.u[i] = b.u[i] - a.u[i];
        t.lambda = b.lambda - a.lambda;
        return t;
    }

    // Metric inner product of a direction with (X - X_p).
    double metric_dot(const CurvePoint& t, const CurvePoint& x, const CurvePoint& xp) const {
        double s = 0.0;
        for (int i = 0; i < grid_.n; ++i)
            s += prm_.theta_u * grid_.cell_vol[i] * t.u[i] * (x.u[i] - xp.u[i]);
        s += prm_.u0_weight * t.u[0] * (x.u[0] - xp.u[0]);
        s += prm_.lambda_scale * prm_.lambda_scale * t.lambda * (x.lambda - xp.lambda);
        return s;
    }

    /// One predictor-corrector step of metric length ds from `from` along
    /// direction t (normalized by the caller).  Returns the corrected point
    /// and the corrector iteration count, or false on failure.
    bool step(const CurvePoint& from, const CurvePoint& t, double ds, CurvePoint& out,
              int& iters_used) const {
        CurvePoint xp;
        xp.u.resize(grid_.n);
        for (int i = 0; i < grid_.n; ++i) xp.u[i] = from.u[i] + ds * t.u[i];
        xp.lambda = from.lambda + ds * t.lambda;
        if (xp.lambda < 0.0) return false;
        if (max_value(xp.u) > 1.0 - prm_.newton.barrier_margin) return false;

        CurvePoint x = xp;
        try {
            for (int iter = 0; iter <= prm_.max_corrector_iter; ++iter) {
                RadialField F = residual(x.u, x.lambda, spec_, grid_);
                const double g = metric_dot(t, x, xp);
                const double fnorm = scaled_residual_norm(F, grid_);
                if (fnorm <= prm_.corrector_tol && std::abs(g) <= prm_.corrector_tol * (1.0 + ds)) {
                    out = x;
                    iters_used = iter;
                    return true;
                }
                if (iter == prm_.max_corrector_iter) return false;
                SectorOperator J = jacobian(x.u, x.lambda, spec_, grid_, 0);
                RadialField rhs(grid_.n), flam(grid_.n);
                for (int i = 0; i < grid_.n; ++i) {
                    rhs[i] = -F[i];
                    const double om = 1.0 - x.u[i];
                    flam[i] = -spec_.profile(grid_.r[i]) / (om * om);
                }
                RadialField z1 = J.matrix.solve(rhs);
                RadialField z2 = J.matrix.solve(flam);
                // constraint gradient: c_u·δu + c_λ·δλ = -g
                double cz1 = 0.0, cz2 = 0.0;
                for (int i = 0; i < grid_.n; ++i) {
                    const double cu = prm_.theta_u * grid_.cell_vol[i] * t.u[i] +
                                      (i == 0 ? prm_.u0_weight * t.u[0] : 0.0);
                    cz1 += cu * z1[i];
                    cz2 += cu * z2[i];
                }
                const double clam = prm_.lambda_scale * prm_.lambda_scale * t.lambda;
                const double denom = clam - cz2;
                if (denom == 0.0) return false;
                const double dlam = -(g + cz1) / denom;

                // damped update under the barrier
                double tau = 1.0;
                bool moved = false;
                for (int bt = 0; bt < 30; ++bt) {
                    CurvePoint trial;
                    trial.u.resize(grid_.n);
                    for (int i = 0; i < grid_.n; ++i)
                        trial.u[i] = x.u[i] + tau * (z1[i] - dlam * z2[i]);
                    trial.lambda = x.lambda + tau * dlam;
                    if (trial.lambda >= 0.0 &&
                        max_value(trial.u) <= 1.0 - prm_.newton.barrier_margin) {
                        x = std::move(trial);
                        moved = true;
                        break;
                    }
                    tau *= 0.5;
                }
                if (!moved) return false;
            }
        } catch (const SingularStateError&) {
            return false;
        } catch (const std::runtime_error&) {
            return false;
        }
        return false;
    }

    /// Midpoint of the curve segment between a and b (predictor at half the
    /// secant, corrected back to the curve).
    bool midpoint(const CurvePoint& a, const CurvePoint& b, CurvePoint& out) const {
        const double d = metric_dist(a, b);
        if (d == 0.0) return false;
        CurvePoint t = direction(a, b);
        const double inv = 1.0 / d;
        for (double& v : t.u) v *= inv;
        t.lambda *= inv;
        int iters = 0;
        if (step(a, t, 0.5 * d, out, iters)) return true;
        return step(a, t, 0.25 * d, out, iters);
    }

  private:
    const ProblemSpec& spec_;
    const RadialGrid& grid_;
    const ContinuationParams& prm_;
};

// Bisection along the curve for a sign change of `value` between a and b.
struct EventPoint {
    CurvePoint x;
    double value = 0.0;
    // λ of the vanishing point.  At a fold λ is stationary in the crossing
    // scalar, so the bracket endpoints extrapolate it quadratically; for a
    // transversal crossing the best endpoint is used directly.
    double lambda_at_zero = 0.0;
};

EventPoint refine_sign_change(const Stepper& walk, CurvePoint a, double va, CurvePoint b,
                              double vb, const std::function<double(const CurvePoint&)>& value,
                              double dlam_tol, bool stationary_lambda) {
    // Bisection depth is bounded by the tamer endpoint's starting magnitude;
    // near singular branches the far side can be enormous and would otherwise
    // stall the tolerance.
    const double value_stop = 1e-4 * std::max(1.0, std::min(std::abs(va), std::abs(vb)));
    for (int it = 0; it < 64; ++it) {
        if (it > 0 && std::abs(a.lambda - b.lambda) <= dlam_tol &&
            std::min(std::abs(va), std::abs(vb)) <= value_stop)
            break;
        CurvePoint m;
        if (!walk.midpoint(a, b, m)) break;
        if (walk.metric_dist(a, m) < 1e-14 || walk.metric_dist(b, m) < 1e-14) break;
        const double vm = value(m);
        if ((vm < 0.0) == (va < 0.0)) {
            a = std::move(m);
            va = vm;
        } else {
            b = std::move(m);
            vb = vm;
        }
    }
    EventPoint out;
    const double denom = vb * vb - va * va;
    if (stationary_lambda && std::abs(denom) > 1e-30) {
        // λ(v) = λ_fold - c v² through both endpoints
        out.lambda_at_zero = (a.lambda * vb * vb - b.lambda * va * va) / denom;
    } else {
        out.lambda_at_zero = std::abs(va) <= std::abs(vb) ? a.lambda : b.lambda;
    }
    if (std::abs(va) <= std::abs(vb)) {
        out.x = std::move(a);
        out.value = va;
    } else {
        out.x = std::move(b);
        out.value = vb;
    }
    return out;
}

} // namespace

Branch trace_branch(const ProblemSpec& spec, const RadialGrid& grid,
                    const ContinuationParams& prm) {
    prm.validate();
    spec.validate();
    Branch branch;
    Stepper walk(spec, grid, prm);

    // events are refined with a tighter, more patient corrector: the
    // Jacobian is nearly singular there and the plain stepping budget is
    // not enough
    ContinuationParams refine_prm = prm;
    refine_prm.corrector_tol = std::min(prm.corrector_tol, 1e-11);
    refine_prm.max_corrector_iter = 30;
    Stepper refine_walk(spec, grid, refine_prm);

    auto spectrum_at = [&](const CurvePoint& x) {
        return morse_data(x.u, x.lambda, spec, grid, prm.l_max, prm.k_max);
    };
    auto push_point = [&](const CurvePoint& x, int fold_count) {
        SpectralResult sp = spectrum_at(x);
        BranchPoint p;
        p.lambda = x.lambda;
        p.u = x.u;
        p.u0 = x.u[0];
        p.sup_norm = max_value(x.u);
        p.mu1 = sp.mu1();
        p.mu2 = sp.mu2();
        p.mu2_sector = sp.mu2_sector();
        p.morse_index = sp.morse_index;
        p.on_minimal = fold_count == 0;
        p.post_fold_count = fold_count;
        if (!branch.points.empty()) {
            CurvePoint prev{branch.points.back().u, branch.points.back().lambda};
            p.s = branch.points.back().s + walk.metric_dist(prev, x);
        }
        branch.points.push_back(std::move(p));
    };

    // radial eigenvalue of given rank, the scalar that vanishes at a fold
    auto sector0_eig = [&](const CurvePoint& x, int rank) {
        return sector_eigenvalues(x.u, x.lambda, spec, grid, 0, rank)[rank - 1];
    };
    auto merged_mu2 = [&](const CurvePoint& x) { return spectrum_at(x).mu2(); };

    // --- starting pair -------------------------------------------------
    CurvePoint x0{RadialField(grid.n, 0.0), 0.0};
    push_point(x0, 0);

    double lam1 = prm.ds0 / prm.lambda_scale;
    CurvePoint x1;
    for (int attempt = 0;; ++attempt) {
        try {
            x1.u = solve_at_lambda(lam1, x0.u, spec, grid, prm.newton);
            x1.lambda = lam1;
            break;
        } catch (const ConvergenceError&) {
            lam1 *= 0.5;
            if (attempt > 40) throw;
        }
    }
    push_point(x1, 0);

    // --- fold bookkeeping ----------------------------------------------
    int fold_count = 0;
    int dir = x1.lambda > x0.lambda ? 1 : -1;
    double lam_extreme = std::max(x0.lambda, x1.lambda);
    size_t extreme_idx = branch.points.size() - 1;

    auto bracket_window = [&](size_t center) {
        // near-singular branches are λ-flat across several samples, so the
        // eigenvalue crossing may sit a couple of points off the recorded
        // λ extremum
        size_t lo = center >= 3 ? center - 3 : 0;
        size_t hi = std::min(center + 3, branch.points.size() - 1);
        return std::pair<size_t, size_t>(lo, hi);
    };

    auto refine_fold = [&](size_t center, int rank) -> Fold {
        auto [lo, hi] = bracket_window(center);
        CurvePoint A{branch.points[lo].u, branch.points[lo].lambda};
        double vA = sector0_eig(A, rank);
        Fold f;
        f.index = rank;
        for (size_t j = lo + 1; j <= hi; ++j) {
            CurvePoint B{branch.points[j].u, branch.points[j].lambda};
            const double vB = sector0_eig(B, rank);
            if ((vA < 0.0) != (vB < 0.0)) {
                EventPoint ev = refine_sign_change(
                    refine_walk, A, vA, B, vB,
                    [&](const CurvePoint& x) { return sector0_eig(x, rank); },
                    prm.fold_refine_dlambda, /*stationary_lambda=*/true);
                f.lambda = ev.lambda_at_zero;
                f.u0 = ev.x.u[0];
                f.mu_crossing = ev.value;
                CurvePoint base{branch.points[lo].u, branch.points[lo].lambda};
                f.s = branch.points[lo].s + walk.metric_dist(base, ev.x);
                return f;
            }
            A = std::move(B);
            vA = vB;
        }
        // no sign change resolved: report the recorded extremum
        f.lambda = branch.points[center].lambda;
        f.u0 = branch.points[center].u0;
        f.s = branch.points[center].s;
        f.mu_crossing =
            sector0_eig(CurvePoint{branch.points[center].u, branch.points[center].lambda}, rank);
        return f;
    };

    auto register_fold = [&](const Fold& f) {
        branch.folds.push_back(f);
        for (BranchPoint& p : branch.points) {
            if (p.s > f.s) {
                p.on_minimal = false;
                p.post_fold_count = std::max(p.post_fold_count, f.index);
            }
        }
    };

    // --- main stepping loop ----------------------------------------------
    double ds = prm.ds0;
    CurvePoint prev = x0, cur = x1;
    for (int step_no = 0; step_no < prm.max_steps; ++step_no) {
        const BranchPoint& curbp = branch.points.back();
        if (curbp.sup_norm > 1.0 - 10.0 * prm.newton.barrier_margin) {
            branch.termination = Termination::barrier_reached;
            break;
        }

        CurvePoint t = walk.direction(prev, cur);
        const double dist = walk.metric_dist(prev, cur);
        if (dist == 0.0) {
            branch.termination = Termination::step_underflow;
            branch.diagnostics = "consecutive points coalesced";
            break;
        }
        for (double& v : t.u) v /= dist;
        t.lambda /= dist;

        CurvePoint next;
        int iters = 0;
        if (!walk.step(cur, t, ds, next, iters)) {
            ds *= prm.shrink;
            if (ds < prm.ds_min) {
                branch.termination = Termination::step_underflow;
                branch.diagnostics = "corrector failed below the minimal step at lambda = " +
                                     std::to_string(cur.lambda);
                break;
            }
            continue;
        }

        push_point(next, fold_count);
        const BranchPoint& newbp = branch.points.back();
        const BranchPoint& prebp = branch.points[branch.points.size() - 2];

        // hysteresis-confirmed turning points
        bool fold_confirmed = false;
        const double hyst = prm.fold_hysteresis * std::max(1.0, std::abs(lam_extreme));
        if (dir > 0) {
            if (newbp.lambda >= lam_extreme) {
                lam_extreme = newbp.lambda;
                extreme_idx = branch.points.size() - 1;
            } else if (newbp.lambda < lam_extreme - hyst) {
                fold_confirmed = true;
            }
        } else {
            if (newbp.lambda <= lam_extreme) {
                lam_extreme = newbp.lambda;
                extreme_idx = branch.points.size() - 1;
            } else if (newbp.lambda > lam_extreme + hyst) {
                fold_confirmed = true;
            }
        }

        if (fold_confirmed) {
            ++fold_count;
            Fold f = refine_fold(extreme_idx, fold_count);
            register_fold(f);
            dir = -dir;
            lam_extreme = newbp.lambda;
            extreme_idx = branch.points.size() - 1;

            if (fold_count >= 2) {
                branch.termination = Termination::second_fold;
                branch.lambda_2_star_est = f.lambda;
                branch.lambda_2_star_mu2 = std::abs(f.mu_crossing);
                // μ₂ vanishes at a radial second fold; flag the coincidence
                branch.lambda_2_star_ambiguous =
                    (prebp.mu2 > 0.0) != (newbp.mu2 > 0.0) || std::abs(f.mu_crossing) < prm.fold_tol;
                break;
            }
        }

        // μ₂ zero crossing on the unstable segment
        if (fold_count >= 1 && prebp.mu1 < 0.0 && prebp.mu2 > 0.0 && newbp.mu2 <= 0.0) {
            CurvePoint A{prebp.u, prebp.lambda};
            CurvePoint B{newbp.u, newbp.lambda};
            // If the crossing mode is radial (sector 0), μ₂ = 0 coincides
            // with a turning point of the curve: report the fold, per the
            // tie-breaking rule, and keep the ambiguity visible.
            const bool radial_crossing = newbp.mu2_sector == 0;
            EventPoint ev = refine_sign_change(refine_walk, A, prebp.mu2, B, newbp.mu2,
                                               merged_mu2, prm.fold_refine_dlambda,
                                               /*stationary_lambda=*/radial_crossing);
            if (radial_crossing) {
                ++fold_count;
                Fold f;
                f.index = fold_count;
                f.lambda = ev.lambda_at_zero;
                f.u0 = ev.x.u[0];
                f.mu_crossing = ev.value;
                f.s = prebp.s + walk.metric_dist(A, ev.x);
                register_fold(f);
                branch.termination = Termination::second_fold;
                branch.lambda_2_star_est = f.lambda;
                branch.lambda_2_star_mu2 = std::abs(ev.value);
                branch.lambda_2_star_ambiguous = true;
            } else {
                branch.termination = Termination::mu2_crossed_zero;
                branch.lambda_2_star_est = ev.lambda_at_zero;
                branch.lambda_2_star_mu2 = std::abs(ev.value);
            }
            break;
        }

        prev = std::move(cur);
        cur = std::move(next);
        if (iters <= 3) ds = std::min(ds * prm.grow, prm.ds_max);

        if (step_no == prm.max_steps - 1) {
            branch.termination = Termination::step_underflow;
            branch.diagnostics = "step budget exhausted";
        }
    }

    branch.lambda_star_est = lambda_star(branch);
    branch.lambda_star_is_lower_bound =
        branch.folds.empty() && branch.termination == Termination::step_underflow;
    return branch;
}

std::vector<int> detect_fold_candidates(const Branch& branch, double hysteresis) {
    std::vector<int> out;
    const auto& pts = branch.points;
    if (pts.size() < 3) return out;
    int dir = 0;
    double extreme = pts[0].lambda;
    int extreme_idx = 0;
    for (size_t i = 1; i < pts.size(); ++i) {
        const double dl = pts[i].lambda - pts[i - 1].lambda;
        if (dir == 0) {
            if (dl != 0.0) dir = dl > 0 ? 1 : -1;
            extreme = pts[i].lambda;
            extreme_idx = static_cast<int>(i);
            continue;
        }
        const double hyst = hysteresis * std::max(1.0, std::abs(extreme));
        if (dir > 0) {
            if (pts[i].lambda >= extreme) {
                extreme = pts[i].lambda;
                extreme_idx = static_cast<int>(i);
            } else if (pts[i].lambda < extreme - hyst) {
                out.push_back(extreme_idx);
                dir = -1;
                extreme = pts[i].lambda;
                extreme_idx = static_cast<int>(i);
            }
        } else {
            if (pts[i].lambda <= extreme) {
                extreme = pts[i].lambda;
                extreme_idx = static_cast<int>(i);
            } else if (pts[i].lambda > extreme + hyst) {
                out.push_back(extreme_idx);
                dir = 1;
                extreme = pts[i].lambda;
                extreme_idx = static_cast<int>(i);
            }
        }
    }
    return out;
}

double lambda_star(const Branch& branch) {
    if (!branch.folds.empty()) return branch.folds.front().lambda;
    return branch.sup_lambda();
}

std::optional<double> lambda_2_star(const Branch& branch) {
    return branch.lambda_2_star_est;
}

} // namespace mems
