#include <doctest.h>

#include <cmath>

#include "mems/continuation.hpp"
#include "mems/radial_operator.hpp"

using namespace mems;

namespace {
Branch traced_n2() {
    ProblemSpec spec;
    spec.N = 2;
    RadialGrid grid = build_grid(300, spec);
    ContinuationParams prm;
    return trace_branch(spec, grid, prm);
}
} // namespace

TEST_CASE("synthetic parabola branch has a single fold at its vertex") {
    Branch b;
    for (int k = -10; k <= 10; ++k) {
        BranchPoint p;
        p.s = 0.1 * k + 1.0;
        p.lambda = 1.0 - (0.1 * k) * (0.1 * k);
        b.points.push_back(p);
    }
    auto folds = detect_fold_candidates(b);
    REQUIRE(folds.size() == 1);
    CHECK(b.points[folds[0]].lambda == doctest::Approx(1.0));
}

TEST_CASE("N=2 trace: two folds, eigenvalue structure, second bifurcation point") {
    Branch b = traced_n2();
    REQUIRE(b.points.size() > 10);
    REQUIRE(b.folds.size() >= 2);
    CHECK(b.termination == Termination::second_fold);

    const Fold& f1 = b.folds[0];
    const Fold& f2 = b.folds[1];
    CHECK(f1.s < f2.s);
    CHECK(f1.lambda == doctest::Approx(0.78922).epsilon(5e-4));
    CHECK(f2.lambda == doctest::Approx(0.41539).epsilon(5e-3));
    CHECK(f2.lambda < f1.lambda);
    CHECK(std::abs(f1.mu_crossing) < 1e-3);
    CHECK(std::abs(f2.mu_crossing) < 1e-3);
    CHECK(lambda_star(b) == doctest::Approx(f1.lambda));
    REQUIRE(b.lambda_2_star_est.has_value());
    CHECK(*b.lambda_2_star_est == doctest::Approx(f2.lambda).epsilon(1e-6));
    CHECK(*b.lambda_2_star_est > 0.0);
    CHECK(*b.lambda_2_star_est < lambda_star(b));

    // first accepted point behaves like the linearization at zero
    CHECK(b.points[1].mu1 == doctest::Approx(5.7832).epsilon(0.05));

    for (const BranchPoint& p : b.points) {
        CHECK(p.sup_norm < 1.0);
        CHECK(p.mu1 <= p.mu2);
        if (p.on_minimal) {
            CHECK(p.mu1 > -1e-6);
            CHECK(p.morse_index == 0);
        }
        if (p.post_fold_count == 1 && p.s < f2.s - 1e-9) {
            CHECK(p.mu1 < 0.0);
            CHECK(p.mu2 > 0.0);
            CHECK(p.morse_index == 1);
        }
    }

    // mu1 changes sign across the first fold
    bool before_pos = false, after_neg = false;
    for (const BranchPoint& p : b.points) {
        if (p.s < f1.s && p.mu1 > 0.0) before_pos = true;
        if (p.s > f1.s && p.mu1 < 0.0) after_neg = true;
    }
    CHECK(before_pos);
    CHECK(after_neg);

    // between folds the sign of dlambda is constant
    int sign = 0;
    for (size_t i = 1; i < b.points.size(); ++i) {
        const BranchPoint& p = b.points[i];
        const BranchPoint& q = b.points[i - 1];
        if (q.s < f1.s && p.s < f1.s) {
            CHECK(p.lambda > q.lambda);
        } else if (q.s > f1.s && p.s < f2.s) {
            if (sign == 0) sign = p.lambda < q.lambda ? -1 : 1;
            CHECK((p.lambda - q.lambda) * sign >= 0.0);
        }
    }
    CHECK(sign == -1);
}

TEST_CASE("N=8 trace reaches the barrier with sup lambda near 40/9") {
    ProblemSpec spec;
    spec.N = 8;
    RadialGrid grid = build_grid(500, spec);
    ContinuationParams prm;
    prm.newton.barrier_margin = 1e-4;
    prm.ds_max = 0.25;
    Branch b = trace_branch(spec, grid, prm);
    CHECK(b.termination == Termination::barrier_reached);
    CHECK(b.sup_lambda() == doctest::Approx(40.0 / 9.0).epsilon(1e-4));
    CHECK(b.points.back().sup_norm > 1.0 - 10.0 * prm.newton.barrier_margin);
    // sup_norm grows monotonically along this diagram
    for (size_t i = 1; i < b.points.size(); ++i) {
        CHECK(b.points[i].sup_norm >= b.points[i - 1].sup_norm - 1e-12);
    }
    CHECK_FALSE(b.lambda_2_star_est.has_value());
}

TEST_CASE("lambda* and lambda2* stabilize under grid refinement") {
    ProblemSpec spec;
    spec.N = 3;
    ContinuationParams prm;
    double ls[2], l2[2];
    int idx = 0;
    for (int n : {200, 400}) {
        RadialGrid grid = build_grid(n, spec);
        Branch b = trace_branch(spec, grid, prm);
        REQUIRE(b.lambda_2_star_est.has_value());
        ls[idx] = lambda_star(b);
        l2[idx] = *b.lambda_2_star_est;
        ++idx;
    }
    CHECK(std::abs(ls[0] - ls[1]) / ls[1] < 5e-4);
    CHECK(std::abs(l2[0] - l2[1]) / l2[1] < 5e-4);
    // frozen fine-grid reference digits
    CHECK(ls[1] == doctest::Approx(1.29879).epsilon(5e-4));
    CHECK(l2[1] == doctest::Approx(1.09801).epsilon(5e-4));
}

TEST_CASE("N=1 interval problem: pull-in near 0.35, no second bifurcation") {
    // the 1D diagram with f = 1 folds once and continues down to small
    // lambda with u(0) -> 1; the second branch keeps Morse index 1
    ProblemSpec spec;
    spec.N = 1;
    RadialGrid grid = build_grid(200, spec);
    ContinuationParams prm;
    prm.newton.barrier_margin = 1e-5;
    Branch b = trace_branch(spec, grid, prm);
    CHECK(b.termination == Termination::barrier_reached);
    REQUIRE(b.folds.size() == 1);
    CHECK(b.folds[0].lambda == doctest::Approx(0.35).epsilon(2e-3));
    CHECK_FALSE(b.lambda_2_star_est.has_value());
    for (const BranchPoint& p : b.points) {
        if (!p.on_minimal && p.sup_norm < 0.99) CHECK(p.morse_index == 1);
    }
}

TEST_CASE("fold hysteresis ignores corrector-level noise") {
    Branch b;
    for (int k = 0; k <= 20; ++k) {
        BranchPoint p;
        p.s = 0.1 * k;
        p.lambda = 0.1 * k + ((k % 2 == 0) ? 1e-12 : -1e-12);
        b.points.push_back(p);
    }
    CHECK(detect_fold_candidates(b, 1e-7).empty());
}
