#pragma once

#include <functional>
#include <string>
#include <vector>

#include "mems/limit_problem.hpp"
#include "mems/types.hpp"

namespace mems {

/// Rescalings of near-singular solutions around the maximum point,
/// classification of the blow-up regime, comparison against the limit
/// profile, and the pointwise lower-bound constant
///   (1-u(x)) >= C λ^{1/3} d(x)^{α/3} |x-x_n|^{2/3}.

enum class BlowupCase {
    case1_away_from_zero_set, // max point away from the zero set of f
    case2_slow,               // approach to the zero set slower than the natural scale
    case3_fast,               // approach at (or below) the natural scale
};

std::string to_string(BlowupCase c);

struct RescaledProfile {
    BlowupCase case_tag = BlowupCase::case1_away_from_zero_set;
    double eps_n = 0.0; // 1 - max u
    double scale = 0.0;
    std::vector<double> y;
    std::vector<double> U; // U_n(y) = (1 - u(scale·y + x_n)) / eps_n

    double y_max() const { return y.empty() ? 0.0 : y.back(); }
    /// monotone-cubic evaluation on the stored grid
    double value(double yy) const;
};

/// Rescale a radial near-singular state around its maximum (the origin).
/// α = 0: the zero set of f is empty → case 1, scale = ε^{3/2} λ^{-1/2};
/// α > 0: the max sits on the zero set → case 3 (fast),
/// scale = ε^{3/(2+α)} λ^{-1/(2+α)}.  Requires max u >= 0.9.
RescaledProfile classify_and_rescale(const RadialField& u, double lambda,
                                     const ProblemSpec& spec, const RadialGrid& grid,
                                     int n_y = 1024);

/// Formula-level classifier for off-center blow-up at a zero p_i of the
/// profile: the rate ε^{-3} λ |x_n-p_i|^{α+2} decides slow (case 2, scale
/// ε^{3/2} λ^{-1/2} |x_n-p_i|^{-α/2}) versus fast (case 3).  Takes the
/// 1D section u(x) as a callable; meant for synthetic data, since the
/// radial solver always blows up exactly at the origin.
RescaledProfile rescale_off_center(const std::function<double(double)>& u_section,
                                   double x_lo, double x_hi, double x_n, double lambda,
                                   double alpha_i, double p_i, double slow_threshold = 1e3,
                                   int n_y = 1024);

/// sup over [0, R] of |U_n - U| after interpolation to a common grid.
/// Throws DomainError (naming the attainable range) when either profile is
/// too short.
double compare_to_limit(const RescaledProfile& rescaled, const LimitProfile& limit, double R);

/// min over nodes x != x_n of (1-u(x)) λ^{-1/3} d(x)^{-α/3} |x-x_n|^{-2/3},
/// with d ≡ 1 for α = 0 and d(x) = |x| for α > 0.
double pointwise_bound_constant(const RadialField& u, double lambda, const ProblemSpec& spec,
                                const RadialGrid& grid);

/// Monotone (Fritsch-Carlson) cubic interpolant through (x_i, y_i); exposed
/// for the rescalers and tested directly.
class MonotoneCubic {
  public:
    MonotoneCubic(std::vector<double> x, std::vector<double> y);
    double operator()(double xx) const;

  private:
    std::vector<double> x_, y_, slope_;
};

} // namespace mems
