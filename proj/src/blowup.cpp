#include "mems/blowup.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mems/errors.hpp"

namespace mems {

std::string to_string(BlowupCase c) {
    switch (c) {
        case BlowupCase::case1_away_from_zero_set: return "case1_away_from_zero_set";
        case BlowupCase::case2_slow: return "case2_slow";
        case BlowupCase::case3_fast: return "case3_fast";
    }
    return "unknown";
}

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
    const size_t n = x_.size();
    if (n < 2 || y_.size() != n) throw DomainError("MonotoneCubic: need >= 2 matched samples");
    std::vector<double> d(n - 1);
    for (size_t i = 0; i + 1 < n; ++i) {
        const double h = x_[i + 1] - x_[i];
        if (h <= 0.0) throw DomainError("MonotoneCubic: abscissae must increase");
        d[i] = (y_[i + 1] - y_[i]) / h;
    }
    slope_.assign(n, 0.0);
    slope_[0] = d[0];
    slope_[n - 1] = d[n - 2];
    for (size_t i = 1; i + 1 < n; ++i) {
        slope_[i] = (d[i - 1] * d[i] > 0.0) ? 0.5 * (d[i - 1] + d[i]) : 0.0;
    }
    // Fritsch-Carlson limiter keeps the interpolant monotone on each cell
    for (size_t i = 0; i + 1 < n; ++i) {
        if (d[i] == 0.0) {
            slope_[i] = slope_[i + 1] = 0.0;
            continue;
        }
        const double a = slope_[i] / d[i], b = slope_[i + 1] / d[i];
        const double s = a * a + b * b;
        if (s > 9.0) {
            const double t = 3.0 / std::sqrt(s);
            slope_[i] = t * a * d[i];
            slope_[i + 1] = t * b * d[i];
        }
    }
}

double MonotoneCubic::operator()(double xx) const {
    if (xx <= x_.front()) return y_.front();
    if (xx >= x_.back()) return y_.back();
    const auto it = std::upper_bound(x_.begin(), x_.end(), xx);
    const size_t j = static_cast<size_t>(it - x_.begin());
    const double h = x_[j] - x_[j - 1];
    const double t = (xx - x_[j - 1]) / h;
    const double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
    const double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
    return h00 * y_[j - 1] + h10 * h * slope_[j - 1] + h01 * y_[j] + h11 * h * slope_[j];
}

double RescaledProfile::value(double yy) const {
    MonotoneCubic interp(y, U);
    return interp(yy);
}

namespace {

// y grid covering the representable range: uniform over the core [0, 20]
// (where comparisons with the limit profile happen), geometric beyond.
std::vector<double> rescaled_y_grid(double y_hi, int n_y) {
    std::vector<double> y;
    y.reserve(n_y + 2);
    const double y_core = std::min(y_hi, 20.0);
    const int n_core = (y_hi <= 20.0) ? n_y : n_y / 2;
    for (int j = 0; j <= n_core; ++j) y.push_back(y_core * j / n_core);
    if (y_hi > y_core) {
        const int n_tail = n_y - n_core;
        const double ratio = y_hi / y_core;
        for (int j = 1; j <= n_tail; ++j)
            y.push_back(y_core * std::pow(ratio, static_cast<double>(j) / n_tail));
    }
    return y;
}

RescaledProfile rescale_section(const std::function<double(double)>& u_of_x, double x_hi,
                                double x_n, double eps, double scale, BlowupCase tag, int n_y) {
    RescaledProfile out;
    out.case_tag = tag;
    out.eps_n = eps;
    out.scale = scale;
    const double y_hi = (x_hi - x_n) / scale;
    out.y = rescaled_y_grid(y_hi, n_y);
    out.U.resize(out.y.size());
    for (size_t j = 0; j < out.y.size(); ++j) {
        out.U[j] = (1.0 - u_of_x(x_n + scale * out.y[j])) / eps;
    }
    return out;
}

} // namespace

RescaledProfile classify_and_rescale(const RadialField& u, double lambda,
                                     const ProblemSpec& spec, const RadialGrid& grid,
                                     int n_y) {
    if (lambda <= 0.0) throw DomainError("classify_and_rescale: need lambda > 0");
    const double sup = max_value(u);
    if (sup < 0.9) {
        throw DomainError("classify_and_rescale: max u = " + std::to_string(sup) +
                          " < 0.9, not in the blow-up regime");
    }
    if (spec.N >= 2 && u[argmax_node(u)] > u[0] + 1e-12) {
        throw DomainError("classify_and_rescale: radial maximum not at the origin");
    }
    const double eps = 1.0 - sup;
    double scale;
    BlowupCase tag;
    if (spec.alpha == 0.0) {
        tag = BlowupCase::case1_away_from_zero_set;
        scale = std::pow(eps, 1.5) / std::sqrt(lambda);
    } else {
        // the maximum sits exactly on the zero set of f: fast regime
        tag = BlowupCase::case3_fast;
        scale = std::pow(eps, 3.0 / (2.0 + spec.alpha)) * std::pow(lambda, -1.0 / (2.0 + spec.alpha));
    }
    // all node values including the boundary zero
    std::vector<double> rr(grid.r.begin(), grid.r.end());
    std::vector<double> uu(u.begin(), u.end());
    uu.push_back(0.0);
    MonotoneCubic interp(std::move(rr), std::move(uu));
    return rescale_section([&](double r) { return interp(r); }, 1.0, 0.0, eps, scale, tag, n_y);
}

RescaledProfile rescale_off_center(const std::function<double(double)>& u_section, double x_lo,
                                   double x_hi, double x_n, double lambda, double alpha_i,
                                   double p_i, double slow_threshold, int n_y) {
    if (lambda <= 0.0) throw DomainError("rescale_off_center: need lambda > 0");
    const double u_max = u_section(x_n);
    const double eps = 1.0 - u_max;
    if (eps <= 0.0 || eps > 0.1) {
        throw DomainError("rescale_off_center: section max must satisfy 0.9 <= u(x_n) < 1");
    }
    const double dist = std::abs(x_n - p_i);
    const double rate = std::pow(eps, -3.0) * lambda * std::pow(dist, alpha_i + 2.0);
    RescaledProfile out;
    double scale;
    if (rate >= slow_threshold) {
        out.case_tag = BlowupCase::case2_slow;
        scale = std::pow(eps, 1.5) / std::sqrt(lambda) * std::pow(dist, -0.5 * alpha_i);
    } else {
        out.case_tag = BlowupCase::case3_fast;
        scale = std::pow(eps, 3.0 / (2.0 + alpha_i)) *
                std::pow(lambda, -1.0 / (2.0 + alpha_i));
    }
    (void)x_lo;
    RescaledProfile sect =
        rescale_section(u_section, x_hi, x_n, eps, scale, out.case_tag, n_y);
    sect.case_tag = out.case_tag;
    return sect;
}

double compare_to_limit(const RescaledProfile& rescaled, const LimitProfile& limit, double R) {
    if (R <= 0.0) throw DomainError("compare_to_limit: need R > 0");
    if (rescaled.y_max() < R) {
        throw DomainError("compare_to_limit: rescaled profile only reaches y = " +
                          std::to_string(rescaled.y_max()) + " < R");
    }
    if (limit.R_max < R) {
        throw DomainError("compare_to_limit: limit profile only reaches r = " +
                          std::to_string(limit.R_max) + " < R");
    }
    double sup = 0.0;
    for (size_t j = 0; j < rescaled.y.size(); ++j) {
        const double yy = rescaled.y[j];
        if (yy > R) break;
        sup = std::max(sup, std::abs(rescaled.U[j] - limit.value(yy)));
    }
    return sup;
}

double pointwise_bound_constant(const RadialField& u, double lambda, const ProblemSpec& spec,
                                const RadialGrid& grid) {
    if (lambda <= 0.0) throw DomainError("pointwise_bound_constant: undefined for lambda = 0");
    const int xn = argmax_node(u);
    const double rn = grid.r[xn];
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= grid.n; ++i) {
        if (i == xn) continue;
        const double ui = (i < grid.n) ? u[i] : 0.0;
        const double dist = std::abs(grid.r[i] - rn);
        const double d = (spec.alpha > 0.0) ? grid.r[i] : 1.0;
        if (dist == 0.0 || d == 0.0) continue;
        const double c = (1.0 - ui) * std::pow(lambda, -1.0 / 3.0) *
                         std::pow(d, -spec.alpha / 3.0) * std::pow(dist, -2.0 / 3.0);
        best = std::min(best, c);
    }
    return best;
}

} // namespace mems
