#include "mems/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mems/errors.hpp"

namespace mems {

void ProblemSpec::validate() const {
    if (N < 1) throw DomainError("ProblemSpec: dimension N must be >= 1, got " + std::to_string(N));
    if (alpha < 0.0) throw DomainError("ProblemSpec: alpha must be >= 0");
    if (g0 <= 0.0) throw DomainError("ProblemSpec: profile amplitude g0 must be > 0");
    if (N == 1 && alpha != 0.0) {
        throw DomainError("ProblemSpec: the interval problem (N=1) requires a profile bounded "
                          "away from zero, i.e. alpha = 0");
    }
}

double ProblemSpec::profile(double r) const {
    if (alpha == 0.0) return g0;
    return g0 * std::pow(r, alpha);
}

namespace {

RadialGrid finish_grid(RadialGrid g, const ProblemSpec& spec) {
    const int n = g.n;
    const int N = spec.N;
    g.dr.resize(n);
    g.face_area.resize(n);
    g.cell_vol.assign(n + 1, 0.0);
    std::vector<double> face_r(n); // midpoint radius of each face
    for (int i = 0; i < n; ++i) {
        g.dr[i] = g.r[i + 1] - g.r[i];
        face_r[i] = 0.5 * (g.r[i] + g.r[i + 1]);
        g.face_area[i] = std::pow(face_r[i], N - 1);
    }
    // Exact cell volumes ∫ r^{N-1} dr between faces; they telescope to 1/N.
    auto vol_to = [N](double rr) { return std::pow(rr, N) / N; };
    g.cell_vol[0] = vol_to(face_r[0]);
    for (int i = 1; i < n; ++i) g.cell_vol[i] = vol_to(face_r[i]) - vol_to(face_r[i - 1]);
    g.cell_vol[n] = vol_to(1.0) - vol_to(face_r[n - 1]);
    const double c0 = g.face_area[0] / (g.dr[0] * g.cell_vol[0]);
    if (g.cell_vol[0] < std::numeric_limits<double>::min() || !std::isfinite(c0) || c0 <= 0.0) {
        throw DomainError("grid: origin cell underflows double precision "
                          "(stretch too aggressive for this dimension)");
    }
    return g;
}

} // namespace

RadialGrid build_grid(int n, const ProblemSpec& spec) {
    spec.validate();
    if (n < 16) throw DomainError("build_grid: need at least n = 16 intervals, got " + std::to_string(n));
    RadialGrid g;
    g.n = n;
    g.h = 1.0 / n;
    g.r.resize(n + 1);
    for (int i = 0; i <= n; ++i) g.r[i] = static_cast<double>(i) / n;
    g.r[n] = 1.0;
    return finish_grid(std::move(g), spec);
}

RadialGrid build_stretched_grid(int n, const ProblemSpec& spec, double stretch) {
    spec.validate();
    if (n < 16) throw DomainError("build_stretched_grid: need at least n = 16 intervals");
    if (stretch < 1.0) throw DomainError("build_stretched_grid: stretch factor must be >= 1");
    RadialGrid g;
    g.n = n;
    g.h = 1.0 / n;
    g.stretched = stretch > 1.0;
    g.r.resize(n + 1);
    for (int i = 0; i <= n; ++i) g.r[i] = std::pow(static_cast<double>(i) / n, stretch);
    g.r[n] = 1.0;
    return finish_grid(std::move(g), spec);
}

double RadialGrid::integrate(const RadialField& v) const {
    double s = 0.0;
    for (int i = 0; i < n && i < static_cast<int>(v.size()); ++i) s += cell_vol[i] * v[i];
    return s;
}

double RadialGrid::weighted_norm(const RadialField& v) const {
    return std::sqrt(weighted_dot(v, v));
}

double RadialGrid::weighted_dot(const RadialField& a, const RadialField& b) const {
    double s = 0.0;
    const int m = static_cast<int>(std::min(a.size(), b.size()));
    for (int i = 0; i < m && i < n; ++i) s += cell_vol[i] * a[i] * b[i];
    return s;
}

double max_value(const RadialField& u) {
    double m = -std::numeric_limits<double>::infinity();
    for (double v : u) m = std::max(m, v);
    return m;
}

int argmax_node(const RadialField& u) {
    int k = 0;
    for (int i = 1; i < static_cast<int>(u.size()); ++i)
        if (u[i] > u[k]) k = i;
    return k;
}

} // namespace mems
