#include "mems/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mems/errors.hpp"

namespace mems {

namespace {

double binomial(int n, int k) {
    if (k < 0 || n < 0 || k > n) return 0.0;
    double v = 1.0;
    for (int j = 1; j <= k; ++j) v = v * (n - k + j) / j;
    return v;
}

// Gershgorin bounds for the spectrum of T.
std::pair<double, double> spectral_bounds(const SymTridiagonal& T) {
    const int m = T.size();
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int i = 0; i < m; ++i) {
        double r = 0.0;
        if (i > 0) r += std::abs(T.off[i - 1]);
        if (i + 1 < m) r += std::abs(T.off[i]);
        lo = std::min(lo, T.diag[i] - r);
        hi = std::max(hi, T.diag[i] + r);
    }
    return {lo, hi};
}

} // namespace

int sector_multiplicity(int N, int l) {
    if (N < 1 || l < 0) throw DomainError("sector_multiplicity: need N >= 1, l >= 0");
    if (N == 1) return l <= 1 ? 1 : 0; // parity classes only
    if (l == 0) return 1;
    return static_cast<int>(std::llround(binomial(N + l - 1, l) - binomial(N + l - 3, l - 2)));
}

int eigenvalue_count_below(const SymTridiagonal& T, double x) {
    // LDLᵀ inertia count; d == 0 is nudged to keep the sequence defined.
    // Extended precision: the matrix norm grows like h⁻², and the double
    // recursion would blur the low end of the spectrum by ~n·eps·‖T‖.
    const int m = T.size();
    int count = 0;
    long double d = 1.0L;
    const long double tiny = std::numeric_limits<long double>::min();
    for (int i = 0; i < m; ++i) {
        const long double offsq =
            (i > 0) ? static_cast<long double>(T.off[i - 1]) * T.off[i - 1] : 0.0L;
        d = static_cast<long double>(T.diag[i]) - x - (i > 0 ? offsq / d : 0.0L);
        if (d == 0.0L) d = tiny;
        if (d < 0.0L) ++count;
    }
    return count;
}

std::vector<double> smallest_eigenvalues(const SymTridiagonal& T, int k) {
    const int m = T.size();
    if (m == 0) return {};
    k = std::min(k, m);
    auto [lo0, hi0] = spectral_bounds(T);
    std::vector<double> out(k);
    for (int j = 1; j <= k; ++j) {
        double lo = lo0, hi = hi0;
        // invariant: count(lo) < j <= count(hi).  The tolerance tracks the
        // magnitude of the bracketed eigenvalue, not the matrix norm: the
        // stiffness scale h⁻² would otherwise swamp the low end of the
        // spectrum with refinement.
        for (int it = 0; it < 160; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double tol = 1e-10 * std::max(1.0, std::abs(mid));
            if (hi - lo <= tol) break;
            if (eigenvalue_count_below(T, mid) >= j)
                hi = mid;
            else
                lo = mid;
        }
        out[j - 1] = 0.5 * (lo + hi);
    }
    return out;
}

std::vector<double> sector_eigenvalues(const RadialField& u, double lambda,
                                       const ProblemSpec& spec, const RadialGrid& grid,
                                       int l, int k_max) {
    if (k_max < 1) throw DomainError("sector_eigenvalues: k_max must be >= 1");
    SectorOperator op = jacobian(u, lambda, spec, grid, l);
    return smallest_eigenvalues(op.symmetrized(), k_max);
}

SpectralResult morse_data(const RadialField& u, double lambda, const ProblemSpec& spec,
                          const RadialGrid& grid, int l_max, int k_max) {
    if (l_max < 1) throw DomainError("morse_data: l_max must be >= 1");
    if (k_max < 1) throw DomainError("morse_data: k_max must be >= 1");
    if (spec.N == 1) l_max = std::min(l_max, 1);

    SpectralResult res;
    res.morse_index = 0;
    // Extend beyond l_max while sectors still carry negative eigenvalues: the
    // centrifugal term is monotone in l, so the first nonnegative sector ends
    // the count.
    const int l_cap = 128;
    for (int l = 0;; ++l) {
        SectorOperator op = jacobian(u, lambda, spec, grid, l);
        SymTridiagonal S = op.symmetrized();
        SectorSpectrum sec;
        sec.l = l;
        sec.multiplicity = sector_multiplicity(spec.N, l);
        sec.negative_count = eigenvalue_count_below(S, 0.0);
        sec.eigenvalues = smallest_eigenvalues(S, k_max);
        res.morse_index += sec.multiplicity * sec.negative_count;
        res.sectors.push_back(std::move(sec));
        const bool past_requested = l >= l_max;
        const bool sector_clean = res.sectors.back().negative_count == 0;
        if (spec.N == 1 && l == 1) break;
        if (past_requested && sector_clean) break;
        if (l == l_cap) {
            throw ConvergenceError("morse_data: negative eigenvalues persist beyond sector cap",
                                   0.0, l_cap);
        }
    }
    for (const SectorSpectrum& sec : res.sectors) {
        for (double ev : sec.eigenvalues) {
            for (int rep = 0; rep < sec.multiplicity; ++rep) {
                res.merged.push_back(ev);
                res.merged_sector.push_back(sec.l);
            }
        }
    }
    std::vector<int> order(res.merged.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return res.merged[a] < res.merged[b]; });
    std::vector<double> mv(res.merged.size());
    std::vector<int> ms(res.merged.size());
    for (size_t i = 0; i < order.size(); ++i) {
        mv[i] = res.merged[order[i]];
        ms[i] = res.merged_sector[order[i]];
    }
    res.merged = std::move(mv);
    res.merged_sector = std::move(ms);
    return res;
}

std::vector<double> smallest_eigenvector(const SymTridiagonal& S, double eigenvalue,
                                         const std::vector<double>& weight) {
    const int m = S.size();
    auto [lo, hi] = spectral_bounds(S);
    const double shift = eigenvalue - 1e-8 * std::max({std::abs(lo), std::abs(hi), 1.0});

    Tridiagonal M;
    M.diag = S.diag;
    M.lower.assign(m, 0.0);
    M.upper.assign(m, 0.0);
    for (int i = 0; i + 1 < m; ++i) {
        M.upper[i] = S.off[i];
        M.lower[i + 1] = S.off[i];
    }
    M.add_to_diag(-shift);

    std::vector<double> x(m, 1.0);
    for (int it = 0; it < 4; ++it) {
        x = M.solve(x);
        double nrm = 0.0;
        for (double v : x) nrm += v * v;
        nrm = std::sqrt(nrm);
        for (double& v : x) v /= nrm;
    }
    // undo the D^{1/2} similarity, normalize in the weighted norm
    double wn2 = 0.0;
    for (int i = 0; i < m; ++i) {
        x[i] /= std::sqrt(weight[i]);
        wn2 += weight[i] * x[i] * x[i];
    }
    int lead = 0;
    while (lead < m && x[lead] == 0.0) ++lead;
    const double sign = (lead < m && x[lead] < 0.0) ? -1.0 : 1.0;
    const double inv = sign / std::sqrt(wn2);
    for (double& v : x) v *= inv;
    return x;
}

std::pair<double, RadialField> first_radial_eigenpair(const RadialField& u, double lambda,
                                                      const ProblemSpec& spec,
                                                      const RadialGrid& grid) {
    SectorOperator op = jacobian(u, lambda, spec, grid, 0);
    SymTridiagonal S = op.symmetrized();
    const double mu = smallest_eigenvalues(S, 1)[0];
    std::vector<double> x = smallest_eigenvector(S, mu, op.weight);
    RadialField phi(grid.n, 0.0);
    for (int i = 0; i < static_cast<int>(x.size()); ++i) phi[i + op.first_node] = x[i];
    return {mu, phi};
}

} // namespace mems
