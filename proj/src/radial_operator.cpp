#include "mems/radial_operator.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "mems/errors.hpp"

namespace mems {

void check_below_barrier(const RadialField& u) {
    for (int i = 0; i < static_cast<int>(u.size()); ++i) {
        if (!std::isfinite(u[i])) {
            throw SingularStateError("field has a non-finite entry at node " + std::to_string(i),
                                     i);
        }
        if (u[i] >= kSingularGuard) {
            throw SingularStateError(
                "field touches the singular set: u[" + std::to_string(i) + "] = " +
                    std::to_string(u[i]) + " >= 1 - 1e-12",
                i);
        }
    }
}

Tridiagonal sector_laplacian_matrix(const RadialGrid& grid, const ProblemSpec& spec, int l) {
    if (l < 0) throw DomainError("sector index l must be >= 0");
    if (spec.N == 1 && l > 1) {
        throw DomainError("N = 1 has only the even (l=0) and odd (l=1) parity sectors");
    }
    const int n = grid.n;
    const int first = (l == 0) ? 0 : 1;
    const int m = n - first;
    Tridiagonal T;
    T.lower.assign(m, 0.0);
    T.diag.assign(m, 0.0);
    T.upper.assign(m, 0.0);
    const double cent = static_cast<double>(l) * (l + spec.N - 2);
    for (int i = first; i < n; ++i) {
        const int k = i - first;
        const double vol = grid.cell_vol[i];
        // flux to the left neighbour (or the origin/Dirichlet closure)
        if (i > 0) {
            const double c = grid.face_area[i - 1] / (grid.dr[i - 1] * vol);
            T.diag[k] += c;
            if (i - 1 >= first) T.lower[k] = -c;
            // for l >= 1 the i = 1 row couples to the Dirichlet value u(0) = 0
        }
        // flux to the right neighbour (node n carries u(1) = 0)
        {
            const double c = grid.face_area[i] / (grid.dr[i] * vol);
            T.diag[k] += c;
            if (i + 1 < n) T.upper[k] = -c;
        }
        if (l > 0) T.diag[k] += cent / (grid.r[i] * grid.r[i]);
    }
    // Origin row for l = 0: no left face (u'(0) = 0 closure is built into the
    // half-cell volume), so only the right flux contributes; the limit value
    // recovers -Δu(0) = -N u''(0) exactly on quadratics.
    return T;
}

RadialField apply_sector_laplacian(const RadialField& u, const RadialGrid& grid,
                                   const ProblemSpec& spec, int l) {
    const int n = grid.n;
    if (static_cast<int>(u.size()) != n) {
        throw DomainError("apply_sector_laplacian: field size must equal grid.n");
    }
    if (l >= 1 && u[0] != 0.0) {
        throw DomainError("apply_sector_laplacian: sectors l >= 1 require u(0) = 0");
    }
    Tridiagonal T = sector_laplacian_matrix(grid, spec, l);
    const int first = (l == 0) ? 0 : 1;
    std::vector<double> x(u.begin() + first, u.end());
    std::vector<double> y = T.apply(x);
    RadialField out(n, 0.0);
    for (int i = first; i < n; ++i) out[i] = -y[i - first]; // T is -Δ_l
    return out;
}

RadialField residual(const RadialField& u, double lambda, const ProblemSpec& spec,
                     const RadialGrid& grid) {
    const int n = grid.n;
    if (static_cast<int>(u.size()) != n) throw DomainError("residual: field size must equal grid.n");
    if (lambda < 0.0) throw DomainError("residual: lambda must be >= 0");
    check_below_barrier(u);
    Tridiagonal T = sector_laplacian_matrix(grid, spec, 0);
    RadialField F = T.apply(u); // -Δ_h u
    for (int i = 0; i < n; ++i) {
        const double om = 1.0 - u[i];
        F[i] -= lambda * spec.profile(grid.r[i]) / (om * om);
    }
    return F;
}

SectorOperator jacobian(const RadialField& u, double lambda, const ProblemSpec& spec,
                        const RadialGrid& grid, int l) {
    const int n = grid.n;
    if (static_cast<int>(u.size()) != n) throw DomainError("jacobian: field size must equal grid.n");
    check_below_barrier(u);
    SectorOperator op;
    op.l = l;
    op.first_node = (l == 0) ? 0 : 1;
    op.matrix = sector_laplacian_matrix(grid, spec, l);
    op.weight.resize(op.matrix.size());
    for (int i = op.first_node; i < n; ++i) {
        const int k = i - op.first_node;
        const double om = 1.0 - u[i];
        op.matrix.diag[k] -= 2.0 * lambda * spec.profile(grid.r[i]) / (om * om * om);
        op.weight[k] = grid.cell_vol[i];
    }
    return op;
}

SymTridiagonal SectorOperator::symmetrized() const {
    // Similarity by D^{1/2} with D = diag(cell volumes); the matrix is
    // self-adjoint against D by construction, so sqrt(upper*lower) recovers
    // the symmetric off-diagonal exactly.
    const int m = matrix.size();
    SymTridiagonal S;
    S.diag = matrix.diag;
    S.off.assign(m > 0 ? m - 1 : 0, 0.0);
    for (int i = 0; i + 1 < m; ++i) {
        const double p = matrix.upper[i] * matrix.lower[i + 1];
        S.off[i] = (matrix.upper[i] < 0.0 ? -1.0 : 1.0) * std::sqrt(std::max(p, 0.0));
    }
    return S;
}

double max_norm(const RadialField& v) {
    double m = 0.0;
    for (double x : v) {
        if (!std::isfinite(x)) return std::numeric_limits<double>::infinity();
        m = std::max(m, std::abs(x));
    }
    return m;
}

double scaled_residual_norm(const RadialField& F, const RadialGrid& grid) {
    // Scale each entry by the local diagonal of -Δ_h, so the norm reads as a
    // solution-space error on uniform and stretched grids alike.
    double m = 0.0;
    for (int i = 0; i < static_cast<int>(F.size()) && i < grid.n; ++i) {
        if (!std::isfinite(F[i])) return std::numeric_limits<double>::infinity();
        double diag = grid.face_area[i] / (grid.dr[i] * grid.cell_vol[i]);
        if (i > 0) diag += grid.face_area[i - 1] / (grid.dr[i - 1] * grid.cell_vol[i]);
        m = std::max(m, std::abs(F[i]) / (1.0 + diag));
    }
    return m;
}

} // namespace mems
