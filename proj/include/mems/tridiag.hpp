#pragma once

#include <vector>

namespace mems {

/// General tridiagonal matrix with row-wise storage.  lower[0] and
/// upper[m-1] are unused.
struct Tridiagonal {
    std::vector<double> lower, diag, upper;

    int size() const { return static_cast<int>(diag.size()); }

    std::vector<double> apply(const std::vector<double>& x) const;

    /// Solve T x = b by LU with partial pivoting (dgtsv-style); safe for the
    /// indefinite systems that appear near folds.  Throws on exact singularity.
    std::vector<double> solve(const std::vector<double>& b) const;

    void add_to_diag(double s);
};

/// Symmetric tridiagonal matrix (diag, off-diagonal), the form consumed by
/// the Sturm-bisection eigensolver and the dense test oracle.
struct SymTridiagonal {
    std::vector<double> diag, off; // off.size() == diag.size() - 1

    int size() const { return static_cast<int>(diag.size()); }
};

} // namespace mems
