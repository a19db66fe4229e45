#include "mems/tridiag.hpp"

#include <cmath>
#include <stdexcept>

namespace mems {

std::vector<double> Tridiagonal::apply(const std::vector<double>& x) const {
    const int m = size();
    std::vector<double> y(m);
    for (int i = 0; i < m; ++i) {
        double s = diag[i] * x[i];
        if (i > 0) s += lower[i] * x[i - 1];
        if (i + 1 < m) s += upper[i] * x[i + 1];
        y[i] = s;
    }
    return y;
}

std::vector<double> Tridiagonal::solve(const std::vector<double>& b) const {
    // Tridiagonal LU with partial pivoting.  Pivoting introduces a second
    // superdiagonal; three working bands are enough.
    const int m = size();
    std::vector<double> d(diag), u1(m, 0.0), u2(m, 0.0), rhs(b);
    for (int i = 0; i + 1 < m; ++i) u1[i] = upper[i];
    std::vector<double> l(m, 0.0);
    for (int i = 1; i < m; ++i) l[i] = lower[i];

    for (int k = 0; k + 1 < m; ++k) {
        double piv = d[k];
        double below = l[k + 1];
        if (std::abs(below) > std::abs(piv)) {
            // swap rows k and k+1
            std::swap(d[k], l[k + 1]);          // note: l[k+1] becomes the pivot row entry
            std::swap(u1[k], d[k + 1]);
            if (k + 2 < m) std::swap(u2[k], u1[k + 1]);
            std::swap(rhs[k], rhs[k + 1]);
            piv = d[k];
        }
        if (piv == 0.0) throw std::runtime_error("tridiagonal solve: singular matrix");
        const double f = l[k + 1] / piv;
        d[k + 1] -= f * u1[k];
        if (k + 2 < m) u1[k + 1] -= f * u2[k];
        rhs[k + 1] -= f * rhs[k];
        l[k + 1] = 0.0;
    }
    if (d[m - 1] == 0.0) throw std::runtime_error("tridiagonal solve: singular matrix");

    std::vector<double> x(m);
    for (int i = m - 1; i >= 0; --i) {
        double s = rhs[i];
        if (i + 1 < m) s -= u1[i] * x[i + 1];
        if (i + 2 < m) s -= u2[i] * x[i + 2];
        x[i] = s / d[i];
    }
    return x;
}

void Tridiagonal::add_to_diag(double s) {
    for (double& v : diag) v += s;
}

} // namespace mems
