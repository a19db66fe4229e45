#include "bessel.hpp"

#include <cmath>
#include <stdexcept>

namespace oracles {

double bessel_j(double nu, double x) {
    if (x < 0.0) throw std::invalid_argument("bessel_j: x must be >= 0");
    if (x > 60.0) throw std::invalid_argument("bessel_j: series oracle capped at x = 60");
    const long double half = 0.5L * static_cast<long double>(x);
    long double term = std::pow(half, static_cast<long double>(nu)) /
                       std::exp(std::lgamma(static_cast<long double>(nu) + 1.0L));
    long double sum = term;
    const long double hsq = half * half;
    for (int k = 1; k < 400; ++k) {
        term *= -hsq / (static_cast<long double>(k) * (static_cast<long double>(nu) + k));
        sum += term;
        if (std::abs(term) < 1e-24L * (std::abs(sum) + 1e-30L) && k > 4) break;
    }
    return static_cast<double>(sum);
}

double bessel_zero(double nu, int k) {
    if (k < 1) throw std::invalid_argument("bessel_zero: k must be >= 1");
    // McMahon first guess, then a forward scan to make sure we bracket the
    // k-th zero (the asymptotic is crude for the first few zeros at larger nu)
    const double pi = 3.14159265358979323846;
    double lo = 1e-8, hi;
    int found = 0;
    double prev = bessel_j(nu, lo);
    const double step = 0.02;
    for (double x = lo + step; x < 60.0; x += step) {
        const double cur = bessel_j(nu, x);
        if ((prev < 0.0) != (cur < 0.0)) {
            ++found;
            if (found == k) {
                lo = x - step;
                hi = x;
                // bisection
                double flo = prev;
                for (int it = 0; it < 200; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    const double fm = bessel_j(nu, mid);
                    if ((fm < 0.0) == (flo < 0.0)) {
                        lo = mid;
                        flo = fm;
                    } else {
                        hi = mid;
                    }
                    if (hi - lo < 1e-14 * hi) break;
                }
                return 0.5 * (lo + hi);
            }
        }
        prev = cur;
    }
    (void)pi;
    throw std::runtime_error("bessel_zero: zero not found below x = 60");
}

double dirichlet_eigenvalue(int N, int l, int k) {
    const double nu = l + 0.5 * (N - 2);
    const double z = bessel_zero(nu, k);
    return z * z;
}

} // namespace oracles
