#pragma once

#include <vector>

#include "mems/tridiag.hpp"

namespace oracles {

/// Full spectrum of a symmetric tridiagonal matrix by QL iteration with
/// implicit shifts, written independently of the Sturm-bisection solver in
/// the library (test oracle only).  n <= 400 by contract.
std::vector<double> dense_spectrum(const mems::SymTridiagonal& T);

} // namespace oracles
