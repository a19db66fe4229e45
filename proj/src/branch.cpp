#include "mems/branch.hpp"

#include <algorithm>

namespace mems {

std::string to_string(Termination t) {
    switch (t) {
        case Termination::barrier_reached: return "barrier_reached";
        case Termination::mu2_crossed_zero: return "mu2_crossed_zero";
        case Termination::second_fold: return "second_fold";
        case Termination::step_underflow: return "step_underflow";
    }
    return "unknown";
}

double Branch::sup_lambda() const {
    double m = 0.0;
    for (const BranchPoint& p : points) m = std::max(m, p.lambda);
    return m;
}

} // namespace mems
