#pragma once

#include "dcm/errors.hpp"

#include <cmath>

namespace dcm {

/// Exponents of the mean/variance expansions that drive the normal limit law:
///   Var(Y_n) = C ln^{2 alpha} n + O(ln^lambda n),
///   ||b_n - mu_n + sum_r mu_{I_r}||_3 = O(ln^kappa n),
///   ||ln^alpha(I_r v 1)||_3 = O(ln^xi n) for the subordinate copies r >= 2.
/// delta is the offset of L_delta at n in {0, 1}.
struct CltParams {
    double alpha = 0.5;
    double kappa = 0.0;
    double lambda = 0.0;
    double xi = 0.0;
    double C = 1.0;
    double delta = 0.1;

    void validate() const {
        if (!(alpha > 0.0)) throw InvalidArgument("alpha must be positive");
        if (!(kappa >= 0.0)) throw InvalidArgument("kappa must be nonnegative");
        if (!(lambda >= 0.0 && lambda < 2.0 * alpha)) throw InvalidArgument("lambda must lie in [0, 2 alpha)");
        if (!(xi >= 0.0)) throw InvalidArgument("xi must be nonnegative");
        if (!(C > 0.0) || !std::isfinite(C)) throw InvalidArgument("C must be positive and finite");
        if (!(delta > 0.0)) throw InvalidArgument("delta must be positive");
    }
};

}  // namespace dcm
