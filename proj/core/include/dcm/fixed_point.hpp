#pragma once

// Nondegenerate limit equations X = A X + b solved by population iteration,
// and the composition X <- q X + sqrt(1 - q^2) W that drives any centered
// unit-variance W to the standard normal.

#include "dcm/metrics.hpp"
#include "dcm/rational.hpp"
#include "dcm/recurrence.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace dcm {

/// Sorted sample with moment and cdf helpers.
class EmpiricalLaw {
public:
    explicit EmpiricalLaw(std::vector<double> samples);

    std::span<const double> samples() const { return samples_; }
    std::size_t size() const { return samples_.size(); }

    double raw_moment(int k) const;
    double mean() const { return raw_moment(1); }
    double variance() const;
    // Standard error of the k-th raw sample moment.
    double raw_moment_stderr(int k) const;

    // Every sample as an atom of weight 1/size.
    RealPmf as_pmf() const;
    // Equal-width bins over the [0.1%, 99.9%] quantile range; samples outside
    // go to the end bins. Atoms sit at bin centers.
    RealPmf binned(std::size_t bins = 400) const;

    double quantile(double q) const;

private:
    std::vector<double> samples_;
};

struct LimitEquation {
    // Fresh (A, b) per particle per step.
    std::function<std::pair<double, double>(Rng&)> coefficients;
    // Initial particle value; zero when empty.
    std::function<double(Rng&)> initial;
    std::size_t population = 1000000;
    int iterations = 60;
    // Probe E|A|^3 < 1 with 10^6 draws before iterating.
    bool check_contraction = true;
};

// X = U X + sqrt(2)(2U - 1): the standardized Quickselect limit.
LimitEquation quickselect_equation();
// W = U W + U: the Dickman distribution.
LimitEquation dickman_equation();

/// Throws PreconditionError when the contraction probe fails and Error when a
/// particle exceeds 10^12 in magnitude.
EmpiricalLaw iterate_population(const LimitEquation& eq, Rng& rng);

/// E W^k of the Dickman law, from E W^k = (1/k) sum_{j<k} binom(k, j) E W^j.
BigRational dickman_reference_moments(int k);

/// (W_0 + ... + W_steps) / sqrt(steps + 1) through the composition
/// X <- sqrt(k/(k+1)) X + sqrt(1/(k+1)) W, k = 1..steps.
/// The pmf form requires mean 0 and variance 1 within 1e-9.
EmpiricalLaw normal_characterization_iterate(const Pmf& w_law, int steps, std::size_t particles, Rng& rng);
EmpiricalLaw normal_characterization_iterate(const std::function<double(Rng&)>& draw_w, int steps,
                                             std::size_t particles, Rng& rng);

}  // namespace dcm
