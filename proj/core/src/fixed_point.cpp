#include "dcm/fixed_point.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace dcm {

EmpiricalLaw::EmpiricalLaw(std::vector<double> samples) : samples_(std::move(samples)) {
    if (samples_.empty()) throw InvalidArgument("empty sample");
    std::sort(samples_.begin(), samples_.end());
}

double EmpiricalLaw::raw_moment(int k) const {
    double s = 0.0;
    for (double x : samples_) s += std::pow(x, k);
    return s / static_cast<double>(samples_.size());
}

double EmpiricalLaw::variance() const {
    double m = mean();
    double s = 0.0;
    for (double x : samples_) s += (x - m) * (x - m);
    return s / static_cast<double>(samples_.size() - (samples_.size() > 1 ? 1 : 0));
}

double EmpiricalLaw::raw_moment_stderr(int k) const {
    double m = raw_moment(k);
    double s = 0.0;
    for (double x : samples_) {
        double d = std::pow(x, k) - m;
        s += d * d;
    }
    auto n = static_cast<double>(samples_.size());
    return std::sqrt(s / std::max(n - 1.0, 1.0) / n);
}

double EmpiricalLaw::quantile(double q) const {
    if (!(q >= 0.0 && q <= 1.0)) throw InvalidArgument("quantile level outside [0, 1]");
    auto idx = static_cast<std::size_t>(std::floor(q * static_cast<double>(samples_.size() - 1)));
    return samples_[idx];
}

RealPmf EmpiricalLaw::as_pmf() const {
    std::vector<RealPmf::Atom> atoms;
    atoms.reserve(samples_.size());
    double w = 1.0 / static_cast<double>(samples_.size());
    for (double x : samples_) atoms.push_back({x, w});
    return RealPmf::from_unchecked(std::move(atoms), 0.0);
}

RealPmf EmpiricalLaw::binned(std::size_t bins) const {
    if (bins == 0) throw InvalidArgument("need at least one bin");
    double lo = quantile(0.001);
    double hi = quantile(0.999);
    if (!(hi > lo)) return RealPmf::from_unchecked({{lo, 1.0}}, 0.0);
    double width = (hi - lo) / static_cast<double>(bins);
    std::vector<double> counts(bins, 0.0);
    for (double x : samples_) {
        auto b = static_cast<std::ptrdiff_t>(std::floor((x - lo) / width));
        b = std::clamp<std::ptrdiff_t>(b, 0, static_cast<std::ptrdiff_t>(bins) - 1);
        counts[static_cast<std::size_t>(b)] += 1.0;
    }
    std::vector<RealPmf::Atom> atoms;
    for (std::size_t b = 0; b < bins; ++b) {
        if (counts[b] > 0.0) {
            atoms.push_back({lo + (static_cast<double>(b) + 0.5) * width, counts[b] / static_cast<double>(size())});
        }
    }
    return RealPmf::from_unchecked(std::move(atoms), 0.0);
}

LimitEquation quickselect_equation() {
    LimitEquation eq;
    eq.coefficients = [](Rng& rng) {
        double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        return std::pair{u, std::numbers::sqrt2 * (2.0 * u - 1.0)};
    };
    return eq;
}

LimitEquation dickman_equation() {
    LimitEquation eq;
    eq.coefficients = [](Rng& rng) {
        double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        return std::pair{u, u};
    };
    return eq;
}

EmpiricalLaw iterate_population(const LimitEquation& eq, Rng& rng) {
    if (!eq.coefficients) throw InvalidArgument("limit equation without coefficient sampler");
    if (eq.population < 1000) throw InvalidArgument("population must be at least 1000");
    if (eq.iterations < 0) throw InvalidArgument("negative iteration count");

    if (eq.check_contraction) {
        constexpr int probes = 1000000;
        double s = 0.0;
        for (int i = 0; i < probes; ++i) {
            double a = std::abs(eq.coefficients(rng).first);
            s += a * a * a;
        }
        double e3 = s / probes;
        if (!(e3 < 1.0)) {
            std::ostringstream msg;
            msg << "contraction probe failed: E|A|^3 ~ " << e3;
            throw PreconditionError(msg.str());
        }
    }

    std::vector<double> x(eq.population, 0.0);
    if (eq.initial) {
        for (auto& v : x) v = eq.initial(rng);
    }
    for (int it = 0; it < eq.iterations; ++it) {
        for (auto& v : x) {
            auto [a, b] = eq.coefficients(rng);
            v = a * v + b;
            if (!(std::abs(v) <= 1e12)) {
                throw Error("population diverged at iteration " + std::to_string(it + 1));
            }
        }
    }
    return EmpiricalLaw(std::move(x));
}

BigRational dickman_reference_moments(int k) {
    if (k < 1 || k > 30) throw InvalidArgument("Dickman moments available for 1 <= k <= 30");
    std::vector<BigRational> m{BigRational(1)};
    for (int j = 1; j <= k; ++j) {
        BigRational s(0);
        BigInt c = 1;  // binom(j, i)
        for (int i = 0; i < j; ++i) {
            s += BigRational(c) * m[static_cast<std::size_t>(i)];
            c = c * (j - i) / (i + 1);
        }
        m.push_back(s / j);
    }
    return m[static_cast<std::size_t>(k)];
}

EmpiricalLaw normal_characterization_iterate(const std::function<double(Rng&)>& draw_w, int steps,
                                             std::size_t particles, Rng& rng) {
    if (steps < 0) throw InvalidArgument("negative step count");
    if (particles == 0) throw InvalidArgument("need at least one particle");
    std::vector<double> x(particles);
    for (auto& v : x) v = draw_w(rng);
    for (int k = 1; k <= steps; ++k) {
        double q = std::sqrt(static_cast<double>(k) / (k + 1));
        double r = std::sqrt(1.0 / (k + 1));
        for (auto& v : x) v = q * v + r * draw_w(rng);
    }
    return EmpiricalLaw(std::move(x));
}

EmpiricalLaw normal_characterization_iterate(const Pmf& w_law, int steps, std::size_t particles, Rng& rng) {
    double m = moment(w_law, 1, false);
    double v = moment(w_law, 2, true);
    if (std::abs(m) > 1e-9 || std::abs(v - 1.0) > 1e-9) {
        std::ostringstream msg;
        msg << "W must have mean 0 and variance 1 (got mean " << m << ", variance " << v << ")";
        throw PreconditionError(msg.str());
    }
    std::vector<double> values;
    std::vector<double> weights;
    for (const auto& a : w_law.atoms()) {
        values.push_back(a.value.to_double());
        weights.push_back(a.prob);
    }
    std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
    return normal_characterization_iterate([&](Rng& g) { return values[pick(g)]; }, steps, particles, rng);
}

}  // namespace dcm
