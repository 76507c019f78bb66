#pragma once

// Distances between finite discrete laws and finite normal mixtures:
// Zolotarev zeta_3, Kolmogorov and Wasserstein-1.
//
// zeta_3 is evaluated through
//
//     zeta_3(X, Y) = 1/2 \int |H(t)| dt,   H(t) = E(X - t)_+^2 - E(Y - t)_+^2,
//
// which holds when the first two moments of X and Y agree. The extremal
// member f* of F_3 with f*''' = sign(H) attains the supremum, so
// zeta3_lower_probe() evaluates |E f*(X) - E f*(Y)| by direct expectation as
// an independent check of the integral.

#include "dcm/pmf.hpp"

#include <span>
#include <utility>
#include <vector>

namespace dcm {

struct NormalComponent {
    double weight = 1.0;
    double mean = 0.0;
    double sd = 1.0;  // 0 means a point mass
};

class NormalMixture {
public:
    NormalMixture() : NormalMixture(std::vector<NormalComponent>{NormalComponent{}}) {}

    // Weights must be nonnegative and sum to one within 1e-12.
    explicit NormalMixture(std::vector<NormalComponent> components);

    static NormalMixture normal(double mean, double sd) { return NormalMixture({NormalComponent{1.0, mean, sd}}); }
    static NormalMixture standard() { return normal(0.0, 1.0); }

    std::span<const NormalComponent> components() const { return components_; }
    double mean() const;
    double variance() const;
    double weight_sum() const;

    NormalMixture affine(double scale, double shift) const;

private:
    std::vector<NormalComponent> components_;
};

struct MetricReport {
    double value = 0.0;
    double abs_error_bound = 0.0;
    // Affine correction y -> scale * y + shift applied to absorb rounding-level
    // moment mismatch before integration.
    double adjust_scale = 1.0;
    double adjust_shift = 0.0;
};

/// A law accepted by the metrics: atoms plus normal components. Implicitly
/// built from a RealPmf, a Pmf or a NormalMixture. Atom weights are
/// conditioned on the retained mass; the lost mass is remembered for error
/// bars.
class Law {
public:
    Law(const RealPmf& p);        // NOLINT(google-explicit-constructor)
    Law(const Pmf& p);            // NOLINT(google-explicit-constructor)
    Law(const NormalMixture& m);  // NOLINT(google-explicit-constructor)

    std::span<const std::pair<double, double>> atoms() const { return atoms_; }
    std::span<const NormalComponent> normals() const { return normals_; }
    double lost_mass() const { return lost_; }

    double mean() const;
    double second_moment() const;
    double max_sd() const;
    double min_positive_sd() const;  // 0 when there are no normal parts
    double lowest() const;           // smallest atom or normal mean
    double highest() const;

    double partial_square(double t) const;   // E(X - t)_+^2
    double lower_square(double t) const;     // E(t - X)_+^2
    double upper_cube(double t) const;       // E(X - t)_+^3
    double lower_cube(double t) const;       // E(t - X)_+^3
    double cdf(double t) const;              // P(X <= t)
    double cdf_left(double t) const;         // P(X < t)
    double density(double t) const;          // density of the normal part

    Law affine(double scale, double shift) const;

private:
    Law() = default;
    void add_normal(const NormalComponent& c);
    void finish_atoms();

    std::vector<std::pair<double, double>> atoms_;  // sorted (value, weight)
    std::vector<double> prefix_;                    // prefix sums of atom weights
    std::vector<NormalComponent> normals_;          // sd > 0 only
    double lost_ = 0.0;
};

/// E(X - t)_+^2 for X ~ N(mean, sd^2); ((mean - t)_+)^2 when sd = 0.
double normal_partial_square_moment(double t, double mean, double sd);

MetricReport zeta3(const Law& x, const Law& y);

// |E f*(X) - E f*(Y)| for f*''' = sign(H); never exceeds zeta3(x, y).
double zeta3_lower_probe(const Law& x, const Law& y);

double kolmogorov(const Law& x, const Law& y);

double wasserstein1(const RealPmf& x, const RealPmf& y);
double wasserstein1(const Pmf& x, const Pmf& y);

/// Twice differentiable f with piecewise-constant third derivative: the
/// members of F_3 used by the probes. `third[i]` is f''' on the i-th interval
/// cut by the sorted knots (so third.size() == knots.size() + 1), and
/// f, f', f'' take the given values at `anchor`. |third| <= 1 makes f'' 1-Lipschitz.
class PiecewiseCubic {
public:
    PiecewiseCubic(std::vector<double> knots, std::vector<double> third, double anchor = 0.0, double f0 = 0.0,
                   double f1 = 0.0, double f2 = 0.0);

    double operator()(double x) const;
    double second_derivative(double x) const;

    // E f(X) in closed form (truncated normal moments for normal parts).
    double expectation(const Law& law) const;

private:
    struct Piece {
        double left;  // -inf for the first piece
        double c0, c1, c2, c3;  // f(x) = c0 + c1 u + c2 u^2 + c3 u^3, u = x - origin
        double origin;
    };
    std::size_t locate(double x) const;

    std::vector<Piece> pieces_;
};

}  // namespace dcm
