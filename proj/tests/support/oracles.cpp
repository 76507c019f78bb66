#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace oracle {
namespace {

struct Branch {
    std::int64_t i;
    BigRational p;
    Rational b;
};

std::vector<Branch> branches(const std::string& model, std::int64_t n) {
    std::vector<Branch> out;
    if (model == "unsuccessful_search") {
        for (std::int64_t i = 1; i <= n - 1; ++i) out.push_back({i, BigRational(1, n - 1), Rational(1)});
    } else if (model == "node_depth") {
        out.push_back({0, BigRational(1, n), Rational(1)});
        for (std::int64_t k = 1; k <= n - 1; ++k) out.push_back({k, BigRational(2 * k, n * n), Rational(1)});
    } else if (model == "quickselect") {
        for (std::int64_t i = 0; i <= n - 1; ++i) out.push_back({i, BigRational(1, n), Rational(n - 1)});
    } else {
        throw std::invalid_argument("no brute-force oracle for " + model);
    }
    return out;
}

Rational base_value(const std::string& model, std::int64_t n) {
    if (model == "node_depth" && n == 0) return Rational(-1);
    return Rational(0);
}

void walk(const std::string& model, std::int64_t n, Rational acc, const BigRational& p, ExactLaw& out) {
    if (n < 2) {
        out[acc + base_value(model, n)] += p;
        return;
    }
    for (const auto& br : branches(model, n)) walk(model, br.i, acc + br.b, p * br.p, out);
}

double phi(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); }

}  // namespace

ExactLaw brute_force_law(const std::string& model, std::int64_t n) {
    ExactLaw out;
    walk(model, n, Rational(0), BigRational(1), out);
    return out;
}

std::vector<double> broadcast_comparisons_means(std::int64_t n_max) {
    std::vector<double> m(static_cast<std::size_t>(n_max + 1), 0.0);
    for (std::int64_t n = 2; n <= n_max; ++n) {
        const double dn = static_cast<double>(n);
        const double self = std::exp2(-dn);
        double rhs = dn / 2.0;  // E(n - I_1)
        for (std::int64_t j = 0; j < n; ++j) {
            double lp = std::lgamma(dn + 1) - std::lgamma(j + 1.0) - std::lgamma(dn - j + 1) - dn * std::log(2.0);
            rhs += std::exp(lp) * m[static_cast<std::size_t>(j)];
        }
        rhs += (0.5 + self) * m[0];
        for (std::int64_t k = 1; k < n; ++k) rhs += std::exp2(-(k + 1.0)) * m[static_cast<std::size_t>(k)];
        m[static_cast<std::size_t>(n)] = rhs / (1.0 - self);
    }
    return m;
}

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double simpson(const std::function<double(double)>& f, double a, double b, int cells) {
    if (cells % 2) ++cells;
    const double h = (b - a) / cells;
    double s = f(a) + f(b);
    for (int i = 1; i < cells; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
}

double partial_square_quadrature(double t, double mean, double sd) {
    double lo = std::max(t, mean - 40.0 * sd);
    double hi = mean + 40.0 * sd;
    if (lo >= hi) return 0.0;
    auto g = [&](double x) { return (x - t) * (x - t) * phi((x - mean) / sd) / sd; };
    return simpson(g, lo, hi, 200000);
}

double binomial_kolmogorov(int m) {
    double cdf = 0.0;
    double worst = 0.0;
    const double center = m / 2.0;
    const double s = std::sqrt(static_cast<double>(m)) / 2.0;
    for (int k = 0; k <= m; ++k) {
        double lp = std::lgamma(m + 1.0) - std::lgamma(k + 1.0) - std::lgamma(m - k + 1.0) - m * std::log(2.0);
        double x = (k - center) / s;
        double ph = std_normal_cdf(x);
        worst = std::max(worst, std::abs(cdf - ph));
        cdf += std::exp(lp);
        worst = std::max(worst, std::abs(cdf - ph));
    }
    return worst;
}

F3Member::F3Member(double grid_lo, double h, std::vector<double> third) : lo_(grid_lo), h_(h), third_(std::move(third)) {
    const std::size_t nodes = third_.size() + 1;
    f_.assign(nodes, 0.0);
    f1_.assign(nodes, 0.0);
    f2_.assign(nodes, 0.0);
    for (std::size_t i = 0; i + 1 < nodes; ++i) {
        const double c = third_[i];
        f_[i + 1] = f_[i] + f1_[i] * h_ + f2_[i] * h_ * h_ / 2.0 + c * h_ * h_ * h_ / 6.0;
        f1_[i + 1] = f1_[i] + f2_[i] * h_ + c * h_ * h_ / 2.0;
        f2_[i + 1] = f2_[i] + c * h_;
    }
    // Remove the quadratic Taylor part at 0 so that f(0) = f'(0) = f''(0) = 0.
    auto [g0, g1, g2] = taylor(0.0);
    for (std::size_t i = 0; i < nodes; ++i) {
        double xi = lo_ + static_cast<double>(i) * h_;
        f_[i] -= g0 + g1 * xi + g2 * xi * xi / 2.0;
        f1_[i] -= g1 + g2 * xi;
        f2_[i] -= g2;
    }
}

std::array<double, 3> F3Member::taylor(double x) const {
    const std::size_t nodes = f_.size();
    std::size_t i = 0;
    double u = x - lo_;
    double c = 0.0;
    if (x > lo_) {
        i = std::min(static_cast<std::size_t>((x - lo_) / h_), nodes - 1);
        u = x - (lo_ + static_cast<double>(i) * h_);
        if (i + 1 < nodes) c = third_[i];
    }
    return {f_[i] + f1_[i] * u + f2_[i] * u * u / 2.0 + c * u * u * u / 6.0, f1_[i] + f2_[i] * u + c * u * u / 2.0,
            f2_[i] + c * u};
}

double F3Member::operator()(double x) const { return taylor(x)[0]; }

F3Member F3Member::random(double grid_lo, double grid_hi, double h, int block, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    auto cells = static_cast<std::size_t>(std::ceil((grid_hi - grid_lo) / h));
    std::vector<double> third(cells);
    double v = u(rng);
    for (std::size_t i = 0; i < cells; ++i) {
        if (i % static_cast<std::size_t>(block) == 0) v = u(rng);
        third[i] = v;
    }
    return F3Member(grid_lo, h, std::move(third));
}

double MixedLaw::expect(const std::function<double(double)>& f) const {
    double s = 0.0;
    for (auto [v, w] : atoms) s += w * f(v);
    for (auto [w, m, sd] : normals) {
        auto g = [&](double x) { return f(x) * phi((x - m) / sd) / sd; };
        int cells = std::max(2000, static_cast<int>(24.0 * sd / 2e-3));
        s += w * simpson(g, m - 12.0 * sd, m + 12.0 * sd, cells);
    }
    return s;
}

double MixedLaw::partial_square(double t) const {
    double s = 0.0;
    for (auto [v, w] : atoms) {
        if (v > t) s += w * (v - t) * (v - t);
    }
    for (auto [w, m, sd] : normals) {
        double z = (m - t) / sd;
        s += w * sd * sd * ((z * z + 1.0) * std_normal_cdf(z) + z * phi(z));
    }
    return s;
}

double MixedLaw::lowest() const {
    double lo = INFINITY;
    for (auto [v, w] : atoms) lo = std::min(lo, v);
    for (auto [w, m, sd] : normals) lo = std::min(lo, m - 12.0 * sd);
    return lo;
}

double MixedLaw::highest() const {
    double hi = -INFINITY;
    for (auto [v, w] : atoms) hi = std::max(hi, v);
    for (auto [w, m, sd] : normals) hi = std::max(hi, m + 12.0 * sd);
    return hi;
}

double extremal_probe(const MixedLaw& x, const MixedLaw& y, double h) {
    double lo = std::min(x.lowest(), y.lowest()) - 1.0;
    double hi = std::max(x.highest(), y.highest()) + 1.0;
    auto cells = static_cast<std::size_t>(std::ceil((hi - lo) / h));
    std::vector<double> third(cells);
    for (std::size_t i = 0; i < cells; ++i) {
        double t = lo + (static_cast<double>(i) + 0.5) * h;
        double H = x.partial_square(t) - y.partial_square(t);
        third[i] = H > 0 ? 1.0 : (H < 0 ? -1.0 : 0.0);
    }
    F3Member f(lo, h, std::move(third));
    auto ff = [&f](double v) { return f(v); };
    return std::abs(x.expect(ff) - y.expect(ff));
}

}  // namespace oracle
