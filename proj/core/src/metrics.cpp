#include "dcm/metrics.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

namespace dcm {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Integration window: extreme atoms/means widened by this many standard deviations.
constexpr double kWindowSds = 12.0;

double phi(double z) {
    if (!std::isfinite(z)) return 0.0;
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

double Phi(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

// Phi(b) - Phi(a) without cancellation in the upper tail.
double Phi_diff(double a, double b) {
    if (a > 0.0) return Phi(-a) - Phi(-b);
    return Phi(b) - Phi(a);
}

// z^k phi(z), zero at +-inf.
double zpow_phi(double z, int k) {
    if (!std::isfinite(z)) return 0.0;
    return std::pow(z, k) * phi(z);
}

double upper_cube_normal(double t, double mean, double sd) {
    if (sd == 0.0) {
        double d = std::max(mean - t, 0.0);
        return d * d * d;
    }
    double z = (mean - t) / sd;
    return sd * sd * sd * ((z * z * z + 3.0 * z) * Phi(z) + (z * z + 2.0) * phi(z));
}

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

// Sign changes of H and the value of 1/2 \int |H|.
struct Analysis {
    double half_integral = 0.0;
    double error = 0.0;
    std::vector<double> roots;
    std::vector<double> signs;  // roots.size() + 1 entries
};

void push_root(Analysis& a, double r, int left_sign) {
    if (a.signs.empty()) a.signs.push_back(left_sign);
    a.roots.push_back(r);
    a.signs.push_back(-left_sign);
}

// Both laws purely atomic: H is a quadratic between consecutive atoms.
Analysis analyze_atomic(const Law& x, const Law& y) {
    std::vector<double> pts;
    for (auto [v, w] : x.atoms()) pts.push_back(v);
    for (auto [v, w] : y.atoms()) pts.push_back(v);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    // Suffix sums of w, w v, w v^2 over atoms strictly above the segment,
    // centered at c for conditioning.
    const double c = x.mean();
    auto suffix = [&](const Law& law) {
        std::vector<std::array<double, 3>> s(pts.size() + 1, {0.0, 0.0, 0.0});
        auto atoms = law.atoms();
        std::size_t j = atoms.size();
        for (std::size_t i = pts.size(); i-- > 0;) {
            s[i] = s[i + 1];
            while (j > 0 && atoms[j - 1].first >= pts[i]) {
                --j;
                double v = atoms[j].first - c;
                s[i][0] += atoms[j].second;
                s[i][1] += atoms[j].second * v;
                s[i][2] += atoms[j].second * v * v;
            }
        }
        return s;
    };
    auto sx = suffix(x);
    auto sy = suffix(y);

    Analysis out;
    int current = 0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        // On (pts[i], pts[i+1]) the atoms above t are those >= pts[i+1].
        double C = sx[i + 1][0] - sy[i + 1][0];
        double B = sx[i + 1][1] - sy[i + 1][1];
        double A = sx[i + 1][2] - sy[i + 1][2];
        // H(t) = A - 2 B s + C s^2 with s = t - c; rewrite in u = t - L.
        double L = pts[i] - c;
        double q0 = A - 2.0 * B * L + C * L * L;
        double q1 = -2.0 * B + 2.0 * C * L;
        double q2 = C;
        double width = pts[i + 1] - pts[i];
        auto q = [&](double u) { return q0 + u * (q1 + u * q2); };
        auto antider = [&](double u) { return u * (q0 + u * (q1 / 2.0 + u * q2 / 3.0)); };

        std::vector<double> cuts{0.0};
        if (q2 != 0.0) {
            double disc = q1 * q1 - 4.0 * q2 * q0;
            if (disc > 0.0) {
                double sq = std::sqrt(disc);
                double r1 = (-q1 - std::copysign(sq, q1)) / 2.0;
                double u1 = r1 / q2;
                double u2 = r1 != 0.0 ? q0 / r1 : u1;
                for (double u : {std::min(u1, u2), std::max(u1, u2)}) {
                    if (u > 0.0 && u < width) cuts.push_back(u);
                }
            }
        } else if (q1 != 0.0) {
            double u = -q0 / q1;
            if (u > 0.0 && u < width) cuts.push_back(u);
        }
        cuts.push_back(width);
        for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
            double part = antider(cuts[k + 1]) - antider(cuts[k]);
            out.half_integral += 0.5 * std::abs(part);
            int s = sign_of(q(0.5 * (cuts[k] + cuts[k + 1])));
            if (s != 0 && current != 0 && s != current) push_root(out, pts[i] + cuts[k], current);
            if (s != 0) current = s;
        }
    }
    if (out.signs.empty()) out.signs.push_back(current == 0 ? 1 : current);
    // Rounding in the suffix sums.
    double scale = std::max(1.0, x.second_moment());
    out.error = 1e-14 * scale * static_cast<double>(pts.size());
    return out;
}

Analysis analyze_numeric(const Law& x, const Law& y) {
    const double maxsd = std::max(x.max_sd(), y.max_sd());
    const double lo = std::min(x.lowest(), y.lowest()) - kWindowSds * maxsd;
    const double hi = std::max(x.highest(), y.highest()) + kWindowSds * maxsd;
    double minsd = kInf;
    for (double s : {x.min_positive_sd(), y.min_positive_sd()}) {
        if (s > 0.0) minsd = std::min(minsd, s);
    }
    // Left of the center H is evaluated through E(X - t)_+^2 = E(X - t)^2 - E(t - X)_+^2
    // so that both sides are small differences instead of large ones.
    const double center = x.mean();
    const double dm = x.mean() - y.mean();
    const double ds = x.second_moment() - y.second_moment();
    auto H = [&](double t) {
        if (t < center) return ds - 2.0 * t * dm + y.lower_square(t) - x.lower_square(t);
        return x.partial_square(t) - y.partial_square(t);
    };
    const double m2 = std::max(x.second_moment(), y.second_moment());

    auto cells = static_cast<std::size_t>(std::ceil((hi - lo) / (0.5 * minsd)));
    cells = std::clamp<std::size_t>(cells, 256, 4096);
    std::vector<double> grid;
    grid.reserve(cells + 1 + x.atoms().size() + y.atoms().size());
    for (std::size_t k = 0; k <= cells; ++k) grid.push_back(lo + (hi - lo) * static_cast<double>(k) / cells);
    for (auto [v, w] : x.atoms()) grid.push_back(v);
    for (auto [v, w] : y.atoms()) grid.push_back(v);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    std::vector<double> hv(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) hv[k] = H(grid[k]);

    Analysis out;
    int current = 0;
    using boost::math::quadrature::gauss_kronrod;
    // Absolute tolerance per cell; boost's own tolerance is relative and never
    // settles on cells where H vanishes.
    const double cell_tol = 1e-11 / static_cast<double>(grid.size());
    std::function<double(double, double, int, double&)> adapt = [&](double a, double b, int depth, double& err) {
        double e = 0.0;
        double v = gauss_kronrod<double, 15>::integrate(H, a, b, 0, 0.0, &e);
        // Rounding floor of H on [a, b].
        double floor = 1e-14 * (1.0 + m2 + a * a + b * b) * (b - a);
        if (e <= std::max(cell_tol, floor) || depth >= 12) {
            err += e;
            return v;
        }
        double m = 0.5 * (a + b);
        return adapt(a, m, depth + 1, err) + adapt(m, b, depth + 1, err);
    };
    auto integrate = [&](double a, double b) {
        double err = 0.0;
        double v = adapt(a, b, 0, err);
        out.half_integral += 0.5 * std::abs(v);
        out.error += 0.5 * err;
        int s = sign_of(v);
        if (s != 0 && current != 0 && s != current) push_root(out, a, current);
        if (s != 0) current = s;
    };
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
        double a = grid[k];
        double b = grid[k + 1];
        if (sign_of(hv[k]) * sign_of(hv[k + 1]) < 0) {
            boost::uintmax_t iters = 60;
            auto tol = boost::math::tools::eps_tolerance<double>(48);
            auto [r0, r1] = boost::math::tools::toms748_solve(H, a, b, hv[k], hv[k + 1], tol, iters);
            double r = 0.5 * (r0 + r1);
            integrate(a, r);
            integrate(r, b);
        } else {
            integrate(a, b);
        }
    }
    if (out.signs.empty()) out.signs.push_back(current == 0 ? 1 : current);

    // Tails beyond the window: |H| <= E(t-X)_+^2 + E(t-Y)_+^2 on the left and
    // E(X-t)_+^2 + E(Y-t)_+^2 on the right.
    out.error += 0.5 * (x.lower_cube(lo) + y.lower_cube(lo) + x.upper_cube(hi) + y.upper_cube(hi)) / 3.0;
    return out;
}

struct Prepared {
    Law y;
    double scale;
    double shift;
};

Prepared match_moments(const Law& x, const Law& y) {
    double mx = x.mean();
    double my = y.mean();
    double sx = x.second_moment();
    double sy = y.second_moment();
    double tol = 1e-9 * std::max(1.0, std::abs(sx));
    if (std::abs(mx - my) > tol || std::abs(sx - sy) > tol) {
        std::ostringstream msg;
        msg << "zeta3 needs matching first two moments: |mean difference| = " << std::abs(mx - my)
            << ", |second moment difference| = " << std::abs(sx - sy) << " (tolerance " << tol << ")";
        throw PreconditionError(msg.str());
    }
    double vx = std::max(sx - mx * mx, 0.0);
    double vy = std::max(sy - my * my, 0.0);
    double scale = vy > 0.0 ? std::sqrt(vx / vy) : 1.0;
    double shift = mx - scale * my;
    if (scale == 1.0 && shift == 0.0) return {y, 1.0, 0.0};
    return {y.affine(scale, shift), scale, shift};
}

Analysis analyze(const Law& x, const Law& y) {
    if (x.normals().empty() && y.normals().empty()) return analyze_atomic(x, y);
    return analyze_numeric(x, y);
}

double lost_mass_penalty(const Law& x, const Law& y) {
    double lost = x.lost_mass() + y.lost_mass();
    if (lost == 0.0) return 0.0;
    double diam = std::max(x.highest(), y.highest()) - std::min(x.lowest(), y.lowest());
    return lost * diam * diam;
}

}  // namespace

// ---------------------------------------------------------------- mixtures

NormalMixture::NormalMixture(std::vector<NormalComponent> components) : components_(std::move(components)) {
    double total = 0.0;
    for (const auto& c : components_) {
        if (c.weight < 0.0) throw InvalidArgument("negative normal mixture weight");
        if (c.sd < 0.0) throw InvalidArgument("negative standard deviation");
        total += c.weight;
    }
    if (std::abs(total - 1.0) > kMassTolerance) throw InvalidArgument("normal mixture weights do not sum to one");
}

double NormalMixture::weight_sum() const {
    double s = 0.0;
    for (const auto& c : components_) s += c.weight;
    return s;
}

double NormalMixture::mean() const {
    double s = 0.0;
    for (const auto& c : components_) s += c.weight * c.mean;
    return s / weight_sum();
}

double NormalMixture::variance() const {
    double m = mean();
    double s = 0.0;
    for (const auto& c : components_) s += c.weight * ((c.mean - m) * (c.mean - m) + c.sd * c.sd);
    return s / weight_sum();
}

NormalMixture NormalMixture::affine(double scale, double shift) const {
    std::vector<NormalComponent> out;
    out.reserve(components_.size());
    for (const auto& c : components_) out.push_back({c.weight, scale * c.mean + shift, std::abs(scale) * c.sd});
    return NormalMixture(std::move(out));
}

// --------------------------------------------------------------------- Law

Law::Law(const RealPmf& p) {
    double mass = p.mass();
    for (const auto& a : p.atoms()) atoms_.emplace_back(a.value, a.prob / mass);
    lost_ = p.lost_mass();
    finish_atoms();
}

Law::Law(const Pmf& p) {
    double mass = p.mass();
    for (const auto& a : p.atoms()) atoms_.emplace_back(a.value.to_double(), a.prob / mass);
    lost_ = p.lost_mass();
    finish_atoms();
}

Law::Law(const NormalMixture& m) {
    double total = m.weight_sum();
    for (const auto& c : m.components()) {
        if (c.weight == 0.0) continue;
        add_normal({c.weight / total, c.mean, c.sd});
    }
    finish_atoms();
}

void Law::add_normal(const NormalComponent& c) {
    if (c.sd == 0.0) {
        atoms_.emplace_back(c.mean, c.weight);
    } else {
        normals_.push_back(c);
    }
}

void Law::finish_atoms() {
    std::sort(atoms_.begin(), atoms_.end());
    std::vector<std::pair<double, double>> merged;
    merged.reserve(atoms_.size());
    for (const auto& a : atoms_) {
        if (a.second == 0.0) continue;
        if (!merged.empty() && ValueTraits<double>::same(merged.back().first, a.first)) {
            merged.back().second += a.second;
        } else {
            merged.push_back(a);
        }
    }
    atoms_ = std::move(merged);
    prefix_.assign(atoms_.size() + 1, 0.0);
    for (std::size_t i = 0; i < atoms_.size(); ++i) prefix_[i + 1] = prefix_[i] + atoms_[i].second;
}

double Law::mean() const {
    double s = 0.0;
    for (auto [v, w] : atoms_) s += w * v;
    for (const auto& c : normals_) s += c.weight * c.mean;
    return s;
}

double Law::second_moment() const {
    double s = 0.0;
    for (auto [v, w] : atoms_) s += w * v * v;
    for (const auto& c : normals_) s += c.weight * (c.mean * c.mean + c.sd * c.sd);
    return s;
}

double Law::max_sd() const {
    double s = 0.0;
    for (const auto& c : normals_) s = std::max(s, c.sd);
    return s;
}

double Law::min_positive_sd() const {
    double s = kInf;
    for (const auto& c : normals_) s = std::min(s, c.sd);
    return std::isfinite(s) ? s : 0.0;
}

double Law::lowest() const {
    double v = kInf;
    if (!atoms_.empty()) v = atoms_.front().first;
    for (const auto& c : normals_) v = std::min(v, c.mean);
    return v;
}

double Law::highest() const {
    double v = -kInf;
    if (!atoms_.empty()) v = atoms_.back().first;
    for (const auto& c : normals_) v = std::max(v, c.mean);
    return v;
}

double Law::partial_square(double t) const {
    double s = 0.0;
    auto it = std::upper_bound(atoms_.begin(), atoms_.end(), t, [](double v, const auto& a) { return v < a.first; });
    for (; it != atoms_.end(); ++it) {
        double d = it->first - t;
        s += it->second * d * d;
    }
    for (const auto& c : normals_) s += c.weight * normal_partial_square_moment(t, c.mean, c.sd);
    return s;
}

double Law::lower_square(double t) const {
    double s = 0.0;
    for (auto [v, w] : atoms_) {
        if (v >= t) break;
        s += w * (t - v) * (t - v);
    }
    for (const auto& c : normals_) s += c.weight * normal_partial_square_moment(-t, -c.mean, c.sd);
    return s;
}

double Law::upper_cube(double t) const {
    double s = 0.0;
    for (auto [v, w] : atoms_) {
        if (v > t) s += w * (v - t) * (v - t) * (v - t);
    }
    for (const auto& c : normals_) s += c.weight * upper_cube_normal(t, c.mean, c.sd);
    return s;
}

double Law::lower_cube(double t) const {
    double s = 0.0;
    for (auto [v, w] : atoms_) {
        if (v < t) s += w * (t - v) * (t - v) * (t - v);
    }
    // E(t - X)_+^3 = E(X' - (-t))_+^3 with X' = -X.
    for (const auto& c : normals_) s += c.weight * upper_cube_normal(-t, -c.mean, c.sd);
    return s;
}

double Law::cdf(double t) const {
    auto it = std::upper_bound(atoms_.begin(), atoms_.end(), t, [](double v, const auto& a) { return v < a.first; });
    double s = prefix_[static_cast<std::size_t>(it - atoms_.begin())];
    for (const auto& c : normals_) s += c.weight * Phi((t - c.mean) / c.sd);
    return s;
}

double Law::cdf_left(double t) const {
    auto it = std::lower_bound(atoms_.begin(), atoms_.end(), t, [](const auto& a, double v) { return a.first < v; });
    double s = prefix_[static_cast<std::size_t>(it - atoms_.begin())];
    for (const auto& c : normals_) s += c.weight * Phi((t - c.mean) / c.sd);
    return s;
}

double Law::density(double t) const {
    double s = 0.0;
    for (const auto& c : normals_) s += c.weight * phi((t - c.mean) / c.sd) / c.sd;
    return s;
}

Law Law::affine(double scale, double shift) const {
    if (scale == 0.0) throw InvalidArgument("affine map with zero scale");
    Law out;
    out.lost_ = lost_;
    for (auto [v, w] : atoms_) out.atoms_.emplace_back(scale * v + shift, w);
    for (const auto& c : normals_) out.normals_.push_back({c.weight, scale * c.mean + shift, std::abs(scale) * c.sd});
    out.finish_atoms();
    return out;
}

// ------------------------------------------------------------------ metrics

double normal_partial_square_moment(double t, double mean, double sd) {
    if (sd < 0.0) throw InvalidArgument("negative standard deviation");
    if (sd == 0.0) {
        double d = std::max(mean - t, 0.0);
        return d * d;
    }
    double z = (mean - t) / sd;
    return sd * sd * ((z * z + 1.0) * Phi(z) + z * phi(z));
}

MetricReport zeta3(const Law& x, const Law& y) {
    Prepared prep = match_moments(x, y);
    Analysis a = analyze(x, prep.y);
    MetricReport r;
    r.value = a.half_integral;
    r.abs_error_bound = a.error + lost_mass_penalty(x, y);
    r.adjust_scale = prep.scale;
    r.adjust_shift = prep.shift;
    return r;
}

double zeta3_lower_probe(const Law& x, const Law& y) {
    Prepared prep = match_moments(x, y);
    Analysis a = analyze(x, prep.y);
    PiecewiseCubic f(a.roots, a.signs, x.mean());
    return std::abs(f.expectation(x) - f.expectation(prep.y));
}

double kolmogorov(const Law& x, const Law& y) {
    double best = 0.0;
    auto consider = [&](double t) {
        best = std::max(best, std::abs(x.cdf(t) - y.cdf(t)));
        best = std::max(best, std::abs(x.cdf_left(t) - y.cdf_left(t)));
    };
    for (auto [v, w] : x.atoms()) consider(v);
    for (auto [v, w] : y.atoms()) consider(v);
    if (x.normals().empty() && y.normals().empty()) return best;

    // Between atoms F_x - F_y is smooth; its extrema sit where the normal
    // densities agree.
    const double maxsd = std::max(x.max_sd(), y.max_sd());
    const double lo = std::min(x.lowest(), y.lowest()) - kWindowSds * maxsd;
    const double hi = std::max(x.highest(), y.highest()) + kWindowSds * maxsd;
    auto g = [&](double t) { return x.density(t) - y.density(t); };
    constexpr int cells = 1024;
    double prev_t = lo;
    double prev_g = g(lo);
    consider(lo);
    for (int k = 1; k <= cells; ++k) {
        double t = lo + (hi - lo) * k / cells;
        double gt = g(t);
        consider(t);
        if (sign_of(prev_g) * sign_of(gt) < 0) {
            boost::uintmax_t iters = 60;
            auto tol = boost::math::tools::eps_tolerance<double>(48);
            auto [r0, r1] = boost::math::tools::toms748_solve(g, prev_t, t, prev_g, gt, tol, iters);
            consider(0.5 * (r0 + r1));
        }
        prev_t = t;
        prev_g = gt;
    }
    return best;
}

double wasserstein1(const RealPmf& x, const RealPmf& y) {
    Law lx(x);
    Law ly(y);
    std::vector<double> pts;
    for (auto [v, w] : lx.atoms()) pts.push_back(v);
    for (auto [v, w] : ly.atoms()) pts.push_back(v);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        s += std::abs(lx.cdf(pts[i]) - ly.cdf(pts[i])) * (pts[i + 1] - pts[i]);
    }
    return s;
}

double wasserstein1(const Pmf& x, const Pmf& y) { return wasserstein1(to_real(x), to_real(y)); }

// ------------------------------------------------------------ piecewise cubic

PiecewiseCubic::PiecewiseCubic(std::vector<double> knots, std::vector<double> third, double anchor, double f0,
                               double f1, double f2) {
    if (third.size() != knots.size() + 1) throw InvalidArgument("need one third derivative per interval");
    if (!std::is_sorted(knots.begin(), knots.end())) throw InvalidArgument("knots must be sorted");
    const std::size_t m = third.size();
    std::vector<double> lefts(m);
    lefts[0] = -kInf;
    for (std::size_t i = 1; i < m; ++i) lefts[i] = knots[i - 1];
    std::size_t home = static_cast<std::size_t>(std::upper_bound(knots.begin(), knots.end(), anchor) - knots.begin());

    pieces_.resize(m);
    auto make = [&](std::size_t i, double origin, double v, double d1, double d2) {
        pieces_[i] = Piece{lefts[i], v, d1, d2 / 2.0, third[i] / 6.0, origin};
    };
    // Value, first and second derivative of piece i at x.
    auto taylor = [&](std::size_t i, double x) {
        const Piece& p = pieces_[i];
        double u = x - p.origin;
        double v = p.c0 + u * (p.c1 + u * (p.c2 + u * p.c3));
        double d1 = p.c1 + u * (2.0 * p.c2 + 3.0 * u * p.c3);
        double d2 = 2.0 * p.c2 + 6.0 * u * p.c3;
        return std::array<double, 3>{v, d1, d2};
    };
    make(home, anchor, f0, f1, f2);
    for (std::size_t i = home + 1; i < m; ++i) {
        auto t = taylor(i - 1, knots[i - 1]);
        make(i, knots[i - 1], t[0], t[1], t[2]);
    }
    for (std::size_t i = home; i-- > 0;) {
        auto t = taylor(i + 1, knots[i]);
        make(i, knots[i], t[0], t[1], t[2]);
    }
}

std::size_t PiecewiseCubic::locate(double x) const {
    auto it = std::upper_bound(pieces_.begin() + 1, pieces_.end(), x,
                               [](double v, const Piece& p) { return v < p.left; });
    return static_cast<std::size_t>(it - pieces_.begin()) - 1;
}

double PiecewiseCubic::operator()(double x) const {
    const Piece& p = pieces_[locate(x)];
    double u = x - p.origin;
    return p.c0 + u * (p.c1 + u * (p.c2 + u * p.c3));
}

double PiecewiseCubic::second_derivative(double x) const {
    const Piece& p = pieces_[locate(x)];
    return 2.0 * p.c2 + 6.0 * (x - p.origin) * p.c3;
}

double PiecewiseCubic::expectation(const Law& law) const {
    double s = 0.0;
    for (auto [v, w] : law.atoms()) s += w * (*this)(v);
    for (const auto& c : law.normals()) {
        double acc = 0.0;
        for (std::size_t i = 0; i < pieces_.size(); ++i) {
            const Piece& p = pieces_[i];
            double left = p.left;
            double right = i + 1 < pieces_.size() ? pieces_[i + 1].left : kInf;
            double a = (left - c.mean) / c.sd;
            double b = (right - c.mean) / c.sd;
            // Polynomial in z with u = d + sd z.
            double d = c.mean - p.origin;
            double sd = c.sd;
            double e0 = p.c0 + d * (p.c1 + d * (p.c2 + d * p.c3));
            double e1 = sd * (p.c1 + d * (2.0 * p.c2 + 3.0 * d * p.c3));
            double e2 = sd * sd * (p.c2 + 3.0 * d * p.c3);
            double e3 = sd * sd * sd * p.c3;
            // Truncated standard normal moments over [a, b].
            double m0 = Phi_diff(a, b);
            double m1 = phi(a) - phi(b);
            double m2 = m0 + zpow_phi(a, 1) - zpow_phi(b, 1);
            double m3 = 2.0 * m1 + zpow_phi(a, 2) - zpow_phi(b, 2);
            acc += e0 * m0 + e1 * m1 + e2 * m2 + e3 * m3;
        }
        s += c.weight * acc;
    }
    return s;
}

}  // namespace dcm
