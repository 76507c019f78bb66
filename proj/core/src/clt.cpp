#include "dcm/clt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dcm {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double ln_or_one(Index n) { return n >= 2 ? std::log(static_cast<double>(n)) : 1.0; }

}  // namespace

double l_delta(Index n, double delta) {
    if (!(delta > 0.0)) throw InvalidArgument("delta must be positive");
    if (n < 0) throw InvalidArgument("negative index");
    if (n <= 1) return delta;
    return std::log(static_cast<double>(n));
}

BetaResult beta_exponent(const CltParams& p, int copies) {
    p.validate();
    if (copies < 1) throw InvalidArgument("need at least one copy");
    double beta = std::min({1.5, 3.0 * (p.alpha - p.kappa), 3.0 * (p.alpha - p.lambda / 2.0), p.alpha - p.kappa + 1.0});
    if (copies >= 2) beta = std::min(beta, 3.0 * (p.alpha - p.xi));
    return {beta, beta > 1.0};
}

// ---------------------------------------------------------------- verifier

CltVerifier::CltVerifier(RecurrenceSpec spec, CltParams params, SolveOptions opts)
    : spec_(std::move(spec)), opts_(opts), params_(params) {
    params_.validate();
    spec_.validate();
    if (spec_.tabulated()) solver_ = std::make_shared<Solver>(spec_, opts_);
}

Solver& CltVerifier::solver() {
    require_tabulated();
    return *solver_;
}

double CltVerifier::scale(Index n) const { return std::sqrt(params_.C) * std::pow(L(n), params_.alpha); }

void CltVerifier::require_tabulated() const {
    if (!spec().tabulated()) {
        throw UnsupportedError("'" + spec().name + "' has no tabulated joint law; the proof constructs need exact laws");
    }
}

MomentRow CltVerifier::moments(Index n) {
    {
        std::lock_guard lock(cache_mutex_);
        auto k = static_cast<std::size_t>(n);
        if (k < moments_.size() && moments_[k]) return *moments_[k];
    }
    require_tabulated();
    MomentRow row = moment_table(solver(), {n}).front();
    std::lock_guard lock(cache_mutex_);
    auto k = static_cast<std::size_t>(n);
    if (moments_.size() <= k) moments_.resize(k + 1);
    moments_[k] = row;
    return row;
}

double CltVerifier::tau(Index n) { return std::sqrt(moments(n).variance) / scale(n); }

RealPmf CltVerifier::standardized_law(Index n) {
    require_tabulated();
    auto law = solver().solve(n);
    double mu = moments(n).mean;
    double s = scale(n);
    return affine_real(*law, 1.0 / s, -mu / s);
}

AccompanyingLaw CltVerifier::accompanying_law(Index n) {
    require_tabulated();
    if (n < spec().n0) throw InvalidArgument("accompanying law needs n >= n0");
    const int K = spec().copies;
    const double mu_n = moments(n).mean;
    const double s = scale(n);
    const double Ln = L(n);
    const double a = params_.alpha;

    AccompanyingLaw out;
    out.tau = tau(n);
    JointTable<double> table = spec().joint_law(n, opts_.tail_eps);
    double total = 0.0;
    for (const auto& atom : table.atoms) total += atom.prob;

    std::vector<NormalComponent> comps;
    comps.reserve(table.atoms.size());
    out.atoms.reserve(table.atoms.size());
    for (const auto& atom : table.atoms) {
        double w = atom.prob / total;
        double shift = atom.toll.to_double() - mu_n;
        double var = 0.0;
        double G = 0.0;
        double other = 0.0;
        for (int r = 0; r < K; ++r) {
            Index i = atom.indices[static_cast<std::size_t>(r)];
            shift += moments(i).mean;
            double c = std::pow(L(i) / Ln, a) * tau(i);
            var += c * c;
            if (r == 0) {
                G = c;
            } else {
                other += std::pow(std::log(static_cast<double>(std::max<Index>(i, 1))), 3.0 * a);
            }
        }
        double b = shift / s;
        comps.push_back({w, b, std::sqrt(var)});
        out.atoms.push_back({w, b, G, std::sqrt(std::abs(G * G - out.tau * out.tau)), other});
    }
    out.mixture = NormalMixture(std::move(comps));
    return out;
}

Bound23 CltVerifier::bound23_terms(Index n) {
    AccompanyingLaw acc = accompanying_law(n);
    Bound23 t;
    double dt = std::abs(acc.tau - 1.0);
    double b2 = 0.0;
    double g2 = 0.0;
    double other = 0.0;
    t.tau_term = dt * dt * dt;
    for (const auto& a : acc.atoms) {
        t.delta_term += a.weight * a.Delta * a.Delta * a.Delta;
        t.b_term += a.weight * std::pow(std::abs(a.b), 3.0);
        t.g_term += a.weight * std::pow(std::abs(a.G - 1.0), 3.0);
        b2 += a.weight * a.b * a.b;
        g2 += a.weight * (a.G - 1.0) * (a.G - 1.0);
        other += a.weight * a.other;
    }
    t.mixed_term = std::sqrt(b2) * (dt + std::sqrt(g2));
    if (spec().copies >= 2) t.index_term = other / std::pow(ln_or_one(n), 3.0 * params_.alpha);
    return t;
}

MetricReport CltVerifier::zeta3_to_normal(Index n) {
    require_tabulated();
    MomentRow m = moments(n);
    if (!(m.variance > 0.0)) {
        throw PreconditionError("sigma_n = 0 at n=" + std::to_string(n) + ": standardized law undefined");
    }
    double sd = std::sqrt(m.variance);
    RealPmf x = affine_real(*solver().solve(n), 1.0 / sd, -m.mean / sd);
    return zeta3(x, NormalMixture::standard());
}

double CltVerifier::kolmogorov_to_normal(Index n) {
    require_tabulated();
    MomentRow m = moments(n);
    if (!(m.variance > 0.0)) return kNaN;
    double sd = std::sqrt(m.variance);
    RealPmf x = affine_real(*solver().solve(n), 1.0 / sd, -m.mean / sd);
    return kolmogorov(x, NormalMixture::standard());
}

MetricReport CltVerifier::zeta3_Z_N(Index n) {
    return zeta3(standardized_law(n), NormalMixture::normal(0.0, tau(n)));
}

MetricReport CltVerifier::zeta3_Z_Zstar(Index n) { return zeta3(standardized_law(n), accompanying_law(n).mixture); }

MetricReport CltVerifier::zeta3_Zstar_N(Index n) {
    AccompanyingLaw acc = accompanying_law(n);
    return zeta3(acc.mixture, NormalMixture::normal(0.0, acc.tau));
}

std::vector<MetricReport> CltVerifier::d_series(Index up_to) {
    std::vector<MetricReport> out;
    out.reserve(static_cast<std::size_t>(up_to + 1));
    for (Index k = 0; k <= up_to; ++k) {
        {
            std::lock_guard lock(cache_mutex_);
            auto i = static_cast<std::size_t>(k);
            if (i < d_.size() && d_[i]) {
                out.push_back(*d_[i]);
                continue;
            }
        }
        MetricReport r = zeta3_Z_N(k);
        std::lock_guard lock(cache_mutex_);
        auto i = static_cast<std::size_t>(k);
        if (d_.size() <= i) d_.resize(i + 1);
        d_[i] = r;
        out.push_back(r);
    }
    return out;
}

VerifyRow CltVerifier::verify_row(Index n) {
    VerifyRow row;
    row.n = n;
    AccompanyingLaw acc = accompanying_law(n);
    row.tau = acc.tau;
    double b3 = 0.0;
    double g3 = 0.0;
    double d3 = 0.0;
    for (const auto& a : acc.atoms) {
        b3 += a.weight * std::pow(std::abs(a.b), 3.0);
        g3 += a.weight * std::pow(std::abs(a.G - 1.0), 3.0);
        d3 += a.weight * a.Delta * a.Delta * a.Delta;
    }
    row.b3norm = std::cbrt(b3);
    row.G3norm = std::cbrt(g3);
    row.delta3norm = std::cbrt(d3);
    row.zeta3_ZN = zeta3_Z_N(n);
    row.zeta3_ZstarN = zeta3(acc.mixture, NormalMixture::normal(0.0, acc.tau));
    row.bound23_sum = bound23_terms(n).sum();
    row.kolmogorov = kolmogorov_to_normal(n);
    return row;
}

ConditionReport CltVerifier::check_conditions(const std::vector<Index>& ns) {
    const int K = spec().copies;
    const double a = params_.alpha;
    ConditionReport rep;
    double max_drift = -std::numeric_limits<double>::infinity();
    for (Index n : ns) {
        if (n < spec().n0 || n < 2) continue;
        ConditionRow row;
        row.n = n;
        const double ln_n = std::log(static_cast<double>(n));
        double l3 = 0.0;
        std::vector<double> idx(static_cast<std::size_t>(K), 0.0);
        for (const auto& atom : spec().index_marginal(n)) {
            double lg = -ln_n;
            for (int r = 0; r < K; ++r) {
                Index i = atom.indices[static_cast<std::size_t>(r)];
                lg += std::log(static_cast<double>(std::max<Index>(i, 1)));
                if (i == n) row.self_mass += atom.prob;
                if (r >= 1) {
                    idx[static_cast<std::size_t>(r)] +=
                        atom.prob * std::pow(std::log(static_cast<double>(std::max<Index>(i, 1))), 3.0 * a);
                }
            }
            row.drift += atom.prob * lg;
            l3 += atom.prob * std::abs(lg * lg * lg);
        }
        row.log_l3 = std::cbrt(l3);
        for (int r = 1; r < K; ++r) {
            row.index_scaled =
                std::max(row.index_scaled, std::cbrt(idx[static_cast<std::size_t>(r)]) / std::pow(ln_n, params_.xi));
        }

        row.toll_scaled = kNaN;
        if (spec().tabulated()) {
            try {
                double mu_n = moments(n).mean;
                double s3 = 0.0;
                double total = 0.0;
                for (const auto& atom : spec().joint_law(n, opts_.tail_eps).atoms) {
                    double v = atom.toll.to_double() - mu_n;
                    for (int r = 0; r < K; ++r) v += moments(atom.indices[static_cast<std::size_t>(r)]).mean;
                    s3 += atom.prob * std::abs(v * v * v);
                    total += atom.prob;
                }
                row.toll_scaled = std::cbrt(s3 / total) / std::pow(ln_n, params_.kappa);
            } catch (const CapacityError& e) {
                rep.flags.push_back("toll norm skipped at n=" + std::to_string(n) + ": " + e.what());
            }
        }

        if (!(row.drift < 0.0)) {
            rep.drift_negative = false;
            rep.flags.push_back("nonnegative drift at n=" + std::to_string(n));
        }
        if (!(row.self_mass < 1.0)) {
            rep.self_mass_below_one = false;
            rep.flags.push_back("self-index mass 1 at n=" + std::to_string(n));
        }
        max_drift = std::max(max_drift, row.drift);
        rep.rows.push_back(row);
    }

    auto check_trend = [&](const char* what, auto get) {
        std::vector<double> v;
        for (const auto& r : rep.rows) {
            double x = get(r);
            if (std::isfinite(x)) v.push_back(x);
        }
        if (v.size() < 3) return;
        double lo = *std::min_element(v.begin(), v.end());
        if (v.back() > 2.0 * lo && v.back() > 1e-12) {
            rep.norms_bounded = false;
            rep.flags.push_back(std::string(what) + " grows over the window");
        }
    };
    check_trend("||ln((I v 1)/n)||_3", [](const ConditionRow& r) { return r.log_l3; });
    check_trend("toll norm / ln^kappa n", [](const ConditionRow& r) { return r.toll_scaled; });
    if (K >= 2) check_trend("||ln^alpha(I_r v 1)||_3 / ln^xi n", [](const ConditionRow& r) { return r.index_scaled; });
    rep.epsilon_estimate = rep.rows.empty() ? 0.0 : -max_drift;
    return rep;
}

// -------------------------------------------------------------------- fits

RateFit fit_rate(std::span<const std::pair<Index, double>> series) {
    if (series.size() < 4) throw InvalidArgument("rate fit needs at least 4 points");
    double sx = 0.0;
    double sy = 0.0;
    double sxx = 0.0;
    double sxy = 0.0;
    for (auto [n, d] : series) {
        if (!(d > 0.0)) throw InvalidArgument("rate fit needs positive values (n=" + std::to_string(n) + ")");
        if (n < 3) throw InvalidArgument("rate fit needs n >= 3");
        double x = std::log(std::log(static_cast<double>(n)));
        double y = std::log(d);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double m = static_cast<double>(series.size());
    double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    double intercept = (sy - slope * sx) / m;
    RateFit fit;
    fit.exponent = -slope;
    fit.constant = std::exp(intercept);
    for (auto [n, d] : series) {
        double model = fit.constant / std::pow(std::log(static_cast<double>(n)), fit.exponent);
        fit.residual = std::max(fit.residual, std::abs(model / d - 1.0));
    }
    return fit;
}

double fit_variance_constant(const std::vector<MomentRow>& rows, double alpha, double lambda) {
    if (rows.empty()) throw InvalidArgument("no rows to fit");
    // Normal equations for var = C x1 + D x2.
    double a11 = 0.0;
    double a12 = 0.0;
    double a22 = 0.0;
    double r1 = 0.0;
    double r2 = 0.0;
    for (const auto& row : rows) {
        if (row.n < 2) throw InvalidArgument("variance fit needs n >= 2");
        double ln_n = std::log(static_cast<double>(row.n));
        double x1 = std::pow(ln_n, 2.0 * alpha);
        double x2 = std::pow(ln_n, lambda);
        a11 += x1 * x1;
        a12 += x1 * x2;
        a22 += x2 * x2;
        r1 += x1 * row.variance;
        r2 += x2 * row.variance;
    }
    double det = a11 * a22 - a12 * a12;
    double C = rows.size() >= 2 && std::abs(det) > 1e-12 * a11 * a22 ? (r1 * a22 - r2 * a12) / det : r1 / a11;
    if (!(C > 0.0)) throw PreconditionError("fitted variance constant is not positive");
    return C;
}

// ------------------------------------------------------------------ lemmas

std::vector<Lemma32Violation> lemma32_check(double alpha, Index n_max) {
    if (!(alpha > 0.0)) throw InvalidArgument("alpha must be positive");
    if (n_max < 3) throw InvalidArgument("n_max must be at least 3");
    std::vector<Lemma32Violation> out;
    const double c = std::max(2.0, alpha);
    for (Index n = 3; n <= n_max; ++n) {
        const double ln_n = std::log(static_cast<double>(n));
        for (Index i = 1; i <= n; ++i) {
            double ln_i = std::log(static_cast<double>(i));
            double lhs = std::abs(std::pow(ln_i / ln_n, alpha) - 1.0);
            double rhs = c / ln_n * std::abs(ln_i - ln_n);
            if (lhs > rhs * (1.0 + 1e-12) + 1e-15) out.push_back({n, i, lhs, rhs});
        }
    }
    return out;
}

TransferReport lemma31_transfer(const TransferInput& in) {
    TransferReport rep;
    const auto max_k = static_cast<Index>(in.d.size()) - 1;
    for (Index n = 3; n <= max_k; ++n) {
        rep.sup_d_scaled = std::max(rep.sup_d_scaled,
                                    in.d[static_cast<std::size_t>(n)].value * std::pow(std::log(static_cast<double>(n)), in.beta - 1.0));
    }
    for (const auto& [n, r] : in.r) {
        if (n > max_k) throw InvalidArgument("d series does not reach n=" + std::to_string(n));
        if (n >= 3) rep.sup_r_scaled = std::max(rep.sup_r_scaled, r.value * std::pow(std::log(static_cast<double>(n)), in.beta));
        const double Ln = l_delta(n, in.delta);
        TransferPoint pt;
        pt.n = n;
        pt.d = in.d[static_cast<std::size_t>(n)].value;
        pt.rhs = r.value;
        pt.allowance = in.d[static_cast<std::size_t>(n)].abs_error_bound + r.abs_error_bound + 1e-12;
        for (const auto& atom : in.index_law(n)) {
            for (int c = 0; c < in.copies; ++c) {
                Index k = atom.indices[static_cast<std::size_t>(c)];
                if (k > max_k) throw InvalidArgument("d series does not reach index " + std::to_string(k));
                double f = atom.prob * std::pow(l_delta(k, in.delta) / Ln, in.gamma);
                pt.rhs += f * in.d[static_cast<std::size_t>(k)].value;
                pt.allowance += f * in.d[static_cast<std::size_t>(k)].abs_error_bound;
            }
        }
        pt.holds = pt.d <= pt.rhs + pt.allowance;
        if (!pt.holds && !rep.first_violation) rep.first_violation = n;
        rep.points.push_back(pt);
    }
    return rep;
}

}  // namespace dcm
