#pragma once

// Normal limit laws for degenerate recurrences: the scaling
//
//     Z_n = (Y_n - mu_n) / (sqrt(C) L^alpha(n)),   L(n) = ln(n v 1) + delta 1{n in {0,1}},
//
// the accompanying variables Z_n*, the remainder terms bounding
// zeta_3(Z_n*, N_n), and numerical checks of the transfer inequality
//
//     d_n <= E[ sum_r (L(I_r)/L(n))^{3 alpha} d_{I_r} ] + r_n.

#include "dcm/metrics.hpp"
#include "dcm/params.hpp"
#include "dcm/recurrence.hpp"

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dcm {

double l_delta(Index n, double delta);

struct BetaResult {
    double beta = 0.0;
    bool applicable = false;  // beta > 1
};

/// min(3/2, 3(alpha - kappa), 3(alpha - lambda/2), alpha - kappa + 1),
/// and additionally 3(alpha - xi) when K >= 2.
BetaResult beta_exponent(const CltParams& params, int copies);

struct AccompanyingLaw {
    NormalMixture mixture;  // law of Z_n*
    // Per joint atom, aligned with the mixture components.
    struct Atom {
        double weight;
        double b;      // b^(n)
        double G;      // (L(I_1)/L(n))^alpha tau_{I_1}
        double Delta;  // |G^2 - tau_n^2|^{1/2}
        double other;  // sum over r >= 2 of ln^{3 alpha}(I_r v 1)
    };
    std::vector<Atom> atoms;
    double tau = 0.0;
};

struct Bound23 {
    double tau_term = 0.0;    // |tau_n - 1|^3
    double delta_term = 0.0;  // ||Delta_n||_3^3
    double b_term = 0.0;      // ||b^(n)||_3^3
    double g_term = 0.0;      // ||G_n - 1||_3^3
    double mixed_term = 0.0;  // ||b^(n)||_2 (|tau_n - 1| + ||G_n - 1||_2)
    double index_term = 0.0;  // K >= 2: ln^{-3 alpha} n sum_{r>=2} ||ln^alpha(I_r v 1)||_3^3
    double sum() const { return tau_term + delta_term + b_term + g_term + mixed_term + index_term; }
};

struct VerifyRow {
    Index n = 0;
    double tau = 0.0;
    double b3norm = 0.0;      // ||b^(n)||_3
    double G3norm = 0.0;      // ||G_n - 1||_3
    double delta3norm = 0.0;  // ||Delta_n||_3
    MetricReport zeta3_ZN;
    MetricReport zeta3_ZstarN;
    double bound23_sum = 0.0;
    double kolmogorov = 0.0;  // standardized Y_n against N(0,1); NaN when sigma_n = 0
};

struct ConditionRow {
    Index n = 0;
    double drift = 0.0;        // E ln(prod_r (I_r v 1) / n)
    double log_l3 = 0.0;       // ||ln(prod_r (I_r v 1) / n)||_3
    double self_mass = 0.0;    // sum_r P(I_r = n)
    double toll_scaled = 0.0;  // ||b_n - mu_n + sum_r mu_{I_r}||_3 / ln^kappa n; NaN when tolls are not tabulated
    double index_scaled = 0.0; // max_{r>=2} ||ln^alpha(I_r v 1)||_3 / ln^xi n (K >= 2)
};

struct ConditionReport {
    std::vector<ConditionRow> rows;
    bool drift_negative = true;
    bool self_mass_below_one = true;
    bool norms_bounded = true;  // heuristic: last scaled norm at most twice the smallest
    // -max drift over the window; the proof's epsilon, estimated.
    double epsilon_estimate = 0.0;
    std::vector<std::string> flags;
    bool ok() const { return drift_negative && self_mass_below_one && norms_bounded; }
};

/// Proof machinery for one recurrence. Holds a memoized solver and caches
/// moments and the distances d_k = zeta_3(Z_k, N_k).
class CltVerifier {
public:
    CltVerifier(RecurrenceSpec spec, CltParams params, SolveOptions opts = {});

    const RecurrenceSpec& spec() const { return spec_; }
    const CltParams& params() const { return params_; }
    // UnsupportedError for sampler-only specs; only check_conditions and the
    // parameter helpers work without a tabulated joint law.
    Solver& solver();

    double L(Index n) const { return l_delta(n, params_.delta); }
    double scale(Index n) const;  // sqrt(C) L^alpha(n)

    MomentRow moments(Index n);
    double tau(Index n);

    RealPmf standardized_law(Index n);  // Z_n
    AccompanyingLaw accompanying_law(Index n);
    Bound23 bound23_terms(Index n);

    // (Y_n - mu_n)/sigma_n against N(0,1); PreconditionError when sigma_n = 0.
    MetricReport zeta3_to_normal(Index n);
    double kolmogorov_to_normal(Index n);

    MetricReport zeta3_Z_N(Index n);      // d_n
    MetricReport zeta3_Z_Zstar(Index n);
    MetricReport zeta3_Zstar_N(Index n);  // r_n

    // d_0 .. d_up_to, each with its error bound.
    std::vector<MetricReport> d_series(Index up_to);

    VerifyRow verify_row(Index n);
    ConditionReport check_conditions(const std::vector<Index>& ns);

private:
    void require_tabulated() const;

    RecurrenceSpec spec_;
    SolveOptions opts_;
    std::shared_ptr<Solver> solver_;
    CltParams params_;
    std::mutex cache_mutex_;
    std::vector<std::optional<MomentRow>> moments_;
    std::vector<std::optional<MetricReport>> d_;
};

struct RateFit {
    double exponent = 0.0;
    double constant = 0.0;
    double residual = 0.0;  // max |fit/d - 1|
};

/// Least squares of ln d_n on ln ln n for the model d_n = c / ln^e n.
RateFit fit_rate(std::span<const std::pair<Index, double>> series);

/// C in Var(Y_n) = C ln^{2 alpha} n + D ln^lambda n by least squares.
double fit_variance_constant(const std::vector<MomentRow>& rows, double alpha, double lambda);

struct Lemma32Violation {
    Index n;
    Index i;
    double lhs;
    double rhs;
};

/// All 3 <= n <= n_max, 1 <= i <= n with
/// |(ln i / ln n)^alpha - 1| > (2 v alpha) |ln(i/n)| / ln n.
std::vector<Lemma32Violation> lemma32_check(double alpha, Index n_max);

struct TransferPoint {
    Index n = 0;
    double d = 0.0;
    double rhs = 0.0;        // E sum_r (L(I_r)/L(n))^gamma d_{I_r} + r_n
    double allowance = 0.0;  // numerical error budget of the comparison
    bool holds = true;
};

struct TransferReport {
    std::vector<TransferPoint> points;
    std::optional<Index> first_violation;
    double sup_d_scaled = 0.0;  // sup d_n ln^{beta-1} n over n >= 3
    double sup_r_scaled = 0.0;  // sup r_n ln^beta n over n >= 3
    bool holds() const { return !first_violation.has_value(); }
};

struct TransferInput {
    std::vector<MetricReport> d;                   // d_0 .. d_N
    std::map<Index, MetricReport> r;               // r_n at the checked n
    std::function<std::vector<IndexAtom>(Index)> index_law;
    int copies = 1;
    double gamma = 1.5;
    double beta = 1.5;
    double delta = 0.1;
};

/// Checks the hypothesis inequality of the transfer lemma at every n with
/// an r_n entry and reports the scaled suprema.
TransferReport lemma31_transfer(const TransferInput& in);

}  // namespace dcm
