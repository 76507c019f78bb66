#pragma once

// Finite discrete probability laws and the algebra the recurrence engine
// needs: convolution, affine maps, mixtures, moments and tail truncation.
//
// BasicPmf<V, P> is instantiated three ways:
//   Pmf      rational atoms, double probabilities (large-n dynamic programs)
//   ExactPmf rational atoms, exact rational probabilities (oracle checks)
//   RealPmf  double atoms, double probabilities (standardized laws)
//
// A Pmf never renormalizes silently. Mass removed by truncation is kept in
// lost_mass so that sum(probs) + lost_mass stays equal to one.

#include "dcm/errors.hpp"
#include "dcm/rational.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <utility>
#include <vector>

namespace dcm {

template <class V>
struct ValueTraits;

template <>
struct ValueTraits<Rational> {
    static bool same(const Rational& a, const Rational& b) { return a == b; }
    static double to_double(const Rational& v) { return v.to_double(); }
    static bool integral(const Rational& v) { return v.is_integer(); }
    static std::int64_t as_int(const Rational& v) { return v.num(); }
    static Rational from_int(std::int64_t v) { return Rational(v); }
};

template <>
struct ValueTraits<double> {
    // Standardized atoms are irrational; atoms this close are the same atom.
    static constexpr double kMergeTolerance = 1e-12;
    static bool same(double a, double b) { return std::abs(a - b) <= kMergeTolerance * std::max(1.0, std::abs(a)); }
    static double to_double(double v) { return v; }
    static bool integral(double) { return false; }
    static std::int64_t as_int(double v) { return static_cast<std::int64_t>(v); }
    static double from_int(std::int64_t v) { return static_cast<double>(v); }
};

template <class P>
struct ProbTraits;

template <>
struct ProbTraits<double> {
    static double to_double(double p) { return p; }
    static double from_double(double p) { return p; }
};

template <>
struct ProbTraits<BigRational> {
    static double to_double(const BigRational& p) { return p.convert_to<double>(); }
    static BigRational from_double(double) {
        throw InvalidArgument("exact probabilities cannot be built from floating values");
    }
};

// Absolute tolerance on sum(probs) + lost_mass = 1 in floating mode.
inline constexpr double kMassTolerance = 1e-12;

template <class V, class P>
class BasicPmf {
public:
    using value_type = V;
    using prob_type = P;

    struct Atom {
        V value;
        P prob;
    };

    // Point mass at zero.
    BasicPmf() : atoms_{Atom{V(0), P(1)}} {}

    static BasicPmf point(const V& value) {
        BasicPmf p;
        p.atoms_.front().value = value;
        return p;
    }

    /// Builds a law from arbitrary (value, prob) pairs: sorts, merges equal
    /// atoms and drops zero weights. Throws InvalidArgument on a negative
    /// weight or when sum(probs) + lost differs from one.
    static BasicPmf from_atoms(std::vector<Atom> atoms, P lost = P(0)) {
        for (const auto& a : atoms) {
            if (a.prob < 0) throw InvalidArgument("negative probability in pmf");
        }
        if (lost < 0) throw InvalidArgument("negative lost mass");
        BasicPmf p = from_unchecked(std::move(atoms), std::move(lost));
        p.check_mass();
        return p;
    }

    // No mass check: used for intermediate, unnormalized mixtures.
    static BasicPmf from_unchecked(std::vector<Atom> atoms, P lost) {
        BasicPmf p;
        p.atoms_ = merge_sorted(std::move(atoms));
        p.lost_ = std::move(lost);
        return p;
    }

    std::span<const Atom> atoms() const { return atoms_; }
    std::size_t size() const { return atoms_.size(); }
    bool empty() const { return atoms_.empty(); }
    const P& lost_mass() const { return lost_; }
    const V& min_value() const { return atoms_.front().value; }
    const V& max_value() const { return atoms_.back().value; }

    P mass() const {
        P s(0);
        for (const auto& a : atoms_) s += a.prob;
        return s;
    }

    // mass + lost_mass; one for every proper law.
    P total() const { return mass() + lost_; }

    bool integral() const {
        return std::all_of(atoms_.begin(), atoms_.end(),
                           [](const Atom& a) { return ValueTraits<V>::integral(a.value); });
    }

    void check_mass() const {
        if constexpr (std::is_same_v<P, double>) {
            if (std::abs(total() - 1.0) > kMassTolerance) {
                throw InvalidArgument("pmf mass plus lost mass differs from one");
            }
        } else {
            if (total() != P(1)) throw InvalidArgument("pmf mass plus lost mass differs from one");
        }
    }

    friend bool operator==(const BasicPmf& a, const BasicPmf& b) {
        if (a.atoms_.size() != b.atoms_.size() || !(a.lost_ == b.lost_)) return false;
        for (std::size_t i = 0; i < a.atoms_.size(); ++i) {
            if (!(a.atoms_[i].value == b.atoms_[i].value) || !(a.atoms_[i].prob == b.atoms_[i].prob)) return false;
        }
        return true;
    }

private:
    static std::vector<Atom> merge_sorted(std::vector<Atom> atoms) {
        std::stable_sort(atoms.begin(), atoms.end(), [](const Atom& x, const Atom& y) { return x.value < y.value; });
        std::vector<Atom> out;
        out.reserve(atoms.size());
        for (auto& a : atoms) {
            if (a.prob == P(0)) continue;
            if (!out.empty() && ValueTraits<V>::same(out.back().value, a.value)) {
                out.back().prob += a.prob;
            } else {
                out.push_back(std::move(a));
            }
        }
        return out;
    }

    std::vector<Atom> atoms_;
    P lost_ = P(0);
};

using Pmf = BasicPmf<Rational, double>;
using ExactPmf = BasicPmf<Rational, BigRational>;
using RealPmf = BasicPmf<double, double>;

/// Accumulates weighted, shifted copies of laws and single atoms.
///
/// Integer-valued input over a bounded range goes into a dense buffer indexed
/// by value; anything else falls back to sort-and-merge. Weights are not
/// required to sum to one, so partial mixtures can be built and combined.
template <class V, class P>
class MixtureBuilder {
public:
    using Law = BasicPmf<V, P>;

    // include_lost = false adds the atoms only; convolve() books lost mass itself.
    void add(const P& weight, const Law& law, const V& shift = V(0), bool include_lost = true) {
        if (weight < 0) throw InvalidArgument("negative mixture weight");
        if (weight == P(0)) return;
        if (include_lost) lost_ += weight * law.lost_mass();
        if (law.empty()) return;
        if (dense_ok(law, shift)) {
            std::int64_t s = ValueTraits<V>::as_int(shift);
            reserve(ValueTraits<V>::as_int(law.min_value()) + s, ValueTraits<V>::as_int(law.max_value()) + s);
            for (const auto& a : law.atoms()) {
                dense_[static_cast<std::size_t>(ValueTraits<V>::as_int(a.value) + s - base_)] += weight * a.prob;
            }
            return;
        }
        to_sparse();
        for (const auto& a : law.atoms()) sparse_.push_back({a.value + shift, weight * a.prob});
    }

    void add_atom(const V& value, const P& prob) {
        if (prob < 0) throw InvalidArgument("negative atom weight");
        if constexpr (std::is_same_v<V, Rational>) {
            if (!sparse_mode_ && value.is_integer()) {
                reserve(value.num(), value.num());
                dense_[static_cast<std::size_t>(value.num() - base_)] += prob;
                return;
            }
        }
        to_sparse();
        sparse_.push_back({value, prob});
    }

    void add_lost(const P& mass) { lost_ += mass; }

    Law build() {
        std::vector<typename Law::Atom> atoms;
        if (!sparse_mode_) {
            for (std::size_t i = 0; i < dense_.size(); ++i) {
                if (dense_[i] != P(0)) {
                    atoms.push_back({ValueTraits<V>::from_int(base_ + static_cast<std::int64_t>(i)), std::move(dense_[i])});
                }
            }
        } else {
            atoms = std::move(sparse_);
        }
        dense_.clear();
        sparse_.clear();
        sparse_mode_ = !std::is_same_v<V, Rational>;
        P lost = std::move(lost_);
        lost_ = P(0);
        return Law::from_unchecked(std::move(atoms), std::move(lost));
    }

private:
    // Dense buffers beyond this many cells switch the builder to sparse mode.
    static constexpr std::int64_t kMaxDenseSpan = std::int64_t{1} << 26;

    bool dense_ok(const Law& law, const V& shift) {
        if (sparse_mode_) return false;
        if (!ValueTraits<V>::integral(shift) || !law.integral()) return false;
        std::int64_t s = ValueTraits<V>::as_int(shift);
        std::int64_t lo = ValueTraits<V>::as_int(law.min_value()) + s;
        std::int64_t hi = ValueTraits<V>::as_int(law.max_value()) + s;
        if (!dense_.empty()) {
            lo = std::min(lo, base_);
            hi = std::max(hi, base_ + static_cast<std::int64_t>(dense_.size()) - 1);
        }
        return hi - lo < kMaxDenseSpan;
    }

    void reserve(std::int64_t lo, std::int64_t hi) {
        if (dense_.empty()) {
            base_ = lo;
            dense_.assign(static_cast<std::size_t>(hi - lo + 1), P(0));
            return;
        }
        std::int64_t top = base_ + static_cast<std::int64_t>(dense_.size()) - 1;
        if (lo >= base_ && hi <= top) return;
        std::int64_t new_lo = std::min(lo, base_);
        std::int64_t new_hi = std::max(hi, top);
        std::int64_t slack = (new_hi - new_lo + 1) / 2;
        if (new_lo < base_) new_lo -= slack;
        if (new_hi > top) new_hi += slack;
        std::vector<P> grown(static_cast<std::size_t>(new_hi - new_lo + 1), P(0));
        for (std::size_t i = 0; i < dense_.size(); ++i) {
            grown[static_cast<std::size_t>(base_ - new_lo) + i] = std::move(dense_[i]);
        }
        dense_ = std::move(grown);
        base_ = new_lo;
    }

    void to_sparse() {
        if (sparse_mode_) return;
        sparse_mode_ = true;
        for (std::size_t i = 0; i < dense_.size(); ++i) {
            if (dense_[i] != P(0)) {
                sparse_.push_back({ValueTraits<V>::from_int(base_ + static_cast<std::int64_t>(i)), std::move(dense_[i])});
            }
        }
        dense_.clear();
    }

    bool sparse_mode_ = !std::is_same_v<V, Rational>;
    std::vector<P> dense_;
    std::int64_t base_ = 0;
    std::vector<typename Law::Atom> sparse_;
    P lost_ = P(0);
};

/// Law of the independent sum. lost mass combines as
/// total(a) * total(b) - mass(a) * mass(b), which is la + lb - la*lb for
/// proper laws.
template <class V, class P>
BasicPmf<V, P> convolve(const BasicPmf<V, P>& a, const BasicPmf<V, P>& b) {
    MixtureBuilder<V, P> builder;
    const BasicPmf<V, P>& outer = a.size() <= b.size() ? a : b;
    const BasicPmf<V, P>& inner = a.size() <= b.size() ? b : a;
    for (const auto& atom : outer.atoms()) builder.add(atom.prob, inner, atom.value, false);
    P ma = a.mass();
    P mb = b.mass();
    builder.add_lost((ma + a.lost_mass()) * (mb + b.lost_mass()) - ma * mb);
    return builder.build();
}

template <class V, class P>
BasicPmf<V, P> affine(const BasicPmf<V, P>& p, const V& scale, const V& shift) {
    if (scale == V(0)) throw InvalidArgument("affine map with zero scale");
    std::vector<typename BasicPmf<V, P>::Atom> atoms;
    atoms.reserve(p.size());
    for (const auto& a : p.atoms()) atoms.push_back({scale * a.value + shift, a.prob});
    return BasicPmf<V, P>::from_unchecked(std::move(atoms), p.lost_mass());
}

template <class V, class P>
BasicPmf<V, P> shifted(const BasicPmf<V, P>& p, const V& shift) {
    return affine(p, V(1), shift);
}

/// Weighted superposition. Weights must be nonnegative and sum to one.
template <class V, class P>
BasicPmf<V, P> mix(std::span<const std::pair<P, BasicPmf<V, P>>> components) {
    MixtureBuilder<V, P> builder;
    P total(0);
    for (const auto& [w, law] : components) {
        if (w < 0) throw InvalidArgument("negative mixture weight");
        total += w;
        builder.add(w, law);
    }
    if constexpr (std::is_same_v<P, double>) {
        if (std::abs(total - 1.0) > kMassTolerance) throw InvalidArgument("mixture weights do not sum to one");
    } else {
        if (total != P(1)) throw InvalidArgument("mixture weights do not sum to one");
    }
    return builder.build();
}

template <class V, class P>
BasicPmf<V, P> mix(const std::vector<std::pair<P, BasicPmf<V, P>>>& components) {
    return mix(std::span<const std::pair<P, BasicPmf<V, P>>>(components));
}

/// k-th raw or central moment of the law conditioned on its retained mass.
template <class V, class P>
double moment(const BasicPmf<V, P>& p, int k, bool central) {
    if (k < 1) throw InvalidArgument("moment order must be positive");
    double mass = 0.0;
    double mean = 0.0;
    for (const auto& a : p.atoms()) {
        double w = ProbTraits<P>::to_double(a.prob);
        mass += w;
        mean += w * ValueTraits<V>::to_double(a.value);
    }
    mean /= mass;
    double center = central ? mean : 0.0;
    double s = 0.0;
    for (const auto& a : p.atoms()) {
        s += ProbTraits<P>::to_double(a.prob) * std::pow(ValueTraits<V>::to_double(a.value) - center, k);
    }
    return s / mass;
}

/// E|X - c|^k with c the mean when central is set.
template <class V, class P>
double absolute_moment(const BasicPmf<V, P>& p, int k, bool central) {
    double center = central ? moment(p, 1, false) : 0.0;
    double mass = 0.0;
    double s = 0.0;
    for (const auto& a : p.atoms()) {
        double w = ProbTraits<P>::to_double(a.prob);
        mass += w;
        s += w * std::pow(std::abs(ValueTraits<V>::to_double(a.value) - center), k);
    }
    return s / mass;
}

// Exact moment of a law with exact probabilities.
BigRational exact_moment(const ExactPmf& p, int k, bool central);

// Exact moment of a law with rational atoms and floating probabilities,
// evaluated without rounding the atoms.
BigRational exact_moment_of_values(const Pmf& p, int k, bool central);

/// P(X <= t) counting retained mass only (so it tops out at 1 - lost_mass).
template <class V, class P>
double cdf_at(const BasicPmf<V, P>& p, double t) {
    double s = 0.0;
    for (const auto& a : p.atoms()) {
        if (ValueTraits<V>::to_double(a.value) > t) break;
        s += ProbTraits<P>::to_double(a.prob);
    }
    return s;
}

/// Removes low-probability outer atoms while the removed total stays within
/// eps; the removed mass moves to lost_mass. No renormalization.
template <class V, class P>
BasicPmf<V, P> truncate_tail(const BasicPmf<V, P>& p, const P& eps) {
    if (eps < 0) throw InvalidArgument("negative truncation budget");
    auto atoms = p.atoms();
    if (atoms.size() <= 1 || eps == P(0)) return p;
    std::size_t lo = 0;
    std::size_t hi = atoms.size();
    P removed(0);
    while (hi - lo > 1) {
        const P& left = atoms[lo].prob;
        const P& right = atoms[hi - 1].prob;
        bool take_left = left <= right;
        const P& cand = take_left ? left : right;
        if (removed + cand > eps) break;
        removed += cand;
        if (take_left) {
            ++lo;
        } else {
            --hi;
        }
    }
    if (lo == 0 && hi == atoms.size()) return p;
    std::vector<typename BasicPmf<V, P>::Atom> kept(atoms.begin() + static_cast<std::ptrdiff_t>(lo),
                                                    atoms.begin() + static_cast<std::ptrdiff_t>(hi));
    return BasicPmf<V, P>::from_unchecked(std::move(kept), p.lost_mass() + removed);
}

Pmf to_floating(const ExactPmf& p);
RealPmf to_real(const Pmf& p);
RealPmf to_real(const ExactPmf& p);

// Affine image with real coefficients, used for standardization.
RealPmf affine_real(const Pmf& p, double scale, double shift);

// Total variation distance sum |p - q| / 2 over the union of atoms.
double total_variation(const Pmf& a, const Pmf& b);

}  // namespace dcm
