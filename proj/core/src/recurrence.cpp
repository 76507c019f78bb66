#include "dcm/recurrence.hpp"

#include <map>
#include <mutex>
#include <sstream>

namespace dcm {
namespace {

template <class P>
BasicPmf<Rational, P> base_law_as(const ExactPmf& law) {
    if constexpr (std::is_same_v<P, BigRational>) {
        return law;
    } else {
        return to_floating(law);
    }
}

template <class P>
bool is_zero_point_mass(const BasicPmf<Rational, P>& q) {
    return q.size() == 1 && q.min_value() == Rational(0) && q.lost_mass() == P(0);
}

Rational sample_base(const ExactPmf& law, Rng& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double u = unif(rng) * law.mass().convert_to<double>();
    double acc = 0.0;
    for (const auto& a : law.atoms()) {
        acc += a.prob.convert_to<double>();
        if (u < acc) return a.value;
    }
    return law.max_value();
}

Draw draw_from_table(const RecurrenceSpec& spec, Index n, Rng& rng) {
    auto table = spec.joint_law(n, 0.0);
    double total = 0.0;
    for (const auto& a : table.atoms) total += a.prob;
    std::uniform_real_distribution<double> unif(0.0, total);
    double u = unif(rng);
    double acc = 0.0;
    for (const auto& a : table.atoms) {
        acc += a.prob;
        if (u < acc) return Draw{a.indices, a.toll};
    }
    return Draw{table.atoms.back().indices, table.atoms.back().toll};
}

}  // namespace

std::vector<IndexAtom> RecurrenceSpec::index_marginal(Index n) const {
    if (index_law) return index_law(n);
    if (!joint_law) throw UnsupportedError("recurrence '" + name + "' has no tabulated index law");
    std::map<IndexTuple, double> agg;
    for (const auto& a : joint_law(n, 0.0).atoms) agg[a.indices] += a.prob;
    std::vector<IndexAtom> out;
    out.reserve(agg.size());
    for (const auto& [idx, p] : agg) out.push_back({idx, p});
    return out;
}

void RecurrenceSpec::validate() const {
    if (copies < 1 || copies > kMaxCopies) {
        throw InvalidArgument("number of copies K must lie in [1, " + std::to_string(kMaxCopies) + "]");
    }
    if (n0 < 1) throw InvalidArgument("n0 must be at least 1");
    if (static_cast<Index>(base_laws.size()) != n0) throw InvalidArgument("need one base law for each n < n0");
    if (!joint_law && !sampler) throw InvalidArgument("recurrence needs a joint law or a sampler");
}

template <class P>
BasicSolver<P>::BasicSolver(RecurrenceSpec spec, SolveOptions opts) : spec_(std::move(spec)), opts_(opts) {
    spec_.validate();
    if (opts_.tail_eps < 0.0) throw InvalidArgument("tail_eps must be nonnegative");
    if (opts_.max_support < 2) throw InvalidArgument("max_support must be at least 2");
    if constexpr (std::is_same_v<P, BigRational>) {
        if (!spec_.exact_supported()) {
            throw UnsupportedError("recurrence '" + spec_.name + "' has no exact joint law");
        }
    } else {
        if (!spec_.tabulated()) {
            throw UnsupportedError("recurrence '" + spec_.name + "' is sampler-only; exact DP unavailable");
        }
    }
}

template <class P>
Index BasicSolver<P>::solved_up_to() const {
    std::shared_lock lock(mutex_);
    return static_cast<Index>(memo_.size()) - 1;
}

template <class P>
std::shared_ptr<const typename BasicSolver<P>::Law> BasicSolver<P>::solve(Index n) {
    if (n < 0) throw InvalidArgument("negative index");
    {
        std::shared_lock lock(mutex_);
        if (n < static_cast<Index>(memo_.size())) return memo_[static_cast<std::size_t>(n)];
    }
    std::unique_lock lock(mutex_);
    while (static_cast<Index>(memo_.size()) <= n) {
        Index k = static_cast<Index>(memo_.size());
        Law law = k < spec_.n0 ? base_law_as<P>(spec_.base_laws[static_cast<std::size_t>(k)]) : step(k);
        memo_.push_back(std::make_shared<const Law>(std::move(law)));
    }
    return memo_[static_cast<std::size_t>(n)];
}

template <class P>
JointTable<P> BasicSolver<P>::table_at(Index n) const {
    if constexpr (std::is_same_v<P, BigRational>) {
        return spec_.exact_joint_law(n);
    } else {
        return spec_.joint_law(n, opts_.tail_eps);
    }
}

template <class P>
typename BasicSolver<P>::Law BasicSolver<P>::step(Index n) {
    const int K = spec_.copies;
    JointTable<P> table = table_at(n);

    // Group the atoms by their trailing indices (I_2..I_K): inside a group the
    // laws of Y_{I_1} + b are mixed first and then convolved once with the
    // trailing copies.
    std::map<IndexTuple, std::vector<const JointAtom<P>*>> groups;
    std::vector<const JointAtom<P>*> self_atoms;
    for (const auto& atom : table.atoms) {
        int hits = 0;
        for (int r = 0; r < K; ++r) {
            Index i = atom.indices[static_cast<std::size_t>(r)];
            if (i < 0 || i > n) {
                throw InvalidArgument("joint law at n=" + std::to_string(n) + " has index outside {0..n}");
            }
            hits += i == n;
        }
        if (hits > 1) {
            throw UnsupportedError("joint law at n=" + std::to_string(n) + " has an atom with several indices equal to n");
        }
        if (hits == 1) {
            self_atoms.push_back(&atom);
            continue;
        }
        IndexTuple tail{};
        for (int r = 1; r < K; ++r) tail[static_cast<std::size_t>(r)] = atom.indices[static_cast<std::size_t>(r)];
        groups[tail].push_back(&atom);
    }

    MixtureBuilder<Rational, P> outer;
    outer.add_lost(table.dropped);
    for (const auto& [tail, atoms] : groups) {
        if (K == 1) {
            for (const auto* a : atoms) outer.add(a->prob, law_unlocked(a->indices[0]), a->toll);
            continue;
        }
        MixtureBuilder<Rational, P> inner;
        for (const auto* a : atoms) inner.add(a->prob, law_unlocked(a->indices[0]), a->toll);
        Law part = inner.build();
        for (int r = 1; r < K; ++r) part = convolve(part, law_unlocked(tail[static_cast<std::size_t>(r)]));
        outer.add(P(1), part);
    }
    Law result = outer.build();

    if (!self_atoms.empty()) {
        // Y_n = Y_n + Q with probability p. Solve P_n = M + p (P_n * Q) by the
        // series sum_m p^m M * Q^m; with Q = delta_0 this is M / (1 - p).
        P p(0);
        for (const auto* a : self_atoms) p += a->prob;
        if (p >= P(1)) {
            throw PreconditionError("P(self-referential index) = 1 at n=" + std::to_string(n));
        }
        MixtureBuilder<Rational, P> qb;
        for (const auto* a : self_atoms) {
            Law q = Law::point(a->toll);
            for (int r = 0; r < K; ++r) {
                Index i = a->indices[static_cast<std::size_t>(r)];
                if (i != n) q = convolve(q, law_unlocked(i));
            }
            qb.add(a->prob / p, q);
        }
        Law q = qb.build();
        MixtureBuilder<Rational, P> acc;
        if (is_zero_point_mass(q)) {
            acc.add(P(1) / (P(1) - p), result);
        } else {
            P budget(opts_.tail_eps);
            if (!(budget > P(0))) {
                throw UnsupportedError("self-loop with a nonzero shift needs tail_eps > 0 at n=" + std::to_string(n));
            }
            acc.add(P(1), result);
            Law term = result;
            P remaining = p;  // total mass of the series terms not yet added
            constexpr int kMaxTerms = 100000;
            for (int m = 1; remaining > budget; ++m) {
                if (m > kMaxTerms) throw CapacityError("self-loop series did not converge at n=" + std::to_string(n));
                MixtureBuilder<Rational, P> scaled;
                scaled.add(p, convolve(term, q));
                term = scaled.build();
                acc.add(P(1), term);
                remaining *= p;
            }
            acc.add_lost(remaining);
        }
        result = acc.build();
    }

    result = truncate_tail(result, P(opts_.tail_eps));
    if (result.size() > opts_.max_support) {
        std::ostringstream msg;
        msg << "support cap exceeded at n=" << n << ": " << result.size() << " atoms > max_support "
            << opts_.max_support;
        throw CapacityError(msg.str());
    }
    return result;
}

template class BasicSolver<double>;
template class BasicSolver<BigRational>;

Pmf exact_distribution(const RecurrenceSpec& spec, Index n, const SolveOptions& opts) {
    Solver solver(spec, opts);
    return *solver.solve(n);
}

ExactPmf exact_distribution_rational(const RecurrenceSpec& spec, Index n, const SolveOptions& opts) {
    SolveOptions exact = opts;
    exact.mode = Arithmetic::exact;
    exact.tail_eps = 0.0;
    ExactSolver solver(spec, exact);
    return *solver.solve(n);
}

Rational sample(const RecurrenceSpec& spec, Index n, Rng& rng) {
    if (n < 0) throw InvalidArgument("negative index");
    if (n < spec.n0) return sample_base(spec.base_laws[static_cast<std::size_t>(n)], rng);
    Draw d = spec.sampler ? spec.sampler(n, rng) : draw_from_table(spec, n, rng);
    Rational y = d.toll;
    for (int r = 0; r < spec.copies; ++r) y += sample(spec, d.indices[static_cast<std::size_t>(r)], rng);
    return y;
}

std::vector<MomentRow> moment_table(Solver& solver, const std::vector<Index>& ns) {
    std::vector<MomentRow> rows;
    rows.reserve(ns.size());
    for (Index n : ns) {
        auto law = solver.solve(n);
        rows.push_back({n, moment(*law, 1, false), moment(*law, 2, true), absolute_moment(*law, 3, true)});
    }
    return rows;
}

std::vector<MomentRow> moment_table(const RecurrenceSpec& spec, const std::vector<Index>& ns,
                                    const SolveOptions& opts) {
    Solver solver(spec, opts);
    return moment_table(solver, ns);
}

Pmf empirical_law(const RecurrenceSpec& spec, Index n, std::size_t runs, Rng& rng) {
    if (runs == 0) throw InvalidArgument("need at least one run");
    std::map<Rational, std::size_t> counts;
    for (std::size_t i = 0; i < runs; ++i) ++counts[sample(spec, n, rng)];
    std::vector<Pmf::Atom> atoms;
    atoms.reserve(counts.size());
    for (const auto& [v, c] : counts) atoms.push_back({v, static_cast<double>(c) / static_cast<double>(runs)});
    return Pmf::from_unchecked(std::move(atoms), 0.0);
}

}  // namespace dcm
