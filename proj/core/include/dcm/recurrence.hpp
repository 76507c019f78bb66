#pragma once

// Divide-and-conquer recurrences
//
//     Y_n = Y^(1)_{I_1} + ... + Y^(K)_{I_K} + b_n     (n >= n0)
//
// with independent copies Y^(r), and their exact laws by dynamic programming
// or single draws by simulation.

#include "dcm/pmf.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <shared_mutex>
#include <string>
#include <vector>

namespace dcm {

using Index = std::int64_t;
using Rng = std::mt19937_64;

inline constexpr int kMaxCopies = 4;

using IndexTuple = std::array<Index, kMaxCopies>;

template <class P>
struct JointAtom {
    IndexTuple indices{};
    Rational toll;
    P prob;
};

/// Tabulated law of (I_1, ..., I_K, b_n) at one n. `dropped` is the mass of
/// negligible atoms the generator chose not to list.
template <class P>
struct JointTable {
    std::vector<JointAtom<P>> atoms;
    P dropped = P(0);
};

struct Draw {
    IndexTuple indices{};
    Rational toll;
};

// Marginal law of the index tuple alone (tolls ignored); enough for the
// index conditions even when tolls are only available by simulation.
struct IndexAtom {
    IndexTuple indices{};
    double prob = 0.0;
};

struct RecurrenceSpec {
    std::string name;
    int copies = 1;  // K
    Index n0 = 1;
    std::vector<ExactPmf> base_laws;  // laws of Y_0 .. Y_{n0-1}

    // Floating joint law; the generator may drop atoms of total mass <= eps.
    std::function<JointTable<double>(Index n, double eps)> joint_law;
    // Exact joint law, when the probabilities are rational.
    std::function<JointTable<BigRational>(Index n)> exact_joint_law;
    // Direct sampler of (I_1..I_K, b_n); faster than tabulating.
    std::function<Draw(Index n, Rng& rng)> sampler;
    // Index marginal; derived from joint_law when left empty.
    std::function<std::vector<IndexAtom>(Index n)> index_law;

    bool tabulated() const { return static_cast<bool>(joint_law); }
    bool exact_supported() const { return static_cast<bool>(exact_joint_law); }

    // Index marginal at n, from index_law or joint_law.
    std::vector<IndexAtom> index_marginal(Index n) const;

    // Throws InvalidArgument when the structural fields are inconsistent.
    void validate() const;
};

enum class Arithmetic { exact, floating };

struct SolveOptions {
    double tail_eps = 1e-13;             // per-step truncation budget
    std::size_t max_support = 1u << 22;  // atom-count cap per law
    Arithmetic mode = Arithmetic::floating;
};

/// Memoized bottom-up solver for the laws of Y_0, Y_1, ...
///
/// Laws already computed are shared by reference; solving a larger n extends
/// the table and never recomputes smaller entries. Concurrent readers are
/// allowed, extension of the table is serialized.
template <class P>
class BasicSolver {
public:
    using Law = BasicPmf<Rational, P>;

    BasicSolver(RecurrenceSpec spec, SolveOptions opts);

    const RecurrenceSpec& spec() const { return spec_; }
    const SolveOptions& options() const { return opts_; }

    std::shared_ptr<const Law> solve(Index n);
    Index solved_up_to() const;

private:
    Law step(Index n);
    const Law& law_unlocked(Index k) const { return *memo_[static_cast<std::size_t>(k)]; }
    JointTable<P> table_at(Index n) const;

    RecurrenceSpec spec_;
    SolveOptions opts_;
    mutable std::shared_mutex mutex_;
    std::vector<std::shared_ptr<const Law>> memo_;
};

using Solver = BasicSolver<double>;
using ExactSolver = BasicSolver<BigRational>;

extern template class BasicSolver<double>;
extern template class BasicSolver<BigRational>;

/// Law of Y_n with floating probabilities; lost_mass <= n * tail_eps.
Pmf exact_distribution(const RecurrenceSpec& spec, Index n, const SolveOptions& opts = {});

/// Law of Y_n with exact rational probabilities (no truncation).
ExactPmf exact_distribution_rational(const RecurrenceSpec& spec, Index n, const SolveOptions& opts = {});

/// One draw of Y_n with independent recursive subcalls.
Rational sample(const RecurrenceSpec& spec, Index n, Rng& rng);

struct MomentRow {
    Index n = 0;
    double mean = 0.0;
    double variance = 0.0;
    double abs_third = 0.0;  // E|Y_n - EY_n|^3
};

std::vector<MomentRow> moment_table(Solver& solver, const std::vector<Index>& ns);
std::vector<MomentRow> moment_table(const RecurrenceSpec& spec, const std::vector<Index>& ns,
                                    const SolveOptions& opts = {});

// Empirical pmf of `runs` independent draws of Y_n.
Pmf empirical_law(const RecurrenceSpec& spec, Index n, std::size_t runs, Rng& rng);

}  // namespace dcm
