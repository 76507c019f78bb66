#include "dcm/catalog.hpp"

#include "dcm/clt.hpp"

#include <algorithm>
#include <cmath>

namespace dcm {
namespace {

std::string canonical(std::string_view name) {
    std::string s(name);
    std::replace(s.begin(), s.end(), '-', '_');
    return s;
}

std::vector<ExactPmf> point_bases(std::initializer_list<std::int64_t> values) {
    std::vector<ExactPmf> out;
    for (auto v : values) out.push_back(ExactPmf::point(Rational(v)));
    return out;
}

// Rejects n beyond the exact-DP cap of an entry.
void check_cap(const std::string& name, Index n, Index cap) {
    if (n > cap) {
        throw CapacityError("exact DP for '" + name + "' is capped at n=" + std::to_string(cap) +
                            " (requested n=" + std::to_string(n) + "); use simulation beyond");
    }
}

IndexTuple one(Index i) { return IndexTuple{i, 0, 0, 0}; }
IndexTuple two(Index i, Index j) { return IndexTuple{i, j, 0, 0}; }

// ---- unsuccessful search: I ~ unif{1..n-1}, b = 1 ----

CatalogEntry unsuccessful_search() {
    CatalogEntry e;
    e.name = "unsuccessful_search";
    e.spec.name = e.name;
    e.spec.copies = 1;
    e.spec.n0 = 2;
    e.spec.base_laws = point_bases({0, 0});
    e.spec.joint_law = [](Index n, double) {
        JointTable<double> t;
        for (Index i = 1; i <= n - 1; ++i) t.atoms.push_back({one(i), Rational(1), 1.0 / static_cast<double>(n - 1)});
        return t;
    };
    e.spec.exact_joint_law = [](Index n) {
        JointTable<BigRational> t;
        for (Index i = 1; i <= n - 1; ++i) t.atoms.push_back({one(i), Rational(1), BigRational(1, n - 1)});
        return t;
    };
    e.spec.sampler = [](Index n, Rng& rng) {
        std::uniform_int_distribution<Index> d(1, n - 1);
        return Draw{one(d(rng)), Rational(1)};
    };
    // The uniform index law gives EY_n = H_{n-1} and Var(Y_n) = H_{n-1} - H^(2)_{n-1},
    // so the leading variance constant is 1, not the 2 quoted for search trees.
    e.params = CltParams{0.5, 0.0, 0.0, 0.0, 1.0, 0.1};
    e.c_source = ConstantSource::derived;
    e.exact_cap = 1 << 16;
    e.notes = "EY_n = ln n + gamma + o(1), Var(Y_n) = ln n + gamma - pi^2/6 + o(1) for the uniform index law";
    return e;
}

// ---- depth of a random node: P(I=0) = 1/n, P(I=k) = 2k/n^2, b = 1 ----

Index node_depth_index(Index n, double u) {
    double nn = static_cast<double>(n);
    if (u < 1.0 / nn) return 0;
    // F(k) = 1/n + k(k+1)/n^2; smallest k with u < F(k).
    double x = (u - 1.0 / nn) * nn * nn;
    auto k = static_cast<Index>(std::floor((-1.0 + std::sqrt(1.0 + 4.0 * x)) / 2.0));
    k = std::max<Index>(k, 1);
    while (static_cast<double>(k) * static_cast<double>(k + 1) <= x) ++k;
    while (k > 1 && static_cast<double>(k - 1) * static_cast<double>(k) > x) --k;
    return std::min(k, n - 1);
}

CatalogEntry node_depth() {
    CatalogEntry e;
    e.name = "node_depth";
    e.spec.name = e.name;
    e.spec.copies = 1;
    e.spec.n0 = 2;
    e.spec.base_laws = point_bases({-1, 0});
    e.spec.joint_law = [](Index n, double) {
        JointTable<double> t;
        double nn = static_cast<double>(n);
        t.atoms.push_back({one(0), Rational(1), 1.0 / nn});
        for (Index k = 1; k <= n - 1; ++k) {
            t.atoms.push_back({one(k), Rational(1), 2.0 * static_cast<double>(k) / (nn * nn)});
        }
        return t;
    };
    e.spec.exact_joint_law = [](Index n) {
        JointTable<BigRational> t;
        t.atoms.push_back({one(0), Rational(1), BigRational(1, n)});
        for (Index k = 1; k <= n - 1; ++k) t.atoms.push_back({one(k), Rational(1), BigRational(2 * k, n * n)});
        return t;
    };
    e.spec.sampler = [](Index n, Rng& rng) {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        return Draw{one(node_depth_index(n, u(rng))), Rational(1)};
    };
    e.params = CltParams{0.5, 0.0, 0.0, 0.0, 2.0, 0.1};
    e.exact_cap = 1 << 16;
    e.notes = "EY_n = 2 ln n + O(1), Var(Y_n) = 2 ln n + O(1); Y_0 = -1";
    return e;
}

// ---- Quickselect (minimum): I ~ unif{0..n-1}, b = n - 1 ----

CatalogEntry quickselect() {
    constexpr Index cap = 256;
    CatalogEntry e;
    e.name = "quickselect";
    e.spec.name = e.name;
    e.spec.copies = 1;
    e.spec.n0 = 2;
    e.spec.base_laws = point_bases({0, 0});
    e.spec.joint_law = [](Index n, double) {
        check_cap("quickselect", n, cap);
        JointTable<double> t;
        for (Index i = 0; i <= n - 1; ++i) t.atoms.push_back({one(i), Rational(n - 1), 1.0 / static_cast<double>(n)});
        return t;
    };
    e.spec.exact_joint_law = [](Index n) {
        check_cap("quickselect", n, cap);
        JointTable<BigRational> t;
        for (Index i = 0; i <= n - 1; ++i) t.atoms.push_back({one(i), Rational(n - 1), BigRational(1, n)});
        return t;
    };
    e.spec.sampler = [](Index n, Rng& rng) {
        std::uniform_int_distribution<Index> d(0, n - 1);
        return Draw{one(d(rng)), Rational(n - 1)};
    };
    e.degenerate = false;
    e.c_source = ConstantSource::not_applicable;
    e.exact_cap = cap;
    e.notes = "nondegenerate: EY_n = 2n + O(1), Var(Y_n) = n^2/2 + o(n^2); limit X = UX + sqrt(2)(2U - 1)";
    return e;
}

// ---- broadcast Algorithm A ----

enum class BroadcastCost { time, comparisons };

Rational broadcast_toll(BroadcastCost cost, Index n, Index j) {
    return cost == BroadcastCost::time ? Rational(1) : Rational(n - j);
}

Draw broadcast_draw(Index n, Rng& rng, BroadcastCost cost) {
    // k = number of leading tails among n fair coins.
    Index k = 0;
    while (k < n && (rng() & 1u) == 0) ++k;
    if (k == n) return Draw{two(0, 0), broadcast_toll(cost, n, 0)};
    std::binomial_distribution<Index> bin(n - k - 1, 0.5);
    Index j = 1 + bin(rng);
    return Draw{two(j, k), broadcast_toll(cost, n, j)};
}

CatalogEntry broadcast_a(BroadcastCost cost) {
    const bool time = cost == BroadcastCost::time;
    const Index cap = time ? 2048 : 256;
    CatalogEntry e;
    e.name = time ? "broadcast_a_time" : "broadcast_a_comparisons";
    e.spec.name = e.name;
    e.spec.copies = 2;
    e.spec.n0 = 2;
    e.spec.base_laws = time ? point_bases({1, 1}) : point_bases({0, 0});
    std::string name = e.name;
    e.spec.joint_law = [cost, cap, name](Index n, double eps) {
        check_cap(name, n, cap);
        JointTable<double> t = broadcast_index_pmf(n, eps);
        for (auto& a : t.atoms) a.toll = broadcast_toll(cost, n, a.indices[0]);
        return t;
    };
    e.spec.exact_joint_law = [cost, cap, name](Index n) {
        check_cap(name, n, cap);
        JointTable<BigRational> t = broadcast_index_pmf(n);
        for (auto& a : t.atoms) a.toll = broadcast_toll(cost, n, a.indices[0]);
        return t;
    };
    e.spec.index_law = [](Index n) {
        std::vector<IndexAtom> out;
        for (const auto& a : broadcast_index_pmf(n, 0.0).atoms) out.push_back({a.indices, a.prob});
        return out;
    };
    e.spec.sampler = [cost](Index n, Rng& rng) { return broadcast_draw(n, rng, cost); };
    e.params = CltParams{0.5, 0.0, 0.0, 0.0, 1.0, 0.1};
    e.c_source = ConstantSource::fitted;
    e.exact_cap = cap;
    if (time) {
        e.fit_window = {64, 128, 256, 512, 1024, 2048};
        e.notes = "EY_n = mu^ ln n + O(1), Var(Y_n) = sigma^2 ln n + O(1); constants not tabulated, C fitted";
    } else {
        e.fit_window = {32, 64, 128, 256};
        e.notes = "EY_n = n + mu- ln n + O(1), Var(Y_n) = sigma-^2 ln n + O(1); C fitted";
    }
    return e;
}

// ---- broadcast Algorithm B time: I ~ unif{0..n-1}, b = leader election ----

CatalogEntry broadcast_b_time() {
    CatalogEntry e;
    e.name = "broadcast_b_time";
    e.spec.name = e.name;
    e.spec.copies = 1;
    e.spec.n0 = 2;
    e.spec.base_laws = point_bases({1, 1});
    e.spec.sampler = [](Index n, Rng& rng) {
        std::uniform_int_distribution<Index> d(0, n - 1);
        Index i = d(rng);
        return Draw{one(i), Rational(leader_election_rounds(n, rng))};
    };
    e.spec.index_law = [](Index n) {
        std::vector<IndexAtom> out;
        for (Index i = 0; i <= n - 1; ++i) out.push_back({one(i), 1.0 / static_cast<double>(n)});
        return out;
    };
    e.params = CltParams{1.5, 1.0, 2.0, 0.0, 1.0, 0.1};
    e.c_source = ConstantSource::fitted;
    e.fit_window = {64, 128, 256, 512, 1024};
    e.exact_cap = 0;
    e.notes = "EY_n = mu ln^2 n + O(ln n), Var(Y_n) = sigma^2 ln^3 n + O(ln^2 n); toll drawn independently of I_n";
    return e;
}

}  // namespace

std::vector<std::string> catalog_names() {
    return {"unsuccessful_search", "node_depth",         "quickselect", "broadcast_a_time",
            "broadcast_a_comparisons", "broadcast_b_time"};
}

CatalogEntry make(std::string_view name) {
    std::string n = canonical(name);
    if (n == "unsuccessful_search") return unsuccessful_search();
    if (n == "node_depth") return node_depth();
    if (n == "quickselect") return quickselect();
    if (n == "broadcast_a_time") return broadcast_a(BroadcastCost::time);
    if (n == "broadcast_a_comparisons") return broadcast_a(BroadcastCost::comparisons);
    if (n == "broadcast_b_time") return broadcast_b_time();
    throw InvalidArgument("unknown catalog entry '" + std::string(name) + "'");
}

JointTable<BigRational> broadcast_index_pmf(Index n) {
    if (n < 1) throw InvalidArgument("broadcast index law needs n >= 1");
    JointTable<BigRational> t;
    BigInt denom = BigInt(1) << static_cast<unsigned>(n);
    t.atoms.push_back({two(0, 0), Rational(0), BigRational(BigInt(1), denom)});
    for (Index k = 0; k <= n - 1; ++k) {
        Index m = n - k - 1;
        BigInt c = 1;  // binom(m, j-1), advanced along j
        for (Index j = 1; j <= n - k; ++j) {
            t.atoms.push_back({two(j, k), Rational(0), BigRational(c, denom)});
            c = c * (m - (j - 1)) / j;
        }
    }
    return t;
}

JointTable<double> broadcast_index_pmf(Index n, double eps) {
    if (n < 1) throw InvalidArgument("broadcast index law needs n >= 1");
    if (eps < 0.0) throw InvalidArgument("negative drop budget");
    JointTable<double> t;
    const double nn = static_cast<double>(n);
    const double threshold = eps / (nn * (nn + 1.0) / 2.0 + 1.0);
    double dropped = 0.0;

    double corner = std::ldexp(1.0, static_cast<int>(-std::min<Index>(n, 2000)));
    if (corner >= threshold && corner > 0.0) {
        t.atoms.push_back({two(0, 0), Rational(0), corner});
    } else {
        dropped += corner;
    }
    std::vector<double> c;
    for (Index k = 0; k <= n - 1; ++k) {
        double group = std::ldexp(1.0, static_cast<int>(-std::min<Index>(k + 1, 2000)));
        if (group < threshold) {
            // Remaining groups k..n-1 carry 2^-k - 2^-n in total.
            dropped += std::ldexp(1.0, static_cast<int>(-k)) - corner;
            break;
        }
        // Conditional law of J - 1 given k: Binomial(m, 1/2), built outward
        // from the mode and normalized over the computed range.
        Index m = n - k - 1;
        Index mode = m / 2;
        c.assign(static_cast<std::size_t>(m + 1), 0.0);
        const double md = static_cast<double>(m);
        c[static_cast<std::size_t>(mode)] = 1.0;
        double sum = 1.0;
        for (Index r = mode; r < m; ++r) {
            double next = c[static_cast<std::size_t>(r)] * (md - static_cast<double>(r)) / static_cast<double>(r + 1);
            if (next < 1e-300) break;
            c[static_cast<std::size_t>(r + 1)] = next;
            sum += next;
        }
        for (Index r = mode; r > 0; --r) {
            double prev = c[static_cast<std::size_t>(r)] * static_cast<double>(r) / (md - static_cast<double>(r) + 1.0);
            if (prev < 1e-300) break;
            c[static_cast<std::size_t>(r - 1)] = prev;
            sum += prev;
        }
        double kept = 0.0;
        for (Index r = 0; r <= m; ++r) {
            double p = group * c[static_cast<std::size_t>(r)] / sum;
            if (p > 0.0 && p >= threshold) {
                t.atoms.push_back({two(r + 1, k), Rational(0), p});
                kept += p;
            }
        }
        dropped += std::max(0.0, group - kept);
    }
    t.dropped = dropped;
    return t;
}

int leader_election_rounds(Index m, Rng& rng) {
    if (m < 1) throw InvalidArgument("leader election needs at least one contender");
    int rounds = 0;
    while (m > 1) {
        ++rounds;
        std::binomial_distribution<Index> flips(m, 0.5);
        Index heads = flips(rng);
        if (heads >= 1 && heads < m) m = heads;
    }
    return rounds;
}

CltParams resolved_params(const CatalogEntry& entry, const SolveOptions& opts, std::uint64_t seed) {
    if (entry.c_source != ConstantSource::fitted) return entry.params;
    CltParams p = entry.params;
    std::vector<MomentRow> rows;
    if (entry.spec.tabulated()) {
        Solver solver(entry.spec, opts);
        rows = moment_table(solver, entry.fit_window);
    } else {
        Rng rng(seed);
        constexpr std::size_t runs = 10000;
        for (Index n : entry.fit_window) {
            double s1 = 0.0;
            double s2 = 0.0;
            for (std::size_t i = 0; i < runs; ++i) {
                double y = sample(entry.spec, n, rng).to_double();
                s1 += y;
                s2 += y * y;
            }
            double mean = s1 / runs;
            rows.push_back({n, mean, (s2 - runs * mean * mean) / (runs - 1), 0.0});
        }
    }
    p.C = fit_variance_constant(rows, p.alpha, p.lambda);
    return p;
}

}  // namespace dcm
