#pragma once

// The concrete recurrences: unsuccessful search and node depth in random
// binary search trees, Quickselect, and the broadcast maximum-finding
// algorithms A (time, comparisons) and B (time).

#include "dcm/params.hpp"
#include "dcm/recurrence.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace dcm {

enum class ConstantSource {
    closed_form,     // C stated in closed form
    derived,         // C in closed form from the recurrence as tabulated
    fitted,          // C fitted from the variance table over fit_window
    not_applicable,  // nondegenerate recurrence, no degenerate-case params
};

struct CatalogEntry {
    std::string name;
    RecurrenceSpec spec;
    CltParams params;
    bool degenerate = true;
    ConstantSource c_source = ConstantSource::closed_form;
    std::vector<Index> fit_window;
    Index exact_cap = 0;  // largest n with exact DP; 0 = simulation only
    std::string notes;

    bool exact_supported() const { return exact_cap > 0; }
};

std::vector<std::string> catalog_names();

// Accepts both "unsuccessful_search" and "unsuccessful-search". Throws
// InvalidArgument for unknown names.
CatalogEntry make(std::string_view name);

/// Joint law of (I_1, I_2) for broadcast Algorithm A:
///   P((0,0)) = 2^-n,  P((j,k)) = binom(n-k-1, j-1) 2^-n  (k >= 0, 1 <= j <= n-k).
/// Tolls are set to zero.
JointTable<BigRational> broadcast_index_pmf(Index n);

// Floating version; atoms below eps / #atoms are dropped into `dropped`.
JointTable<double> broadcast_index_pmf(Index n, double eps);

/// Rounds of the coin-flipping leader election among m contenders: every
/// round all contenders flip; when 1 <= #heads < m the heads survive.
int leader_election_rounds(Index m, Rng& rng);

/// Fills in C for entries whose variance constant is fitted: exact moments
/// over fit_window for tabulated entries, 10^4-run simulation otherwise.
CltParams resolved_params(const CatalogEntry& entry, const SolveOptions& opts = {}, std::uint64_t seed = 1);

}  // namespace dcm
