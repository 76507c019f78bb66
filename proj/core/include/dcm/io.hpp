#pragma once

// Serialization of laws and metric reports, and custom recurrences read
// from JSON.
//
// Pmf JSON:   {"atoms": [[value_num, value_den, prob], ...], "lost_mass": x}
//             exact probabilities are written as "p/q" strings.
// Pmf CSV:    value,prob
//
// Custom recurrence JSON (K <= 2):
//   {
//     "name": "toy",
//     "K": 1,
//     "n0": 2,
//     "base": [0, 0],                     // Y_0 .. Y_{n0-1}: values or pmf objects
//     "rows": [[2, 1, 1, 1.0], ...],      // [n, i1, (i2,) b, prob]
//     "params": {"alpha": 0.5, "C": 2}    // optional
//   }
// b may be an integer or a "p/q" string; prob a number or a "p/q" string.
// Exact DP is offered when every prob is given exactly. Rows must cover
// every n from n0 to their maximum.

#include "dcm/metrics.hpp"
#include "dcm/params.hpp"
#include "dcm/pmf.hpp"
#include "dcm/recurrence.hpp"

#include <optional>
#include <string>

namespace dcm {

std::string to_json(const Pmf& p);
std::string to_json(const ExactPmf& p);
std::string to_json(const MetricReport& r);
std::string to_csv(const Pmf& p);

Pmf pmf_from_json(const std::string& text);

struct CustomRecurrence {
    RecurrenceSpec spec;
    std::optional<CltParams> params;
    Index n_max = 0;  // largest tabulated n
};

CustomRecurrence recurrence_from_json(const std::string& text);

// Formats a double with 17 significant digits ("nan", "inf" for specials).
std::string format_double(double x);

}  // namespace dcm
