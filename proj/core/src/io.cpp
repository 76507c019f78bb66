#include "dcm/io.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <map>
#include <memory>
#include <sstream>

namespace dcm {
namespace {

using nlohmann::json;

Rational rational_of(const json& v, const char* what) {
    if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
    if (v.is_string()) return Rational::parse(v.get<std::string>());
    throw InvalidArgument(std::string(what) + " must be an integer or a \"p/q\" string");
}

ExactPmf base_law(const json& v) {
    if (v.is_number_integer() || v.is_string()) return ExactPmf::point(rational_of(v, "base value"));
    if (!v.is_object() || !v.contains("atoms")) throw InvalidArgument("base law must be a value or a pmf object");
    std::vector<ExactPmf::Atom> atoms;
    for (const auto& a : v.at("atoms")) {
        if (!a.is_array() || a.size() != 3) throw InvalidArgument("pmf atoms are [num, den, prob]");
        Rational value(a[0].get<std::int64_t>(), a[1].get<std::int64_t>());
        if (!a[2].is_string()) throw InvalidArgument("base law probabilities must be \"p/q\" strings");
        Rational p = Rational::parse(a[2].get<std::string>());
        atoms.push_back({value, p.to_big()});
    }
    return ExactPmf::from_atoms(std::move(atoms));
}

struct Row {
    IndexTuple indices{};
    Rational toll;
    double prob = 0.0;
    std::optional<BigRational> exact;
};

}  // namespace

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

std::string to_json(const Pmf& p) {
    json atoms = json::array();
    for (const auto& a : p.atoms()) atoms.push_back({a.value.num(), a.value.den(), a.prob});
    json j{{"atoms", atoms}, {"lost_mass", p.lost_mass()}};
    return j.dump();
}

std::string to_json(const ExactPmf& p) {
    json atoms = json::array();
    for (const auto& a : p.atoms()) atoms.push_back({a.value.num(), a.value.den(), a.prob.str()});
    json j{{"atoms", atoms}, {"lost_mass", p.lost_mass().str()}};
    return j.dump();
}

std::string to_json(const MetricReport& r) {
    json j{{"value", r.value}, {"abs_error_bound", r.abs_error_bound}};
    if (r.adjust_scale != 1.0 || r.adjust_shift != 0.0) {
        j["adjust_scale"] = r.adjust_scale;
        j["adjust_shift"] = r.adjust_shift;
    }
    return j.dump();
}

std::string to_csv(const Pmf& p) {
    std::string out = "value,prob\n";
    for (const auto& a : p.atoms()) out += a.value.to_string() + "," + format_double(a.prob) + "\n";
    return out;
}

Pmf pmf_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InvalidArgument(std::string("malformed pmf JSON: ") + e.what());
    }
    std::vector<Pmf::Atom> atoms;
    for (const auto& a : j.at("atoms")) {
        if (!a.is_array() || a.size() != 3) throw InvalidArgument("pmf atoms are [num, den, prob]");
        Rational value(a[0].get<std::int64_t>(), a[1].get<std::int64_t>());
        double p = a[2].is_string() ? Rational::parse(a[2].get<std::string>()).to_double() : a[2].get<double>();
        atoms.push_back({value, p});
    }
    double lost = 0.0;
    if (j.contains("lost_mass")) {
        const auto& l = j["lost_mass"];
        lost = l.is_string() ? Rational::parse(l.get<std::string>()).to_double() : l.get<double>();
    }
    return Pmf::from_atoms(std::move(atoms), lost);
}

CustomRecurrence recurrence_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InvalidArgument(std::string("malformed recurrence JSON: ") + e.what());
    }
    CustomRecurrence out;
    RecurrenceSpec& spec = out.spec;
    spec.name = j.value("name", std::string("custom"));
    spec.copies = j.value("K", 1);
    if (spec.copies < 1 || spec.copies > 2) throw InvalidArgument("custom recurrences support K = 1 or 2");
    spec.n0 = j.value("n0", Index{1});
    if (!j.contains("base") || !j["base"].is_array()) throw InvalidArgument("missing \"base\" array");
    for (const auto& b : j["base"]) spec.base_laws.push_back(base_law(b));
    if (static_cast<Index>(spec.base_laws.size()) != spec.n0) throw InvalidArgument("need one base law per n < n0");

    const std::size_t width = static_cast<std::size_t>(spec.copies) + 3;
    auto rows = std::make_shared<std::map<Index, std::vector<Row>>>();
    bool exact = true;
    for (const auto& r : j.at("rows")) {
        if (!r.is_array() || r.size() != width) {
            throw InvalidArgument("each row must be [n, i1" + std::string(spec.copies == 2 ? ", i2" : "") +
                                  ", b, prob]");
        }
        Index n = r[0].get<Index>();
        Row row;
        for (int c = 0; c < spec.copies; ++c) {
            Index i = r[static_cast<std::size_t>(c) + 1].get<Index>();
            if (i < 0 || i > n) throw InvalidArgument("index outside {0..n} in row for n=" + std::to_string(n));
            row.indices[static_cast<std::size_t>(c)] = i;
        }
        row.toll = rational_of(r[width - 2], "toll");
        const auto& p = r[width - 1];
        if (p.is_string()) {
            Rational q = Rational::parse(p.get<std::string>());
            row.exact = q.to_big();
            row.prob = q.to_double();
        } else if (p.is_number_integer()) {
            row.exact = BigRational(p.get<std::int64_t>());
            row.prob = p.get<double>();
        } else {
            exact = false;
            row.prob = p.get<double>();
        }
        if (row.prob < 0.0) throw InvalidArgument("negative probability in row for n=" + std::to_string(n));
        (*rows)[n].push_back(row);
    }
    if (rows->empty()) throw InvalidArgument("no rows");
    out.n_max = rows->rbegin()->first;
    for (Index n = spec.n0; n <= out.n_max; ++n) {
        auto it = rows->find(n);
        if (it == rows->end()) throw InvalidArgument("rows missing for n=" + std::to_string(n));
        double s = 0.0;
        for (const auto& r : it->second) s += r.prob;
        if (std::abs(s - 1.0) > kMassTolerance) {
            throw InvalidArgument("row probabilities for n=" + std::to_string(n) + " do not sum to one");
        }
    }

    const Index n_max = out.n_max;
    auto at = [rows, n_max](Index n) -> const std::vector<Row>& {
        if (n > n_max) {
            throw CapacityError("custom recurrence tabulated up to n=" + std::to_string(n_max) + " (requested n=" +
                                std::to_string(n) + ")");
        }
        return rows->at(n);
    };
    spec.joint_law = [at](Index n, double) {
        JointTable<double> t;
        for (const auto& r : at(n)) t.atoms.push_back({r.indices, r.toll, r.prob});
        return t;
    };
    if (exact) {
        spec.exact_joint_law = [at](Index n) {
            JointTable<BigRational> t;
            for (const auto& r : at(n)) t.atoms.push_back({r.indices, r.toll, *r.exact});
            return t;
        };
    }
    spec.validate();

    if (j.contains("params")) {
        const auto& p = j["params"];
        CltParams c;
        c.alpha = p.value("alpha", c.alpha);
        c.kappa = p.value("kappa", c.kappa);
        c.lambda = p.value("lambda", c.lambda);
        c.xi = p.value("xi", c.xi);
        c.C = p.value("C", c.C);
        c.delta = p.value("delta", c.delta);
        c.validate();
        out.params = c;
    }
    return out;
}

}  // namespace dcm
