#include "cli.hpp"

#include "dcm/catalog.hpp"
#include "dcm/clt.hpp"
#include "dcm/fixed_point.hpp"
#include "dcm/io.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace dcm::cli {
namespace {

using nlohmann::json;

constexpr const char* kSchemas = R"(Output schemas (JSON unless --format csv):
  dist         {"atoms":[[value_num,value_den,prob],...],"lost_mass":x}
               exact mode writes prob and lost_mass as "p/q" strings
               csv: value,prob
  simulate     {"model","n","runs","seed","mean","variance","mean_stderr"}
               csv: value,prob (empirical)
  moments      {"model","rows":[{"n","mean","variance","abs_third"}]}
               csv: n,mean,variance,abs_third
  zeta3        {"model","rows":[{"n","value","abs_error_bound","probe"}]}
               value is zeta3((Y_n - EY_n)/sd(Y_n), N(0,1)); null when sd = 0
               csv: n,zeta3,abs_error_bound,probe
  verify       {"model","params","beta","beta_applicable","conditions","rows","lemma32","transfer"}
               csv: n,tau,b3norm,G3norm,delta3norm,zeta3_ZN,zeta3_ZstarN,bound23_sum,kolmogorov
               nondegenerate models: {"model","degenerate":false,"beta_gate":"not applicable","route"}
  rate         {"model","metric","series":[[n,value],...],"fit":{"exponent","constant","residual"}}
               csv: n,value,fitted
  fixed-point  {"equation","population","iterations","seed","mean","variance","raw_moments":[m1,m2,m3]}
               dickman adds "reference_moments"; csv: value,prob (400 bins)
  catalog      [{"name","K","n0","params","C_source","fit_window","degenerate","exact_cap","modes","beta","notes"}]
               csv: name,K,alpha,kappa,lambda,xi,C,delta,degenerate,exact_cap,modes

Ranges: --ns a:b is the doubling grid a, 2a, 4a, ... <= b; --ns 3,5,9 is a list.
Exit codes: 0 ok, 2 usage, 3 capacity, 4 precondition.
The default seed is read from DCM_SEED (1 when unset).)";

struct Options {
    std::string model;
    std::string spec_file;
    Index n = 0;
    std::string ns;
    std::optional<double> alpha, kappa, lambda, xi, C, delta;
    double tail_eps = 1e-13;
    std::string mode = "floating";
    std::uint64_t seed = 1;
    std::string format = "json";
    std::string output;
    std::string metric = "zeta3";
    std::size_t runs = 100000;
    std::string equation = "quickselect";
    std::size_t population = 1000000;
    int iterations = 60;
    std::size_t bins = 400;
    Index lemma_n_max = 500;
    std::string catalog_action;
};

struct Model {
    std::string name;
    RecurrenceSpec spec;
    CltParams params;
    bool degenerate = true;
    json fit_note;
};

std::vector<Index> parse_ns(const std::string& text) {
    std::vector<Index> out;
    auto colon = text.find(':');
    try {
        if (colon != std::string::npos) {
            Index a = std::stoll(text.substr(0, colon));
            Index b = std::stoll(text.substr(colon + 1));
            if (a < 1 || b < a) throw InvalidArgument("bad range '" + text + "'");
            for (Index n = a; n <= b; n *= 2) out.push_back(n);
        } else {
            std::stringstream ss(text);
            std::string item;
            while (std::getline(ss, item, ',')) out.push_back(std::stoll(item));
        }
    } catch (const std::logic_error&) {
        throw InvalidArgument("cannot parse n list '" + text + "'");
    }
    if (out.empty()) throw InvalidArgument("empty n list");
    for (Index n : out) {
        if (n < 0) throw InvalidArgument("negative n in list");
    }
    return out;
}

SolveOptions solve_options(const Options& o) {
    SolveOptions s;
    s.tail_eps = o.tail_eps;
    if (o.mode == "exact") s.mode = Arithmetic::exact;
    return s;
}

Model load_model(const Options& o, bool need_params) {
    if (o.model.empty() == o.spec_file.empty()) throw InvalidArgument("give exactly one of --model or --spec-file");
    Model m;
    if (!o.model.empty()) {
        CatalogEntry e = make(o.model);
        m.name = e.name;
        m.spec = e.spec;
        m.degenerate = e.degenerate;
        m.params = e.params;
        if (need_params && e.degenerate && e.c_source == ConstantSource::fitted) {
            m.params = resolved_params(e, solve_options(o), o.seed);
            m.fit_note = {{"C_source", "fitted"}, {"fit_window", e.fit_window}};
        }
    } else {
        std::ifstream in(o.spec_file);
        if (!in) throw InvalidArgument("cannot read spec file '" + o.spec_file + "'");
        std::stringstream buf;
        buf << in.rdbuf();
        CustomRecurrence c = recurrence_from_json(buf.str());
        m.name = c.spec.name;
        m.spec = c.spec;
        if (c.params) {
            m.params = *c.params;
        } else if (need_params) {
            // Fit C over the doubling grid below the tabulated maximum.
            std::vector<Index> window;
            for (Index n = std::max<Index>(c.spec.n0, 8); n <= c.n_max; n *= 2) window.push_back(n);
            if (window.size() < 2) window = {std::max<Index>(c.spec.n0, 2), c.n_max};
            Solver solver(c.spec, solve_options(o));
            m.params.C = fit_variance_constant(moment_table(solver, window), m.params.alpha, m.params.lambda);
            m.fit_note = {{"C_source", "fitted"}, {"fit_window", window}};
        }
    }
    if (o.alpha) m.params.alpha = *o.alpha;
    if (o.kappa) m.params.kappa = *o.kappa;
    if (o.lambda) m.params.lambda = *o.lambda;
    if (o.xi) m.params.xi = *o.xi;
    if (o.C) m.params.C = *o.C;
    if (o.delta) m.params.delta = *o.delta;
    m.params.validate();
    return m;
}

json params_json(const CltParams& p) {
    return {{"alpha", p.alpha}, {"kappa", p.kappa}, {"lambda", p.lambda},
            {"xi", p.xi},       {"C", p.C},         {"delta", p.delta}};
}

json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::string csv_num(double x) { return format_double(x); }

Index require_n(const Options& o) {
    if (o.n < 0) throw InvalidArgument("--n must be nonnegative");
    return o.n;
}

// ---------------------------------------------------------------- commands

std::string cmd_dist(const Options& o) {
    Model m = load_model(o, false);
    Index n = require_n(o);
    if (o.mode == "exact") {
        ExactPmf p = exact_distribution_rational(m.spec, n, solve_options(o));
        if (o.format == "csv") {
            std::string s = "value,prob\n";
            for (const auto& a : p.atoms()) s += a.value.to_string() + "," + a.prob.str() + "\n";
            return s;
        }
        return to_json(p) + "\n";
    }
    Pmf p = exact_distribution(m.spec, n, solve_options(o));
    return o.format == "csv" ? to_csv(p) : to_json(p) + "\n";
}

std::string cmd_simulate(const Options& o) {
    Model m = load_model(o, false);
    Index n = require_n(o);
    if (o.runs < 2) throw InvalidArgument("--runs must be at least 2");
    Rng rng(o.seed);
    Pmf p = empirical_law(m.spec, n, o.runs, rng);
    if (o.format == "csv") return to_csv(p);
    double mean = moment(p, 1, false);
    double var = moment(p, 2, true) * static_cast<double>(o.runs) / static_cast<double>(o.runs - 1);
    json j{{"model", m.name},
           {"n", n},
           {"runs", o.runs},
           {"seed", o.seed},
           {"mean", mean},
           {"variance", var},
           {"mean_stderr", std::sqrt(var / static_cast<double>(o.runs))}};
    return j.dump(2) + "\n";
}

std::string cmd_moments(const Options& o) {
    Model m = load_model(o, false);
    auto rows = moment_table(m.spec, parse_ns(o.ns), solve_options(o));
    if (o.format == "csv") {
        std::string s = "n,mean,variance,abs_third\n";
        for (const auto& r : rows) {
            s += std::to_string(r.n) + "," + csv_num(r.mean) + "," + csv_num(r.variance) + "," + csv_num(r.abs_third) +
                 "\n";
        }
        return s;
    }
    json out{{"model", m.name}, {"rows", json::array()}};
    for (const auto& r : rows) {
        out["rows"].push_back({{"n", r.n}, {"mean", r.mean}, {"variance", r.variance}, {"abs_third", r.abs_third}});
    }
    return out.dump(2) + "\n";
}

std::string cmd_zeta3(const Options& o) {
    Model m = load_model(o, false);
    CltVerifier v(m.spec, m.params, solve_options(o));
    std::string csv = "n,zeta3,abs_error_bound,probe\n";
    json out{{"model", m.name}, {"rows", json::array()}};
    for (Index n : parse_ns(o.ns)) {
        MomentRow mr = v.moments(n);
        if (!(mr.variance > 0.0)) {
            csv += std::to_string(n) + ",nan,nan,nan\n";
            out["rows"].push_back({{"n", n}, {"value", nullptr}, {"abs_error_bound", nullptr}, {"probe", nullptr}});
            continue;
        }
        MetricReport r = v.zeta3_to_normal(n);
        double sd = std::sqrt(mr.variance);
        double probe =
            zeta3_lower_probe(affine_real(*v.solver().solve(n), 1.0 / sd, -mr.mean / sd), NormalMixture::standard());
        csv += std::to_string(n) + "," + csv_num(r.value) + "," + csv_num(r.abs_error_bound) + "," + csv_num(probe) +
               "\n";
        out["rows"].push_back(
            {{"n", n}, {"value", r.value}, {"abs_error_bound", r.abs_error_bound}, {"probe", probe}});
    }
    return o.format == "csv" ? csv : out.dump(2) + "\n";
}

std::string cmd_verify(const Options& o) {
    Model m = load_model(o, true);
    if (!m.degenerate) {
        json j{{"model", m.name},
               {"degenerate", false},
               {"beta_gate", "not applicable"},
               {"route", "fixed-point"},
               {"hint", "nondegenerate limit equation; run: dcm fixed-point --equation " + m.name}};
        if (o.format == "csv") return "model,degenerate,beta_gate,route\n" + m.name + ",false,not applicable,fixed-point\n";
        return j.dump(2) + "\n";
    }
    std::vector<Index> ns = parse_ns(o.ns);
    BetaResult beta = beta_exponent(m.params, m.spec.copies);
    CltVerifier v(m.spec, m.params, solve_options(o));
    ConditionReport cond = v.check_conditions(ns);

    std::vector<VerifyRow> rows;
    std::string csv = "n,tau,b3norm,G3norm,delta3norm,zeta3_ZN,zeta3_ZstarN,bound23_sum,kolmogorov\n";
    json transfer = nullptr;
    if (m.spec.tabulated()) {
        for (Index n : ns) {
            if (n < m.spec.n0) continue;
            VerifyRow r = v.verify_row(n);
            rows.push_back(r);
            csv += std::to_string(r.n) + "," + csv_num(r.tau) + "," + csv_num(r.b3norm) + "," + csv_num(r.G3norm) + "," +
                   csv_num(r.delta3norm) + "," + csv_num(r.zeta3_ZN.value) + "," + csv_num(r.zeta3_ZstarN.value) + "," +
                   csv_num(r.bound23_sum) + "," + csv_num(r.kolmogorov) + "\n";
        }
        if (!rows.empty()) {
            TransferInput in;
            in.d = v.d_series(rows.back().n);
            for (const auto& r : rows) in.r[r.n] = r.zeta3_ZstarN;
            in.index_law = [&m](Index n) { return m.spec.index_marginal(n); };
            in.copies = m.spec.copies;
            in.gamma = 3.0 * m.params.alpha;
            in.beta = beta.beta;
            in.delta = m.params.delta;
            TransferReport t = lemma31_transfer(in);
            transfer = {{"holds", t.holds()},
                        {"first_violation", t.first_violation ? json(*t.first_violation) : json(nullptr)},
                        {"sup_d_scaled", t.sup_d_scaled},
                        {"sup_r_scaled", t.sup_r_scaled}};
        }
    }
    if (o.format == "csv") return csv;

    json j{{"model", m.name}, {"params", params_json(m.params)}, {"beta", beta.beta},
           {"beta_applicable", beta.applicable}};
    if (!m.fit_note.is_null()) j["params_note"] = m.fit_note;
    json c{{"ok", cond.ok()},
           {"drift_negative", cond.drift_negative},
           {"self_mass_below_one", cond.self_mass_below_one},
           {"norms_bounded", cond.norms_bounded},
           {"epsilon_estimate", cond.epsilon_estimate},
           {"flags", cond.flags},
           {"rows", json::array()}};
    for (const auto& r : cond.rows) {
        c["rows"].push_back({{"n", r.n},
                             {"drift", r.drift},
                             {"log_l3", r.log_l3},
                             {"self_mass", r.self_mass},
                             {"toll_scaled", num(r.toll_scaled)},
                             {"index_scaled", r.index_scaled}});
    }
    j["conditions"] = c;
    j["rows"] = json::array();
    for (const auto& r : rows) {
        j["rows"].push_back({{"n", r.n},
                             {"tau", r.tau},
                             {"b3norm", r.b3norm},
                             {"G3norm", r.G3norm},
                             {"delta3norm", r.delta3norm},
                             {"zeta3_ZN", r.zeta3_ZN.value},
                             {"zeta3_ZstarN", r.zeta3_ZstarN.value},
                             {"bound23_sum", r.bound23_sum},
                             {"kolmogorov", num(r.kolmogorov)}});
    }
    auto violations = lemma32_check(m.params.alpha, o.lemma_n_max);
    j["lemma32"] = {{"alpha", m.params.alpha}, {"n_max", o.lemma_n_max}, {"violations", violations.size()}};
    j["transfer"] = transfer;
    if (!m.spec.tabulated()) {
        j["note"] = "sampler-only recurrence: accompanying laws and bound terms need tabulated joint laws";
    }
    return j.dump(2) + "\n";
}

std::string cmd_rate(const Options& o) {
    if (o.metric != "zeta3" && o.metric != "kolmogorov") throw InvalidArgument("--metric must be zeta3 or kolmogorov");
    Model m = load_model(o, false);
    CltVerifier v(m.spec, m.params, solve_options(o));
    std::vector<std::pair<Index, double>> series;
    for (Index n : parse_ns(o.ns)) {
        if (n < 3 || !(v.moments(n).variance > 0.0)) continue;
        double d = o.metric == "zeta3" ? v.zeta3_to_normal(n).value : v.kolmogorov_to_normal(n);
        series.emplace_back(n, d);
    }
    RateFit fit = fit_rate(series);
    if (o.format == "csv") {
        std::string s = "n,value,fitted\n";
        for (auto [n, d] : series) {
            double f = fit.constant / std::pow(std::log(static_cast<double>(n)), fit.exponent);
            s += std::to_string(n) + "," + csv_num(d) + "," + csv_num(f) + "\n";
        }
        return s;
    }
    json j{{"model", m.name},
           {"metric", o.metric},
           {"series", series},
           {"fit", {{"exponent", fit.exponent}, {"constant", fit.constant}, {"residual", fit.residual}}}};
    return j.dump(2) + "\n";
}

std::string cmd_fixed_point(const Options& o) {
    LimitEquation eq;
    if (o.equation == "quickselect") {
        eq = quickselect_equation();
    } else if (o.equation == "dickman") {
        eq = dickman_equation();
    } else {
        throw InvalidArgument("--equation must be quickselect or dickman");
    }
    eq.population = o.population;
    eq.iterations = o.iterations;
    Rng rng(o.seed);
    EmpiricalLaw law = iterate_population(eq, rng);
    if (o.format == "csv") {
        RealPmf p = law.binned(o.bins);
        std::string s = "value,prob\n";
        for (const auto& a : p.atoms()) s += csv_num(a.value) + "," + csv_num(a.prob) + "\n";
        return s;
    }
    json j{{"equation", o.equation},
           {"population", o.population},
           {"iterations", o.iterations},
           {"seed", o.seed},
           {"mean", law.mean()},
           {"variance", law.variance()},
           {"raw_moments", {law.raw_moment(1), law.raw_moment(2), law.raw_moment(3)}}};
    if (o.equation == "dickman") {
        j["reference_moments"] = {dickman_reference_moments(1).str(), dickman_reference_moments(2).str(),
                                  dickman_reference_moments(3).str()};
    }
    return j.dump(2) + "\n";
}

std::string source_name(ConstantSource s) {
    switch (s) {
        case ConstantSource::closed_form: return "closed_form";
        case ConstantSource::derived: return "derived";
        case ConstantSource::fitted: return "fitted";
        case ConstantSource::not_applicable: return "not_applicable";
    }
    return "?";
}

std::string cmd_catalog(const Options& o) {
    if (!o.catalog_action.empty() && o.catalog_action != "list") {
        throw InvalidArgument("unknown catalog action '" + o.catalog_action + "'");
    }
    json arr = json::array();
    std::string csv = "name,K,alpha,kappa,lambda,xi,C,delta,degenerate,exact_cap,modes\n";
    for (const auto& name : catalog_names()) {
        CatalogEntry e = make(name);
        std::vector<std::string> modes;
        if (e.exact_supported()) modes.push_back("exact");
        modes.push_back("simulate");
        json jc = e.c_source == ConstantSource::fitted ? json("fitted") : json(e.params.C);
        json entry{{"name", e.name},
                   {"K", e.spec.copies},
                   {"n0", e.spec.n0},
                   {"C_source", source_name(e.c_source)},
                   {"fit_window", e.fit_window},
                   {"degenerate", e.degenerate},
                   {"exact_cap", e.exact_cap},
                   {"modes", modes},
                   {"notes", e.notes}};
        if (e.degenerate) {
            json p = params_json(e.params);
            p["C"] = jc;
            entry["params"] = p;
            entry["beta"] = beta_exponent(e.params, e.spec.copies).beta;
        } else {
            entry["params"] = nullptr;
            entry["beta"] = nullptr;
        }
        arr.push_back(entry);
        std::string joined;
        for (const auto& md : modes) joined += (joined.empty() ? "" : "|") + md;
        auto p = e.params;
        csv += e.name + "," + std::to_string(e.spec.copies) + "," +
               (e.degenerate ? csv_num(p.alpha) + "," + csv_num(p.kappa) + "," + csv_num(p.lambda) + "," +
                                   csv_num(p.xi) + "," +
                                   (e.c_source == ConstantSource::fitted ? std::string("fitted") : csv_num(p.C)) +
                                   "," + csv_num(p.delta)
                             : std::string(",,,,,")) +
               "," + (e.degenerate ? "true" : "false") + "," + std::to_string(e.exact_cap) + "," + joined + "\n";
    }
    return o.format == "csv" ? csv : arr.dump(2) + "\n";
}

void add_model(CLI::App* s, Options& o) {
    s->add_option("--model", o.model, "catalog entry (dashes or underscores)");
    s->add_option("--spec-file", o.spec_file, "custom recurrence JSON");
    s->add_option("--tail-eps", o.tail_eps, "per-step truncation budget")->check(CLI::NonNegativeNumber);
}

void add_params(CLI::App* s, Options& o) {
    s->add_option("--alpha", o.alpha);
    s->add_option("--kappa", o.kappa);
    s->add_option("--lambda", o.lambda);
    s->add_option("--xi", o.xi);
    s->add_option("--C", o.C);
    s->add_option("--delta", o.delta);
}

void add_io(CLI::App* s, Options& o) {
    s->add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    s->add_option("--output", o.output, "write to this file instead of stdout");
}

int code_for(const std::exception& e) {
    if (dynamic_cast<const CapacityError*>(&e)) return kCapacity;
    if (dynamic_cast<const PreconditionError*>(&e)) return kPrecondition;
    if (dynamic_cast<const InvalidArgument*>(&e) || dynamic_cast<const UnsupportedError*>(&e)) return kUsage;
    return kFailure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    if (const char* env = std::getenv("DCM_SEED")) {
        try {
            o.seed = std::stoull(env);
        } catch (const std::logic_error&) {
            err << "error: DCM_SEED is not an unsigned integer\n";
            return kUsage;
        }
    }

    CLI::App app{"Distributional divide-and-conquer recurrences: exact laws, zeta_3 distances, normal limit checks",
                 "dcm"};
    app.footer(kSchemas);
    app.require_subcommand(1);

    auto* dist = app.add_subcommand("dist", "exact law of Y_n");
    add_model(dist, o);
    add_io(dist, o);
    dist->add_option("--n", o.n)->required();
    dist->add_option("--mode", o.mode, "floating or exact")->check(CLI::IsMember({"floating", "exact"}));

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo summary of Y_n");
    add_model(simulate, o);
    add_io(simulate, o);
    simulate->add_option("--n", o.n)->required();
    simulate->add_option("--runs", o.runs);
    simulate->add_option("--seed", o.seed);

    auto* moments = app.add_subcommand("moments", "mean, variance and E|Y - EY|^3 over n");
    add_model(moments, o);
    add_io(moments, o);
    moments->add_option("--ns", o.ns)->required();

    auto* zeta = app.add_subcommand("zeta3", "zeta_3 of standardized Y_n to N(0,1) over n");
    add_model(zeta, o);
    add_params(zeta, o);
    add_io(zeta, o);
    zeta->add_option("--ns", o.ns)->required();

    auto* verify = app.add_subcommand("verify", "conditions, accompanying laws, bound terms and lemma checks");
    add_model(verify, o);
    add_params(verify, o);
    add_io(verify, o);
    o.ns = "4:512";
    verify->add_option("--ns", o.ns, "default 4:512");
    verify->add_option("--lemma-n-max", o.lemma_n_max);
    verify->add_option("--seed", o.seed);

    auto* rate = app.add_subcommand("rate", "fit d_n = c / ln^e n to a distance series");
    add_model(rate, o);
    add_params(rate, o);
    add_io(rate, o);
    rate->add_option("--ns", o.ns)->required();
    rate->add_option("--metric", o.metric, "zeta3 or kolmogorov");

    auto* fixed = app.add_subcommand("fixed-point", "population iteration of a limit equation");
    add_io(fixed, o);
    fixed->add_option("--equation", o.equation, "quickselect or dickman");
    fixed->add_option("--population", o.population);
    fixed->add_option("--iterations", o.iterations);
    fixed->add_option("--bins", o.bins);
    fixed->add_option("--seed", o.seed);

    auto* catalog = app.add_subcommand("catalog", "list the catalog entries");
    add_io(catalog, o);
    catalog->add_option("action", o.catalog_action, "list");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kUsage;
    }

    try {
        std::string text;
        if (dist->parsed()) text = cmd_dist(o);
        if (simulate->parsed()) text = cmd_simulate(o);
        if (moments->parsed()) text = cmd_moments(o);
        if (zeta->parsed()) text = cmd_zeta3(o);
        if (verify->parsed()) text = cmd_verify(o);
        if (rate->parsed()) text = cmd_rate(o);
        if (fixed->parsed()) text = cmd_fixed_point(o);
        if (catalog->parsed()) text = cmd_catalog(o);
        if (o.output.empty()) {
            out << text;
        } else {
            std::ofstream f(o.output, std::ios::binary);
            if (!f) throw InvalidArgument("cannot write '" + o.output + "'");
            f << text;
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return code_for(e);
    }
    return kOk;
}

}  // namespace dcm::cli
