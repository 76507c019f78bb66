#include "dcm/catalog.hpp"
#include "dcm/io.hpp"

#include <catch_amalgamated.hpp>

#include <nlohmann/json.hpp>

#include <cmath>

using namespace dcm;
using nlohmann::json;

TEST_CASE("pmf JSON round trip") {
    Pmf p = exact_distribution(make("unsuccessful_search").spec, 4);
    std::string text = to_json(p);
    json j = json::parse(text);
    CHECK(j["atoms"].size() == 3);
    CHECK(j["atoms"][0][0] == 1);
    CHECK(j["atoms"][0][1] == 1);
    CHECK(std::abs(j["atoms"][0][2].get<double>() - 1.0 / 3.0) <= 1e-15);
    CHECK(j["lost_mass"] == 0.0);
    CHECK(pmf_from_json(text) == p);

    Pmf half = Pmf::from_atoms({{Rational(-1, 2), 0.25}, {Rational(3, 4), 0.75}});
    CHECK(pmf_from_json(to_json(half)) == half);
    CHECK_THROWS_AS(pmf_from_json("{\"atoms\": [[1, 2]]}"), InvalidArgument);
    CHECK_THROWS_AS(pmf_from_json("not json"), InvalidArgument);
}

TEST_CASE("exact pmf JSON") {
    ExactPmf p = exact_distribution_rational(make("unsuccessful_search").spec, 4);
    json j = json::parse(to_json(p));
    CHECK(j["atoms"][0][2] == "1/3");
    CHECK(j["atoms"][2][2] == "1/6");
    CHECK(j["lost_mass"] == "0");
}

TEST_CASE("pmf CSV") {
    Pmf p = exact_distribution(make("quickselect").spec, 3);
    CHECK(to_csv(p) == "value,prob\n2,0.66666666666666663\n3,0.33333333333333331\n");
}

TEST_CASE("metric report JSON") {
    json j = json::parse(to_json(MetricReport{0.5, 1e-12}));
    CHECK(j["value"] == 0.5);
    CHECK(j["abs_error_bound"] == 1e-12);
    CHECK_FALSE(j.contains("adjust_scale"));
}

TEST_CASE("format_double") {
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(2.0) == "2");
    CHECK(format_double(NAN) == "nan");
    CHECK(format_double(-INFINITY) == "-inf");
}

TEST_CASE("custom recurrence") {
    // Unsuccessful search restated row by row, up to n = 6.
    json spec{{"name", "toy"}, {"K", 1}, {"n0", 2}, {"base", {0, 0}}, {"rows", json::array()}};
    for (int n = 2; n <= 6; ++n) {
        for (int i = 1; i < n; ++i) spec["rows"].push_back({n, i, 1, "1/" + std::to_string(n - 1)});
    }
    CustomRecurrence c = recurrence_from_json(spec.dump());
    CHECK(c.n_max == 6);
    CHECK_FALSE(c.params.has_value());
    CHECK(c.spec.exact_supported());
    CHECK(exact_distribution_rational(c.spec, 6) ==
          exact_distribution_rational(make("unsuccessful_search").spec, 6));
    CHECK_THROWS_AS(exact_distribution(c.spec, 7), CapacityError);

    spec["params"] = {{"alpha", 0.5}, {"C", 1.0}};
    CustomRecurrence with = recurrence_from_json(spec.dump());
    REQUIRE(with.params.has_value());
    CHECK(with.params->C == 1.0);
    CHECK(with.params->delta == 0.1);
}

TEST_CASE("custom K = 2 recurrence with floating probabilities") {
    json spec{{"name", "pair"}, {"K", 2}, {"n0", 1}, {"base", {0}}, {"rows", json::array()}};
    for (int n = 1; n <= 5; ++n) {
        spec["rows"].push_back({n, n / 2, n - 1 - n / 2, 1, 0.5});
        spec["rows"].push_back({n, 0, n - 1, "1/2", 0.5});
    }
    CustomRecurrence c = recurrence_from_json(spec.dump());
    CHECK_FALSE(c.spec.exact_supported());
    Pmf p = exact_distribution(c.spec, 5);
    CHECK(std::abs(p.total() - 1.0) <= 1e-12);
}

TEST_CASE("custom recurrence validation") {
    json good{{"name", "toy"}, {"K", 1}, {"n0", 2}, {"base", {0, 0}}, {"rows", {{2, 1, 1, 1.0}}}};
    CHECK_NOTHROW(recurrence_from_json(good.dump()));

    json bad_sum = good;
    bad_sum["rows"] = {{2, 1, 1, 0.5}};
    CHECK_THROWS_AS(recurrence_from_json(bad_sum.dump()), InvalidArgument);

    json gap = good;
    gap["rows"] = {{2, 1, 1, 1.0}, {4, 1, 1, 1.0}};
    CHECK_THROWS_AS(recurrence_from_json(gap.dump()), InvalidArgument);

    json k3 = good;
    k3["K"] = 3;
    CHECK_THROWS_AS(recurrence_from_json(k3.dump()), InvalidArgument);

    json wide = good;
    wide["rows"] = {{2, 3, 1, 1.0}};
    CHECK_THROWS_AS(recurrence_from_json(wide.dump()), InvalidArgument);

    json base = good;
    base["base"] = {0};
    CHECK_THROWS_AS(recurrence_from_json(base.dump()), InvalidArgument);

    CHECK_THROWS_AS(recurrence_from_json("{"), InvalidArgument);
}
