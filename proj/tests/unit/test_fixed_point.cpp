#include "dcm/fixed_point.hpp"
#include "oracles.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace dcm;
using Catch::Approx;

TEST_CASE("Dickman reference moments") {
    CHECK(dickman_reference_moments(1) == 1);
    CHECK(dickman_reference_moments(2) == BigRational(3, 2));
    CHECK(dickman_reference_moments(3) == BigRational(17, 6));
    // E W^4 = (1/4)(1 + 4*1 + 6*3/2 + 4*17/6)
    CHECK(dickman_reference_moments(4) == BigRational(1 + 4 + 9, 4) + BigRational(17, 6));
    CHECK_THROWS_AS(dickman_reference_moments(0), InvalidArgument);
}

TEST_CASE("Quickselect limit equation") {
    Rng rng(1);
    EmpiricalLaw x = iterate_population(quickselect_equation(), rng);
    CHECK(x.size() == 1000000);
    CHECK(std::abs(x.mean()) <= 0.01);
    CHECK(std::abs(x.variance() - 1.0) <= 0.02);
}

TEST_CASE("Dickman equation and the affine bridge") {
    Rng rng(2);
    EmpiricalLaw w = iterate_population(dickman_equation(), rng);
    CHECK(std::abs(w.mean() - 1.0) <= 0.01);
    for (int k = 1; k <= 3; ++k) {
        double ref = dickman_reference_moments(k).convert_to<double>();
        INFO("k=" << k);
        CHECK(std::abs(w.raw_moment(k) - ref) <= 3.0 * w.raw_moment_stderr(k));
    }

    EmpiricalLaw x = iterate_population(quickselect_equation(), rng);
    std::vector<double> bridged;
    for (double v : x.samples()) bridged.push_back(std::sqrt(0.5) * v + 1.0);
    EmpiricalLaw b(bridged);
    const double n = static_cast<double>(b.size());
    CHECK(std::abs(b.mean() - w.mean()) <= 5.0 * std::sqrt((b.variance() + w.variance()) / n));
    CHECK(std::abs(b.variance() - w.variance()) <= 0.01);
}

TEST_CASE("deterministic contraction") {
    LimitEquation eq;
    eq.coefficients = [](Rng&) { return std::pair{0.5, 0.0}; };
    eq.initial = [](Rng& r) { return std::uniform_real_distribution<double>(-5, 5)(r); };
    eq.population = 1000;
    eq.iterations = 1100;
    Rng rng(3);
    EmpiricalLaw x = iterate_population(eq, rng);
    for (double v : x.samples()) CHECK(v == 0.0);
}

TEST_CASE("contraction probe and divergence guard") {
    LimitEquation eq;
    eq.coefficients = [](Rng&) { return std::pair{2.0, 1.0}; };
    eq.population = 1000;
    Rng rng(4);
    CHECK_THROWS_AS(iterate_population(eq, rng), PreconditionError);
    eq.check_contraction = false;
    CHECK_THROWS_AS(iterate_population(eq, rng), Error);
    eq.population = 10;
    CHECK_THROWS_AS(iterate_population(eq, rng), InvalidArgument);
}

TEST_CASE("empirical law helpers") {
    EmpiricalLaw e({3.0, 1.0, 2.0, 4.0});
    CHECK(e.samples()[0] == 1.0);
    CHECK(e.mean() == 2.5);
    CHECK(e.raw_moment(2) == Approx(7.5));
    CHECK(e.quantile(0.0) == 1.0);
    CHECK(e.quantile(1.0) == 4.0);
    RealPmf p = e.as_pmf();
    CHECK(p.size() == 4);
    CHECK(p.atoms()[0].prob == 0.25);
    CHECK_THROWS_AS(EmpiricalLaw({}), InvalidArgument);

    Rng rng(5);
    std::normal_distribution<double> nd;
    std::vector<double> s(100000);
    for (auto& v : s) v = nd(rng);
    RealPmf b = EmpiricalLaw(s).binned(400);
    CHECK(b.size() <= 400);
    CHECK(b.mass() == Approx(1.0).margin(1e-12));
}

TEST_CASE("normal characterization") {
    Pmf coin = Pmf::from_atoms({{Rational(-1), 0.5}, {Rational(1), 0.5}});
    Rng rng(6);
    EmpiricalLaw zero = normal_characterization_iterate(coin, 0, 1000, rng);
    for (double v : zero.samples()) CHECK(std::abs(v) == 1.0);

    // Exactly (W_0 + .. + W_m)/sqrt(m+1): support on the scaled binomial lattice.
    EmpiricalLaw three = normal_characterization_iterate(coin, 3, 20000, rng);
    for (double v : three.samples()) {
        double k = (v * 2.0 + 4.0) / 2.0;
        CHECK(std::abs(k - std::round(k)) <= 1e-9);
    }

    auto normal = [](Rng& r) { return std::normal_distribution<double>()(r); };
    EmpiricalLaw g = normal_characterization_iterate(normal, 16, 200000, rng);
    CHECK(kolmogorov(g.as_pmf(), NormalMixture::standard()) <= 0.01);

    Pmf off = Pmf::from_atoms({{Rational(0), 0.5}, {Rational(2), 0.5}});
    CHECK_THROWS_AS(normal_characterization_iterate(off, 4, 100, rng), PreconditionError);
}
