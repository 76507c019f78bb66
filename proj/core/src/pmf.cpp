#include "dcm/pmf.hpp"

namespace dcm {
namespace {

BigRational power(const BigRational& x, int k) {
    BigRational r(1);
    for (int i = 0; i < k; ++i) r *= x;
    return r;
}

template <class Law, class ProbToBig>
BigRational exact_moment_impl(const Law& p, int k, bool central, ProbToBig prob_to_big) {
    if (k < 1) throw InvalidArgument("moment order must be positive");
    BigRational mass(0);
    BigRational mean(0);
    for (const auto& a : p.atoms()) {
        BigRational w = prob_to_big(a.prob);
        mass += w;
        mean += w * a.value.to_big();
    }
    mean /= mass;
    BigRational center = central ? mean : BigRational(0);
    BigRational s(0);
    for (const auto& a : p.atoms()) s += prob_to_big(a.prob) * power(a.value.to_big() - center, k);
    return s / mass;
}

}  // namespace

BigRational exact_moment(const ExactPmf& p, int k, bool central) {
    return exact_moment_impl(p, k, central, [](const BigRational& w) { return w; });
}

BigRational exact_moment_of_values(const Pmf& p, int k, bool central) {
    // Doubles convert to binary fractions exactly.
    return exact_moment_impl(p, k, central, [](double w) { return BigRational(w); });
}

Pmf to_floating(const ExactPmf& p) {
    std::vector<Pmf::Atom> atoms;
    atoms.reserve(p.size());
    for (const auto& a : p.atoms()) atoms.push_back({a.value, a.prob.convert_to<double>()});
    return Pmf::from_unchecked(std::move(atoms), p.lost_mass().convert_to<double>());
}

RealPmf to_real(const Pmf& p) { return affine_real(p, 1.0, 0.0); }

RealPmf to_real(const ExactPmf& p) { return to_real(to_floating(p)); }

RealPmf affine_real(const Pmf& p, double scale, double shift) {
    if (scale == 0.0) throw InvalidArgument("affine map with zero scale");
    std::vector<RealPmf::Atom> atoms;
    atoms.reserve(p.size());
    for (const auto& a : p.atoms()) atoms.push_back({scale * a.value.to_double() + shift, a.prob});
    return RealPmf::from_unchecked(std::move(atoms), p.lost_mass());
}

double total_variation(const Pmf& a, const Pmf& b) {
    auto x = a.atoms();
    auto y = b.atoms();
    std::size_t i = 0;
    std::size_t j = 0;
    double s = 0.0;
    while (i < x.size() || j < y.size()) {
        if (j == y.size() || (i < x.size() && x[i].value < y[j].value)) {
            s += x[i++].prob;
        } else if (i == x.size() || y[j].value < x[i].value) {
            s += y[j++].prob;
        } else {
            s += std::abs(x[i++].prob - y[j++].prob);
        }
    }
    return 0.5 * s;
}

}  // namespace dcm
