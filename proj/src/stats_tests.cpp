#include "qvmc/stats_tests.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

namespace qvmc {

double chi_square_pvalue(std::span<const double> observed, std::span<const double> expected) {
    if (observed.size() != expected.size() || observed.size() < 2)
        throw std::invalid_argument("chi_square_pvalue: bad bin counts");
    double stat = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        if (expected[i] <= 0.0)
            throw std::invalid_argument("chi_square_pvalue: nonpositive expected count");
        const double d = observed[i] - expected[i];
        stat += d * d / expected[i];
    }
    boost::math::chi_squared dist(static_cast<double>(observed.size() - 1));
    return boost::math::cdf(boost::math::complement(dist, stat));
}

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
    std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    double d = 0.0;
    std::size_t ia = 0, ib = 0;
    while (ia < sa.size() && ib < sb.size()) {
        if (sa[ia] <= sb[ib])
            ++ia;
        else
            ++ib;
        double fa = static_cast<double>(ia) / sa.size();
        double fb = static_cast<double>(ib) / sb.size();
        d = std::max(d, std::abs(fa - fb));
    }
    return d;
}

double anderson_darling_normal(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n < 8) throw std::invalid_argument("anderson_darling_normal: need at least 8 values");
    std::vector<double> x(values.begin(), values.end());
    std::sort(x.begin(), x.end());
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : x) var += (v - mean) * (v - mean);
    var /= static_cast<double>(n - 1);
    const double sd = std::sqrt(var);
    if (sd == 0.0) return std::numeric_limits<double>::infinity();

    boost::math::normal norm;
    double a2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double z = (x[i] - mean) / sd;
        double phi = boost::math::cdf(norm, z);
        phi = std::clamp(phi, 1e-300, 1.0 - 1e-16);
        const double zc = (x[n - 1 - i] - mean) / sd;
        double phic = boost::math::cdf(boost::math::complement(norm, zc));
        phic = std::clamp(phic, 1e-300, 1.0 - 1e-16);
        a2 += (2.0 * i + 1.0) * (std::log(phi) + std::log(phic));
    }
    a2 = -static_cast<double>(n) - a2 / static_cast<double>(n);
    const double nf = static_cast<double>(n);
    return a2 * (1.0 + 0.75 / nf + 2.25 / (nf * nf));
}

}  // namespace qvmc
