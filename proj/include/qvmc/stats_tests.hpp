#ifndef QVMC_STATS_TESTS_HPP
#define QVMC_STATS_TESTS_HPP

#include <span>
#include <vector>

namespace qvmc {

// Pearson chi-square goodness-of-fit p-value; expected counts must be
// positive and sum to the observed total.
double chi_square_pvalue(std::span<const double> observed, std::span<const double> expected);

// Two-sample Kolmogorov-Smirnov statistic (max CDF distance).
double ks_two_sample(std::span<const double> a, std::span<const double> b);

// Anderson-Darling normality statistic with estimated mean/variance,
// small-sample adjusted (A*^2). Reject normality at 1% when > 1.035.
double anderson_darling_normal(std::span<const double> values);

constexpr double kAndersonDarling1pc = 1.035;

}  // namespace qvmc

#endif
