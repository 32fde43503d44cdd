#pragma once

#include <span>
#include <vector>

namespace envcva::stats {

double mean(std::span<const double> x);

// Sample standard error of the mean (n-1 denominator); 0 for n < 2.
double standard_error(std::span<const double> x);

// Median; the two middle values are averaged for even counts.
double median(std::span<const double> x);

// Empirical q-quantile as the ceil(q*n)-th order statistic (inverse ECDF),
// q in [0,1]. q = 0 gives the minimum.
double empirical_quantile(std::span<const double> x, double q);
double empirical_quantile_sorted(std::span<const double> sorted, double q);

// Least-squares nondecreasing fit (pool adjacent violators), unit weights.
std::vector<double> isotonic_increasing(std::span<const double> y);

} // namespace envcva::stats
