#pragma once

#include <vector>

namespace pcm {

// Regularized incomplete gamma functions P(a,x) and Q(a,x) = 1 - P(a,x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// CDF of InvGamma(shape, scale) at x.
double inv_gamma_cdf(double x, double shape, double scale);

// Upper tail of the chi-square distribution with df degrees of freedom.
double chi_square_sf(double stat, double df);

// One-sample Kolmogorov–Smirnov statistic against cdf values evaluated at
// the sorted sample (cdf_at_sorted[i] = F(x_(i))).
double ks_statistic(const std::vector<double>& cdf_at_sorted);

// Asymptotic KS critical value at significance level `alpha` for sample
// size n: c(alpha)/sqrt(n).
double ks_critical_value(double alpha, std::size_t n);

// Equal-tailed sample quantile with linear interpolation between order
// statistics; `sorted` must be ascending, p in [0,1].
double quantile_sorted(const std::vector<double>& sorted, double p);

}  // namespace pcm
