#pragma once

#include <cmath>
#include <vector>

namespace subcausal {

inline double expit(double a) { return 1.0 / (1.0 + std::exp(-a)); }
inline double logit(double p) { return std::log(p / (1.0 - p)); }

// Upper tail P(chi2(df) > x). df == 1 goes through erfc so the accuracy is
// ~1e-15 absolute; general df uses the regularized incomplete gamma.
double chi_square_upper_tail(double x, int df);

// Regularized upper incomplete gamma Q(a, x).
double gamma_q(double a, double x);

// Quantile with linear interpolation between order statistics (type 7).
// Sorts a copy; q in [0, 1].
double quantile_type7(std::vector<double> values, double q);

// Pearson chi-square independence test on an r x c count table (row-major).
// Rows/columns with zero margin are dropped; returns p = 1 when no degrees
// of freedom remain.
double chi_square_independence_p(const std::vector<double>& counts, int rows, int cols);

}  // namespace subcausal
