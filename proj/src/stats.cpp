#include "subcausal/stats.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace subcausal {

namespace {

// Regularized lower incomplete gamma by series expansion (x < a + 1).
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int n = 0; n < 500; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized upper incomplete gamma by Lentz continued fraction (x >= a + 1).
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 500; ++i) {
    double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_q: bad arguments");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

double chi_square_upper_tail(double x, int df) {
  if (df < 1) throw std::invalid_argument("chi_square_upper_tail: df < 1");
  if (x <= 0.0) return 1.0;
  if (df == 1) return std::erfc(std::sqrt(x / 2.0));
  return gamma_q(df / 2.0, x / 2.0);
}

double quantile_type7(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("quantile of empty sample");
  std::sort(values.begin(), values.end());
  if (q <= 0.0) return values.front();
  if (q >= 1.0) return values.back();
  const double h = (static_cast<double>(values.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(h);
  if (lo + 1 >= values.size()) return values.back();
  const double frac = h - static_cast<double>(lo);
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

double chi_square_independence_p(const std::vector<double>& counts, int rows, int cols) {
  if (static_cast<int>(counts.size()) != rows * cols)
    throw std::invalid_argument("chi_square_independence_p: size mismatch");
  std::vector<double> row_sum(rows, 0.0), col_sum(cols, 0.0);
  double total = 0.0;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      double v = counts[r * cols + c];
      row_sum[r] += v;
      col_sum[c] += v;
      total += v;
    }
  if (total <= 0.0) return 1.0;
  int eff_rows = 0, eff_cols = 0;
  for (double v : row_sum) eff_rows += v > 0.0;
  for (double v : col_sum) eff_cols += v > 0.0;
  const int df = (eff_rows - 1) * (eff_cols - 1);
  if (df <= 0) return 1.0;
  double stat = 0.0;
  for (int r = 0; r < rows; ++r) {
    if (row_sum[r] <= 0.0) continue;
    for (int c = 0; c < cols; ++c) {
      if (col_sum[c] <= 0.0) continue;
      const double expected = row_sum[r] * col_sum[c] / total;
      const double diff = counts[r * cols + c] - expected;
      stat += diff * diff / expected;
    }
  }
  return chi_square_upper_tail(stat, df);
}

}  // namespace subcausal
