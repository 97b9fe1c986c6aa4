// Test-only reference computations, kept independent of the library's own
// solvers: a direct observed-data likelihood over the raw parameter vector,
// a coordinate-ascent maximizer, a Newton solver for grouped logistic
// regression, and a Beta quantile via the incomplete beta function.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "subcausal/table.hpp"

namespace oracle {

inline double sigmoid(double a) { return 1.0 / (1.0 + std::exp(-a)); }

// 10-parameter vector under the T-independent-of-X constraint:
//   theta[0] = P(X=1), theta[1] = P(T=1),
//   theta[2..5] = P(Y=1 | T=t, X=x) at (t,x) = (0,0),(0,1),(1,0),(1,1),
//   theta[6..9] = missingness block, meaning depends on the mechanism:
//     mech 1: P(M=1 | T,Y) at (0,0),(0,1),(1,0),(1,1)
//     mech 2: P(M=1 | T,X) same order
//     mech 3: P(M=1 | X,Y) same order
//     mech 4: logistic coefficients (b0, bt, bx, by)
inline double miss_lambda(int mech, const std::array<double, 10>& th, int t, int x, int y) {
  const double* q = th.data() + 6;
  switch (mech) {
    case 1: return q[t * 2 + y];
    case 2: return q[t * 2 + x];
    case 3: return q[x * 2 + y];
    default: return sigmoid(q[0] + q[1] * t + q[2] * x + q[3] * y);
  }
}

inline double direct_loglik(const subcausal::ObservedTable& table, int mech,
                            const std::array<double, 10>& th) {
  double ll = 0.0;
  for (int t = 0; t < 2; ++t) {
    const double pt = t == 1 ? th[1] : 1.0 - th[1];
    for (int y = 0; y < 2; ++y) {
      double mis_mass = 0.0;
      for (int x = 0; x < 2; ++x) {
        const double px = x == 1 ? th[0] : 1.0 - th[0];
        const double py = y == 1 ? th[2 + t * 2 + x] : 1.0 - th[2 + t * 2 + x];
        const double lam = miss_lambda(mech, th, t, x, y);
        const double base = px * pt * py;
        const double n = table.obs(t, x, y);
        if (n > 0.0) {
          const double cell = base * (1.0 - lam);
          if (cell <= 0.0) return -1e300;
          ll += n * std::log(cell);
        }
        mis_mass += base * lam;
      }
      const double n = table.mis(t, y);
      if (n > 0.0) {
        if (mis_mass <= 0.0) return -1e300;
        ll += n * std::log(mis_mass);
      }
    }
  }
  return ll;
}

// Coordinate ascent: coarse grid scan then golden-section refinement per
// coordinate, cycling until a full sweep stops improving. Probability
// coordinates live in [1e-7, 1-1e-7]; logistic coefficients in [-14, 14].
inline double maximize_loglik(const subcausal::ObservedTable& table, int mech,
                              std::uint64_t seed, int starts = 6) {
  const double golden = 0.6180339887498949;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.1, 0.9);
  double best = -1e300;
  for (int s = 0; s < starts; ++s) {
    std::array<double, 10> th{};
    if (s == 0) {
      th = {0.5, table.arm_total(1) / table.total(), 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5};
      if (mech == 4) th[6] = th[7] = th[8] = th[9] = 0.0;
    } else {
      for (int i = 0; i < 10; ++i) th[i] = unif(rng);
      if (mech == 4)
        for (int i = 6; i < 10; ++i) th[i] = 4.0 * (th[i] - 0.5);
    }
    double cur = direct_loglik(table, mech, th);
    auto line_search = [&](int i, double lo, double hi) {
      // coarse scan then golden refinement within [lo, hi]
      double arg = th[i];
      double val = cur;
      for (int g = 0; g <= 24; ++g) {
        const double cand = lo + (hi - lo) * g / 24.0;
        th[i] = cand;
        const double v = direct_loglik(table, mech, th);
        if (v > val) {
          val = v;
          arg = cand;
        }
      }
      double a = std::max(lo, arg - (hi - lo) / 24.0);
      double b = std::min(hi, arg + (hi - lo) / 24.0);
      double c = b - golden * (b - a);
      double d = a + golden * (b - a);
      th[i] = c;
      double fc = direct_loglik(table, mech, th);
      th[i] = d;
      double fd = direct_loglik(table, mech, th);
      for (int it = 0; it < 90; ++it) {
        if (fc > fd) {
          b = d;
          d = c;
          fd = fc;
          c = b - golden * (b - a);
          th[i] = c;
          fc = direct_loglik(table, mech, th);
        } else {
          a = c;
          c = d;
          fc = fd;
          d = a + golden * (b - a);
          th[i] = d;
          fd = direct_loglik(table, mech, th);
        }
      }
      th[i] = fc > fd ? c : d;
      cur = std::max(fc, fd);
    };
    auto range = [&](int i, double& lo, double& hi) {
      const bool coef = mech == 4 && i >= 6;
      lo = coef ? -14.0 : 1e-7;
      hi = coef ? 14.0 : 1.0 - 1e-7;
    };
    // line search along an arbitrary direction in the coefficient block;
    // the intercept/slope ridges are far from axis-aligned
    auto direction_search = [&](const std::array<double, 4>& dir, double width) {
      const auto saved = th;
      auto at = [&](double s) {
        th = saved;
        for (int j = 0; j < 4; ++j) th[6 + j] = std::clamp(saved[6 + j] + s * dir[j], -14.0, 14.0);
        return direct_loglik(table, mech, th);
      };
      double best_s = 0.0, best_v = cur;
      for (int g = -16; g <= 16; ++g) {
        const double s = width * g / 16.0;
        const double v = at(s);
        if (v > best_v) {
          best_v = v;
          best_s = s;
        }
      }
      double a = best_s - width / 16.0, b = best_s + width / 16.0;
      double c = b - golden * (b - a), d = a + golden * (b - a);
      double fc = at(c), fd = at(d);
      for (int it = 0; it < 70; ++it) {
        if (fc > fd) {
          b = d;
          d = c;
          fd = fc;
          c = b - golden * (b - a);
          fc = at(c);
        } else {
          a = c;
          c = d;
          fc = fd;
          d = a + golden * (b - a);
          fd = at(d);
        }
      }
      const double s_final = fc > fd ? c : d;
      const double v_final = std::max(fc, fd);
      if (v_final > cur) {
        th = saved;
        for (int j = 0; j < 4; ++j) th[6 + j] = std::clamp(saved[6 + j] + s_final * dir[j], -14.0, 14.0);
        cur = v_final;
      } else {
        th = saved;
      }
    };
    static const std::array<std::array<double, 4>, 7> kRidgeDirections = {{
        {1, -1, 0, 0}, {1, 0, -1, 0}, {1, 0, 0, -1}, {0, 1, -1, 0},
        {0, 1, 0, -1}, {0, 0, 1, -1}, {1, -1, -1, -1},
    }};
    // full-range sweeps, then shrinking local windows: the narrow ridges of
    // the logistic block need the multiscale phase to close the last 1e-4
    for (double shrink : {1.0, 1.0, 0.1, 0.01, 0.01, 1e-3, 1e-3, 1e-4}) {
      for (int cycle = 0; cycle < 200; ++cycle) {
        const double before = cur;
        for (int i = 0; i < 10; ++i) {
          double lo, hi;
          range(i, lo, hi);
          const double w = (hi - lo) * shrink;
          const double a = std::max(lo, th[i] - w);
          const double b = std::min(hi, th[i] + w);
          line_search(i, a, b);
        }
        if (mech == 4)
          for (const auto& dir : kRidgeDirections) direction_search(dir, 28.0 * shrink);
        if (cur - before < 1e-13 * std::max(1.0, std::fabs(cur))) break;
      }
    }
    best = std::max(best, cur);
  }
  return best;
}

// Grouped-binomial logistic regression by damped Newton with a hand-rolled
// linear solve; start at zero.
struct LogisticOracleCell {
  std::vector<double> design;
  double successes, failures, offset;
};

inline std::vector<double> newton_logistic(const std::vector<LogisticOracleCell>& cells) {
  const std::size_t p = cells.front().design.size();
  std::vector<double> beta(p, 0.0);
  for (int it = 0; it < 400; ++it) {
    std::vector<double> g(p, 0.0);
    std::vector<double> h(p * p, 0.0);
    for (const auto& cell : cells) {
      double eta = cell.offset;
      for (std::size_t j = 0; j < p; ++j) eta += cell.design[j] * beta[j];
      const double mu = sigmoid(eta);
      const double w = cell.successes + cell.failures;
      for (std::size_t j = 0; j < p; ++j) {
        g[j] += cell.design[j] * (cell.successes - w * mu);
        for (std::size_t k = 0; k < p; ++k)
          h[j * p + k] += cell.design[j] * cell.design[k] * w * mu * (1.0 - mu);
      }
    }
    double gmax = 0.0;
    for (double v : g) gmax = std::max(gmax, std::fabs(v));
    if (gmax < 1e-12) break;
    // Gaussian elimination with partial pivoting on h * step = g
    std::vector<double> a = h;
    std::vector<double> b = g;
    std::vector<std::size_t> piv(p);
    for (std::size_t j = 0; j < p; ++j) piv[j] = j;
    for (std::size_t col = 0; col < p; ++col) {
      std::size_t pr = col;
      for (std::size_t r = col + 1; r < p; ++r)
        if (std::fabs(a[r * p + col]) > std::fabs(a[pr * p + col])) pr = r;
      if (std::fabs(a[pr * p + col]) < 1e-14) return beta;  // singular: give up
      if (pr != col) {
        for (std::size_t k = 0; k < p; ++k) std::swap(a[col * p + k], a[pr * p + k]);
        std::swap(b[col], b[pr]);
      }
      for (std::size_t r = col + 1; r < p; ++r) {
        const double f = a[r * p + col] / a[col * p + col];
        for (std::size_t k = col; k < p; ++k) a[r * p + k] -= f * a[col * p + k];
        b[r] -= f * b[col];
      }
    }
    std::vector<double> step(p, 0.0);
    for (std::size_t r = p; r-- > 0;) {
      double s = b[r];
      for (std::size_t k = r + 1; k < p; ++k) s -= a[r * p + k] * step[k];
      step[r] = s / a[r * p + r];
    }
    double smax = 0.0;
    for (double v : step) smax = std::max(smax, std::fabs(v));
    const double damp = smax > 4.0 ? 4.0 / smax : 1.0;
    for (std::size_t j = 0; j < p; ++j) beta[j] += damp * step[j];
  }
  return beta;
}

// Regularized incomplete beta by continued fraction, and its inverse by
// bisection.
inline double incbeta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  auto cf = [](double a_, double b_, double x_) {
    const double tiny = 1e-300;
    double c = 1.0, d = 1.0 - (a_ + b_) * x_ / (a_ + 1.0);
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 300; ++m) {
      const int m2 = 2 * m;
      double num = m * (b_ - m) * x_ / ((a_ + m2 - 1.0) * (a_ + m2));
      d = 1.0 + num * d;
      if (std::fabs(d) < tiny) d = tiny;
      c = 1.0 + num / c;
      if (std::fabs(c) < tiny) c = tiny;
      d = 1.0 / d;
      h *= d * c;
      num = -(a_ + m) * (a_ + b_ + m) * x_ / ((a_ + m2) * (a_ + m2 + 1.0));
      d = 1.0 + num * d;
      if (std::fabs(d) < tiny) d = tiny;
      c = 1.0 + num / c;
      if (std::fabs(c) < tiny) c = tiny;
      d = 1.0 / d;
      const double del = d * c;
      h *= del;
      if (std::fabs(del - 1.0) < 1e-15) break;
    }
    return h;
  };
  if (x < (a + 1.0) / (a + b + 2.0)) return std::exp(ln_front) * cf(a, b, x) / a;
  return 1.0 - std::exp(std::lgamma(a + b) - std::lgamma(b) - std::lgamma(a) +
                        b * std::log1p(-x) + a * std::log(x)) *
                   cf(b, a, 1.0 - x) / b;
}

inline double beta_quantile(double a, double b, double q) {
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (incbeta(a, b, mid) < q)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace oracle
