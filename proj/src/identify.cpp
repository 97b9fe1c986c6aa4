#include "subcausal/identify.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <limits>

#include "subcausal/errors.hpp"
#include "subcausal/stats.hpp"

namespace subcausal {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Empirical P(T=t) straight from arm totals.
std::vector<double> arm_shares(const ObservedTable& table) {
  const double n = table.total();
  return {table.arm_total(0) / n, table.arm_total(1) / n};
}

JointDistribution assemble_joint(const ObservedTable& table,
                                 const std::vector<double>& p_xy_given_t,
                                 const std::vector<double>& miss_prob_txy) {
  const int J = table.J, K = table.K;
  const auto pt = arm_shares(table);
  JointDistribution joint(J, K);
  for (int t = 0; t < 2; ++t)
    for (int x = 0; x < J; ++x)
      for (int y = 0; y < K; ++y) {
        const double base = pt[t] * p_xy_given_t[(t * J + x) * K + y];
        const double lam = miss_prob_txy[(t * J + x) * K + y];
        joint.cell(t, x, y, 1) = base * lam;
        joint.cell(t, x, y, 0) = base * (1.0 - lam);
      }
  joint.validate(1e-9);
  return joint;
}

// Rank-style dependence check on a 2-way count table: statistic is the
// determinant of the normalized 2x2 table, or the smallest/largest singular
// value ratio when either dimension exceeds 2.
ConditionReport rank_report(const std::vector<double>& counts, int rows, int cols,
                            std::string condition, double tol) {
  ConditionReport report;
  report.condition = std::move(condition);
  report.tolerance = tol;
  double total = 0.0;
  for (double v : counts) total += v;
  if (total <= 0.0) throw DataError("empty stratum in condition check: " + report.condition);
  if (rows == 2 && cols == 2) {
    const double a = counts[0] / total, b = counts[1] / total;
    const double c = counts[2] / total, d = counts[3] / total;
    report.statistic = a * d - b * c;
    report.satisfied = std::fabs(report.statistic) > tol;
  } else {
    Eigen::MatrixXd m(rows, cols);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) m(r, c) = counts[r * cols + c] / total;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& sv = svd.singularValues();
    const int want = std::min(rows, cols);
    report.statistic = sv(0) > 0.0 ? sv(want - 1) / sv(0) : 0.0;
    report.satisfied = report.statistic > tol;
  }
  report.test_p_value = chi_square_independence_p(counts, rows, cols);
  return report;
}

}  // namespace

ConditionReport check_m2_rank(const ObservedTable& table, int t, double tol) {
  table.validate();
  // complete-case (x, y) table within arm t; the determinant computed on the
  // within-arm conditionals equals the one on P(X,Y | T=t, M=0) up to a
  // positive factor, so both readings of the condition coincide
  std::vector<double> counts(table.J * table.K);
  for (int x = 0; x < table.J; ++x)
    for (int y = 0; y < table.K; ++y) counts[x * table.K + y] = table.obs(t, x, y);
  return rank_report(counts, table.J, table.K,
                     "X dependent on Y given (T=" + std::to_string(t) + ", M=0)", tol);
}

ConditionReport check_m3_condition(const ObservedTable& table, int y, double tol) {
  table.validate();
  std::vector<double> counts(table.J * 2);
  for (int x = 0; x < table.J; ++x)
    for (int t = 0; t < 2; ++t) counts[x * 2 + t] = table.obs(t, x, y);
  return rank_report(counts, table.J, 2,
                     "X dependent on T given (Y=" + std::to_string(y) + ", M=0)", tol);
}

namespace {

struct M4Coeffs {
  double e, f, g;
};

// Quadratic coefficients from the within-arm observable proportions.
M4Coeffs m4_quadratic(const EmpiricalConditionals& emp) {
  auto po = [&](int x, int y, int t) { return emp.obs(x, y, t); };
  auto pm = [&](int y, int t) { return emp.mis(y, t); };
  const double d1 = pm(1, 0) * pm(0, 1);  // p_{+11|0} p_{+01|1}
  const double d2 = pm(0, 0) * pm(1, 1);  // p_{+01|0} p_{+11|1}
  if (d1 <= 0.0 || d2 <= 0.0)
    throw ModelError("empty_margin", "a missing-row margin required by the quadratic is zero");
  M4Coeffs c{};
  c.e = po(1, 1, 0) * po(1, 0, 1) / d1 - po(1, 0, 0) * po(1, 1, 1) / d2;
  c.f = (po(1, 1, 0) * po(0, 0, 1) + po(0, 1, 0) * po(1, 0, 1)) / d1 -
        (po(1, 0, 0) * po(0, 1, 1) + po(0, 0, 0) * po(1, 1, 1)) / d2;
  c.g = po(0, 1, 0) * po(0, 0, 1) / d1 - po(0, 0, 0) * po(0, 1, 1) / d2;
  return c;
}

double odds_ratio(double n11, double n00, double n10, double n01) {
  if (n10 * n01 == 0.0) return (n11 * n00 == 0.0) ? std::nan("") : kInf;
  return n11 * n00 / (n10 * n01);
}

}  // namespace

ConditionReport check_m4_condition(const ObservedTable& table, double tol) {
  table.validate();
  if (table.J != 2 || table.K != 2)
    throw DataError("the logistic-mechanism condition needs binary X and Y");
  const auto emp = empirical_conditionals(table);
  const auto c = m4_quadratic(emp);
  ConditionReport report;
  report.condition = "odds ratio of (Y,T) among missing rows between the per-stratum complete-case odds ratios";
  report.statistic = c.e * c.g;
  report.tolerance = tol;
  report.satisfied = report.statistic <= tol;
  report.test_p_value = std::nan("");
  // OR_{YT|M=1}, OR_{YT|X=0,M=0}, OR_{YT|X=1,M=0}
  report.odds_ratios = {
      odds_ratio(table.mis(1, 1), table.mis(0, 0), table.mis(1, 0), table.mis(0, 1)),
      odds_ratio(table.obs(1, 0, 1), table.obs(0, 0, 0), table.obs(1, 0, 0), table.obs(0, 0, 1)),
      odds_ratio(table.obs(1, 1, 1), table.obs(0, 1, 0), table.obs(1, 1, 0), table.obs(0, 1, 1))};
  return report;
}

JointDistribution identify_m1(const ObservedTable& table) {
  table.validate();
  const int J = table.J, K = table.K;
  const auto emp = empirical_conditionals(table);
  std::vector<double> p_xy_given_t(2 * J * K, 0.0);
  std::vector<double> lam(2 * J * K, 0.0);
  for (int t = 0; t < 2; ++t)
    for (int y = 0; y < K; ++y) {
      double obs_y = 0.0;
      for (int x = 0; x < J; ++x) obs_y += emp.obs(x, y, t);
      const double mis_y = emp.mis(y, t);
      const double mass = obs_y + mis_y;
      if (mass <= 0.0) continue;  // stratum empty; carries no probability
      if (obs_y <= 0.0)
        throw ModelError("fully_missing_stratum",
                         "stratum (t=" + std::to_string(t) + ", y=" + std::to_string(y) +
                             ") has only missing rows; P(M=0|T,Y) is not estimable");
      const double p_m0 = obs_y / mass;
      for (int x = 0; x < J; ++x) {
        p_xy_given_t[(t * J + x) * K + y] = emp.obs(x, y, t) / p_m0;
        lam[(t * J + x) * K + y] = 1.0 - p_m0;
      }
    }
  return assemble_joint(table, p_xy_given_t, lam);
}

JointDistribution identify_m2(const ObservedTable& table) {
  table.validate();
  const int J = table.J, K = table.K;
  if (J > K) throw DataError("identification under the (T,X) mechanism needs J <= K");
  const auto emp = empirical_conditionals(table);
  std::vector<double> p_xy_given_t(2 * J * K, 0.0);
  std::vector<double> lam(2 * J * K, 0.0);
  for (int t = 0; t < 2; ++t) {
    const auto rank = check_m2_rank(table, t);
    if (!rank.satisfied)
      throw ModelError("rank_deficient",
                       "complete-case (X,Y) table is rank deficient in arm t=" + std::to_string(t));
    Eigen::MatrixXd theta(K, J);
    Eigen::VectorXd rhs(K);
    for (int y = 0; y < K; ++y) {
      for (int x = 0; x < J; ++x) theta(y, x) = emp.obs(x, y, t);
      rhs(y) = emp.mis(y, t);
    }
    Eigen::VectorXd xi = theta.colPivHouseholderQr().solve(rhs);
    for (int x = 0; x < J; ++x) {
      double v = xi(x);
      if (v < -1e-10)
        throw ModelError("negative_odds",
                         "solved missingness odds is negative; the data are incompatible with a "
                         "(T,X)-driven mechanism");
      v = std::max(v, 0.0);
      const double p_m0 = 1.0 / (1.0 + v);
      for (int y = 0; y < K; ++y) {
        p_xy_given_t[(t * J + x) * K + y] = emp.obs(x, y, t) / p_m0;
        lam[(t * J + x) * K + y] = 1.0 - p_m0;
      }
    }
    // consistent systems reproduce the margins exactly; a J < K least-squares
    // solve may not, so renormalize the within-arm law
    double s = 0.0;
    for (int x = 0; x < J; ++x)
      for (int y = 0; y < K; ++y) s += p_xy_given_t[(t * J + x) * K + y];
    if (s <= 0.0) throw ModelError("degenerate_arm", "arm has no probability mass");
    for (int x = 0; x < J; ++x)
      for (int y = 0; y < K; ++y) p_xy_given_t[(t * J + x) * K + y] /= s;
  }
  return assemble_joint(table, p_xy_given_t, lam);
}

std::vector<double> identify_m3_cor(const ObservedTable& table) {
  table.validate();
  if (table.K != 2) throw DataError("log COR identification needs a binary outcome");
  const auto emp = empirical_conditionals(table);
  std::vector<double> log_cor(table.J);
  for (int x = 0; x < table.J; ++x) {
    const double num = emp.obs(x, 1, 1) * emp.obs(x, 0, 0);
    const double den = emp.obs(x, 1, 0) * emp.obs(x, 0, 1);
    if (den <= 0.0)
      log_cor[x] = num > 0.0 ? kInf : std::nan("");
    else if (num <= 0.0)
      log_cor[x] = -kInf;
    else
      log_cor[x] = std::log(num / den);
  }
  return log_cor;
}

JointDistribution identify_m3_joint(const ObservedTable& table) {
  table.validate();
  const int J = table.J, K = table.K;
  if (J != 2) throw DataError("identification under the (X,Y) mechanism needs binary X");
  const auto emp = empirical_conditionals(table);
  std::vector<double> kappa(J * K, 0.0);
  for (int y = 0; y < K; ++y) {
    const auto cond = check_m3_condition(table, y);
    if (!cond.satisfied)
      throw ModelError("rank_deficient",
                       "X and T look independent in stratum y=" + std::to_string(y) +
                           "; the per-outcome system is singular");
    // [ p_{0y0|1} p_{1y0|1} ; p_{0y0|0} p_{1y0|0} ] kappa_y = [ p_{+y1|1} ; p_{+y1|0} ]
    const double a = emp.obs(0, y, 1), b = emp.obs(1, y, 1);
    const double c = emp.obs(0, y, 0), d = emp.obs(1, y, 0);
    const double det = a * d - b * c;
    const double r1 = emp.mis(y, 1), r0 = emp.mis(y, 0);
    double k0 = (r1 * d - b * r0) / det;
    double k1 = (a * r0 - r1 * c) / det;
    for (double* k : {&k0, &k1}) {
      if (*k < -1e-10)
        throw ModelError("negative_odds",
                         "solved missingness odds is negative; the data are incompatible with an "
                         "(X,Y)-driven mechanism");
      *k = std::max(*k, 0.0);
    }
    kappa[0 * K + y] = k0;
    kappa[1 * K + y] = k1;
  }
  std::vector<double> p_xy_given_t(2 * J * K, 0.0);
  std::vector<double> lam(2 * J * K, 0.0);
  for (int t = 0; t < 2; ++t)
    for (int x = 0; x < J; ++x)
      for (int y = 0; y < K; ++y) {
        const double p_m0 = 1.0 / (1.0 + kappa[x * K + y]);
        p_xy_given_t[(t * J + x) * K + y] = emp.obs(x, y, t) / p_m0;
        lam[(t * J + x) * K + y] = 1.0 - p_m0;
      }
  return assemble_joint(table, p_xy_given_t, lam);
}

M3RandomizedEffects identify_m3_ce_randomized(const ObservedTable& table, Measure measure) {
  table.validate();
  if (table.K != 2) throw DataError("effect identification needs a binary outcome");
  const auto emp = empirical_conditionals(table);
  M3RandomizedEffects out;
  out.p_y1_t1_x.resize(table.J);
  out.p_y1_t0_x.resize(table.J);
  out.degenerate.resize(table.J, false);
  out.estimate.measure = measure;
  out.estimate.ce_x.resize(table.J);
  out.estimate.provenance = "closed-form (X,Y)-mechanism solver under T independent of X";
  for (int x = 0; x < table.J; ++x) {
    // [ p_{x10|0} p_{x10|1} ; p_{x00|0} p_{x00|1} ] (q1, -q0)' = (0, p_{x00|0} - p_{x00|1})'
    const double a = emp.obs(x, 1, 0), b = emp.obs(x, 1, 1);
    const double c = emp.obs(x, 0, 0), d = emp.obs(x, 0, 1);
    const double det = a * d - b * c;
    const double scale = std::max({a, b, c, d, 1e-300});
    if (std::fabs(det) <= 1e-12 * scale * scale) {
      // Y independent of T given X in this stratum
      out.degenerate[x] = true;
      const double tot = a + b + c + d;
      const double q = tot > 0.0 ? (a + b) / std::max(a + b + c + d, 1e-300) : 0.5;
      out.p_y1_t1_x[x] = out.p_y1_t0_x[x] = q;
      out.estimate.ce_x[x] = 0.0;
    } else {
      const double rhs = c - d;
      const double q1 = (-b * rhs) / det;  // Cramer on the 2x2 system
      const double q0 = -(a * rhs) / det;
      out.p_y1_t1_x[x] = q1;
      out.p_y1_t0_x[x] = q0;
      out.estimate.ce_x[x] = eval_measure(measure, q1, q0);
    }
  }
  // standardize with the covariate law from the joint reconstruction when it
  // exists; fall back to complete-case shares otherwise
  std::vector<double> pi_x(table.J, 0.0);
  double tot = 0.0;
  for (int x = 0; x < table.J; ++x) {
    for (int t = 0; t < 2; ++t)
      for (int y = 0; y < 2; ++y) pi_x[x] += table.obs(t, x, y);
    tot += pi_x[x];
  }
  double p1 = 0.0, p0 = 0.0;
  for (int x = 0; x < table.J; ++x) {
    const double w = tot > 0.0 ? pi_x[x] / tot : 1.0 / table.J;
    p1 += w * out.p_y1_t1_x[x];
    p0 += w * out.p_y1_t0_x[x];
  }
  out.estimate.ce_total = eval_measure(measure, p1, p0);
  return out;
}

M4Identified identify_m4(const ObservedTable& table) {
  table.validate();
  if (table.J != 2 || table.K != 2)
    throw DataError("logistic-mechanism identification needs binary X and Y");
  const auto emp = empirical_conditionals(table);
  const auto c = m4_quadratic(emp);
  M4Identified out;
  out.e = c.e;
  out.f = c.f;
  out.g = c.g;

  double root = 0.0;
  const double scale = std::max(std::fabs(c.f), std::fabs(c.g));
  if (std::fabs(c.e) < 1e-12 * std::max(scale, 1.0)) {
    if (c.f == 0.0) throw ModelError("degenerate_quadratic", "both leading coefficients vanish");
    root = -c.g / c.f;
    if (root <= 0.0) throw ModelError("no_positive_root", "the linear equation has no positive root");
  } else {
    const double disc = c.f * c.f - 4.0 * c.e * c.g;
    if (disc < 0.0)
      throw ModelError("negative_discriminant", "the quadratic has no real root");
    // stable form: q = -(F + sign(F) sqrt(disc))/2, roots q/E and G/q
    const double sf = c.f >= 0.0 ? 1.0 : -1.0;
    const double q = -0.5 * (c.f + sf * std::sqrt(disc));
    double r1, r2;
    if (q != 0.0) {
      r1 = q / c.e;
      r2 = c.g / q;
    } else {
      r1 = 0.0;
      r2 = -c.f / c.e;
    }
    const bool p1 = r1 > 0.0, p2 = r2 > 0.0;
    if (p1 && p2 && std::fabs(r1 - r2) > 1e-12 * std::max(r1, r2))
      throw ModelError("two_positive_roots",
                       "both roots positive; the odds-ratio sandwich condition fails");
    if (!p1 && !p2) throw ModelError("no_positive_root", "the quadratic has no positive root");
    root = p1 ? r1 : r2;
  }

  auto po = [&](int x, int y, int t) { return emp.obs(x, y, t); };
  auto pm = [&](int y, int t) { return emp.mis(y, t); };
  const double a_den = po(0, 0, 0) + po(1, 0, 0) * root;
  const double c_den = po(0, 0, 1) + po(1, 0, 1) * root;
  const double d_den = po(0, 1, 0) + po(1, 1, 0) * root;
  if (a_den <= 0.0 || c_den <= 0.0 || d_den <= 0.0)
    throw ModelError("degenerate_cells", "back-substitution hit an empty cell combination");
  const double A = pm(0, 0) / a_den;
  const double C = pm(0, 1) / c_den;
  const double D = pm(1, 0) / d_den;
  if (A <= 0.0 || C <= 0.0 || D <= 0.0)
    throw ModelError("degenerate_cells", "a missingness factor came out nonpositive");
  out.beta.b0 = std::log(A);
  out.beta.bt = std::log(C) - std::log(A);
  out.beta.bx = std::log(root);
  out.beta.by = std::log(D) - std::log(A);

  std::vector<double> p_xy_given_t(8, 0.0);
  std::vector<double> lam(8, 0.0);
  for (int t = 0; t < 2; ++t)
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y) {
        const double eta =
            out.beta.b0 + out.beta.bt * t + out.beta.bx * x + out.beta.by * y;
        p_xy_given_t[(t * 2 + x) * 2 + y] = po(x, y, t) * (1.0 + std::exp(eta));
        lam[(t * 2 + x) * 2 + y] = expit(eta);
      }
  out.joint = assemble_joint(table, p_xy_given_t, lam);
  return out;
}

BoundsResult bounds_m5(const ObservedTable& table, Measure measure) {
  table.validate();
  if (table.K != 2) throw DataError("bounds need a binary outcome");
  const double n = table.total();
  auto po = [&](int t, int x, int y) { return table.obs(t, x, y) / n; };
  auto pm = [&](int t, int y) { return table.mis(t, y) / n; };
  BoundsResult out;
  out.measure = measure;
  out.lower.resize(table.J);
  out.upper.resize(table.J);
  for (int x = 0; x < table.J; ++x) {
    const double lo1 = po(1, x, 1) / (po(1, x, 0) + po(1, x, 1) + pm(1, 0));
    const double hi1 = (po(1, x, 1) + pm(1, 1)) / (po(1, x, 0) + po(1, x, 1) + pm(1, 1));
    const double lo0 = po(0, x, 1) / (po(0, x, 0) + po(0, x, 1) + pm(0, 0));
    const double hi0 = (po(0, x, 1) + pm(0, 1)) / (po(0, x, 0) + po(0, x, 1) + pm(0, 1));
    out.lower[x] = eval_measure(measure, lo1, hi0);
    out.upper[x] = eval_measure(measure, hi1, lo0);
  }
  return out;
}

MxIdentified identify_mx(const ObservedTable& table) {
  table.validate();
  const int J = table.J, K = table.K;
  if (J != 2) throw DataError("the X-only mechanism solver needs binary X");
  const auto emp = empirical_conditionals(table);
  // stack the per-arm systems: rows (t, y), unknowns gamma_x
  Eigen::MatrixXd design(2 * K, J);
  Eigen::VectorXd rhs(2 * K);
  int r = 0;
  for (int t = 0; t < 2; ++t)
    for (int y = 0; y < K; ++y, ++r) {
      for (int x = 0; x < J; ++x) design(r, x) = emp.obs(x, y, t);
      rhs(r) = emp.mis(y, t);
    }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv(0) <= 0.0 || sv(J - 1) / sv(0) < 1e-8)
    throw ModelError("rank_deficient",
                     "X looks independent of (T,Y) among complete cases; the stacked system is "
                     "rank deficient");
  Eigen::VectorXd gamma = svd.solve(rhs);
  MxIdentified out;
  out.residual_norm = (design * gamma - rhs).norm();
  out.gamma.resize(J);
  for (int x = 0; x < J; ++x) {
    double v = gamma(x);
    if (v < -1e-10)
      throw ModelError("negative_odds", "solved missingness odds is negative under the X-only mechanism");
    out.gamma[x] = std::max(v, 0.0);
  }
  std::vector<double> p_xy_given_t(2 * J * K, 0.0);
  std::vector<double> lam(2 * J * K, 0.0);
  for (int t = 0; t < 2; ++t) {
    double s = 0.0;
    for (int x = 0; x < J; ++x)
      for (int y = 0; y < K; ++y) {
        const double v = emp.obs(x, y, t) * (1.0 + out.gamma[x]);
        p_xy_given_t[(t * J + x) * K + y] = v;
        lam[(t * J + x) * K + y] = out.gamma[x] / (1.0 + out.gamma[x]);
        s += v;
      }
    // least squares may leave the within-arm law slightly off one
    if (s <= 0.0) throw ModelError("degenerate_arm", "arm has no probability mass");
    for (int x = 0; x < J; ++x)
      for (int y = 0; y < K; ++y) p_xy_given_t[(t * J + x) * K + y] /= s;
  }
  out.joint = assemble_joint(table, p_xy_given_t, lam);
  return out;
}

}  // namespace subcausal
