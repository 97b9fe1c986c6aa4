#pragma once

#include <optional>
#include <string>
#include <vector>

namespace subcausal {

// Index conventions used throughout: t in {0,1} (treatment), x in [0,J)
// (covariate, possibly missing), y in [0,K) (outcome), m in {0,1}
// (m = 1 means x was not recorded).

// Which variables the missingness indicator may depend on.
//   M1: (t, y)      M2: (t, x)      M3: (x, y)
//   M4: logistic in (t, x, y)
//   M5: unrestricted (no estimable parameters; bounds only)
//   Sens: logistic for P(M=0 | t, x, x*t) with a fixed outcome coefficient
enum class MechanismKind { M1, M2, M3, M4, M5, Sens };

std::string to_string(MechanismKind kind);

struct M4Coefficients {
  double b0 = 0.0, bt = 0.0, bx = 0.0, by = 0.0;  // logit P(M=1) = b0 + bt*t + bx*x + by*y
};

struct SensCoefficients {
  double b0 = 0.0, bt = 0.0, bx = 0.0, btx = 0.0;  // free
  double by = 0.0;                                  // fixed sensitivity parameter
  // logit P(M=0) = b0 + bt*t + bx*x + btx*t*x + by*y
};

// Coefficients of the fully saturated logit for P(M=1 | t, x, y); only used
// to parameterize unrestricted data-generating processes (binary x, y).
struct SaturatedLogit {
  double b0 = 0.0, bt = 0.0, bx = 0.0, by = 0.0;
  double btx = 0.0, bty = 0.0, bxy = 0.0, btxy = 0.0;
};

class MechanismSpec {
 public:
  // table indexed (t, y), row-major 2 x K
  static MechanismSpec m1(std::vector<double> p_m1_given_ty, int K = 2);
  // table indexed (t, x), row-major 2 x J
  static MechanismSpec m2(std::vector<double> p_m1_given_tx, int J = 2);
  // table indexed (x, y), row-major J x K
  static MechanismSpec m3(std::vector<double> p_m1_given_xy, int J = 2, int K = 2);
  static MechanismSpec m4(M4Coefficients beta);
  // estimation tag only; carries no parameters and cannot be composed
  static MechanismSpec m5();
  // unrestricted generator for simulations
  static MechanismSpec m5_logit(SaturatedLogit beta);
  static MechanismSpec sensitivity(SensCoefficients beta);

  MechanismKind kind() const { return kind_; }
  bool has_parameters() const;

  // P(M=1 | T=t, X=x, Y=y) under this mechanism. Throws for a bare M5 tag.
  double miss_prob(int t, int x, int y) const;

  // Entries of the conditional table for M1/M2/M3 (same layouts as the
  // factory arguments); throws for coefficient-based kinds.
  const std::vector<double>& table() const;
  std::vector<double>& table();

  const M4Coefficients& m4_coefficients() const;
  M4Coefficients& m4_coefficients();
  const SensCoefficients& sens_coefficients() const;
  SensCoefficients& sens_coefficients();
  const SaturatedLogit& saturated_logit() const;

  // Table entries in [0,1] with P(M=0|...) > 0 wherever required; throws
  // DataError on violation. `strict` additionally rejects entries at 0/1.
  void validate(bool strict = false) const;

 private:
  MechanismSpec() = default;
  MechanismKind kind_ = MechanismKind::M5;
  int J_ = 2, K_ = 2;
  std::vector<double> table_;
  M4Coefficients m4_{};
  SensCoefficients sens_{};
  std::optional<SaturatedLogit> sat_{};
};

// Observable counts: complete rows per (t, x, y) and covariate-missing
// margins per (t, y). Counts are nonnegative reals so that exact expected
// tables can be pushed through the estimators; CLI ingestion rejects
// non-integers.
struct ObservedTable {
  int J = 2, K = 2;
  std::vector<double> n_obs;  // 2*J*K, index (t*J + x)*K + y
  std::vector<double> n_mis;  // 2*K,   index t*K + y

  ObservedTable() : n_obs(8, 0.0), n_mis(4, 0.0) {}
  ObservedTable(int J_, int K_)
      : J(J_), K(K_), n_obs(2 * J_ * K_, 0.0), n_mis(2 * K_, 0.0) {}

  double& obs(int t, int x, int y) { return n_obs[(t * J + x) * K + y]; }
  double obs(int t, int x, int y) const { return n_obs[(t * J + x) * K + y]; }
  double& mis(int t, int y) { return n_mis[t * K + y]; }
  double mis(int t, int y) const { return n_mis[t * K + y]; }

  double total() const;
  double arm_total(int t) const;
  double total_missing() const;
  bool integer_counts(double tol = 1e-9) const;

  void validate() const;  // sizes agree, counts >= 0, total > 0
};

// Full cell probabilities over (T, X, Y, M).
struct JointDistribution {
  int J = 2, K = 2;
  std::vector<double> p;  // 2*J*K*2, index ((t*J + x)*K + y)*2 + m

  JointDistribution() : p(16, 0.0) {}
  JointDistribution(int J_, int K_) : J(J_), K(K_), p(4 * J_ * K_, 0.0) {}

  double& cell(int t, int x, int y, int m) { return p[((t * J + x) * K + y) * 2 + m]; }
  double cell(int t, int x, int y, int m) const { return p[((t * J + x) * K + y) * 2 + m]; }

  double p_txy(int t, int x, int y) const { return cell(t, x, y, 0) + cell(t, x, y, 1); }
  double p_tx(int t, int x) const;
  double p_t(int t) const;
  double p_x(int x) const;
  // marginal P(T=t, Y=y, M=1) — the observable missing-row margin
  double p_mis_margin(int t, int y) const;

  double p_y_given_tx(int y, int t, int x) const;       // conditioning event must be positive
  double p_m1_given_txy(int t, int x, int y) const;
  double p_x_given_t_m(int x, int t, int m) const;      // P(X=x | T=t, M=m)

  double sum() const;
  // nonnegative cells summing to 1 within tol; DataError otherwise
  void validate(double tol = 1e-12) const;

  // expected counts at sample size n: observable margins * n
  ObservedTable expected_counts(double n) const;
};

// Probability factorization P(X) P(T|X) P(Y|T,X) P(M|...).
struct FactoredParams {
  int J = 2, K = 2;
  std::vector<double> pi_x;           // J
  std::vector<double> p_t1_given_x;   // J, P(T=1 | X=x)
  std::vector<double> p_y_given_tx;   // 2*J*K, index (t*J + x)*K + y
  MechanismSpec missingness = MechanismSpec::m5();
  bool randomized = false;            // forces P(T|X) constant in x

  double p_y(int y, int t, int x) const { return p_y_given_tx[(t * J + x) * K + y]; }
  double& p_y(int y, int t, int x) { return p_y_given_tx[(t * J + x) * K + y]; }

  void validate() const;
};

// Product of the four factors; sums to one by construction.
JointDistribution compose_joint(const FactoredParams& params);

// sum_{t,x,y} n_obs log p_txy0 + sum_{t,y} n_mis log p_{t+y1}, with
// 0 * log(.) = 0; -inf when a positive count sits on zero probability.
double observed_loglik(const ObservedTable& table, const JointDistribution& joint);

// Multinomial loglik of the observable cells at their empirical proportions;
// the maximum of observed_loglik over all joints with free margins.
double saturated_loglik(const ObservedTable& table);

// Within-arm proportions of the observable cells.
struct EmpiricalConditionals {
  int J = 2, K = 2;
  std::vector<double> p_obs_given_t;  // 2*J*K: p_{xy0|t}
  std::vector<double> p_mis_given_t;  // 2*K:   p_{+y1|t}
  std::vector<double> p_t;            // 2

  double obs(int x, int y, int t) const { return p_obs_given_t[(t * J + x) * K + y]; }
  double mis(int y, int t) const { return p_mis_given_t[t * K + y]; }
};

EmpiricalConditionals empirical_conditionals(const ObservedTable& table);

struct LogOddsRatio {
  double estimate = 0.0;  // +-inf on a zero margin
  double se = 0.0;
  bool finite = true;
};

// Log odds ratio of Y on T pooled over X and M (K = 2), with the usual
// sqrt(sum of reciprocal counts) standard error.
LogOddsRatio population_log_or(const ObservedTable& table);

}  // namespace subcausal
