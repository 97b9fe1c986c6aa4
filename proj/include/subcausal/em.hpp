#pragma once

#include <optional>
#include <string>
#include <vector>

#include "subcausal/measures.hpp"
#include "subcausal/table.hpp"

namespace subcausal {

struct EmOptions {
  int max_iter = 5000;
  double loglik_tolerance = 1e-10;  // absolute change between sweeps
  enum class Start { Empirical, Uniform, Explicit };
  Start start = Start::Empirical;
  std::optional<FactoredParams> explicit_start;
  bool randomized = false;  // constrain P(T|X) = P(T)
};

struct EmFit {
  JointDistribution joint;
  FactoredParams params;
  double loglik = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> loglik_trace;  // nondecreasing up to 1e-9 slack
};

// Maximum likelihood for mechanisms M1-M4 by expectation-maximization:
// missing-row counts are distributed over x with the current conditional
// P(X | T, Y, M=1), then every factor is refit in closed form (weighted
// logistic regression for M4). M3/M4 need J = K = 2.
EmFit em_fit(const ObservedTable& table, MechanismKind mechanism, const EmOptions& options = {});

// Same machinery with the missingness factor logit P(M=0) = b0 + bt t +
// bx x + btx tx + by y, the outcome coefficient by held fixed.
EmFit em_fit_sensitivity(const ObservedTable& table, double beta_y,
                         const EmOptions& options = {});

// One grouped-binomial cell of a logistic regression.
struct LogisticCell {
  std::vector<double> design;
  double successes = 0.0;
  double failures = 0.0;
  double offset = 0.0;
};

struct LogisticFit {
  std::vector<double> beta;
  bool separated = false;  // coefficients capped at |30|
  bool converged = false;
  int iterations = 0;
};

// Weighted grouped logistic regression by iteratively reweighted least
// squares; converged when the score norm drops below 1e-10 (scaled by the
// total weight). Separation is capped, never fatal.
LogisticFit irls_logistic(const std::vector<LogisticCell>& cells,
                          std::vector<double> start = {}, int max_iter = 200);

struct GofResult {
  double loglik = 0.0;
  double lr_statistic = 0.0;
  int df = 1;
  double p_value = 1.0;
  bool boundary = false;  // a fitted support cell sat at probability ~0
  bool converged = true;
};

// Likelihood ratio of the 10-parameter mechanism model (under T independent
// of X) against the saturated observable law; chi-square with one degree of
// freedom. J = K = 2.
GofResult lrt_gof(const ObservedTable& table, MechanismKind mechanism,
                  const EmOptions& options = {});

// The four inequality constraints the original investigators considered
// plausible, evaluated at a fitted joint (J = K = 2):
//   P(X=0|T=t,M=1) >= P(X=0|T=t,M=0) for both t
//   P(Y=1|T=0,X=1) >= P(Y=1|T=0,X=0)
//   0.05 <= P(Y=1|T=0,X=x) <= 0.50 for both x
//   P(Y=1|T=1,X=1) <= P(Y=1|T=0,X=1)
struct ExpertAssessment {
  bool missing_skews_x0 = false;
  bool baseline_risk_monotone = false;
  bool baseline_risk_in_range = false;
  bool treated_risk_not_higher = false;
};

ExpertAssessment check_expert_assumptions(const JointDistribution& joint);

struct MechanismChoice {
  MechanismKind chosen = MechanismKind::M1;
  std::vector<MechanismKind> candidates;
  std::vector<double> logliks;        // NaN where the fit failed
  std::vector<bool> converged;
};

// Fit every candidate and keep the largest log likelihood; ties go to the
// lowest mechanism index.
MechanismChoice select_mechanism(const ObservedTable& table,
                                 const std::vector<MechanismKind>& candidates,
                                 const EmOptions& options = {});

struct SensitivityPoint {
  double beta_y = 0.0;
  double log_cor_0 = 0.0;
  double log_cor_1 = 0.0;
  double loglik = 0.0;
  bool feasible = false;   // all four expert constraints hold at the fit
  bool converged = false;
};

struct SensitivityCurve {
  std::vector<SensitivityPoint> points;
};

// Profile the fixed outcome coefficient over a grid; per-point failures are
// recorded and the curve is still returned.
SensitivityCurve profile_sensitivity(const ObservedTable& table,
                                     const std::vector<double>& beta_y_grid,
                                     const EmOptions& options = {});

}  // namespace subcausal
