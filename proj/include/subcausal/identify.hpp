#pragma once

#include <string>
#include <vector>

#include "subcausal/measures.hpp"
#include "subcausal/table.hpp"

namespace subcausal {

// Point verdict on an identification condition, with the raw statistic
// (determinant or singular-value ratio; the quadratic coefficient product
// for the logistic mechanism) and a chi-square independence p-value so
// sampling noise can be judged alongside.
struct ConditionReport {
  std::string condition;
  bool satisfied = false;
  double statistic = 0.0;
  double test_p_value = 1.0;
  double tolerance = 0.0;
  std::vector<double> odds_ratios;  // logistic check only: {OR_M1, OR_X0, OR_X1}
};

// X and Y dependent given (T=t, M=0): determinant of the complete-case
// conditional table for J=2, numerical rank via singular values otherwise.
ConditionReport check_m2_rank(const ObservedTable& table, int t, double tol = 1e-8);

// X and T dependent given (Y=y, M=0); same machinery with T in the column role.
ConditionReport check_m3_condition(const ObservedTable& table, int y, double tol = 1e-8);

// The complete-case/missing-row odds-ratio sandwich: satisfied when the
// product of the quadratic's leading and trailing coefficients is <= 0,
// i.e. exactly one positive root exists. One-sided, unlike the rank checks.
ConditionReport check_m4_condition(const ObservedTable& table, double tol = 1e-12);

// Missingness depending on (T, Y) only: direct plug-in inversion.
JointDistribution identify_m1(const ObservedTable& table);

// Missingness depending on (T, X): per-arm linear system in the missingness
// odds xi_tx. Throws ModelError("rank_deficient") or ModelError("negative_odds").
JointDistribution identify_m2(const ObservedTable& table);

// log COR_x from complete-case cells only (K = 2); +-inf on zero cells.
std::vector<double> identify_m3_cor(const ObservedTable& table);

// Missingness depending on (X, Y): per-outcome linear system in kappa_xy (J = 2).
JointDistribution identify_m3_joint(const ObservedTable& table);

struct M3RandomizedEffects {
  std::vector<double> p_y1_t1_x;  // P(Y=1 | T=1, X=x)
  std::vector<double> p_y1_t0_x;  // P(Y=1 | T=0, X=x)
  std::vector<bool> degenerate;   // system determinant vanished -> CE_x = 0 forced
  CausalEstimate estimate;
};

// Outcome probabilities per stratum under T independent of X; a vanishing
// determinant forces Y independent of T given X, so CE_x = 0.
M3RandomizedEffects identify_m3_ce_randomized(const ObservedTable& table,
                                              Measure measure = Measure::LogCor);

struct M4Identified {
  JointDistribution joint;
  M4Coefficients beta;
  double e = 0.0, f = 0.0, g = 0.0;  // quadratic coefficients in B = exp(bx)
};

// Logistic missingness: solve E B^2 + F B + G = 0 for the unique positive
// root and back out the coefficients. J = K = 2.
M4Identified identify_m4(const ObservedTable& table);

struct BoundsResult {
  Measure measure = Measure::LogCor;
  std::vector<double> lower;  // per x, may be +-inf
  std::vector<double> upper;
};

// Assumption-free plug-in bounds on CE_x (K = 2).
BoundsResult bounds_m5(const ObservedTable& table, Measure measure);

struct MxIdentified {
  JointDistribution joint;
  std::vector<double> gamma;  // P(M=1|X=x)/P(M=0|X=x)
  double residual_norm = 0.0; // stacked least-squares residual
};

// Missingness depending on X alone: stacked overdetermined system across
// both arms solved by least squares (J = 2).
MxIdentified identify_mx(const ObservedTable& table);

}  // namespace subcausal
