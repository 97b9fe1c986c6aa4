#pragma once

#include <string>
#include <vector>

#include "subcausal/table.hpp"

namespace subcausal {

// The contrast D[p1, p0] applied to the two arm-specific outcome
// probabilities. All three are strictly increasing in p1, strictly
// decreasing in p0, and share the sign of p1 - p0.
enum class Measure { Crd, LogCrr, LogCor };

std::string to_string(Measure m);
Measure measure_from_string(const std::string& name);

// CRD = p1 - p0; LOG_CRR = log(p1/p0); LOG_COR = log[p1(1-p0)/(p0(1-p1))].
// Boundary probabilities give +-inf by the formula; no special casing.
double eval_measure(Measure measure, double p1, double p0);

enum class TotalEffectAssumption { LatentIgnorable, CompleteRandomization };

struct CausalEstimate {
  Measure measure = Measure::LogCor;
  std::vector<double> ce_x;   // per covariate stratum, may be +-inf
  double ce_total = 0.0;
  std::string provenance;     // which mechanism/estimator produced it
};

// Subgroup effects from P(Y=1|T=t,X=x); the total effect uses P(Y=1|T=t)
// under complete randomization and the X-standardized mixture otherwise.
// Requires K = 2 and P(T=t, X=x) > 0 for all (t, x).
CausalEstimate effects_from_joint(const JointDistribution& joint, Measure measure,
                                  TotalEffectAssumption assume);

}  // namespace subcausal
