#include "subcausal/measures.hpp"

#include <cmath>

#include "subcausal/errors.hpp"

namespace subcausal {

std::string to_string(Measure m) {
  switch (m) {
    case Measure::Crd: return "crd";
    case Measure::LogCrr: return "log_crr";
    case Measure::LogCor: return "log_cor";
  }
  return "?";
}

Measure measure_from_string(const std::string& name) {
  if (name == "crd") return Measure::Crd;
  if (name == "crr" || name == "log_crr") return Measure::LogCrr;
  if (name == "cor" || name == "log_cor") return Measure::LogCor;
  throw DataError("unknown measure: " + name);
}

double eval_measure(Measure measure, double p1, double p0) {
  switch (measure) {
    case Measure::Crd: return p1 - p0;
    case Measure::LogCrr: return std::log(p1 / p0);
    case Measure::LogCor: return std::log(p1 * (1.0 - p0)) - std::log(p0 * (1.0 - p1));
  }
  throw DataError("unknown measure");
}

CausalEstimate effects_from_joint(const JointDistribution& joint, Measure measure,
                                  TotalEffectAssumption assume) {
  if (joint.K != 2) throw DataError("causal measures need a binary outcome");
  CausalEstimate est;
  est.measure = measure;
  est.ce_x.resize(joint.J);
  std::vector<double> risk(2 * joint.J);  // P(Y=1 | T=t, X=x)
  for (int t = 0; t < 2; ++t)
    for (int x = 0; x < joint.J; ++x) risk[t * joint.J + x] = joint.p_y_given_tx(1, t, x);
  for (int x = 0; x < joint.J; ++x)
    est.ce_x[x] = eval_measure(measure, risk[joint.J + x], risk[x]);

  double p1 = 0.0, p0 = 0.0;
  if (assume == TotalEffectAssumption::CompleteRandomization) {
    double n1 = 0.0, n0 = 0.0;
    for (int x = 0; x < joint.J; ++x) {
      n1 += joint.p_txy(1, x, 1);
      n0 += joint.p_txy(0, x, 1);
    }
    const double d1 = joint.p_t(1), d0 = joint.p_t(0);
    if (d1 <= 0.0 || d0 <= 0.0) throw DataError("a treatment arm has zero probability");
    p1 = n1 / d1;
    p0 = n0 / d0;
  } else {
    for (int x = 0; x < joint.J; ++x) {
      const double px = joint.p_x(x);
      p1 += risk[joint.J + x] * px;
      p0 += risk[x] * px;
    }
  }
  est.ce_total = eval_measure(measure, p1, p0);
  return est;
}

}  // namespace subcausal
