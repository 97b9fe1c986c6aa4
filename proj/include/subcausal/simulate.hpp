#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "subcausal/em.hpp"
#include "subcausal/gibbs.hpp"
#include "subcausal/table.hpp"

namespace subcausal {

// Binary-everything data generating process: T ~ Bernoulli(p_treat) and
// X ~ Bernoulli(p_x1) independently, Y | T, X ~ Bernoulli(p_y1_tx), then M
// from the missingness spec.
struct DgpSpec {
  double p_treat = 0.5;
  double p_x1 = 0.5;
  std::vector<double> p_y1_tx = {0.2, 0.5, 0.8, 0.3};  // index t*2 + x
  MechanismSpec missingness = MechanismSpec::m5();
  long n = 1000;
  std::uint64_t seed = 0;

  JointDistribution joint() const;  // the implied population law
};

ObservedTable generate_dataset(const DgpSpec& spec);

// The simulation-study parameterizations (binary X, Y; shared outcome table).
namespace presets {
DgpSpec study_dgp(int mechanism_index, long n, std::uint64_t seed);
MechanismSpec study_missingness(int mechanism_index);
// masking laws used for the recover-from-artificial-missingness exercise
MechanismSpec mask_missingness(int mechanism_index);
}  // namespace presets

struct StudyEstimator {
  enum class Kind { EmMle, GibbsMedian, EmSelect, Bounds };
  Kind kind = Kind::EmMle;
  MechanismKind mechanism = MechanismKind::M1;  // EmMle / GibbsMedian only
  std::string label() const;
};

// Metrics for one (dgp, estimator) cell over the replicates, for the two
// subgroup log odds-ratio targets.
struct StudyCell {
  std::string dgp;
  std::string estimator;
  int replicates_used = 0;
  int failures = 0;
  double bias[2] = {0.0, 0.0};       // point estimate (MLE or posterior median)
  double mse[2] = {0.0, 0.0};
  double coverage[2] = {-1.0, -1.0}; // 95% interval, posterior cells only
  double mean_lower[2] = {0.0, 0.0}; // bounds cells only
  double mean_upper[2] = {0.0, 0.0};
};

struct StudyResult {
  std::vector<StudyCell> cells;
  double truth[2] = {0.0, 0.0};  // log COR per stratum under the outcome table
};

struct StudyConfig {
  std::vector<DgpSpec> dgps;               // n/seed overridden per replicate
  std::vector<StudyEstimator> estimators;
  long n = 1000;
  int replicates = 200;
  std::uint64_t seed = 1;
  EmOptions em;
  GibbsOptions gibbs;
  double extreme_cutoff = 20.0;  // |log COR| beyond this is a boundary fit
};

// Fit every estimator to every replicate of every process; failed or
// boundary fits are dropped with a count. Deterministic given the seed, and
// independent of replicate evaluation order.
StudyResult replicate_study(const StudyConfig& config);

struct MaskRecoverResult {
  std::vector<std::string> mask_labels;
  std::vector<std::string> estimator_labels;
  std::vector<std::vector<double>> rmse;  // [mask][estimator], NaN on failure
  std::vector<double> complete_p_y1_tx;   // the target MLEs, index t*2 + x
};

// Delete the covariate from a fully observed table under each masking law,
// refit with each mechanism's EM, and score sqrt(sum (p_hat - p_hat^h)^2)
// over the four outcome probabilities.
MaskRecoverResult mask_and_recover(const ObservedTable& complete,
                                   const std::vector<MechanismSpec>& masks,
                                   const std::vector<MechanismKind>& estimators,
                                   std::uint64_t seed, const EmOptions& em = {});

}  // namespace subcausal
