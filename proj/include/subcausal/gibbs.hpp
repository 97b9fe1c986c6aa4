#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "subcausal/measures.hpp"
#include "subcausal/table.hpp"

namespace subcausal {

struct BetaPrior {
  double a = 0.5;
  double b = 0.5;
};

struct GibbsOptions {
  int iterations = 10000;
  int burnin = 5000;
  std::uint64_t seed = 0;
  BetaPrior prior;                 // shared by every probability factor
  double mh_proposal_scale = 0.1;  // random-walk scale for the logistic coefficients
  bool adapt_during_burnin = true; // doubling/halving toward ~30-40% acceptance
  bool randomized = false;         // draw a single P(T) instead of P(T|X=x)
};

// Retained draws as named columns, one value per kept iteration. Factor
// columns are named p_* / pi_* / beta_*; derived effect columns (binary
// outcome only) are crd_<x>, log_crr_<x>, log_cor_<x>, crr_<x>.
struct PosteriorDraws {
  MechanismKind mechanism = MechanismKind::M1;
  int J = 2, K = 2;
  std::uint64_t seed = 0;
  int iterations = 0, burnin = 0;
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;
  double acceptance_rate = -1.0;  // logistic mechanism only, else -1
  std::vector<std::string> warnings;

  int retained() const { return columns.empty() ? 0 : static_cast<int>(columns.front().size()); }
  bool has(const std::string& name) const;
  const std::vector<double>& col(const std::string& name) const;
};

// Data-augmentation sampler: integer multinomial imputation of the missing-x
// counts, conjugate Beta/Dirichlet draws for every probability factor, and a
// componentwise random-walk Metropolis step for the logistic coefficients
// (flat priors). Fully reproducible from the seed.
PosteriorDraws gibbs_run(const ObservedTable& table, MechanismKind mechanism,
                         const GibbsOptions& options = {});

struct PosteriorSummary {
  double median = 0.0;
  double q025 = 0.0;
  double q975 = 0.0;
};

// Empirical quantiles with linear interpolation (type 7); needs >= 100 draws.
PosteriorSummary posterior_summary(const PosteriorDraws& draws, const std::string& target);

struct EffectModificationTest {
  double lower = 0.0;   // 95% interval of CE_0 - CE_1
  double upper = 0.0;
  bool contains_zero = false;
};

EffectModificationTest effect_modification_test(const PosteriorDraws& draws,
                                                Measure measure = Measure::LogCor);

}  // namespace subcausal
