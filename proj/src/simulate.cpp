#include "subcausal/simulate.hpp"

#include <cmath>
#include <limits>

#include "subcausal/errors.hpp"
#include "subcausal/identify.hpp"
#include "subcausal/rng.hpp"
#include "subcausal/stats.hpp"

namespace subcausal {

namespace {
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
}

JointDistribution DgpSpec::joint() const {
  FactoredParams p;
  p.J = 2;
  p.K = 2;
  p.pi_x = {1.0 - p_x1, p_x1};
  p.p_t1_given_x = {p_treat, p_treat};
  p.p_y_given_tx.assign(8, 0.0);
  for (int t = 0; t < 2; ++t)
    for (int x = 0; x < 2; ++x) {
      p.p_y(1, t, x) = p_y1_tx[t * 2 + x];
      p.p_y(0, t, x) = 1.0 - p_y1_tx[t * 2 + x];
    }
  p.missingness = missingness;
  p.randomized = true;
  return compose_joint(p);
}

ObservedTable generate_dataset(const DgpSpec& spec) {
  if (spec.n < 1) throw DataError("need at least one unit");
  if (spec.p_y1_tx.size() != 4) throw DataError("outcome table must have four entries");
  for (double v : {spec.p_treat, spec.p_x1})
    if (!(v > 0.0 && v < 1.0)) throw DataError("treatment/covariate probabilities must be in (0,1)");
  Rng rng(spec.seed);
  ObservedTable table(2, 2);
  for (long i = 0; i < spec.n; ++i) {
    const int t = rng.bernoulli(spec.p_treat);
    const int x = rng.bernoulli(spec.p_x1);
    const int y = rng.bernoulli(spec.p_y1_tx[t * 2 + x]);
    const int m = rng.bernoulli(spec.missingness.miss_prob(t, x, y));
    if (m)
      table.mis(t, y) += 1.0;
    else
      table.obs(t, x, y) += 1.0;
  }
  return table;
}

namespace presets {

MechanismSpec study_missingness(int k) {
  switch (k) {
    case 1:
      // P(M=1|T,Y): rows t, cols y
      return MechanismSpec::m1({0.7, 0.4, 0.3, 0.3});
    case 2:
      // P(M=1|T,X): rows t, cols x
      return MechanismSpec::m2({0.3, 0.5, 0.6, 0.7});
    case 3:
      // P(M=1|X,Y): rows x, cols y
      return MechanismSpec::m3({0.8, 0.5, 0.3, 0.3});
    case 4:
      return MechanismSpec::m4({-1.0, 1.4, -0.5, 0.8});
    case 5:
      return MechanismSpec::m5_logit({-1.0, 1.4, -1.0, -0.5, 0.5, 0.3, -0.6, -0.2});
    default:
      throw DataError("mechanism index must be 1..5");
  }
}

DgpSpec study_dgp(int k, long n, std::uint64_t seed) {
  DgpSpec spec;
  spec.missingness = study_missingness(k);
  spec.n = n;
  spec.seed = seed;
  return spec;
}

MechanismSpec mask_missingness(int k) {
  switch (k) {
    case 1: return MechanismSpec::m1({0.2, 0.3, 0.2, 0.4});
    case 2: return MechanismSpec::m2({0.2, 0.3, 0.2, 0.5});
    case 3: return MechanismSpec::m3({0.1, 0.1, 0.1, 0.6});
    case 4: return MechanismSpec::m4({-1.0, 1.0, -1.0, 1.0});
    default: throw DataError("mask index must be 1..4");
  }
}

}  // namespace presets

std::string StudyEstimator::label() const {
  switch (kind) {
    case Kind::EmMle: return "em_" + to_string(mechanism);
    case Kind::GibbsMedian: return "gibbs_" + to_string(mechanism);
    case Kind::EmSelect: return "em_select";
    case Kind::Bounds: return "bounds";
  }
  return "?";
}

namespace {

struct CellAccumulator {
  int used = 0, failures = 0;
  double sum_err[2] = {0.0, 0.0}, sum_sq[2] = {0.0, 0.0};
  long covered[2] = {0, 0};
  int cover_n[2] = {0, 0};
  double sum_lower[2] = {0.0, 0.0}, sum_upper[2] = {0.0, 0.0};
};

}  // namespace

StudyResult replicate_study(const StudyConfig& config) {
  if (config.dgps.empty() || config.estimators.empty())
    throw DataError("study needs at least one process and one estimator");
  if (config.replicates < 1) throw DataError("study needs at least one replicate");

  StudyResult result;
  {
    const auto& outcome = config.dgps.front().p_y1_tx;
    for (int x = 0; x < 2; ++x)
      result.truth[x] = eval_measure(Measure::LogCor, outcome[2 + x], outcome[x]);
  }
  const double cutoff = config.extreme_cutoff;
  std::vector<std::vector<CellAccumulator>> acc(
      config.dgps.size(), std::vector<CellAccumulator>(config.estimators.size()));

  for (std::size_t d = 0; d < config.dgps.size(); ++d) {
    for (int rep = 0; rep < config.replicates; ++rep) {
      DgpSpec spec = config.dgps[d];
      spec.n = config.n;
      // spread the replicate seeds deterministically, disjoint across processes
      spec.seed = config.seed + 1000003ULL * static_cast<std::uint64_t>(d) +
                  static_cast<std::uint64_t>(rep);
      const ObservedTable table = generate_dataset(spec);
      for (std::size_t e = 0; e < config.estimators.size(); ++e) {
        const auto& est = config.estimators[e];
        auto& cell = acc[d][e];
        try {
          switch (est.kind) {
            case StudyEstimator::Kind::EmMle:
            case StudyEstimator::Kind::EmSelect: {
              MechanismKind mech = est.mechanism;
              if (est.kind == StudyEstimator::Kind::EmSelect) {
                const auto choice = select_mechanism(
                    table,
                    {MechanismKind::M1, MechanismKind::M2, MechanismKind::M3, MechanismKind::M4},
                    config.em);
                mech = choice.chosen;
              }
              const EmFit fit = em_fit(table, mech, config.em);
              if (!fit.converged) throw ConvergenceError("EM hit max_iter");
              const auto eff = effects_from_joint(fit.joint, Measure::LogCor,
                                                  TotalEffectAssumption::LatentIgnorable);
              if (!std::isfinite(eff.ce_x[0]) || !std::isfinite(eff.ce_x[1]) ||
                  std::fabs(eff.ce_x[0]) > cutoff || std::fabs(eff.ce_x[1]) > cutoff)
                throw ModelError("boundary", "estimate at the boundary");
              cell.used += 1;
              for (int x = 0; x < 2; ++x) {
                const double err = eff.ce_x[x] - result.truth[x];
                cell.sum_err[x] += err;
                cell.sum_sq[x] += err * err;
              }
              break;
            }
            case StudyEstimator::Kind::GibbsMedian: {
              GibbsOptions gopts = config.gibbs;
              gopts.seed = spec.seed ^ 0x9e3779b97f4a7c15ULL;
              const auto draws = gibbs_run(table, est.mechanism, gopts);
              bool ok = true;
              double med[2], lo[2], hi[2];
              for (int x = 0; x < 2; ++x) {
                const auto s =
                    posterior_summary(draws, "log_cor_" + std::to_string(x));
                med[x] = s.median;
                lo[x] = s.q025;
                hi[x] = s.q975;
                if (!std::isfinite(med[x]) || std::fabs(med[x]) > cutoff || !std::isfinite(lo[x]) ||
                    !std::isfinite(hi[x]))
                  ok = false;
              }
              if (!ok) throw ModelError("boundary", "degenerate posterior interval");
              cell.used += 1;
              for (int x = 0; x < 2; ++x) {
                const double err = med[x] - result.truth[x];
                cell.sum_err[x] += err;
                cell.sum_sq[x] += err * err;
                cell.cover_n[x] += 1;
                cell.covered[x] += lo[x] <= result.truth[x] && result.truth[x] <= hi[x];
              }
              break;
            }
            case StudyEstimator::Kind::Bounds: {
              const auto bounds = bounds_m5(table, Measure::LogCor);
              if (!std::isfinite(bounds.lower[0]) || !std::isfinite(bounds.upper[0]) ||
                  !std::isfinite(bounds.lower[1]) || !std::isfinite(bounds.upper[1]))
                throw ModelError("boundary", "infinite bound");
              cell.used += 1;
              for (int x = 0; x < 2; ++x) {
                cell.sum_lower[x] += bounds.lower[x];
                cell.sum_upper[x] += bounds.upper[x];
              }
              break;
            }
          }
        } catch (const std::runtime_error&) {
          cell.failures += 1;
        }
      }
    }
  }

  for (std::size_t d = 0; d < config.dgps.size(); ++d)
    for (std::size_t e = 0; e < config.estimators.size(); ++e) {
      const auto& a = acc[d][e];
      StudyCell cell;
      cell.dgp = "dgp" + std::to_string(d + 1);
      cell.estimator = config.estimators[e].label();
      cell.replicates_used = a.used;
      cell.failures = a.failures;
      for (int x = 0; x < 2; ++x) {
        if (a.used > 0) {
          cell.bias[x] = a.sum_err[x] / a.used;
          cell.mse[x] = a.sum_sq[x] / a.used;
          cell.mean_lower[x] = a.sum_lower[x] / a.used;
          cell.mean_upper[x] = a.sum_upper[x] / a.used;
        } else {
          cell.bias[x] = cell.mse[x] = cell.mean_lower[x] = cell.mean_upper[x] = kNan;
        }
        cell.coverage[x] = a.cover_n[x] > 0 ? double(a.covered[x]) / a.cover_n[x] : -1.0;
      }
      result.cells.push_back(std::move(cell));
    }
  return result;
}

MaskRecoverResult mask_and_recover(const ObservedTable& complete,
                                   const std::vector<MechanismSpec>& masks,
                                   const std::vector<MechanismKind>& estimators,
                                   std::uint64_t seed, const EmOptions& em) {
  complete.validate();
  if (complete.total_missing() > 0.0) throw DataError("input table must be fully observed");
  if (complete.J != 2 || complete.K != 2) throw DataError("masking needs binary X and Y");
  if (!complete.integer_counts()) throw DataError("masking needs integer counts");

  MaskRecoverResult out;
  out.complete_p_y1_tx.assign(4, 0.0);
  for (int t = 0; t < 2; ++t)
    for (int x = 0; x < 2; ++x) {
      const double n1 = complete.obs(t, x, 1);
      const double n = complete.obs(t, x, 0) + n1;
      if (n <= 0.0) throw DataError("an (t,x) cell of the complete table is empty");
      out.complete_p_y1_tx[t * 2 + x] = n1 / n;
    }
  for (const auto& est : estimators) out.estimator_labels.push_back("em_" + to_string(est));

  Rng rng(seed);
  for (std::size_t mi = 0; mi < masks.size(); ++mi) {
    out.mask_labels.push_back("mask_" + std::to_string(mi + 1) + "_" +
                              to_string(masks[mi].kind()));
    ObservedTable masked(2, 2);
    for (int t = 0; t < 2; ++t)
      for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) {
          const long n = static_cast<long>(std::llround(complete.obs(t, x, y)));
          const long hidden = rng.binomial(n, masks[mi].miss_prob(t, x, y));
          masked.obs(t, x, y) = static_cast<double>(n - hidden);
          masked.mis(t, y) += static_cast<double>(hidden);
        }
    std::vector<double> row;
    for (const auto mech : estimators) {
      try {
        const EmFit fit = em_fit(masked, mech, em);
        if (!fit.converged) throw ConvergenceError("EM hit max_iter");
        double ss = 0.0;
        for (int t = 0; t < 2; ++t)
          for (int x = 0; x < 2; ++x) {
            const double diff =
                fit.joint.p_y_given_tx(1, t, x) - out.complete_p_y1_tx[t * 2 + x];
            ss += diff * diff;
          }
        row.push_back(std::sqrt(ss));
      } catch (const std::runtime_error&) {
        row.push_back(kNan);
      }
    }
    out.rmse.push_back(std::move(row));
  }
  return out;
}

}  // namespace subcausal
