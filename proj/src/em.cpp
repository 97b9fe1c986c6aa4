#include "subcausal/em.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "subcausal/errors.hpp"
#include "subcausal/stats.hpp"

namespace subcausal {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kBetaCap = 30.0;

// Convergence is judged on the loglik change; accumulating it in extended
// precision keeps tight tolerances resolvable where the double sum would
// quantize away the per-sweep improvement.
long double observed_loglik_precise(const ObservedTable& table, const JointDistribution& joint) {
  long double ll = 0.0L;
  for (int t = 0; t < 2; ++t) {
    for (int x = 0; x < table.J; ++x)
      for (int y = 0; y < table.K; ++y) {
        const double n = table.obs(t, x, y);
        if (n == 0.0) continue;
        const double p = joint.cell(t, x, y, 0);
        if (p <= 0.0) return -std::numeric_limits<long double>::infinity();
        ll += static_cast<long double>(n) * std::log(static_cast<long double>(p));
      }
    for (int y = 0; y < table.K; ++y) {
      const double n = table.mis(t, y);
      if (n == 0.0) continue;
      const double p = joint.p_mis_margin(t, y);
      if (p <= 0.0) return -std::numeric_limits<long double>::infinity();
      ll += static_cast<long double>(n) * std::log(static_cast<long double>(p));
    }
  }
  return ll;
}

// Imputed complete-data counts, index (t*J + x)*K + y per m-slice.
struct CompleteCounts {
  int J, K;
  std::vector<double> c0, c1;  // m = 0 and m = 1 slices
  double& at(int t, int x, int y, int m) {
    return (m == 0 ? c0 : c1)[(t * J + x) * K + y];
  }
  double at(int t, int x, int y, int m) const {
    return (m == 0 ? c0 : c1)[(t * J + x) * K + y];
  }
};

CompleteCounts spread_counts(const ObservedTable& table) {
  CompleteCounts c{table.J, table.K, std::vector<double>(2 * table.J * table.K, 0.0),
                   std::vector<double>(2 * table.J * table.K, 0.0)};
  for (int t = 0; t < 2; ++t)
    for (int x = 0; x < table.J; ++x)
      for (int y = 0; y < table.K; ++y) {
        c.at(t, x, y, 0) = table.obs(t, x, y);
        c.at(t, x, y, 1) = table.mis(t, y) / table.J;
      }
  return c;
}

bool needs_binary(MechanismKind kind) {
  return kind == MechanismKind::M3 || kind == MechanismKind::M4 ||
         kind == MechanismKind::Sens;
}

class EmEngine {
 public:
  EmEngine(const ObservedTable& table, MechanismKind kind, const EmOptions& options,
           double fixed_beta_y)
      : table_(table), kind_(kind), options_(options), fixed_beta_y_(fixed_beta_y) {
    table_.validate();
    if (kind_ == MechanismKind::M5) throw DataError("the unrestricted mechanism has no MLE; use bounds");
    if (needs_binary(kind_) && (table_.J != 2 || table_.K != 2))
      throw DataError(to_string(kind_) + " estimation needs binary X and Y");
    n_total_ = table_.total();
  }

  EmFit run() {
    FactoredParams params = initial_params();
    EmFit fit;
    fit.joint = compose_joint(params);
    long double ll = observed_loglik_precise(table_, fit.joint);
    if (!std::isfinite(static_cast<double>(ll)))
      throw DataError("starting point puts zero probability on an observed cell");
    fit.loglik_trace.push_back(static_cast<double>(ll));
    for (int it = 1; it <= options_.max_iter; ++it) {
      const long double prev = ll;
      CompleteCounts counts = e_step(fit.joint);
      params = params_from_counts(counts, params);
      fit.joint = compose_joint(params);
      ll = observed_loglik_precise(table_, fit.joint);
      fit.loglik_trace.push_back(static_cast<double>(ll));
      fit.iterations = it;
      if (std::fabs(static_cast<double>(ll - prev)) < options_.loglik_tolerance) {
        fit.converged = true;
        break;
      }
    }
    fit.params = std::move(params);
    fit.loglik = static_cast<double>(ll);
    return fit;
  }

 private:
  FactoredParams initial_params() {
    if (options_.start == EmOptions::Start::Explicit) {
      if (!options_.explicit_start) throw DataError("explicit start requested but not provided");
      FactoredParams p = *options_.explicit_start;
      p.randomized = options_.randomized;
      p.validate();
      return p;
    }
    const int J = table_.J, K = table_.K;
    FactoredParams p;
    p.J = J;
    p.K = K;
    p.randomized = options_.randomized;
    p.pi_x.assign(J, 1.0 / J);
    p.p_t1_given_x.assign(J, table_.arm_total(1) / n_total_);
    p.p_y_given_tx.assign(2 * J * K, 1.0 / K);
    if (options_.start == EmOptions::Start::Uniform) {
      const double rate = std::clamp(table_.total_missing() / n_total_, 1e-6, 1.0 - 1e-6);
      p.missingness = uniform_missingness(rate);
      return p;
    }
    // empirical: complete-case conditionals with missing mass spread evenly
    // over x, so no observed cell starts at probability zero
    CompleteCounts c = spread_counts(table_);
    return params_from_counts(c, p);
  }

  MechanismSpec uniform_missingness(double rate) const {
    const int J = table_.J, K = table_.K;
    switch (kind_) {
      case MechanismKind::M1: return MechanismSpec::m1(std::vector<double>(2 * K, rate), K);
      case MechanismKind::M2: return MechanismSpec::m2(std::vector<double>(2 * J, rate), J);
      case MechanismKind::M3: return MechanismSpec::m3(std::vector<double>(J * K, rate), J, K);
      case MechanismKind::M4: return MechanismSpec::m4({logit(rate), 0.0, 0.0, 0.0});
      case MechanismKind::Sens: {
        SensCoefficients s;
        s.b0 = logit(1.0 - rate);
        s.by = fixed_beta_y_;
        return MechanismSpec::sensitivity(s);
      }
      default: break;
    }
    throw DataError("unsupported mechanism");
  }

  CompleteCounts e_step(const JointDistribution& joint) const {
    const int J = table_.J, K = table_.K;
    CompleteCounts c{J, K, std::vector<double>(2 * J * K, 0.0), std::vector<double>(2 * J * K, 0.0)};
    for (int t = 0; t < 2; ++t)
      for (int y = 0; y < K; ++y) {
        for (int x = 0; x < J; ++x) c.at(t, x, y, 0) = table_.obs(t, x, y);
        const double n_mis = table_.mis(t, y);
        if (n_mis == 0.0) continue;
        double denom = 0.0;
        for (int x = 0; x < J; ++x) denom += joint.cell(t, x, y, 1);
        if (denom <= 0.0)
          throw DataError("degenerate state: positive missing count on a zero-probability stratum");
        for (int x = 0; x < J; ++x) c.at(t, x, y, 1) = n_mis * joint.cell(t, x, y, 1) / denom;
      }
    return c;
  }

  FactoredParams params_from_counts(const CompleteCounts& c, const FactoredParams& prev) {
    const int J = table_.J, K = table_.K;
    FactoredParams p;
    p.J = J;
    p.K = K;
    p.randomized = options_.randomized;
    p.pi_x.assign(J, 0.0);
    p.p_t1_given_x.assign(J, 0.0);
    p.p_y_given_tx.assign(2 * J * K, 0.0);

    std::vector<double> n_x(J, 0.0), n_1x(J, 0.0);
    for (int t = 0; t < 2; ++t)
      for (int x = 0; x < J; ++x)
        for (int y = 0; y < K; ++y)
          for (int m = 0; m < 2; ++m) {
            const double v = c.at(t, x, y, m);
            n_x[x] += v;
            if (t == 1) n_1x[x] += v;
          }
    for (int x = 0; x < J; ++x) p.pi_x[x] = n_x[x] / n_total_;
    if (options_.randomized) {
      const double p1 = table_.arm_total(1) / n_total_;
      for (int x = 0; x < J; ++x) p.p_t1_given_x[x] = p1;
    } else {
      for (int x = 0; x < J; ++x)
        p.p_t1_given_x[x] = n_x[x] > 0.0 ? n_1x[x] / n_x[x] : table_.arm_total(1) / n_total_;
    }
    for (int t = 0; t < 2; ++t)
      for (int x = 0; x < J; ++x) {
        double n_tx = 0.0;
        for (int y = 0; y < K; ++y)
          for (int m = 0; m < 2; ++m) n_tx += c.at(t, x, y, m);
        for (int y = 0; y < K; ++y) {
          const double n_txy = c.at(t, x, y, 0) + c.at(t, x, y, 1);
          p.p_y(y, t, x) = n_tx > 0.0 ? n_txy / n_tx : 1.0 / K;
        }
      }
    p.missingness = missingness_from_counts(c, prev);
    return p;
  }

  MechanismSpec missingness_from_counts(const CompleteCounts& c, const FactoredParams& prev) {
    const int J = table_.J, K = table_.K;
    switch (kind_) {
      case MechanismKind::M1: {
        std::vector<double> tab(2 * K, 0.0);
        for (int t = 0; t < 2; ++t)
          for (int y = 0; y < K; ++y) {
            double n1 = 0.0, n = 0.0;
            for (int x = 0; x < J; ++x) {
              n1 += c.at(t, x, y, 1);
              n += c.at(t, x, y, 0) + c.at(t, x, y, 1);
            }
            tab[t * K + y] = n > 0.0 ? n1 / n : 0.0;
          }
        return MechanismSpec::m1(std::move(tab), K);
      }
      case MechanismKind::M2: {
        std::vector<double> tab(2 * J, 0.0);
        for (int t = 0; t < 2; ++t)
          for (int x = 0; x < J; ++x) {
            double n1 = 0.0, n = 0.0;
            for (int y = 0; y < K; ++y) {
              n1 += c.at(t, x, y, 1);
              n += c.at(t, x, y, 0) + c.at(t, x, y, 1);
            }
            tab[t * J + x] = n > 0.0 ? n1 / n : 0.0;
          }
        return MechanismSpec::m2(std::move(tab), J);
      }
      case MechanismKind::M3: {
        std::vector<double> tab(J * K, 0.0);
        for (int x = 0; x < J; ++x)
          for (int y = 0; y < K; ++y) {
            double n1 = 0.0, n = 0.0;
            for (int t = 0; t < 2; ++t) {
              n1 += c.at(t, x, y, 1);
              n += c.at(t, x, y, 0) + c.at(t, x, y, 1);
            }
            tab[x * K + y] = n > 0.0 ? n1 / n : 0.0;
          }
        return MechanismSpec::m3(std::move(tab), J, K);
      }
      case MechanismKind::M4: {
        std::vector<LogisticCell> cells;
        cells.reserve(8);
        for (int t = 0; t < 2; ++t)
          for (int x = 0; x < 2; ++x)
            for (int y = 0; y < 2; ++y)
              cells.push_back({{1.0, double(t), double(x), double(y)},
                               c.at(t, x, y, 1),
                               c.at(t, x, y, 0),
                               0.0});
        const auto& b = prev.missingness.kind() == MechanismKind::M4
                            ? prev.missingness.m4_coefficients()
                            : M4Coefficients{};
        auto fit = irls_logistic(cells, {b.b0, b.bt, b.bx, b.by});
        return MechanismSpec::m4({fit.beta[0], fit.beta[1], fit.beta[2], fit.beta[3]});
      }
      case MechanismKind::Sens: {
        // successes are the observed (M=0) counts; by enters as a fixed offset
        std::vector<LogisticCell> cells;
        cells.reserve(8);
        for (int t = 0; t < 2; ++t)
          for (int x = 0; x < 2; ++x)
            for (int y = 0; y < 2; ++y)
              cells.push_back({{1.0, double(t), double(x), double(t * x)},
                               c.at(t, x, y, 0),
                               c.at(t, x, y, 1),
                               fixed_beta_y_ * y});
        const auto& b = prev.missingness.kind() == MechanismKind::Sens
                            ? prev.missingness.sens_coefficients()
                            : SensCoefficients{};
        auto fit = irls_logistic(cells, {b.b0, b.bt, b.bx, b.btx});
        SensCoefficients s;
        s.b0 = fit.beta[0];
        s.bt = fit.beta[1];
        s.bx = fit.beta[2];
        s.btx = fit.beta[3];
        s.by = fixed_beta_y_;
        return MechanismSpec::sensitivity(s);
      }
      default: break;
    }
    throw DataError("unsupported mechanism");
  }

  ObservedTable table_;
  MechanismKind kind_;
  EmOptions options_;
  double fixed_beta_y_;
  double n_total_ = 0.0;
};

}  // namespace

EmFit em_fit(const ObservedTable& table, MechanismKind mechanism, const EmOptions& options) {
  return EmEngine(table, mechanism, options, 0.0).run();
}

EmFit em_fit_sensitivity(const ObservedTable& table, double beta_y, const EmOptions& options) {
  return EmEngine(table, MechanismKind::Sens, options, beta_y).run();
}

LogisticFit irls_logistic(const std::vector<LogisticCell>& cells, std::vector<double> start,
                          int max_iter) {
  if (cells.empty()) throw DataError("no cells for logistic regression");
  const auto p = cells.front().design.size();
  for (const auto& cell : cells) {
    if (cell.design.size() != p) throw DataError("inconsistent design dimensions");
    if (cell.successes < 0.0 || cell.failures < 0.0) throw DataError("negative weight");
  }
  LogisticFit fit;
  fit.beta = start.empty() ? std::vector<double>(p, 0.0) : std::move(start);
  if (fit.beta.size() != p) throw DataError("start dimension mismatch");

  double total_weight = 0.0;
  for (const auto& cell : cells) total_weight += cell.successes + cell.failures;
  const double score_tol = 1e-10 * std::max(total_weight, 1.0);

  Eigen::VectorXd beta = Eigen::Map<Eigen::VectorXd>(fit.beta.data(), p);
  for (int it = 1; it <= max_iter; ++it) {
    fit.iterations = it;
    Eigen::VectorXd score = Eigen::VectorXd::Zero(p);
    Eigen::MatrixXd info = Eigen::MatrixXd::Zero(p, p);
    for (const auto& cell : cells) {
      const double w = cell.successes + cell.failures;
      if (w <= 0.0) continue;
      Eigen::Map<const Eigen::VectorXd> v(cell.design.data(), p);
      const double eta = v.dot(beta) + cell.offset;
      const double mu = expit(eta);
      score += v * (cell.successes - w * mu);
      info += v * v.transpose() * (w * mu * (1.0 - mu));
    }
    if (score.lpNorm<Eigen::Infinity>() < score_tol) {
      fit.converged = true;
      break;
    }
    Eigen::LDLT<Eigen::MatrixXd> ldlt(info);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
      // separation flattens the information matrix; walk along the score
      const double cap = 1.0;
      Eigen::VectorXd step = score / std::max(score.lpNorm<Eigen::Infinity>(), 1e-300) * cap;
      beta += step;
    } else {
      Eigen::VectorXd step = ldlt.solve(score);
      // damp oversized Newton steps so separating configurations drift to the
      // cap instead of overshooting to non-finite eta
      const double m = step.lpNorm<Eigen::Infinity>();
      if (m > 8.0) step *= 8.0 / m;
      beta += step;
    }
    for (Eigen::Index j = 0; j < beta.size(); ++j) {
      if (beta(j) > kBetaCap) {
        beta(j) = kBetaCap;
        fit.separated = true;
      } else if (beta(j) < -kBetaCap) {
        beta(j) = -kBetaCap;
        fit.separated = true;
      }
    }
  }
  Eigen::Map<Eigen::VectorXd>(fit.beta.data(), p) = beta;
  if (!fit.converged && fit.separated) fit.converged = true;  // capped fit is terminal
  return fit;
}

GofResult lrt_gof(const ObservedTable& table, MechanismKind mechanism, const EmOptions& options) {
  if (table.J != 2 || table.K != 2)
    throw DataError("the goodness-of-fit test is defined for binary X and Y");
  EmOptions opts = options;
  opts.randomized = true;  // the extra degree of freedom comes from T independent of X
  const EmFit fit = em_fit(table, mechanism, opts);
  GofResult out;
  out.converged = fit.converged;
  if (!fit.converged)
    throw ConvergenceError("EM did not converge within max_iter for the goodness-of-fit test");
  out.loglik = fit.loglik;
  const double sat = saturated_loglik(table);
  out.lr_statistic = std::max(2.0 * (sat - fit.loglik), 0.0);
  out.df = 1;
  out.p_value = chi_square_upper_tail(out.lr_statistic, 1);
  // boundary fits break the chi-square asymptotics; flag them
  for (int t = 0; t < 2 && !out.boundary; ++t) {
    for (int x = 0; x < 2 && !out.boundary; ++x)
      for (int y = 0; y < 2; ++y)
        if (table.obs(t, x, y) > 0.0 && fit.joint.cell(t, x, y, 0) < 1e-12) {
          out.boundary = true;
          break;
        }
    for (int y = 0; y < 2; ++y)
      if (table.mis(t, y) > 0.0 && fit.joint.p_mis_margin(t, y) < 1e-12) out.boundary = true;
  }
  return out;
}

ExpertAssessment check_expert_assumptions(const JointDistribution& joint) {
  if (joint.J != 2 || joint.K != 2)
    throw DataError("the expert constraints are stated for binary X and Y");
  ExpertAssessment a;
  a.missing_skews_x0 = joint.p_x_given_t_m(0, 0, 1) >= joint.p_x_given_t_m(0, 0, 0) &&
                       joint.p_x_given_t_m(0, 1, 1) >= joint.p_x_given_t_m(0, 1, 0);
  const double r00 = joint.p_y_given_tx(1, 0, 0);
  const double r01 = joint.p_y_given_tx(1, 0, 1);
  const double r11 = joint.p_y_given_tx(1, 1, 1);
  a.baseline_risk_monotone = r01 >= r00;
  a.baseline_risk_in_range = r00 >= 0.05 && r00 <= 0.50 && r01 >= 0.05 && r01 <= 0.50;
  a.treated_risk_not_higher = r11 <= r01;
  return a;
}

MechanismChoice select_mechanism(const ObservedTable& table,
                                 const std::vector<MechanismKind>& candidates,
                                 const EmOptions& options) {
  if (candidates.empty()) throw DataError("no candidate mechanisms");
  MechanismChoice out;
  out.candidates = candidates;
  out.logliks.assign(candidates.size(), std::nan(""));
  out.converged.assign(candidates.size(), false);
  double best = -kInf;
  bool any = false;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    try {
      const EmFit fit = em_fit(table, candidates[i], options);
      out.logliks[i] = fit.loglik;
      out.converged[i] = fit.converged;
      if (fit.converged && fit.loglik > best) {
        best = fit.loglik;
        out.chosen = candidates[i];
        any = true;
      }
    } catch (const std::runtime_error&) {
      // recorded as NaN
    }
  }
  if (!any) throw ConvergenceError("every candidate mechanism failed to converge");
  return out;
}

SensitivityCurve profile_sensitivity(const ObservedTable& table,
                                     const std::vector<double>& beta_y_grid,
                                     const EmOptions& options) {
  for (std::size_t i = 1; i < beta_y_grid.size(); ++i)
    if (!(beta_y_grid[i] > beta_y_grid[i - 1]))
      throw DataError("sensitivity grid must be strictly increasing");
  SensitivityCurve curve;
  curve.points.reserve(beta_y_grid.size());
  for (double by : beta_y_grid) {
    SensitivityPoint pt;
    pt.beta_y = by;
    try {
      const EmFit fit = em_fit_sensitivity(table, by, options);
      pt.converged = fit.converged;
      pt.loglik = fit.loglik;
      const auto est = effects_from_joint(fit.joint, Measure::LogCor,
                                          options.randomized
                                              ? TotalEffectAssumption::CompleteRandomization
                                              : TotalEffectAssumption::LatentIgnorable);
      pt.log_cor_0 = est.ce_x[0];
      pt.log_cor_1 = est.ce_x[1];
      const auto expert = check_expert_assumptions(fit.joint);
      pt.feasible = expert.missing_skews_x0 && expert.baseline_risk_monotone &&
                    expert.baseline_risk_in_range && expert.treated_risk_not_higher;
    } catch (const std::runtime_error&) {
      pt.converged = false;
      pt.loglik = std::nan("");
      pt.log_cor_0 = pt.log_cor_1 = std::nan("");
    }
    curve.points.push_back(pt);
  }
  return curve;
}

}  // namespace subcausal
