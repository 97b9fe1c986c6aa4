#include "subcausal/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "subcausal/errors.hpp"
#include "subcausal/rng.hpp"
#include "subcausal/stats.hpp"

namespace subcausal {

namespace {

bool needs_binary(MechanismKind kind) {
  return kind == MechanismKind::M3 || kind == MechanismKind::M4;
}

// Sampler state over the factored parameters; the missingness factor is a
// full (t, x, y) probability table except for the logistic mechanism where
// the four coefficients are the state.
struct State {
  std::vector<double> pi_x;                  // J
  std::vector<double> p_t1_given_x;          // J (constant under randomized)
  std::vector<double> p_y_given_tx;          // 2*J*K
  std::vector<double> lam;                   // 2*J*K, P(M=1|t,x,y)
  double beta[4] = {0.0, 0.0, 0.0, 0.0};     // logistic mechanism only
};

struct Counts {
  int J, K;
  std::vector<double> c0, c1;
  double& at(int t, int x, int y, int m) { return (m ? c1 : c0)[(t * J + x) * K + y]; }
  double at(int t, int x, int y, int m) const { return (m ? c1 : c0)[(t * J + x) * K + y]; }
};

double grouped_binom_loglik(const Counts& counts, const double beta[4]) {
  double ll = 0.0;
  for (int t = 0; t < 2; ++t)
    for (int x = 0; x < counts.J; ++x)
      for (int y = 0; y < counts.K; ++y) {
        const double n1 = counts.at(t, x, y, 1);
        const double n0 = counts.at(t, x, y, 0);
        if (n1 + n0 <= 0.0) continue;
        const double eta = beta[0] + beta[1] * t + beta[2] * x + beta[3] * y;
        // n1*log(mu) + n0*log(1-mu) without cancellation
        ll += -n1 * std::log1p(std::exp(-eta)) - n0 * std::log1p(std::exp(eta));
      }
  return ll;
}

}  // namespace

bool PosteriorDraws::has(const std::string& name) const {
  return std::find(names.begin(), names.end(), name) != names.end();
}

const std::vector<double>& PosteriorDraws::col(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return columns[i];
  throw DataError("no posterior column named " + name);
}

PosteriorDraws gibbs_run(const ObservedTable& table, MechanismKind mechanism,
                         const GibbsOptions& options) {
  table.validate();
  if (!table.integer_counts()) throw DataError("posterior sampling needs integer counts");
  if (mechanism == MechanismKind::M5 || mechanism == MechanismKind::Sens)
    throw DataError("posterior sampling is defined for mechanisms M1-M4");
  if (needs_binary(mechanism) && (table.J != 2 || table.K != 2))
    throw DataError(to_string(mechanism) + " sampling needs binary X and Y");
  if (options.burnin >= options.iterations) throw DataError("burnin must be below iterations");
  if (options.mh_proposal_scale <= 0.0) throw DataError("proposal scale must be positive");

  const int J = table.J, K = table.K;
  const double a = options.prior.a, b = options.prior.b;
  Rng rng(options.seed);

  PosteriorDraws draws;
  draws.mechanism = mechanism;
  draws.J = J;
  draws.K = K;
  draws.seed = options.seed;
  draws.iterations = options.iterations;
  draws.burnin = options.burnin;

  // column layout
  std::vector<std::string> names;
  for (int x = 1; x < J; ++x) names.push_back("pi_x" + std::to_string(x));
  if (options.randomized)
    names.push_back("p_t1");
  else
    for (int x = 0; x < J; ++x) names.push_back("p_t1_x" + std::to_string(x));
  if (K == 2)
    for (int t = 0; t < 2; ++t)
      for (int x = 0; x < J; ++x)
        names.push_back("p_y1_t" + std::to_string(t) + "_x" + std::to_string(x));
  switch (mechanism) {
    case MechanismKind::M1:
      for (int t = 0; t < 2; ++t)
        for (int y = 0; y < K; ++y)
          names.push_back("p_m1_t" + std::to_string(t) + "_y" + std::to_string(y));
      break;
    case MechanismKind::M2:
      for (int t = 0; t < 2; ++t)
        for (int x = 0; x < J; ++x)
          names.push_back("p_m1_t" + std::to_string(t) + "_x" + std::to_string(x));
      break;
    case MechanismKind::M3:
      for (int x = 0; x < J; ++x)
        for (int y = 0; y < K; ++y)
          names.push_back("p_m1_x" + std::to_string(x) + "_y" + std::to_string(y));
      break;
    case MechanismKind::M4:
      names.insert(names.end(), {"beta0", "beta_t", "beta_x", "beta_y"});
      break;
    default: break;
  }
  if (K == 2)
    for (int x = 0; x < J; ++x) {
      const std::string sx = std::to_string(x);
      names.push_back("crd_" + sx);
      names.push_back("log_crr_" + sx);
      names.push_back("log_cor_" + sx);
      names.push_back("crr_" + sx);
    }
  draws.names = names;
  draws.columns.assign(names.size(), {});
  const int retained = options.iterations - options.burnin;
  for (auto& colv : draws.columns) colv.reserve(retained);

  // start: even split of the missing mass, then a posterior draw
  Counts counts{J, K, std::vector<double>(2 * J * K, 0.0), std::vector<double>(2 * J * K, 0.0)};
  for (int t = 0; t < 2; ++t)
    for (int x = 0; x < J; ++x)
      for (int y = 0; y < K; ++y) {
        counts.at(t, x, y, 0) = table.obs(t, x, y);
        counts.at(t, x, y, 1) = table.mis(t, y) / J;
      }

  State st;
  st.pi_x.assign(J, 0.0);
  st.p_t1_given_x.assign(J, 0.0);
  st.p_y_given_tx.assign(2 * J * K, 0.0);
  st.lam.assign(2 * J * K, 0.0);

  double mh_scale[4] = {options.mh_proposal_scale, options.mh_proposal_scale,
                        options.mh_proposal_scale, options.mh_proposal_scale};
  long mh_accept = 0, mh_total = 0;          // over retained iterations
  long win_accept[4] = {0, 0, 0, 0};         // adaptation windows during burn-in
  long win_total[4] = {0, 0, 0, 0};

  auto posterior_step = [&](int iteration) {
    // covariate law
    {
      std::vector<double> g(J);
      double s = 0.0;
      for (int x = 0; x < J; ++x) {
        double n_x = 0.0;
        for (int t = 0; t < 2; ++t)
          for (int y = 0; y < K; ++y) n_x += counts.at(t, x, y, 0) + counts.at(t, x, y, 1);
        g[x] = rng.gamma(a + n_x);
        s += g[x];
      }
      for (int x = 0; x < J; ++x) st.pi_x[x] = g[x] / s;
    }
    // treatment assignment
    if (options.randomized) {
      double n1 = 0.0, n0 = 0.0;
      for (int x = 0; x < J; ++x)
        for (int y = 0; y < K; ++y)
          for (int m = 0; m < 2; ++m) {
            n1 += counts.at(1, x, y, m);
            n0 += counts.at(0, x, y, m);
          }
      const double v = rng.beta(a + n1, b + n0);
      std::fill(st.p_t1_given_x.begin(), st.p_t1_given_x.end(), v);
    } else {
      for (int x = 0; x < J; ++x) {
        double n1 = 0.0, n0 = 0.0;
        for (int y = 0; y < K; ++y)
          for (int m = 0; m < 2; ++m) {
            n1 += counts.at(1, x, y, m);
            n0 += counts.at(0, x, y, m);
          }
        st.p_t1_given_x[x] = rng.beta(a + n1, b + n0);
      }
    }
    // outcome law
    for (int t = 0; t < 2; ++t)
      for (int x = 0; x < J; ++x) {
        std::vector<double> g(K);
        double s = 0.0;
        for (int y = 0; y < K; ++y) {
          g[y] = rng.gamma(a + counts.at(t, x, y, 0) + counts.at(t, x, y, 1));
          s += g[y];
        }
        for (int y = 0; y < K; ++y) st.p_y_given_tx[(t * J + x) * K + y] = g[y] / s;
      }
    // missingness factor
    switch (mechanism) {
      case MechanismKind::M1:
        for (int t = 0; t < 2; ++t)
          for (int y = 0; y < K; ++y) {
            double n1 = 0.0, n0 = 0.0;
            for (int x = 0; x < J; ++x) {
              n1 += counts.at(t, x, y, 1);
              n0 += counts.at(t, x, y, 0);
            }
            const double v = rng.beta(a + n1, b + n0);
            for (int x = 0; x < J; ++x) st.lam[(t * J + x) * K + y] = v;
          }
        break;
      case MechanismKind::M2:
        for (int t = 0; t < 2; ++t)
          for (int x = 0; x < J; ++x) {
            double n1 = 0.0, n0 = 0.0;
            for (int y = 0; y < K; ++y) {
              n1 += counts.at(t, x, y, 1);
              n0 += counts.at(t, x, y, 0);
            }
            const double v = rng.beta(a + n1, b + n0);
            for (int y = 0; y < K; ++y) st.lam[(t * J + x) * K + y] = v;
          }
        break;
      case MechanismKind::M3:
        for (int x = 0; x < J; ++x)
          for (int y = 0; y < K; ++y) {
            double n1 = 0.0, n0 = 0.0;
            for (int t = 0; t < 2; ++t) {
              n1 += counts.at(t, x, y, 1);
              n0 += counts.at(t, x, y, 0);
            }
            const double v = rng.beta(a + n1, b + n0);
            for (int t = 0; t < 2; ++t) st.lam[(t * J + x) * K + y] = v;
          }
        break;
      case MechanismKind::M4: {
        double cur = grouped_binom_loglik(counts, st.beta);
        for (int j = 0; j < 4; ++j) {
          double prop[4] = {st.beta[0], st.beta[1], st.beta[2], st.beta[3]};
          prop[j] += mh_scale[j] * rng.normal();
          const double cand = grouped_binom_loglik(counts, prop);
          const bool accept = std::log(std::max(rng.uniform(), 1e-300)) < cand - cur;
          if (accept) {
            st.beta[j] = prop[j];
            cur = cand;
          }
          if (iteration >= options.burnin) {
            mh_total += 1;
            mh_accept += accept;
          } else if (options.adapt_during_burnin) {
            win_total[j] += 1;
            win_accept[j] += accept;
            if (win_total[j] == 200) {
              const double rate = double(win_accept[j]) / 200.0;
              if (rate > 0.4) mh_scale[j] *= 2.0;
              if (rate < 0.2) mh_scale[j] *= 0.5;
              mh_scale[j] = std::clamp(mh_scale[j], 1e-3, 10.0);
              win_total[j] = win_accept[j] = 0;
            }
          }
        }
        for (int t = 0; t < 2; ++t)
          for (int x = 0; x < J; ++x)
            for (int y = 0; y < K; ++y)
              st.lam[(t * J + x) * K + y] =
                  expit(st.beta[0] + st.beta[1] * t + st.beta[2] * x + st.beta[3] * y);
        break;
      }
      default: break;
    }
  };

  auto imputation_step = [&]() {
    for (int t = 0; t < 2; ++t)
      for (int y = 0; y < K; ++y) {
        const long n_mis = static_cast<long>(std::llround(table.mis(t, y)));
        for (int x = 0; x < J; ++x) counts.at(t, x, y, 0) = table.obs(t, x, y);
        if (n_mis == 0) {
          for (int x = 0; x < J; ++x) counts.at(t, x, y, 1) = 0.0;
          continue;
        }
        std::vector<double> w(J);
        for (int x = 0; x < J; ++x) {
          const double pt = t == 1 ? st.p_t1_given_x[x] : 1.0 - st.p_t1_given_x[x];
          w[x] = st.pi_x[x] * pt * st.p_y_given_tx[(t * J + x) * K + y] *
                 st.lam[(t * J + x) * K + y];
        }
        const auto split = rng.multinomial(n_mis, w);
        for (int x = 0; x < J; ++x) counts.at(t, x, y, 1) = static_cast<double>(split[x]);
      }
  };

  posterior_step(-1);  // initial parameter draw off the even split
  for (int it = 0; it < options.iterations; ++it) {
    imputation_step();
    posterior_step(it);
    if (it < options.burnin) continue;
    std::size_t idx = 0;
    for (int x = 1; x < J; ++x) draws.columns[idx++].push_back(st.pi_x[x]);
    if (options.randomized)
      draws.columns[idx++].push_back(st.p_t1_given_x[0]);
    else
      for (int x = 0; x < J; ++x) draws.columns[idx++].push_back(st.p_t1_given_x[x]);
    if (K == 2)
      for (int t = 0; t < 2; ++t)
        for (int x = 0; x < J; ++x)
          draws.columns[idx++].push_back(st.p_y_given_tx[(t * J + x) * K + 1]);
    switch (mechanism) {
      case MechanismKind::M1:
        for (int t = 0; t < 2; ++t)
          for (int y = 0; y < K; ++y) draws.columns[idx++].push_back(st.lam[(t * J) * K + y]);
        break;
      case MechanismKind::M2:
        for (int t = 0; t < 2; ++t)
          for (int x = 0; x < J; ++x) draws.columns[idx++].push_back(st.lam[(t * J + x) * K]);
        break;
      case MechanismKind::M3:
        for (int x = 0; x < J; ++x)
          for (int y = 0; y < K; ++y) draws.columns[idx++].push_back(st.lam[(0 * J + x) * K + y]);
        break;
      case MechanismKind::M4:
        for (double bj : st.beta) draws.columns[idx++].push_back(bj);
        break;
      default: break;
    }
    if (K == 2)
      for (int x = 0; x < J; ++x) {
        const double p1 = st.p_y_given_tx[(1 * J + x) * K + 1];
        const double p0 = st.p_y_given_tx[(0 * J + x) * K + 1];
        draws.columns[idx++].push_back(eval_measure(Measure::Crd, p1, p0));
        const double lcrr = eval_measure(Measure::LogCrr, p1, p0);
        draws.columns[idx++].push_back(lcrr);
        draws.columns[idx++].push_back(eval_measure(Measure::LogCor, p1, p0));
        draws.columns[idx++].push_back(std::exp(lcrr));
      }
  }

  if (mechanism == MechanismKind::M4 && mh_total > 0) {
    draws.acceptance_rate = double(mh_accept) / double(mh_total);
    if (draws.acceptance_rate <= 0.05 || draws.acceptance_rate >= 0.9)
      draws.warnings.push_back("Metropolis acceptance rate " +
                               std::to_string(draws.acceptance_rate) +
                               " outside (0.05, 0.9); consider another proposal scale");
  }
  return draws;
}

PosteriorSummary posterior_summary(const PosteriorDraws& draws, const std::string& target) {
  const auto& v = draws.col(target);
  if (v.size() < 100) throw DataError("too few retained draws for a summary");
  PosteriorSummary s;
  s.median = quantile_type7(v, 0.5);
  s.q025 = quantile_type7(v, 0.025);
  s.q975 = quantile_type7(v, 0.975);
  return s;
}

EffectModificationTest effect_modification_test(const PosteriorDraws& draws, Measure measure) {
  std::string prefix;
  switch (measure) {
    case Measure::Crd: prefix = "crd_"; break;
    case Measure::LogCrr: prefix = "log_crr_"; break;
    case Measure::LogCor: prefix = "log_cor_"; break;
  }
  const auto& ce0 = draws.col(prefix + "0");
  const auto& ce1 = draws.col(prefix + "1");
  std::vector<double> diff(ce0.size());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = ce0[i] - ce1[i];
  EffectModificationTest out;
  out.lower = quantile_type7(diff, 0.025);
  out.upper = quantile_type7(diff, 0.975);
  out.contains_zero = out.lower <= 0.0 && 0.0 <= out.upper;
  return out;
}

}  // namespace subcausal
