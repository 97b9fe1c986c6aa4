#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "subcausal/errors.hpp"
#include "subcausal/gibbs.hpp"
#include "subcausal/io.hpp"
#include "subcausal/simulate.hpp"
#include "subcausal/stats.hpp"

using namespace subcausal;

TEST_SUITE("gibbs") {
  TEST_CASE("same seed, same chain, bit for bit") {
    const auto table = fixture("icd_trial");
    GibbsOptions opts;
    opts.iterations = 600;
    opts.burnin = 100;
    opts.seed = 42;
    opts.randomized = true;
    const auto a = gibbs_run(table, MechanismKind::M2, opts);
    const auto b = gibbs_run(table, MechanismKind::M2, opts);
    REQUIRE(a.names == b.names);
    for (std::size_t i = 0; i < a.columns.size(); ++i)
      for (std::size_t k = 0; k < a.columns[i].size(); ++k)
        CHECK(a.columns[i][k] == b.columns[i][k]);
    opts.seed = 43;
    const auto c = gibbs_run(table, MechanismKind::M2, opts);
    CHECK(a.col("log_cor_1")[0] != c.col("log_cor_1")[0]);
  }

  TEST_CASE("no latent data reduces to exact Beta conjugacy") {
    // without missing rows the outcome factors have closed-form posteriors
    ObservedTable t(2, 2);
    t.obs(0, 0, 0) = 40;
    t.obs(0, 0, 1) = 12;
    t.obs(0, 1, 0) = 22;
    t.obs(0, 1, 1) = 18;
    t.obs(1, 0, 0) = 35;
    t.obs(1, 0, 1) = 25;
    t.obs(1, 1, 0) = 16;
    t.obs(1, 1, 1) = 24;
    GibbsOptions opts;
    opts.iterations = 22000;
    opts.burnin = 2000;
    opts.seed = 9;
    const auto draws = gibbs_run(t, MechanismKind::M1, opts);
    for (int tt = 0; tt < 2; ++tt)
      for (int x = 0; x < 2; ++x) {
        const double a = 0.5 + t.obs(tt, x, 1);
        const double b = 0.5 + t.obs(tt, x, 0);
        const auto s = posterior_summary(
            draws, "p_y1_t" + std::to_string(tt) + "_x" + std::to_string(x));
        CHECK(std::fabs(s.median - oracle::beta_quantile(a, b, 0.5)) < 0.01);
        CHECK(std::fabs(s.q025 - oracle::beta_quantile(a, b, 0.025)) < 0.015);
        CHECK(std::fabs(s.q975 - oracle::beta_quantile(a, b, 0.975)) < 0.015);
      }
  }

  TEST_CASE("every retained draw defines a valid mechanism-shaped joint") {
    const auto table = fixture("icd_trial");
    GibbsOptions opts;
    opts.iterations = 300;
    opts.burnin = 50;
    opts.seed = 3;
    const auto draws = gibbs_run(table, MechanismKind::M2, opts);
    // a (T,X) mechanism never stores per-y missingness; the columns exist per (t,x)
    CHECK(draws.has("p_m1_t0_x0"));
    CHECK(draws.has("p_m1_t1_x1"));
    CHECK_FALSE(draws.has("p_m1_t0_y0"));
    for (const auto& name : draws.names)
      for (double v : draws.col(name))
        if (name.rfind("p_", 0) == 0) {
          CHECK(v >= 0.0);
          CHECK(v <= 1.0);
        }
  }

  TEST_CASE("posterior for the trial under the (T,X) mechanism") {
    const auto table = fixture("icd_trial");
    GibbsOptions opts;
    opts.seed = 1;
    opts.randomized = true;
    const auto draws = gibbs_run(table, MechanismKind::M2, opts);
    const auto crr1 = posterior_summary(draws, "crr_1");
    CHECK(std::fabs(crr1.median - 0.303) < 0.08);
    const auto crr0 = posterior_summary(draws, "crr_0");
    CHECK(crr0.q975 > 50.0);  // heavy upper tail
    const auto emod = effect_modification_test(draws, Measure::LogCor);
    CHECK(emod.contains_zero);
  }

  TEST_CASE("integer counts are required") {
    ObservedTable t(2, 2);
    t.obs(0, 0, 0) = 1.5;
    t.obs(1, 0, 0) = 3;
    CHECK_THROWS_AS(gibbs_run(t, MechanismKind::M1, {}), DataError);
  }

  TEST_CASE("posterior summaries of degenerate and arithmetic sequences") {
    PosteriorDraws d;
    d.names = {"c", "k"};
    d.columns = {std::vector<double>(200, 3.25), {}};
    for (int i = 1; i <= 200; ++i) d.columns[1].push_back(i);
    const auto s = posterior_summary(d, "c");
    CHECK(s.median == doctest::Approx(3.25));
    CHECK(s.q025 == doctest::Approx(3.25));
    CHECK(s.q975 == doctest::Approx(3.25));
    CHECK(posterior_summary(d, "k").median == doctest::Approx(100.5));
    PosteriorDraws tiny;
    tiny.names = {"v"};
    tiny.columns = {std::vector<double>(5, 1.0)};
    CHECK_THROWS_AS(posterior_summary(tiny, "v"), DataError);
  }

  TEST_CASE("quantile interpolation follows the type-7 rule") {
    std::vector<double> v;
    for (int i = 1; i <= 1000; ++i) v.push_back(i);
    CHECK(quantile_type7(v, 0.5) == doctest::Approx(500.5));
    CHECK(quantile_type7(v, 0.025) == doctest::Approx(1.0 + 0.025 * 999.0));
  }

  TEST_CASE("interval signs cohere between risk-ratio and odds-ratio scales") {
    const auto table = fixture("icd_trial");
    GibbsOptions opts;
    opts.seed = 12;
    opts.randomized = true;
    opts.iterations = 4000;
    opts.burnin = 1000;
    const auto draws = gibbs_run(table, MechanismKind::M2, opts);
    const auto crr1 = posterior_summary(draws, "crr_1");
    const auto cor1 = posterior_summary(draws, "log_cor_1");
    // CRR_1 interval spanning 1 exactly when the log COR interval spans 0
    CHECK(((crr1.q025 < 1.0 && 1.0 < crr1.q975) == (cor1.q025 < 0.0 && 0.0 < cor1.q975)));
  }

  TEST_CASE("metropolis step behaves on trial-scale data") {
    const auto table = fixture("icd_trial");
    GibbsOptions opts;
    opts.seed = 5;
    opts.randomized = true;
    opts.iterations = 3000;
    opts.burnin = 1500;
    const auto draws = gibbs_run(table, MechanismKind::M4, opts);
    CHECK(draws.acceptance_rate > 0.05);
    CHECK(draws.acceptance_rate < 0.9);
    CHECK(draws.warnings.empty());
  }

  TEST_CASE("no effect modification when the outcome rows are equal") {
    DgpSpec spec;
    spec.p_y1_tx = {0.3, 0.3, 0.55, 0.55};  // CE_0 = CE_1 by construction
    spec.missingness = presets::study_missingness(2);
    spec.n = 1500;
    int contains = 0;
    GibbsOptions opts;
    opts.iterations = 3000;
    opts.burnin = 1000;
    opts.randomized = true;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      spec.seed = 100 + seed;
      const auto table = generate_dataset(spec);
      opts.seed = seed;
      const auto draws = gibbs_run(table, MechanismKind::M2, opts);
      contains += effect_modification_test(draws, Measure::LogCor).contains_zero;
    }
    CHECK(contains >= 9);
  }

  TEST_CASE("a wide true gap is detected at scale") {
    // CE_0 - CE_1 = 3.62 under the study outcome table
    DgpSpec spec = presets::study_dgp(2, 5000, 7);
    const auto table = generate_dataset(spec);
    GibbsOptions opts;
    opts.iterations = 4000;
    opts.burnin = 1000;
    opts.seed = 77;
    opts.randomized = true;
    const auto draws = gibbs_run(table, MechanismKind::M2, opts);
    const auto emod = effect_modification_test(draws, Measure::LogCor);
    CHECK_FALSE(emod.contains_zero);
    CHECK(emod.lower > 0.0);
  }
}
