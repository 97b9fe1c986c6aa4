#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "subcausal/em.hpp"
#include "subcausal/errors.hpp"
#include "subcausal/gibbs.hpp"
#include "subcausal/identify.hpp"
#include "subcausal/io.hpp"
#include "subcausal/measures.hpp"
#include "subcausal/simulate.hpp"
#include "subcausal/version.hpp"

namespace py = pybind11;
using namespace subcausal;

namespace {

MechanismKind kind_from_int(int k) {
  switch (k) {
    case 1: return MechanismKind::M1;
    case 2: return MechanismKind::M2;
    case 3: return MechanismKind::M3;
    case 4: return MechanismKind::M4;
    case 5: return MechanismKind::M5;
    default: throw DataError("mechanism index must be 1..5");
  }
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "subgroup causal effects with a nonignorably missing binary covariate";
  m.attr("__version__") = kVersion;

  py::register_exception<DataError>(m, "DataError");
  py::register_exception<ModelError>(m, "ModelError");
  py::register_exception<ConvergenceError>(m, "ConvergenceError");

  py::class_<ObservedTable>(m, "ObservedTable")
      .def(py::init<int, int>(), py::arg("J") = 2, py::arg("K") = 2)
      .def_readonly("J", &ObservedTable::J)
      .def_readonly("K", &ObservedTable::K)
      .def("obs", [](const ObservedTable& t, int tt, int x, int y) { return t.obs(tt, x, y); })
      .def("set_obs", [](ObservedTable& t, int tt, int x, int y, double v) { t.obs(tt, x, y) = v; })
      .def("mis", [](const ObservedTable& t, int tt, int y) { return t.mis(tt, y); })
      .def("set_mis", [](ObservedTable& t, int tt, int y, double v) { t.mis(tt, y) = v; })
      .def("total", &ObservedTable::total)
      .def("arm_total", &ObservedTable::arm_total)
      .def("validate", &ObservedTable::validate)
      .def("__repr__", [](const ObservedTable& t) {
        return "<ObservedTable J=" + std::to_string(t.J) + " K=" + std::to_string(t.K) +
               " n=" + std::to_string(t.total()) + ">";
      });

  py::class_<JointDistribution>(m, "JointDistribution")
      .def_readonly("J", &JointDistribution::J)
      .def_readonly("K", &JointDistribution::K)
      .def("cell", [](const JointDistribution& j, int t, int x, int y, int mm) {
        return j.cell(t, x, y, mm);
      })
      .def("p_y_given_tx", &JointDistribution::p_y_given_tx, py::arg("y"), py::arg("t"), py::arg("x"))
      .def("p_m1_given_txy", &JointDistribution::p_m1_given_txy)
      .def("sum", &JointDistribution::sum)
      .def("expected_counts", &JointDistribution::expected_counts, py::arg("n"));

  py::class_<MechanismSpec>(m, "MechanismSpec")
      .def_static("m1", [](std::vector<double> p) { return MechanismSpec::m1(std::move(p)); })
      .def_static("m2", [](std::vector<double> p) { return MechanismSpec::m2(std::move(p)); })
      .def_static("m3", [](std::vector<double> p) { return MechanismSpec::m3(std::move(p)); })
      .def_static("m4",
                  [](double b0, double bt, double bx, double by) {
                    return MechanismSpec::m4({b0, bt, bx, by});
                  })
      .def_static("m5_logit",
                  [](std::vector<double> b) {
                    if (b.size() != 8) throw DataError("need 8 coefficients");
                    return MechanismSpec::m5_logit({b[0], b[1], b[2], b[3], b[4], b[5], b[6], b[7]});
                  })
      .def("miss_prob", &MechanismSpec::miss_prob);

  py::class_<EmFit>(m, "EmFit")
      .def_readonly("joint", &EmFit::joint)
      .def_readonly("loglik", &EmFit::loglik)
      .def_readonly("iterations", &EmFit::iterations)
      .def_readonly("converged", &EmFit::converged)
      .def_readonly("loglik_trace", &EmFit::loglik_trace);

  py::class_<GofResult>(m, "GofResult")
      .def_readonly("loglik", &GofResult::loglik)
      .def_readonly("lr_statistic", &GofResult::lr_statistic)
      .def_readonly("df", &GofResult::df)
      .def_readonly("p_value", &GofResult::p_value)
      .def_readonly("boundary", &GofResult::boundary);

  py::class_<ConditionReport>(m, "ConditionReport")
      .def_readonly("condition", &ConditionReport::condition)
      .def_readonly("satisfied", &ConditionReport::satisfied)
      .def_readonly("statistic", &ConditionReport::statistic)
      .def_readonly("test_p_value", &ConditionReport::test_p_value);

  py::class_<BoundsResult>(m, "BoundsResult")
      .def_readonly("lower", &BoundsResult::lower)
      .def_readonly("upper", &BoundsResult::upper);

  py::class_<PosteriorDraws>(m, "PosteriorDraws")
      .def_readonly("names", &PosteriorDraws::names)
      .def_readonly("acceptance_rate", &PosteriorDraws::acceptance_rate)
      .def("retained", &PosteriorDraws::retained)
      .def("col", &PosteriorDraws::col, py::return_value_policy::reference_internal);

  py::class_<PosteriorSummary>(m, "PosteriorSummary")
      .def_readonly("median", &PosteriorSummary::median)
      .def_readonly("q025", &PosteriorSummary::q025)
      .def_readonly("q975", &PosteriorSummary::q975);

  py::class_<CausalEstimate>(m, "CausalEstimate")
      .def_readonly("ce_x", &CausalEstimate::ce_x)
      .def_readonly("ce_total", &CausalEstimate::ce_total);

  m.def("fixture", &fixture, py::arg("name"));
  m.def("load_table", &load_table, py::arg("path"), py::arg("format") = "auto");
  m.def("ingest_json", &ingest_json);
  m.def("ingest_csv", &ingest_csv);

  m.def("observed_loglik", &observed_loglik);
  m.def("saturated_loglik", &saturated_loglik);
  m.def("population_log_or", [](const ObservedTable& t) {
    const auto r = population_log_or(t);
    return py::make_tuple(r.estimate, r.se, r.finite);
  });

  m.def("eval_measure", [](const std::string& measure, double p1, double p0) {
    return eval_measure(measure_from_string(measure), p1, p0);
  });
  m.def(
      "effects_from_joint",
      [](const JointDistribution& joint, const std::string& measure, bool randomized) {
        return effects_from_joint(joint, measure_from_string(measure),
                                  randomized ? TotalEffectAssumption::CompleteRandomization
                                             : TotalEffectAssumption::LatentIgnorable);
      },
      py::arg("joint"), py::arg("measure") = "cor", py::arg("randomized") = true);

  m.def("check_m2_rank", &check_m2_rank, py::arg("table"), py::arg("t"), py::arg("tol") = 1e-8);
  m.def("check_m3_condition", &check_m3_condition, py::arg("table"), py::arg("y"),
        py::arg("tol") = 1e-8);
  m.def("check_m4_condition", &check_m4_condition, py::arg("table"), py::arg("tol") = 1e-12);
  m.def("identify_m1", &identify_m1);
  m.def("identify_m2", &identify_m2);
  m.def("identify_m3_cor", &identify_m3_cor);
  m.def("identify_m3_joint", &identify_m3_joint);
  m.def("identify_m4", [](const ObservedTable& t) {
    const auto r = identify_m4(t);
    return py::make_tuple(r.joint, py::make_tuple(r.beta.b0, r.beta.bt, r.beta.bx, r.beta.by));
  });
  m.def("identify_mx", [](const ObservedTable& t) {
    const auto r = identify_mx(t);
    return py::make_tuple(r.joint, r.gamma, r.residual_norm);
  });
  m.def(
      "bounds_m5",
      [](const ObservedTable& t, const std::string& measure) {
        return bounds_m5(t, measure_from_string(measure));
      },
      py::arg("table"), py::arg("measure") = "cor");

  m.def(
      "em_fit",
      [](const ObservedTable& table, int mechanism, bool randomized, int max_iter, double tol) {
        EmOptions opts;
        opts.randomized = randomized;
        opts.max_iter = max_iter;
        opts.loglik_tolerance = tol;
        return em_fit(table, kind_from_int(mechanism), opts);
      },
      py::arg("table"), py::arg("mechanism"), py::arg("randomized") = false,
      py::arg("max_iter") = 5000, py::arg("tol") = 1e-10);
  m.def(
      "lrt_gof",
      [](const ObservedTable& table, int mechanism) {
        return lrt_gof(table, kind_from_int(mechanism));
      },
      py::arg("table"), py::arg("mechanism"));
  m.def("check_expert_assumptions", [](const JointDistribution& joint) {
    const auto a = check_expert_assumptions(joint);
    return py::make_tuple(a.missing_skews_x0, a.baseline_risk_monotone, a.baseline_risk_in_range,
                          a.treated_risk_not_higher);
  });
  m.def(
      "select_mechanism",
      [](const ObservedTable& table, bool randomized) {
        EmOptions opts;
        opts.randomized = randomized;
        const auto choice = select_mechanism(
            table, {MechanismKind::M1, MechanismKind::M2, MechanismKind::M3, MechanismKind::M4},
            opts);
        int chosen = 0;
        switch (choice.chosen) {
          case MechanismKind::M1: chosen = 1; break;
          case MechanismKind::M2: chosen = 2; break;
          case MechanismKind::M3: chosen = 3; break;
          case MechanismKind::M4: chosen = 4; break;
          default: break;
        }
        return py::make_tuple(chosen, choice.logliks);
      },
      py::arg("table"), py::arg("randomized") = true);
  m.def(
      "profile_sensitivity",
      [](const ObservedTable& table, const std::vector<double>& grid, bool randomized) {
        EmOptions opts;
        opts.randomized = randomized;
        const auto curve = profile_sensitivity(table, grid, opts);
        py::list out;
        for (const auto& pt : curve.points)
          out.append(py::dict(py::arg("beta_y") = pt.beta_y, py::arg("log_cor_0") = pt.log_cor_0,
                              py::arg("log_cor_1") = pt.log_cor_1, py::arg("loglik") = pt.loglik,
                              py::arg("feasible") = pt.feasible,
                              py::arg("converged") = pt.converged));
        return out;
      },
      py::arg("table"), py::arg("grid"), py::arg("randomized") = true);

  m.def(
      "gibbs_run",
      [](const ObservedTable& table, int mechanism, int iterations, int burnin, std::uint64_t seed,
         bool randomized, double prior_a, double prior_b) {
        GibbsOptions opts;
        opts.iterations = iterations;
        opts.burnin = burnin;
        opts.seed = seed;
        opts.randomized = randomized;
        opts.prior = {prior_a, prior_b};
        return gibbs_run(table, kind_from_int(mechanism), opts);
      },
      py::arg("table"), py::arg("mechanism"), py::arg("iterations") = 10000,
      py::arg("burnin") = 5000, py::arg("seed") = 0, py::arg("randomized") = true,
      py::arg("prior_a") = 0.5, py::arg("prior_b") = 0.5);
  m.def("posterior_summary", &posterior_summary, py::arg("draws"), py::arg("target"));
  m.def(
      "effect_modification_test",
      [](const PosteriorDraws& draws, const std::string& measure) {
        const auto r = effect_modification_test(draws, measure_from_string(measure));
        return py::make_tuple(r.lower, r.upper, r.contains_zero);
      },
      py::arg("draws"), py::arg("measure") = "cor");

  m.def(
      "generate_dataset",
      [](int mechanism, long n, std::uint64_t seed) {
        return generate_dataset(presets::study_dgp(mechanism, n, seed));
      },
      py::arg("mechanism"), py::arg("n"), py::arg("seed"));
  m.def(
      "generate_custom",
      [](double p_treat, double p_x1, std::vector<double> p_y1_tx, const MechanismSpec& miss,
         long n, std::uint64_t seed) {
        DgpSpec spec;
        spec.p_treat = p_treat;
        spec.p_x1 = p_x1;
        spec.p_y1_tx = std::move(p_y1_tx);
        spec.missingness = miss;
        spec.n = n;
        spec.seed = seed;
        return generate_dataset(spec);
      },
      py::arg("p_treat"), py::arg("p_x1"), py::arg("p_y1_tx"), py::arg("missingness"),
      py::arg("n"), py::arg("seed"));
  m.def(
      "mask_and_recover",
      [](const ObservedTable& complete, std::uint64_t seed, bool randomized) {
        std::vector<MechanismSpec> masks;
        for (int k = 1; k <= 4; ++k) masks.push_back(presets::mask_missingness(k));
        EmOptions opts;
        opts.randomized = randomized;
        const auto r = mask_and_recover(
            complete, masks,
            {MechanismKind::M1, MechanismKind::M2, MechanismKind::M3, MechanismKind::M4}, seed,
            opts);
        return py::make_tuple(r.mask_labels, r.estimator_labels, r.rmse);
      },
      py::arg("complete"), py::arg("seed"), py::arg("randomized") = false);
}
