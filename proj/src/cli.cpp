#include "subcausal/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "subcausal/em.hpp"
#include "subcausal/errors.hpp"
#include "subcausal/gibbs.hpp"
#include "subcausal/identify.hpp"
#include "subcausal/io.hpp"
#include "subcausal/simulate.hpp"
#include "subcausal/version.hpp"

namespace subcausal {

namespace {

using nlohmann::ordered_json;

std::string iso_timestamp() {
  std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

struct CommonArgs {
  std::string input;
  std::string fixture_name;
  std::string format = "auto";
  std::string mechanism;
  std::string measure = "cor";
  std::string assume = "randomized";
  std::uint64_t seed = 0;
  bool seed_set = false;
  int iters = 10000;
  int burnin = 5000;
  std::string grid = "-3:1:0.25";
  int replicates = 200;
  long n = 1000;
  std::string out;
  std::string draws_out;
  bool with_gibbs = false;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool needs_table) {
  if (needs_table) {
    cmd->add_option("--input", args.input, "table file (json or csv)");
    cmd->add_option("--fixture", args.fixture_name, "bundled data set name");
    cmd->add_option("--format", args.format, "input format: json|csv|auto");
  }
  cmd->add_option("--seed", args.seed, "random seed")->each([&](const std::string&) {
    args.seed_set = true;
  });
  cmd->add_option("--out", args.out, "write the JSON report here instead of stdout");
}

ObservedTable resolve_table(const CommonArgs& args) {
  if (!args.fixture_name.empty() && !args.input.empty())
    throw DataError("give either --input or --fixture, not both");
  if (!args.fixture_name.empty()) return fixture(args.fixture_name);
  if (!args.input.empty()) return load_table(args.input, args.format);
  throw DataError("no input table: use --input or --fixture");
}

std::uint64_t resolve_seed(const CommonArgs& args) {
  if (args.seed_set) return args.seed;
  if (const char* env = std::getenv("SUBGROUP_CAUSAL_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw DataError("SUBGROUP_CAUSAL_SEED is not an integer");
    }
  }
  return 0;
}

MechanismKind parse_mechanism(const std::string& s) {
  if (s == "1") return MechanismKind::M1;
  if (s == "2") return MechanismKind::M2;
  if (s == "3") return MechanismKind::M3;
  if (s == "4") return MechanismKind::M4;
  if (s == "5") return MechanismKind::M5;
  throw DataError("mechanism must be one of 1,2,3,4,5,x");
}

bool parse_randomized(const std::string& assume) {
  if (assume == "randomized") return true;
  if (assume == "latent") return false;
  throw DataError("--assume must be 'latent' or 'randomized'");
}

std::vector<double> parse_grid(const std::string& text) {
  double lo, hi, step;
  char c1, c2;
  std::istringstream in(text);
  if (!(in >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':' || step <= 0.0)
    throw DataError("--grid must look like lo:hi:step with positive step");
  std::vector<double> grid;
  for (double v = lo; v <= hi + 1e-12; v += step) grid.push_back(v);
  if (grid.empty()) throw DataError("empty sensitivity grid");
  return grid;
}

ordered_json condition_to_json(const ConditionReport& r) {
  ordered_json j;
  j["condition"] = r.condition;
  j["satisfied"] = r.satisfied;
  j["statistic"] = json_number(r.statistic);
  j["test_p_value"] = json_number(r.test_p_value);
  j["tolerance"] = r.tolerance;
  if (!r.odds_ratios.empty()) {
    j["odds_ratios"] = {{"missing_rows", json_number(r.odds_ratios[0])},
                        {"complete_x0", json_number(r.odds_ratios[1])},
                        {"complete_x1", json_number(r.odds_ratios[2])}};
  }
  return j;
}

ordered_json estimate_to_json(const CausalEstimate& e) {
  ordered_json j;
  j["measure"] = to_string(e.measure);
  auto ce = ordered_json::array();
  for (double v : e.ce_x) ce.push_back(json_number(v));
  j["ce_x"] = std::move(ce);
  j["ce_total"] = json_number(e.ce_total);
  j["provenance"] = e.provenance;
  return j;
}

ordered_json effects_block(const JointDistribution& joint, bool randomized,
                           const std::string& provenance) {
  ordered_json out;
  for (Measure m : {Measure::Crd, Measure::LogCrr, Measure::LogCor}) {
    auto est = effects_from_joint(joint, m,
                                  randomized ? TotalEffectAssumption::CompleteRandomization
                                             : TotalEffectAssumption::LatentIgnorable);
    est.provenance = provenance;
    out[to_string(m)] = estimate_to_json(est);
  }
  // risk ratios on the natural scale alongside the log version
  auto crr = ordered_json::array();
  for (int x = 0; x < joint.J; ++x)
    crr.push_back(json_number(joint.p_y_given_tx(1, 1, x) / joint.p_y_given_tx(1, 0, x)));
  out["crr_x"] = std::move(crr);
  return out;
}

ordered_json expert_to_json(const ExpertAssessment& a) {
  return {{"missing_skews_x0", a.missing_skews_x0},
          {"baseline_risk_monotone", a.baseline_risk_monotone},
          {"baseline_risk_in_range", a.baseline_risk_in_range},
          {"treated_risk_not_higher", a.treated_risk_not_higher}};
}

ordered_json gof_to_json(const GofResult& g) {
  return {{"loglik", json_number(g.loglik)},
          {"lr_statistic", json_number(g.lr_statistic)},
          {"df", g.df},
          {"p_value", json_number(g.p_value)},
          {"boundary", g.boundary}};
}

ordered_json em_fit_block(const ObservedTable& table, MechanismKind mech, const EmOptions& opts) {
  const EmFit fit = em_fit(table, mech, opts);
  if (!fit.converged) throw ConvergenceError("EM did not converge for " + to_string(mech));
  ordered_json j;
  j["mechanism"] = to_string(mech);
  j["loglik"] = json_number(fit.loglik);
  j["iterations"] = fit.iterations;
  j["effects"] = effects_block(fit.joint, opts.randomized, "em_" + to_string(mech));
  j["expert_assumptions"] = expert_to_json(check_expert_assumptions(fit.joint));
  j["joint"] = joint_to_json(fit.joint);
  return j;
}

void write_draws_csv(const PosteriorDraws& draws, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << "iter";
  for (const auto& n : draws.names) out << ',' << n;
  out << '\n';
  for (int i = 0; i < draws.retained(); ++i) {
    out << draws.burnin + i;
    for (const auto& colv : draws.columns) out << ',' << colv[i];
    out << '\n';
  }
}

ordered_json summary_to_json(const PosteriorSummary& s) {
  return {{"median", json_number(s.median)},
          {"q025", json_number(s.q025)},
          {"q975", json_number(s.q975)}};
}

ordered_json gibbs_block(const ObservedTable& table, MechanismKind mech, const GibbsOptions& gopts,
                         const std::string& draws_out) {
  const auto draws = gibbs_run(table, mech, gopts);
  ordered_json j;
  j["mechanism"] = to_string(mech);
  j["iterations"] = gopts.iterations;
  j["burnin"] = gopts.burnin;
  j["retained"] = draws.retained();
  ordered_json summaries;
  for (const std::string target :
       {"crr_0", "crr_1", "crd_0", "crd_1", "log_cor_0", "log_cor_1"})
    summaries[target] = summary_to_json(posterior_summary(draws, target));
  j["posterior"] = std::move(summaries);
  const auto emod = effect_modification_test(draws, Measure::LogCor);
  j["effect_modification"] = {{"target", "log_cor_0 - log_cor_1"},
                              {"lower", json_number(emod.lower)},
                              {"upper", json_number(emod.upper)},
                              {"contains_zero", emod.contains_zero}};
  if (draws.acceptance_rate >= 0.0) j["mh_acceptance_rate"] = draws.acceptance_rate;
  if (!draws.warnings.empty()) j["warnings"] = draws.warnings;
  if (!draws_out.empty()) {
    write_draws_csv(draws, draws_out);
    j["draws_file"] = draws_out;
  }
  return j;
}

ordered_json bounds_to_json(const BoundsResult& b) {
  ordered_json j;
  j["measure"] = to_string(b.measure);
  auto rows = ordered_json::array();
  for (std::size_t x = 0; x < b.lower.size(); ++x) {
    ordered_json row;
    row["x"] = static_cast<int>(x);
    row["lower"] = json_number(b.lower[x]);
    row["upper"] = json_number(b.upper[x]);
    row["infinite"] = !std::isfinite(b.lower[x]) || !std::isfinite(b.upper[x]);
    rows.push_back(std::move(row));
  }
  j["ce_x"] = std::move(rows);
  return j;
}

}  // namespace

CliResult run_command(const std::vector<std::string>& argv) {
  CLI::App app{"subgroup causal effects under nonignorable covariate missingness"};
  app.require_subcommand(1);
  CommonArgs args;

  auto* analyze = app.add_subcommand("analyze", "conditions, fits, tests and bounds in one report");
  add_common(analyze, args, true);
  analyze->add_option("--mechanism", args.mechanism, "restrict to one mechanism (1-4)");
  analyze->add_option("--assume", args.assume, "latent|randomized");
  analyze->add_option("--iters", args.iters, "posterior iterations");
  analyze->add_option("--burnin", args.burnin, "posterior burn-in");
  analyze->add_flag("--gibbs", args.with_gibbs, "include posterior sampling");
  analyze->add_option("--draws-out", args.draws_out, "export retained draws as CSV");

  auto* identify_cmd = app.add_subcommand("identify", "closed-form identification for one mechanism");
  add_common(identify_cmd, args, true);
  identify_cmd->add_option("--mechanism", args.mechanism, "1|2|3|4|x")->required();
  identify_cmd->add_option("--measure", args.measure, "crd|crr|cor");
  identify_cmd->add_option("--assume", args.assume, "latent|randomized");

  auto* gof = app.add_subcommand("gof", "likelihood-ratio goodness-of-fit test");
  add_common(gof, args, true);
  gof->add_option("--mechanism", args.mechanism, "1|2|3|4")->required();

  auto* bounds_cmd = app.add_subcommand("bounds", "assumption-free bounds on the subgroup effects");
  add_common(bounds_cmd, args, true);
  bounds_cmd->add_option("--measure", args.measure, "crd|crr|cor");

  auto* gibbs_cmd = app.add_subcommand("gibbs", "posterior sampling for one mechanism");
  add_common(gibbs_cmd, args, true);
  gibbs_cmd->add_option("--mechanism", args.mechanism, "1|2|3|4")->required();
  gibbs_cmd->add_option("--iters", args.iters, "iterations");
  gibbs_cmd->add_option("--burnin", args.burnin, "burn-in");
  gibbs_cmd->add_option("--assume", args.assume, "latent|randomized");
  gibbs_cmd->add_option("--draws-out", args.draws_out, "export retained draws as CSV");

  auto* sens = app.add_subcommand("sensitivity", "profile the fixed outcome coefficient");
  add_common(sens, args, true);
  sens->add_option("--grid", args.grid, "lo:hi:step over the outcome coefficient");
  sens->add_option("--assume", args.assume, "latent|randomized");

  auto* select_cmd = app.add_subcommand("select", "pick the best-fitting mechanism by log likelihood");
  add_common(select_cmd, args, true);
  select_cmd->add_option("--assume", args.assume, "latent|randomized");

  auto* simulate_cmd = app.add_subcommand("simulate", "replicate study for one generating mechanism");
  add_common(simulate_cmd, args, false);
  simulate_cmd->add_option("--mechanism", args.mechanism, "generating mechanism 1-5")->required();
  simulate_cmd->add_option("--n", args.n, "sample size per replicate");
  simulate_cmd->add_option("--replicates", args.replicates, "number of replicates");
  simulate_cmd->add_flag("--gibbs", args.with_gibbs, "add posterior-median estimators");
  simulate_cmd->add_option("--iters", args.iters, "posterior iterations");
  simulate_cmd->add_option("--burnin", args.burnin, "posterior burn-in");

  auto* mask = app.add_subcommand("mask", "hide a fully observed covariate and measure recovery");
  add_common(mask, args, true);
  mask->add_option("--assume", args.assume, "latent|randomized");

  std::vector<std::string> reversed(argv.rbegin(), argv.rend());
  CliResult result;
  ordered_json& report = result.report;
  report["tool"] = "subcausal";
  report["version"] = kVersion;
  report["timestamp"] = iso_timestamp();

  try {
    app.parse(reversed);

    CLI::App* sub = app.get_subcommands().front();
    const std::string command = sub->get_name();
    report["command"] = command;
    const std::uint64_t seed = resolve_seed(args);
    report["seed"] = seed;
    ordered_json opts;
    opts["mechanism"] = args.mechanism;
    opts["measure"] = args.measure;
    opts["assume"] = args.assume;
    opts["iters"] = args.iters;
    opts["burnin"] = args.burnin;
    opts["grid"] = args.grid;
    opts["replicates"] = args.replicates;
    opts["n"] = args.n;
    report["options"] = std::move(opts);

    const bool randomized = parse_randomized(args.assume);
    EmOptions em_opts;
    em_opts.randomized = randomized;
    GibbsOptions gopts;
    gopts.iterations = args.iters;
    gopts.burnin = args.burnin;
    gopts.seed = seed;
    gopts.randomized = randomized;

    ordered_json results;

    if (command == "simulate") {
      const int dgp_index = std::stoi(args.mechanism);
      StudyConfig config;
      config.dgps = {presets::study_dgp(dgp_index, args.n, seed)};
      for (MechanismKind k :
           {MechanismKind::M1, MechanismKind::M2, MechanismKind::M3, MechanismKind::M4}) {
        config.estimators.push_back({StudyEstimator::Kind::EmMle, k});
        if (args.with_gibbs) config.estimators.push_back({StudyEstimator::Kind::GibbsMedian, k});
      }
      config.estimators.push_back({StudyEstimator::Kind::Bounds, MechanismKind::M5});
      config.n = args.n;
      config.replicates = args.replicates;
      config.seed = seed;
      config.em.randomized = true;
      config.gibbs = gopts;
      config.gibbs.randomized = true;
      const auto study = replicate_study(config);
      results["truth"] = {{"log_cor_0", study.truth[0]}, {"log_cor_1", study.truth[1]}};
      auto cells = ordered_json::array();
      for (const auto& cell : study.cells) {
        ordered_json c;
        c["estimator"] = cell.estimator;
        c["replicates_used"] = cell.replicates_used;
        c["failures"] = cell.failures;
        c["bias"] = {json_number(cell.bias[0]), json_number(cell.bias[1])};
        c["mse"] = {json_number(cell.mse[0]), json_number(cell.mse[1])};
        if (cell.coverage[0] >= 0.0)
          c["coverage"] = {cell.coverage[0], cell.coverage[1]};
        if (cell.estimator == "bounds") {
          c["mean_lower"] = {json_number(cell.mean_lower[0]), json_number(cell.mean_lower[1])};
          c["mean_upper"] = {json_number(cell.mean_upper[0]), json_number(cell.mean_upper[1])};
        }
        cells.push_back(std::move(c));
      }
      results["cells"] = std::move(cells);
    } else {
      const ObservedTable table = resolve_table(args);
      report["input"] = {{"source", !args.fixture_name.empty() ? "fixture:" + args.fixture_name
                                                               : args.input},
                         {"digest", table_digest(table)},
                         {"n_total", table.total()}};

      if (command == "identify") {
        const Measure measure = measure_from_string(args.measure);
        if (args.mechanism == "x") {
          const auto mx = identify_mx(table);
          results["gamma"] = {json_number(mx.gamma[0]), json_number(mx.gamma[1])};
          results["residual_norm"] = json_number(mx.residual_norm);
          results["effects"] = effects_block(mx.joint, randomized, "identify_mx");
          results["joint"] = joint_to_json(mx.joint);
        } else {
          const MechanismKind mech = parse_mechanism(args.mechanism);
          switch (mech) {
            case MechanismKind::M1: {
              const auto joint = identify_m1(table);
              results["effects"] = effects_block(joint, randomized, "identify_m1");
              results["loglik"] = json_number(observed_loglik(table, joint));
              results["joint"] = joint_to_json(joint);
              break;
            }
            case MechanismKind::M2: {
              auto conditions = ordered_json::array();
              for (int t = 0; t < 2; ++t) conditions.push_back(condition_to_json(check_m2_rank(table, t)));
              results["conditions"] = std::move(conditions);
              const auto joint = identify_m2(table);
              results["effects"] = effects_block(joint, randomized, "identify_m2");
              results["loglik"] = json_number(observed_loglik(table, joint));
              results["joint"] = joint_to_json(joint);
              break;
            }
            case MechanismKind::M3: {
              auto conditions = ordered_json::array();
              for (int y = 0; y < table.K; ++y)
                conditions.push_back(condition_to_json(check_m3_condition(table, y)));
              results["conditions"] = std::move(conditions);
              // the subgroup log odds ratios stay identified even when the
              // full joint is incompatible with the mechanism
              const auto log_cor = identify_m3_cor(table);
              results["log_cor_x"] = {json_number(log_cor[0]), json_number(log_cor[1])};
              if (randomized) {
                const auto eff = identify_m3_ce_randomized(table, measure);
                results["ce_randomized"] = estimate_to_json(eff.estimate);
                results["p_y1_t1_x"] = {json_number(eff.p_y1_t1_x[0]), json_number(eff.p_y1_t1_x[1])};
                results["p_y1_t0_x"] = {json_number(eff.p_y1_t0_x[0]), json_number(eff.p_y1_t0_x[1])};
              }
              try {
                const auto joint = identify_m3_joint(table);
                results["effects"] = effects_block(joint, randomized, "identify_m3");
                results["joint"] = joint_to_json(joint);
              } catch (const ModelError& e) {
                results["joint_error"] = {{"code", e.code()}, {"message", e.what()}};
              }
              break;
            }
            case MechanismKind::M4: {
              results["condition"] = condition_to_json(check_m4_condition(table));
              const auto m4 = identify_m4(table);
              results["coefficients"] = {{"b0", json_number(m4.beta.b0)},
                                         {"bt", json_number(m4.beta.bt)},
                                         {"bx", json_number(m4.beta.bx)},
                                         {"by", json_number(m4.beta.by)}};
              results["effects"] = effects_block(m4.joint, randomized, "identify_m4");
              results["loglik"] = json_number(observed_loglik(table, m4.joint));
              results["joint"] = joint_to_json(m4.joint);
              break;
            }
            default:
              throw DataError("closed-form identification applies to mechanisms 1-4 and x; use "
                              "'bounds' for mechanism 5");
          }
        }
      } else if (command == "gof") {
        const MechanismKind mech = parse_mechanism(args.mechanism);
        results["gof"] = gof_to_json(lrt_gof(table, mech, em_opts));
        results["saturated_loglik"] = json_number(saturated_loglik(table));
      } else if (command == "bounds") {
        results["bounds"] = bounds_to_json(bounds_m5(table, measure_from_string(args.measure)));
      } else if (command == "gibbs") {
        results["gibbs"] = gibbs_block(table, parse_mechanism(args.mechanism), gopts, args.draws_out);
      } else if (command == "sensitivity") {
        const auto grid = parse_grid(args.grid);
        const auto curve = profile_sensitivity(table, grid, em_opts);
        auto points = ordered_json::array();
        for (const auto& pt : curve.points)
          points.push_back({{"beta_y", pt.beta_y},
                            {"log_cor_0", json_number(pt.log_cor_0)},
                            {"log_cor_1", json_number(pt.log_cor_1)},
                            {"loglik", json_number(pt.loglik)},
                            {"feasible", pt.feasible},
                            {"converged", pt.converged}});
        results["curve"] = std::move(points);
      } else if (command == "select") {
        const auto choice = select_mechanism(
            table, {MechanismKind::M1, MechanismKind::M2, MechanismKind::M3, MechanismKind::M4},
            em_opts);
        results["chosen"] = to_string(choice.chosen);
        auto lls = ordered_json::array();
        for (std::size_t i = 0; i < choice.candidates.size(); ++i)
          lls.push_back({{"mechanism", to_string(choice.candidates[i])},
                         {"loglik", json_number(choice.logliks[i])},
                         {"converged", static_cast<bool>(choice.converged[i])}});
        results["logliks"] = std::move(lls);
      } else if (command == "mask") {
        std::vector<MechanismSpec> masks;
        for (int k = 1; k <= 4; ++k) masks.push_back(presets::mask_missingness(k));
        const auto mr = mask_and_recover(
            table, masks,
            {MechanismKind::M1, MechanismKind::M2, MechanismKind::M3, MechanismKind::M4}, seed,
            em_opts);
        results["complete_p_y1_tx"] = mr.complete_p_y1_tx;
        results["estimators"] = mr.estimator_labels;
        auto rows = ordered_json::array();
        for (std::size_t i = 0; i < mr.rmse.size(); ++i) {
          ordered_json row;
          row["mask"] = mr.mask_labels[i];
          auto vals = ordered_json::array();
          for (double v : mr.rmse[i]) vals.push_back(json_number(v));
          row["rmse"] = std::move(vals);
          rows.push_back(std::move(row));
        }
        results["rmse"] = std::move(rows);
      } else if (command == "analyze") {
        const auto pop = population_log_or(table);
        results["population_log_or"] = {{"estimate", json_number(pop.estimate)},
                                        {"se", json_number(pop.se)},
                                        {"finite", pop.finite}};
        auto conditions = ordered_json::array();
        for (int t = 0; t < 2; ++t) conditions.push_back(condition_to_json(check_m2_rank(table, t)));
        for (int y = 0; y < table.K; ++y)
          conditions.push_back(condition_to_json(check_m3_condition(table, y)));
        conditions.push_back(condition_to_json(check_m4_condition(table)));
        results["conditions"] = std::move(conditions);

        std::vector<MechanismKind> mechanisms;
        if (!args.mechanism.empty())
          mechanisms = {parse_mechanism(args.mechanism)};
        else
          mechanisms = {MechanismKind::M1, MechanismKind::M2, MechanismKind::M3, MechanismKind::M4};
        auto fits = ordered_json::array();
        for (MechanismKind mech : mechanisms) {
          ordered_json block = em_fit_block(table, mech, em_opts);
          if (randomized) block["gof"] = gof_to_json(lrt_gof(table, mech, em_opts));
          fits.push_back(std::move(block));
        }
        results["fits"] = std::move(fits);
        if (mechanisms.size() > 1) {
          const auto choice = select_mechanism(table, mechanisms, em_opts);
          results["selected"] = to_string(choice.chosen);
        }
        results["bounds"] = bounds_to_json(bounds_m5(table, measure_from_string(args.measure)));
        if (args.with_gibbs) {
          const MechanismKind mech =
              mechanisms.size() == 1
                  ? mechanisms.front()
                  : parse_mechanism(results["selected"].get<std::string>().substr(1));
          results["gibbs"] = gibbs_block(table, mech, gopts, args.draws_out);
        }
      }
    }
    report["results"] = std::move(results);
  } catch (const CLI::CallForHelp&) {
    report["help"] = app.help();
    return result;
  } catch (const CLI::ParseError& e) {
    report["error"] = {{"type", "usage"}, {"message", e.what()}};
    result.exit_code = 2;
    return result;
  } catch (const DataError& e) {
    report["error"] = {{"type", "data"}, {"message", e.what()}};
    result.exit_code = 2;
    return result;
  } catch (const ModelError& e) {
    report["error"] = {{"type", "model"}, {"code", e.code()}, {"message", e.what()}};
    result.exit_code = 3;
    return result;
  } catch (const ConvergenceError& e) {
    report["error"] = {{"type", "convergence"}, {"message", e.what()}};
    result.exit_code = 4;
    return result;
  } catch (const std::exception& e) {
    report["error"] = {{"type", "internal"}, {"message", e.what()}};
    result.exit_code = 1;
    return result;
  }

  if (!args.out.empty()) {
    std::ofstream out(args.out);
    if (!out) {
      report["error"] = {{"type", "data"}, {"message", "cannot write " + args.out}};
      result.exit_code = 2;
      return result;
    }
    out << report.dump(2) << '\n';
    result.report["written_to"] = args.out;
  }
  return result;
}

int cli_main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  const CliResult result = run_command(args);
  std::cout << result.report.dump(2) << std::endl;
  return result.exit_code;
}

}  // namespace subcausal
