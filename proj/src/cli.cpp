#include "lll/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "lll/errors.hpp"
#include "lll/fixer.hpp"
#include "lll/generators.hpp"
#include "lll/json_io.hpp"
#include "lll/local_sim.hpp"
#include "lll/log.hpp"
#include "lll/prob_engine.hpp"
#include "lll/representable.hpp"

namespace lll {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

void emit(const ordered_json& j) { std::cout << j.dump() << "\n"; }

FixOptions options_from(const RunConfig& cfg) {
  FixOptions opts;
  if (cfg.check == "every-step") {
    opts.check = CheckLevel::every_step;
  } else if (cfg.check == "sampled") {
    opts.check = CheckLevel::sampled;
  } else {
    fail(ErrorKind::UsageError, "unknown check level",
         {{"check", cfg.check}, {"expected", {"every-step", "sampled"}}});
  }
  return opts;
}

void write_common_artifacts(const LllInstance& inst,
                            const PartialAssignment& assignment,
                            const FixTrace& trace, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  save_assignment(inst, assignment, (fs::path(out_dir) / "assignment.json").string());
  save_trace(inst, trace, (fs::path(out_dir) / "trace.jsonl").string());
}

int run_any_mode(const RunConfig& cfg, const char* verb) {
  LllInstance inst = load_instance(cfg.instance_path);
  FixOptions opts = options_from(cfg);
  log_info("loaded %s: %zu events, %zu variables, dependency degree %d",
           cfg.instance_path.c_str(), inst.events.size(),
           inst.variables.size(), inst.dep.max_degree);

  ordered_json summary;
  if (cfg.mode == "sequential") {
    std::optional<OrderPolicy> policy = order_policy_from(cfg.order);
    if (!policy) {
      fail(ErrorKind::UsageError, "unknown order policy",
           {{"order", cfg.order},
            {"expected",
             {"declaration", "reverse", "seeded-shuffle", "adaptive-adversary"}}});
    }
    RunResult res = run_sequential(inst, *policy, cfg.seed, opts);
    log_info("fixed %zu variables (%zu invariant audits, %zu identity audits)",
             res.trace.steps.size(), res.pstar_checks, res.identity_checks);
    if (!cfg.out_dir.empty()) {
      write_common_artifacts(inst, res.assignment, res.trace, cfg.out_dir);
    }
    summary[verb] = {{"status", "ok"},
                     {"mode", cfg.mode},
                     {"order", cfg.order},
                     {"seed", cfg.seed},
                     {"steps", res.trace.steps.size()},
                     {"pstar_checks", res.pstar_checks},
                     {"identity_checks", res.identity_checks}};
  } else if (cfg.mode == "parallel-r2" || cfg.mode == "parallel-r3") {
    ParallelResult res = cfg.mode == "parallel-r2" ? run_parallel_r2(inst, opts)
                                                   : run_parallel_r3(inst, opts);
    for (const RoundRecord& r : res.log.rounds) {
      log_debug("round %d (color %d): %zu nodes, %zu variables", r.round,
                r.color, r.nodes.size(), r.vars.size());
    }
    log_info("%zu rounds over a %d-color schedule, %zu variables fixed",
             res.log.rounds.size(), res.log.palette, res.trace.steps.size());
    if (!cfg.out_dir.empty()) {
      write_common_artifacts(inst, res.assignment, res.trace, cfg.out_dir);
      namespace fs = std::filesystem;
      save_round_log(inst, res.log,
                     (fs::path(cfg.out_dir) / "rounds.jsonl").string());
    }
    summary[verb] = {{"status", "ok"},
                     {"mode", cfg.mode},
                     {"rounds", res.log.rounds.size()},
                     {"palette", res.log.palette},
                     {"steps", res.trace.steps.size()},
                     {"coloring", res.log.coloring_note}};
  } else {
    fail(ErrorKind::UsageError, "unknown mode",
         {{"mode", cfg.mode},
          {"expected", {"sequential", "parallel-r2", "parallel-r3"}}});
  }
  emit(summary);
  return 0;
}

// Verification never calls the fixing engine: it re-derives everything from
// the instance, the probability engine, and the artifact being checked.

int verify_assignment_file(const LllInstance& inst, const std::string& path) {
  auto pairs = load_assignment(inst, path);
  PartialAssignment pa(static_cast<int>(inst.variables.size()));
  for (const auto& [var, value] : pairs) pa.assign(var, value);

  ordered_json problems = ordered_json::array();
  if (!pa.complete()) {
    ordered_json missing = ordered_json::array();
    for (std::size_t x = 0; x < inst.variables.size(); ++x) {
      if (!pa.assigned(static_cast<int>(x))) missing.push_back(inst.variables[x].id);
    }
    problems.push_back({{"problem", "assignment incomplete"},
                        {"unassigned", std::move(missing)}});
  } else {
    std::vector<int> values(inst.variables.size());
    for (std::size_t x = 0; x < inst.variables.size(); ++x) {
      values[x] = pa.value(static_cast<int>(x));
    }
    for (std::size_t t = 0; t < inst.events.size(); ++t) {
      if (event_occurs_on(inst, static_cast<int>(t), values)) {
        problems.push_back({{"problem", "event occurs"},
                            {"event", inst.events[t].id}});
      }
    }
  }

  if (!problems.empty()) {
    emit(ordered_json{{"verify", {{"status", "failed"},
                                  {"kind", "assignment"},
                                  {"violations", std::move(problems)}}}});
    return 1;
  }
  emit(ordered_json{{"verify", {{"status", "ok"},
                                {"kind", "assignment"},
                                {"events_checked", inst.events.size()}}}});
  return 0;
}

int verify_trace_file(const LllInstance& inst, const std::string& path) {
  FixTrace trace = load_trace(inst, path);
  ProbEngine prob(inst);
  PartialAssignment pa(static_cast<int>(inst.variables.size()));
  // Independent potential ledger: per edge, one value per endpoint, all 1.
  std::vector<std::array<Rat, 2>> side(inst.dep.edges.size(), {Rat(1), Rat(1)});
  auto side_of = [&](int edge, int node) -> Rat& {
    return side[edge][inst.dep.edges[edge].first == node ? 0 : 1];
  };

  ordered_json problems = ordered_json::array();
  auto flag = [&](int step, const char* what, ordered_json detail) {
    detail["step"] = step;
    detail["problem"] = what;
    problems.push_back(std::move(detail));
  };

  for (std::size_t k = 0; k < trace.steps.size() && problems.empty(); ++k) {
    const TraceStep& s = trace.steps[k];
    int step = static_cast<int>(k);
    if (pa.assigned(s.var)) {
      flag(step, "variable fixed twice", {{"var", inst.variables[s.var].id}});
      break;
    }
    // The recorded ratios must cover exactly the affected events and match
    // an independent recomputation.
    const auto& affected = inst.hyper.events_of_var[s.var];
    if (s.inc.size() != affected.size()) {
      flag(step, "ratio list does not match the affected events",
           {{"var", inst.variables[s.var].id}});
      break;
    }
    for (std::size_t i = 0; i < affected.size(); ++i) {
      if (s.inc[i].first != affected[i]) {
        flag(step, "ratio list does not match the affected events",
             {{"var", inst.variables[s.var].id}});
        break;
      }
      Rat expect = prob.inc(affected[i], pa, s.var, s.value);
      if (expect != s.inc[i].second) {
        flag(step, "recorded ratio differs from recomputation",
             {{"event", inst.events[affected[i]].id},
              {"recorded", rat_str(s.inc[i].second)},
              {"recomputed", rat_str(expect)}});
        break;
      }
    }
    if (!problems.empty()) break;
    for (const LedgerWrite& w : s.writes) {
      if (side_of(w.edge, w.node) != w.before) {
        flag(step, "write's before-value differs from the running ledger",
             {{"node", inst.events[w.node].id},
              {"recorded", rat_str(w.before)},
              {"actual", rat_str(side_of(w.edge, w.node))}});
        break;
      }
      if (w.after < 0 || w.after > 2) {
        flag(step, "ledger value outside [0,2]",
             {{"node", inst.events[w.node].id}, {"value", rat_str(w.after)}});
        break;
      }
      side_of(w.edge, w.node) = w.after;
    }
    if (!problems.empty()) break;
    pa.assign(s.var, s.value);

    for (std::size_t e = 0; e < side.size() && problems.empty(); ++e) {
      if (side[e][0] + side[e][1] > 2) {
        flag(step, "edge sides sum above 2",
             {{"edge",
               {inst.events[inst.dep.edges[e].first].id,
                inst.events[inst.dep.edges[e].second].id}},
              {"sum", rat_str(side[e][0] + side[e][1])}});
      }
    }
    for (std::size_t t = 0; t < inst.events.size() && problems.empty(); ++t) {
      Rat budget = inst.event_prob[t];
      for (const auto& [nbr, e] : inst.dep.adj[t]) {
        (void)nbr;
        budget *= side_of(static_cast<int>(e), static_cast<int>(t));
      }
      Rat cond = prob.cond_prob(static_cast<int>(t), pa);
      if (cond > budget) {
        flag(step, "running invariant violated",
             {{"event", inst.events[t].id},
              {"conditional", rat_str(cond)},
              {"budget", rat_str(budget)}});
      }
    }
  }

  if (problems.empty() && !pa.complete()) {
    ordered_json missing = ordered_json::array();
    for (std::size_t x = 0; x < inst.variables.size(); ++x) {
      if (!pa.assigned(static_cast<int>(x))) missing.push_back(inst.variables[x].id);
    }
    problems.push_back({{"problem", "trace leaves variables unfixed"},
                        {"unassigned", std::move(missing)}});
  }
  if (problems.empty()) {
    std::vector<int> values(inst.variables.size());
    for (std::size_t x = 0; x < inst.variables.size(); ++x) {
      values[x] = pa.value(static_cast<int>(x));
    }
    for (std::size_t t = 0; t < inst.events.size(); ++t) {
      if (event_occurs_on(inst, static_cast<int>(t), values)) {
        problems.push_back({{"problem", "event occurs"},
                            {"event", inst.events[t].id}});
      }
    }
  }

  if (!problems.empty()) {
    emit(ordered_json{{"verify", {{"status", "failed"},
                                  {"kind", "trace"},
                                  {"violations", std::move(problems)}}}});
    return 1;
  }
  emit(ordered_json{{"verify", {{"status", "ok"},
                                {"kind", "trace"},
                                {"steps_checked", trace.steps.size()},
                                {"events_checked", inst.events.size()}}}});
  return 0;
}

}  // namespace

int cmd_run(const RunConfig& cfg) { return run_any_mode(cfg, "run"); }

int cmd_simulate(const RunConfig& cfg) {
  if (cfg.mode != "parallel-r2" && cfg.mode != "parallel-r3") {
    fail(ErrorKind::UsageError, "simulate needs a parallel mode",
         {{"mode", cfg.mode}, {"expected", {"parallel-r2", "parallel-r3"}}});
  }
  return run_any_mode(cfg, "simulate");
}

int cmd_verify(const std::string& instance_path,
               const std::string& assignment_path,
               const std::string& trace_path) {
  if (assignment_path.empty() == trace_path.empty()) {
    fail(ErrorKind::UsageError,
         "verify needs exactly one of --assignment or --trace", {});
  }
  LllInstance inst = load_instance(instance_path);
  return assignment_path.empty() ? verify_trace_file(inst, trace_path)
                                 : verify_assignment_file(inst, assignment_path);
}

int cmd_gen(const GenConfig& cfg) {
  require(!cfg.out_path.empty(), ErrorKind::UsageError,
          "gen needs an output path (-o)");
  LllInstance inst = [&] {
    if (cfg.family == "hyper-orient") {
      auto edges = cfg.dense ? cyclic_triple_system_dense(cfg.nodes)
                             : cyclic_triple_system(cfg.nodes);
      return gen_hypergraph_orientation(cfg.nodes, edges, cfg.seed);
    }
    if (cfg.family == "weak-split") {
      return gen_weak_splitting_relaxed(cfg.v_count, cfg.u_count, cfg.v_degree,
                                        cfg.colors, cfg.coverage, cfg.seed);
    }
    if (cfg.family == "random-r3") {
      return gen_random_rank3(cfg.events, cfg.d_max, cfg.domain, cfg.seed);
    }
    if (cfg.family == "random-r2") {
      return gen_random_rank2(cfg.events, cfg.d_max, cfg.domain, cfg.seed);
    }
    fail(ErrorKind::UsageError, "unknown family",
         {{"family", cfg.family},
          {"expected",
           {"hyper-orient", "weak-split", "random-r3", "random-r2"}}});
  }();

  save_instance(inst, cfg.out_path);
  Rat max_p(0);
  for (const Rat& p : inst.event_prob) max_p = std::max(max_p, p);
  emit(ordered_json{
      {"gen",
       {{"family", cfg.family},
        {"seed", cfg.seed},
        {"path", cfg.out_path},
        {"variables", inst.variables.size()},
        {"events", inst.events.size()},
        {"dependency_degree", inst.dep.max_degree},
        {"max_event_prob", rat_str(max_p)}}}});
  return 0;
}

int cmd_certify(int grid, int samples, std::uint64_t seed) {
  require(samples > 0, ErrorKind::UsageError, "--samples must be positive");
  require(grid >= 2, ErrorKind::UsageError, "--grid must be at least 2");

  CertReport cert = convexity_certificate(grid, 1e-6);
  IncurvedReport inc = incurvedness_spotcheck(samples, seed);

  ordered_json failures = ordered_json::array();
  for (std::size_t i = 0; i < cert.failures.size() && i < 10; ++i) {
    const CertFailure& f = cert.failures[i];
    failures.push_back({{"a", f.a},
                        {"b", f.b},
                        {"what", f.what},
                        {"closed_form", f.closed_form},
                        {"estimate", f.estimate}});
  }
  for (std::size_t i = 0; i < inc.violations.size() && i < 10; ++i) {
    const IncurvedViolation& v = inc.violations[i];
    failures.push_back(
        {{"what", "segment left the region"},
         {"s", {rat_str(v.s.a), rat_str(v.s.b), rat_str(v.s.c)}},
         {"s_prime", {rat_str(v.s_prime.a), rat_str(v.s_prime.b), rat_str(v.s_prime.c)}},
         {"q", rat_str(v.q)}});
  }

  bool ok = cert.passed() && inc.passed();
  emit(ordered_json{{"certify",
                     {{"status", ok ? "ok" : "failed"},
                      {"grid", cert.grid_n},
                      {"tolerance", cert.tol},
                      {"points_checked", cert.points_checked},
                      {"convexity_failures", cert.failures.size()},
                      {"segment_samples", inc.samples},
                      {"q_points", inc.q_points},
                      {"segment_violations", inc.violations.size()},
                      {"failures", std::move(failures)}}}});
  return ok ? 0 : 1;
}

int cmd_srep_mesh(const std::string& step, const std::string& out_path) {
  require(!out_path.empty(), ErrorKind::UsageError,
          "mesh needs an output path (-o)");
  Rat s = rat_parse(step);
  std::ostringstream mesh;
  write_surface_mesh(mesh, s);
  std::string text = mesh.str();
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) {
    fail(ErrorKind::ParseError, "cannot open file for writing",
         {{"path", out_path}});
  }
  out << text;
  out.flush();
  require(out.good(), ErrorKind::ParseError, "write failed");
  std::size_t rows = 0;
  for (char c : text) rows += c == '\n' ? 1 : 0;
  emit(ordered_json{{"mesh",
                     {{"path", out_path},
                      {"step", rat_str(s)},
                      {"rows", rows > 0 ? rows - 1 : 0}}}});
  return 0;
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"deterministic fixer for low-rank constraint instances"};
  app.require_subcommand(1);

  RunConfig run_cfg;
  auto* run = app.add_subcommand("run", "fix an instance and write artifacts");
  run->add_option("--instance", run_cfg.instance_path, "instance JSON file")
      ->required();
  run->add_option("--mode", run_cfg.mode,
                  "sequential | parallel-r2 | parallel-r3");
  run->add_option("--order", run_cfg.order,
                  "declaration | reverse | seeded-shuffle | adaptive-adversary");
  run->add_option("--seed", run_cfg.seed, "seed for seeded-shuffle");
  run->add_option("--check", run_cfg.check, "every-step | sampled");
  run->add_option("-o,--out", run_cfg.out_dir, "artifact directory");

  std::string v_instance, v_assignment, v_trace;
  auto* verify = app.add_subcommand("verify", "independently check artifacts");
  verify->add_option("--instance", v_instance, "instance JSON file")->required();
  verify->add_option("--assignment", v_assignment, "assignment file to check");
  verify->add_option("--trace", v_trace, "trace file to replay");

  GenConfig gen_cfg;
  auto* gen = app.add_subcommand("gen", "generate a benchmark instance");
  gen->add_option("--family", gen_cfg.family,
                  "hyper-orient | weak-split | random-r3 | random-r2")
      ->required();
  gen->add_option("--seed", gen_cfg.seed, "generator seed");
  gen->add_option("-o,--out", gen_cfg.out_path, "output instance file")
      ->required();
  gen->add_option("--nodes", gen_cfg.nodes, "hyper-orient: ring size");
  gen->add_flag("--dense", gen_cfg.dense, "hyper-orient: add the overlap edge");
  gen->add_option("--v-count", gen_cfg.v_count, "weak-split: left nodes");
  gen->add_option("--u-count", gen_cfg.u_count, "weak-split: right nodes");
  gen->add_option("--v-degree", gen_cfg.v_degree, "weak-split: left degree");
  gen->add_option("--colors", gen_cfg.colors, "weak-split: palette size");
  gen->add_option("--coverage", gen_cfg.coverage,
                  "weak-split: distinct colors required");
  gen->add_option("--events", gen_cfg.events, "random families: event count");
  gen->add_option("--d-max", gen_cfg.d_max, "random families: degree cap");
  gen->add_option("--domain", gen_cfg.domain, "random families: domain size");

  RunConfig sim_cfg;
  sim_cfg.mode = "parallel-r3";
  auto* simulate =
      app.add_subcommand("simulate", "run the round-based parallel schedule");
  simulate->add_option("--instance", sim_cfg.instance_path, "instance JSON file")
      ->required();
  simulate->add_option("--mode", sim_cfg.mode, "parallel-r2 | parallel-r3");
  simulate->add_option("--check", sim_cfg.check, "every-step | sampled");
  simulate->add_option("-o,--out", sim_cfg.out_dir, "artifact directory");

  int grid = 50;
  int samples = 10000;
  std::uint64_t cert_seed = 42;
  auto* certify =
      app.add_subcommand("certify", "run the surface shape certificates");
  certify->add_option("--grid", grid, "interior grid resolution");
  certify->add_option("--samples", samples, "segment spot-check count");
  certify->add_option("--seed", cert_seed, "spot-check seed");

  auto* srep = app.add_subcommand("srep", "surface utilities");
  srep->require_subcommand(1);
  std::string mesh_step = "1/10";
  std::string mesh_out;
  auto* mesh = srep->add_subcommand("mesh", "emit a CSV mesh of the surface");
  mesh->add_option("--step", mesh_step, "grid step as num/den");
  mesh->add_option("-o,--out", mesh_out, "output CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    Error err(ErrorKind::UsageError, e.what(), {{"exit_name", e.get_name()}});
    std::cout << err.record().dump() << "\n";
    std::cerr << e.what() << "\n";
    return 2;
  }

  try {
    if (app.got_subcommand(run)) return cmd_run(run_cfg);
    if (app.got_subcommand(verify)) {
      return cmd_verify(v_instance, v_assignment, v_trace);
    }
    if (app.got_subcommand(gen)) return cmd_gen(gen_cfg);
    if (app.got_subcommand(simulate)) return cmd_simulate(sim_cfg);
    if (app.got_subcommand(certify)) return cmd_certify(grid, samples, cert_seed);
    if (app.got_subcommand(srep)) return cmd_srep_mesh(mesh_step, mesh_out);
    fail(ErrorKind::Internal, "no subcommand dispatched");
  } catch (const Error& err) {
    std::cout << err.record().dump() << "\n";
    std::cerr << err.what() << "\n";
    return exit_code_for(err.kind());
  } catch (const std::exception& e) {
    Error err(ErrorKind::Internal, e.what(), {});
    std::cout << err.record().dump() << "\n";
    std::cerr << e.what() << "\n";
    return 3;
  }
  return 0;
}

}  // namespace lll
