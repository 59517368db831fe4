// Command-line driver for the microgrid energy manager.
//
// Exit codes: 0 success or convergence, 1 invalid input or I/O failure,
// 2 the distributed method stopped at its iteration limit (or, for verify,
// a domination check failed).

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "mgem/report.hpp"
#include "mgem/sampling.hpp"
#include "mgem/scenario_io.hpp"

namespace fs = std::filesystem;
using namespace mgem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitMaxIters = 2;

struct Options {
  std::string scenario = "case_a";
  std::string mode = "distributed";
  std::optional<double> stepsize;
  int max_iters = 5000;
  double tol_residual = 1e-2;
  double tol_gap = 1e-2;
  double rel_tol = 1e-2;
  std::string out = "out";
  std::vector<double> ratios{0.5, 0.6, 0.7, 0.8, 0.9};
  std::uint64_t seed = 1;
  int samples = 1000;
  bool quiet = false;
};

CoordinatorParams coordinator_params(const Options& o) {
  CoordinatorParams p;
  p.stepsize = o.stepsize;
  p.max_iters = o.max_iters;
  p.tol_residual = o.tol_residual;
  p.tol_gap = o.tol_gap;
  return p;
}

template <typename Write>
void write_file(const fs::path& dir, const std::string& name, Write&& write) {
  auto f = open_output(dir, name);
  write(f);
  if (!f) throw std::runtime_error("failed writing " + (dir / name).string());
}

void write_schedule_files(const fs::path& dir, const std::string& prefix, const Scenario& s,
                          const Schedule& x, const CostBreakdown& c) {
  write_file(dir, prefix + "schedule.csv",
             [&](std::ostream& f) { write_schedule_csv(f, s, x, c.worst_total); });
  write_file(dir, prefix + "storage.csv", [&](std::ostream& f) { write_storage_csv(f, s, x); });
  write_file(dir, prefix + "class2.csv", [&](std::ostream& f) { write_class2_csv(f, s, x); });
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int cmd_run(const Options& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const Instance inst(resolve_scenario(o.scenario));
  const Scenario& s = inst.scenario;
  const fs::path dir = o.out;
  std::vector<LabeledCost> costs;
  int code = kExitOk;

  std::optional<RunResult> dist;
  if (o.mode != "centralized") {
    dist = run(inst, coordinator_params(o));
    write_schedule_files(dir, "", s, dist->average, dist->average_cost);
    write_file(dir, "iterations.csv", [&](std::ostream& f) { write_iterations_csv(f, dist->log); });
    costs.push_back({"distributed", dist->average_cost});
    costs.push_back({"recovered", dist->recovered_cost});
    if (!dist->converged) code = kExitMaxIters;
    if (!o.quiet) {
      std::printf("distributed: %s after %d iterations, stepsize %.6g\n",
                  dist->converged ? "converged" : "stopped", dist->iterations, dist->stepsize);
      std::printf("  net cost %.6f (recovered %.6f), residual %.3g, gap %.3g\n",
                  dist->average_cost.total, dist->recovered_cost.total, dist->residual, dist->gap);
    }
  }

  if (o.mode != "distributed") {
    const auto orc = centralized_solve(inst);
    const std::string prefix = dist ? "centralized_" : "";
    write_schedule_files(dir, prefix, s, orc.schedule, orc.costs);
    costs.push_back({"centralized", orc.costs});
    if (!o.quiet) std::printf("centralized: net cost %.6f\n", orc.objective);
    if (dist) {
      const auto rep = certify(inst, dist->average, orc, o.rel_tol);
      write_file(dir, "certify.csv", [&](std::ostream& f) { write_certify_csv(f, rep); });
      if (!o.quiet) {
        std::printf("certify: relative gap %.3g (%s at %.3g)\n", rep.relative_gap,
                    rep.passed ? "pass" : "fail", o.rel_tol);
      }
    }
  }

  write_file(dir, "costs.csv", [&](std::ostream& f) { write_costs_csv(f, costs); });
  if (!o.quiet) std::printf("wrote %s (%.2f s)\n", dir.string().c_str(), seconds_since(t0));
  return code;
}

int cmd_sweep(const Options& o) {
  const Scenario base = resolve_scenario(o.scenario);
  std::vector<SweepRow> rows;
  int code = kExitOk;
  for (double r : o.ratios) {
    const Instance inst(with_sell_ratio(base, r));
    CostBreakdown c;
    if (o.mode == "distributed") {
      const auto res = run(inst, coordinator_params(o));
      if (!res.converged) code = kExitMaxIters;
      c = res.average_cost;
    } else {
      c = centralized_solve(inst).costs;
    }
    if (!o.quiet) std::printf("ratio %.4g: net cost %.6f\n", r, c.total);
    rows.push_back({r, c});
  }
  write_file(o.out, "sweep.csv", [&](std::ostream& f) { write_sweep_csv(f, rows); });
  return code;
}

int cmd_vertices(const Options& o) {
  const Scenario s = resolve_scenario(o.scenario);
  require_valid(s);
  const auto set = uncertainty_vertices(s.uncertainty, s.slots());
  write_file(o.out, "vertices.csv", [&](std::ostream& f) { write_vertices_csv(f, set); });
  std::printf("%lld vertices in %zu block(s)\n", static_cast<long long>(set.vertex_count()),
              set.blocks.size());
  for (std::size_t b = 0; b < set.blocks.size(); ++b) {
    const auto& blk = set.blocks[b];
    std::printf("  block %zu: slots %d-%d, %lld vertices\n", b, blk.first_slot + 1,
                blk.last_slot + 1, static_cast<long long>(blk.vertices.points.rows()));
  }
  return kExitOk;
}

int cmd_export(const Options& o, const std::string& path) {
  const Scenario s = resolve_scenario(o.scenario);
  require_valid(s);
  if (path == "-") {
    std::cout << dump_scenario(s);
  } else {
    save_scenario(s, path);
  }
  return kExitOk;
}

// Validates the scenario, then checks that the centralized optimum is no
// worse than any randomly drawn feasible schedule.
int cmd_verify(const Options& o) {
  const Instance inst(resolve_scenario(o.scenario));
  const auto orc = centralized_solve(inst);
  Rng rng(o.seed);
  int drawn = 0;
  int beaten = 0;
  double worst_margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < o.samples; ++i) {
    const auto x = sample_schedule(inst.scenario, rng);
    if (!x) continue;
    ++drawn;
    const double cost = evaluate_net_cost(inst, *x).total;
    const double margin = cost - orc.objective;
    worst_margin = std::min(worst_margin, margin);
    if (margin < -1e-6 * std::max(1.0, std::abs(orc.objective))) ++beaten;
  }
  std::printf("scenario valid; centralized net cost %.6f\n", orc.objective);
  std::printf("%d feasible samples drawn, %d beat the optimum, smallest margin %.6g\n", drawn,
              beaten, drawn ? worst_margin : 0.0);
  return beaten == 0 ? kExitOk : kExitMaxIters;
}

void print_violations(const ValidationError& e) {
  std::fprintf(stderr, "error: invalid scenario\n");
  for (const auto& v : e.violations()) {
    std::fprintf(stderr, "  [%s] %s\n", v.code.c_str(), v.message.c_str());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Microgrid energy manager: robust dispatch by dual decomposition"};
  app.require_subcommand(1);
  Options o;
  std::string export_path = "-";

  auto scenario_opt = [&](CLI::App* sub) {
    sub->add_option("--scenario", o.scenario, "builtin name (case_a, case_b, reduced) or JSON file")
        ->envname("MGEM_SCENARIO")
        ->capture_default_str();
  };
  auto out_opt = [&](CLI::App* sub) {
    sub->add_option("--out", o.out, "output directory")->envname("MGEM_OUT")->capture_default_str();
  };
  auto solver_opts = [&](CLI::App* sub) {
    sub->add_option("--mode", o.mode, "distributed, centralized or both")
        ->envname("MGEM_MODE")
        ->check(CLI::IsMember({"distributed", "centralized", "both"}));
    sub->add_option("--stepsize", o.stepsize, "constant dual stepsize (default: normalized)")
        ->envname("MGEM_STEPSIZE")
        ->check(CLI::PositiveNumber);
    sub->add_option("--max-iters", o.max_iters, "iteration limit")
        ->envname("MGEM_MAX_ITERS")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_option("--tol-residual", o.tol_residual, "averaged residual tolerance")
        ->envname("MGEM_TOL_RESIDUAL")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    sub->add_option("--tol-gap", o.tol_gap, "relative duality gap tolerance")
        ->envname("MGEM_TOL_GAP")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    sub->add_flag("--quiet", o.quiet, "suppress the summary");
  };

  auto* run_cmd = app.add_subcommand("run", "solve a scenario and write CSV artifacts");
  scenario_opt(run_cmd);
  out_opt(run_cmd);
  solver_opts(run_cmd);
  run_cmd->add_option("--rel-tol", o.rel_tol, "certification tolerance for --mode both")
      ->envname("MGEM_REL_TOL")
      ->capture_default_str();

  auto* sweep_cmd = app.add_subcommand("sweep", "rerun with sell price = ratio * purchase price");
  scenario_opt(sweep_cmd);
  out_opt(sweep_cmd);
  solver_opts(sweep_cmd);
  sweep_cmd->add_option("--sweep-ratio", o.ratios, "comma-separated ratios in (0, 1]")
      ->envname("MGEM_SWEEP_RATIO")
      ->delimiter(',')
      ->check(CLI::Range(0.0, 1.0));

  auto* vert_cmd = app.add_subcommand("vertices", "dump the uncertainty set vertices");
  scenario_opt(vert_cmd);
  out_opt(vert_cmd);

  auto* export_cmd = app.add_subcommand("export", "write a scenario as JSON");
  scenario_opt(export_cmd);
  export_cmd->add_option("--out", export_path, "file path, or - for stdout")->capture_default_str();

  auto* verify_cmd = app.add_subcommand("verify", "validate a scenario and test optimality");
  scenario_opt(verify_cmd);
  verify_cmd->add_option("--seed", o.seed, "seed for the random feasible schedules")
      ->envname("MGEM_SEED")
      ->capture_default_str();
  verify_cmd->add_option("--samples", o.samples, "number of random schedules")
      ->envname("MGEM_SAMPLES")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitError;
  }

  // Sweeps default to the exact solver: the distributed method's residual
  // noise would hide the trend across ratios.
  if (sweep_cmd->parsed() && sweep_cmd->count("--mode") == 0 && !std::getenv("MGEM_MODE")) {
    o.mode = "centralized";
  }
  if (sweep_cmd->parsed() && o.mode == "both") {
    std::fprintf(stderr, "error: sweep takes --mode distributed or centralized\n");
    return kExitError;
  }

  try {
    if (run_cmd->parsed()) return cmd_run(o);
    if (sweep_cmd->parsed()) return cmd_sweep(o);
    if (vert_cmd->parsed()) return cmd_vertices(o);
    if (export_cmd->parsed()) return cmd_export(o, export_path);
    if (verify_cmd->parsed()) return cmd_verify(o);
  } catch (const ValidationError& e) {
    print_violations(e);
    return kExitError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitError;
  }
  return kExitError;
}
