// Command-line front end: `polyabs check <ruledir> [options]`.

#include "polyabs/check.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

#ifndef POLYABS_SOLVER_CMD
#define POLYABS_SOLVER_CMD "z3 -in -smt2"
#endif

int main(int argc, char** argv) {
  CLI::App app{"Prove or refute parametric polyhedral abstractions between Petri nets"};
  app.require_subcommand(1);

  auto* check = app.add_subcommand("check", "Check a reduction rule directory");
  std::string ruledir;
  std::string solver_cmd = POLYABS_SOLVER_CMD;
  unsigned timeout_ms = 5000;
  std::string cert1, cert2, emit_dir;
  std::size_t max_seq_len = 4, max_iters = 16;
  polyabs::Tokens oracle_bound = 0;
  std::size_t oracle_depth = 12;
  bool json = false;
  std::string tau_star = "auto";
  unsigned jobs = 4;

  check->add_option("ruledir", ruledir, "Directory with initial.net, reduced.net and rule.eq")
      ->required()
      ->check(CLI::ExistingDirectory);
  check->add_option("--solver-cmd", solver_cmd, "Solver command reading SMT-LIB on stdin")->capture_default_str();
  check->add_option("--timeout-ms", timeout_ms, "Per-query solver timeout")->capture_default_str();
  check->add_option("--cert1", cert1, "Flat certificate for the initial net")->check(CLI::ExistingFile);
  check->add_option("--cert2", cert2, "Flat certificate for the reduced net")->check(CLI::ExistingFile);
  check->add_option("--accel-max-seq-len", max_seq_len, "Longest silent sequence tried by the search")
      ->capture_default_str();
  check->add_option("--accel-max-iters", max_iters, "Search iterations before giving up")->capture_default_str();
  auto* oracle_opt =
      check->add_option("--oracle", oracle_bound, "Cross-check with the explicit-state oracle up to N tokens");
  check->add_option("--oracle-depth", oracle_depth, "Observable word length for the oracle")->capture_default_str();
  check->add_option("--emit-smt", emit_dir, "Write every solver script into this directory");
  check->add_flag("--json", json, "Print the verdict as JSON");
  check->add_option("--tau-star", tau_star, "Form of tau* used by the core queries")
      ->check(CLI::IsMember({"auto", "certificate", "derived"}))
      ->capture_default_str();
  check->add_option("--jobs", jobs, "Concurrent solver processes")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 3;
  }

  try {
    polyabs::ReductionRule rule = polyabs::load_rule(ruledir);
    polyabs::CheckOptions opts;
    opts.solver.command = solver_cmd;
    opts.solver.timeout_ms = timeout_ms;
    if (!emit_dir.empty()) {
      std::filesystem::create_directories(emit_dir);
      opts.solver.emit_dir = emit_dir;
    }
    opts.accel.max_seq_len = max_seq_len;
    opts.accel.max_iters = max_iters;
    opts.accel.probe_timeout_ms = timeout_ms;
    if (!cert1.empty()) opts.cert1 = cert1;
    if (!cert2.empty()) opts.cert2 = cert2;
    opts.tau_star = tau_star == "certificate" ? polyabs::TauStarMode::Certificate
                    : tau_star == "derived"   ? polyabs::TauStarMode::Derived
                                              : polyabs::TauStarMode::Auto;
    opts.jobs = jobs;
    if (*oracle_opt) opts.oracle = polyabs::Bound{oracle_bound, oracle_depth};

    polyabs::Verdict v = polyabs::check_rule(rule, opts);
    std::cout << (json ? polyabs::report_json(v, rule) : polyabs::report_human(v, rule));
    return polyabs::exit_code(v);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
