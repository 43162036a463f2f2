#pragma once

// SMT-LIB v2 emission for quantified linear integer arithmetic and a driver
// that runs one external solver process per script.

#include "polyabs/presburger.hpp"

#include <chrono>
#include <optional>
#include <string>
#include <vector>

namespace polyabs {

struct SolverConfig {
  /// Shell command reading a script on stdin, e.g. "z3 -in -smt2".
  std::string command;
  unsigned timeout_ms = 5000;
  /// Search for a countermodel of minimal coordinate sum after `sat`.
  bool minimize = true;
  /// When set, every emitted script is also written to this directory.
  std::optional<std::string> emit_dir;
};

enum class UnknownReason { None, Timeout, SolverUnknown, ProcessError };
std::string to_string(UnknownReason r);

struct SolverVerdict {
  enum class Status { Valid, Invalid, Unknown };
  Status status = Status::Unknown;
  Assignment countermodel;  // Invalid only
  UnknownReason reason = UnknownReason::None;
  std::string detail;  // raw output for diagnostics
  std::chrono::milliseconds wall{0};

  bool valid() const { return status == Status::Valid; }
  bool invalid() const { return status == Status::Invalid; }
  bool unknown() const { return status == Status::Unknown; }
};
std::string to_string(SolverVerdict::Status s);

/// SMT-LIB symbol for a variable, quoted with |...| when needed.
std::string smt_symbol(const std::string& name);
std::string to_smtlib(const Formula& f);

/// Script asserting `assertion` with `consts` declared as naturals.
std::string emit_script(const std::vector<std::string>& consts, const Formula& assertion,
                        const std::vector<std::string>& comments = {});
/// Validity check of a closed formula: the outermost universal block is
/// declared as constants and the negated body asserted.
std::string emit_validity_script(const Formula& closed, const std::vector<std::string>& comments = {});

struct ProcessResult {
  int exit_status = -1;
  bool timed_out = false;
  bool spawn_failed = false;
  std::string output;  // stdout and stderr merged
};

/// Runs `/bin/sh -c command`, feeding `input` on stdin. The whole process
/// group is killed when the timeout expires.
ProcessResult run_process(const std::string& command, const std::string& input, unsigned timeout_ms);

struct SatResult {
  enum class Answer { Sat, Unsat, Unknown };
  Answer answer = Answer::Unknown;
  Assignment model;
  UnknownReason reason = UnknownReason::None;
  std::string output;
};

/// Runs one script. `consts` lists the constants whose model values are read.
SatResult run_script(const std::string& script, const std::vector<std::string>& consts, const SolverConfig& config,
                     const std::string& script_name = {});

/// Validity of a closed formula. `name` names emitted scripts.
SolverVerdict check_validity(const Formula& closed, const SolverConfig& config, const std::string& name = "query");

/// Satisfiability of a formula whose free variables range over naturals.
SatResult check_satisfiable(const Formula& f, const SolverConfig& config, const std::string& name = "probe");

/// Parses solver output: first answer line and integer define-fun bindings.
SatResult parse_solver_output(const std::string& output, const std::vector<std::string>& consts);

}  // namespace polyabs
