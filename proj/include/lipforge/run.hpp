#pragma once

#include "lipforge/baseline.hpp"
#include "lipforge/config.hpp"
#include "lipforge/construct.hpp"
#include "lipforge/verify.hpp"

#include <optional>
#include <string>
#include <vector>

namespace lipforge {

struct RunOptions {
  bool slow = false;                     // enables the i >= 10 suites
  std::optional<std::pair<int, int>> export_lattice;  // NxM field export
  int threads = 1;
};

struct RunArtifacts {
  int exit_code = 0;
  std::string error;  // set when a stage aborted
  std::vector<Certificate> certificates;
  std::optional<IterationResult> iter;
  std::optional<CompareReport> baseline;
};

/// Full pipeline: precondition check, iterate, verification suite, optional
/// baseline contrast. Certificates accumulate even on abort (partial report).
RunArtifacts execute_run(const RunConfig& cfg, const RunOptions& opt);

/// Writes config, ledger, bump stack (hexfloat, bit-exact reload),
/// certificates.csv, and optional field exports into cfg.out_dir.
void save_run(const RunConfig& cfg, const RunArtifacts& art, const RunOptions& opt);

struct LoadedRun {
  RunConfig cfg;
  BumpStack u;
  SegmentLedger ledger;
};

/// Reloads a saved run directory; the stack evaluates bit-identically.
LoadedRun load_run(const std::string& dir);

/// Re-runs the verification suite on a loaded run.
std::vector<Certificate> verify_run(const LoadedRun& run, bool slow);

/// CSV report: header plus one certificate per row
/// (name, scale, bound, measured, pass, witness coordinates).
std::string certificates_csv(const std::vector<Certificate>& certs);

}  // namespace lipforge
