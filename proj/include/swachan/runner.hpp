#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "swachan/config.hpp"

namespace swa {

struct RunResult {
  std::vector<std::filesystem::path> files;
  bool verify_ok = true;
  std::int64_t extrapolated_evaluations = 0;
  std::vector<std::string> notes;
};

/// Dense static channel between the configured endpoints: emits the CFR table
/// (freq_hz, re, im) and the CIR table (lag_s, amplitude).
RunResult run_static(const RunConfig& cfg);

/// Type II grids of the moving-Rx and moving-Tx cases over the configured
/// distance sweep. The moving-Tx grid doubles as the type I grid of the
/// moving-Rx case, which the file header records.
RunResult run_fig3(const RunConfig& cfg);

/// LTI traces of the static and co-moving cases; records their agreement with
/// the n = 0 rows of the corresponding fig3 grids. verify_ok reflects it.
RunResult run_fig4(const RunConfig& cfg);

/// Filter a waveform through the configured case with the selected structure.
RunResult run_filter(const RunConfig& cfg, const std::filesystem::path& input,
                     const std::filesystem::path& output, CirKind structure,
                     std::optional<double> input_fs = {});

/// Delay reports plus measured first-arrival residuals for the configured
/// sweep; verify_ok is false when any residual exceeds one sample period.
RunResult run_analyze(const RunConfig& cfg);

}  // namespace swa
