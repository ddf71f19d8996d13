#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "swachan/scenarios.hpp"

namespace swa {

enum class OutputFormat { Text, Binary };

/// Flat run configuration. Every field maps one-to-one onto a config-file key
/// of the same name; CLI overrides use the same names.
struct RunConfig {
  // waveguide
  double depth_w = 18.0;
  double sound_speed_c = 1500.0;
  double bottom_speed_cb = 1300.0;
  double bottom_density_rho_b = 1800.0;
  double water_density_rho = 1000.0;
  double spreading_exponent_k = 1.5;
  std::int64_t max_reflections_pmax = 10;

  // case
  std::string case_kind = "moving_rx";
  double d0 = 100.0;
  double v = 51.2;
  double transceiver_height = 12.0;

  // sampling and frequency grid
  double f_max = 128000.0;
  std::int64_t n_bins = 131073;  // 2^17 + 1 -> 2^18-tap CIR
  double fs = 256000.0;

  // synthesis
  double cache_quantum_m = 0.01;
  std::int64_t kernel_halfwidth = 16;
  double ref_freq = 0.0;              // 0 = band midpoint
  double truncation_floor_db = 60.0;

  // grids
  std::int64_t n_stride = 0;          // 0 = derive from row_spacing_m
  double row_spacing_m = 0.01;        // relative displacement per emitted row
  double sweep_distance_m = 1.0;      // d sweeps d0 .. d0 + sweep
  double lag_min_s = -1.0;            // < 0 = auto window
  double lag_max_s = -1.0;
  std::int64_t duration_samples = 0;  // 0 = auto from sweep

  // measurement
  double arrival_threshold_db = 20.0;

  // execution and output
  std::int64_t threads = 0;           // 0 = hardware
  std::string out_dir = ".";
  std::string format = "text";        // text | binary

  Waveguide waveguide() const;
  CaseSpec case_spec() const;
  OutputFormat output_format() const;
  SynthParams synth_params() const;

  /// Throws ConfigError when any field violates its module invariant.
  void validate() const;
};

/// Key-by-key parse of "key = value" lines; '#' starts a comment.
/// Unknown keys or unparseable values throw ConfigError.
RunConfig load_config(const std::filesystem::path& path);

/// Apply one "key=value" override in place.
void apply_override(RunConfig& cfg, const std::string& key, const std::string& value);

/// Sorted key=value rendering; equal configs render identically.
std::string canonical_config(const RunConfig& cfg);

/// FNV-1a over canonical_config; stamped into every output header.
std::uint64_t config_hash(const RunConfig& cfg);

}  // namespace swa
