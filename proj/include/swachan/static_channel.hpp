#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <shared_mutex>
#include <unordered_map>
#include <vector>

#include "swachan/geometry.hpp"

namespace swa {

/// Equispaced one-sided frequency axis from DC to f_max inclusive.
struct FrequencyGrid {
  double f_max = 0.0;  // Hz, band edge
  int n_bins = 0;      // bins at 0, spacing, ..., f_max

  double spacing() const { return f_max / (n_bins - 1); }
  double freq(int i) const { return f_max * i / (n_bins - 1); }

  void validate() const;
};

/// One-sided channel frequency response between two fixed points.
struct StaticCfr {
  FrequencyGrid grid;
  std::vector<std::complex<double>> values;
  Position tx, rx;
};

/// Real passband impulse response sampled at 2 * f_max.
struct StaticCir {
  double sample_rate_fs = 0.0;
  std::vector<double> taps;  // lag 0 at index 0
};

/// One retained eigenpath plus its gain at the synthesis reference frequency.
/// The full frequency-dependent gain curve stays recoverable from the path
/// via path_gain().
struct PathTap {
  Eigenpath path;
  double gain_ref = 0.0;
};

/// Band-limited sparse representation of a static CIR: each retained path is
/// a windowed-sinc fractional-delay kernel scaled by gain_ref.
struct SparseTapList {
  std::vector<PathTap> taps;
  double sample_rate_fs = 0.0;
  double ref_freq_hz = 0.0;
  int kernel_halfwidth = 0;
};

/// Seawater absorption, Thorp form. Throws std::domain_error for f < 0.
double absorption_db_per_km(double f_hz);

/// Linear power attenuation factor per meter implied by absorption_db_per_km.
double absorption_per_meter(double f_hz);

/// Ideal pressure-release surface.
inline constexpr double surface_reflection = -1.0;

/// Rayleigh two-fluid bottom coefficient at the given grazing angle.
/// Returns magnitude 1 past the critical angle. Grazing must lie in
/// (0, pi/2]; anything else throws std::domain_error.
double bottom_reflection(const Waveguide& wg, double grazing_rad);

/// cum_reflection / sqrt(A(l, f)) with A(l, f) = l^k * a(f)^l.
double path_gain(const Waveguide& wg, const Eigenpath& path, double f_hz);

/// Coherent sum of per-path responses over the frequency grid.
StaticCfr cfr_from_paths(const Waveguide& wg, const std::vector<Eigenpath>& paths,
                         const FrequencyGrid& grid, Position tx = {}, Position rx = {});

StaticCfr static_cfr(const Waveguide& wg, const Position& tx, const Position& rx,
                     const FrequencyGrid& grid);

/// Copy of the CFR with the DC and band-edge bins forced real, i.e. the
/// one-sided form whose Hermitian extension is a valid real-signal spectrum.
StaticCfr hermitian_symmetrized(const StaticCfr& cfr);

/// Inverse discrete Fourier transform of the Hermitian-extended CFR.
/// Output has 2*(n_bins-1) real taps at sample rate 2*f_max.
StaticCir static_cir(const StaticCfr& cfr);

/// Forward transform of a real CIR back to one-sided bins (taps.size()/2 + 1);
/// recovers hermitian_symmetrized(cfr) from static_cir(cfr) up to rounding.
std::vector<std::complex<double>> cfr_of_cir(const StaticCir& cir);

/// Windowed-sinc fractional-delay kernel, Hann window, zero for |x| >= halfwidth.
double frac_delay_kernel(double x, int halfwidth);

/// Sparse band-limited CIR between two fixed points. Paths whose reference
/// gain falls more than floor_db below the strongest are dropped.
/// ref_freq_hz = 0 selects the band midpoint fs/4. kernel_halfwidth < 1
/// throws ConfigError.
SparseTapList sparse_cir(const Waveguide& wg, const Position& tx, const Position& rx,
                         double fs, int kernel_halfwidth, double ref_freq_hz = 0.0,
                         double floor_db = 60.0);

/// Summed tap amplitude at an arbitrary (possibly fractional) lag.
double synthesize(const SparseTapList& taps, double lag);

/// Synthesis knobs shared by the cache and the LTV evaluators.
struct SynthParams {
  int kernel_halfwidth = 16;
  double ref_freq_hz = 0.0;          // 0 = band midpoint fs/4
  double truncation_floor_db = 60.0; // path retention floor, dB below peak
  double cache_quantum_m = 0.01;     // distance quantization
};

/// Distance-keyed cache of sparse static responses for one pair of transceiver
/// heights. The retained path set is frozen at a reference distance so every
/// entry carries the same paths in the same order. Safe for concurrent
/// readers; concurrent misses may compute twice but insert identical values.
class ChannelCache {
 public:
  ChannelCache(const Waveguide& wg, double tx_height, double rx_height, double fs,
               double reference_distance_m, const SynthParams& params);

  /// Response at the quantized distance; computed on first use.
  std::shared_ptr<const SparseTapList> at_distance(double d) const;

  double quantize(double d) const;
  const std::vector<std::pair<int, int>>& retained_paths() const { return path_ids_; }
  const SynthParams& params() const { return params_; }
  double sample_rate() const { return fs_; }

  /// Vertical travel of each retained path (distance-independent), delay
  /// order at the reference distance; max_vertical() is their maximum.
  const std::vector<double>& path_verticals() const { return path_verticals_; }
  double max_vertical() const { return max_vertical_; }

 private:
  SparseTapList build(double d) const;

  Waveguide wg_;
  double tx_height_, rx_height_, fs_;
  SynthParams params_;
  double ref_freq_;
  std::vector<std::pair<int, int>> path_ids_;  // (n_surface, n_bottom), delay order at d_ref
  std::vector<double> path_verticals_;
  double max_vertical_ = 0.0;
  mutable std::shared_mutex mutex_;
  mutable std::unordered_map<std::int64_t, std::shared_ptr<const SparseTapList>> entries_;
};

}  // namespace swa
