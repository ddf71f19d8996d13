#pragma once

#include <cstdint>
#include <vector>

namespace swa {

/// Two-dimensional shallow-water waveguide: flat seabed at height 0, flat
/// pressure-release surface at height depth_w, homogeneous water column.
struct Waveguide {
  double depth_w;                      // total water column, m
  double sound_speed_c;                // m/s, water
  double bottom_speed_cb;              // m/s, sediment
  double bottom_density_rho_b;         // kg/m^3
  double water_density_rho = 1000.0;   // kg/m^3
  double spreading_exponent_k = 1.5;   // practical spreading
  int max_reflections_pmax = 10;       // per-boundary reflection cap

  /// Throws std::invalid_argument on non-physical parameters.
  void validate() const;
};

/// A point in the waveguide plane. Heights are measured above the seabed.
struct Position {
  double x = 0.0;                    // m, horizontal
  double height_above_bottom = 0.0;  // m
};

/// Straight-line horizontal motion sampled at a fixed rate.
struct Trajectory {
  Position start;
  double velocity_x = 0.0;        // m/s, signed along x
  double sample_period_ts = 0.0;  // s
  std::int64_t duration_samples = 0;

  /// Position at sample n; throws std::out_of_range outside [0, duration].
  Position at(std::int64_t n) const;

  /// Linear extrapolation, no range check. Used where channel evaluation
  /// needs positions before sample 0 or past the nominal duration.
  Position extrapolated(double n) const {
    return {start.x + velocity_x * n * sample_period_ts, start.height_above_bottom};
  }
};

/// One geometric ray between two points via alternating boundary bounces.
struct Eigenpath {
  int n_surface = 0;             // surface reflection count
  int n_bottom = 0;              // bottom reflection count
  double length_m = 0.0;         // unfolded ray length
  double delay_s = 0.0;          // length_m / sound_speed_c
  double grazing_rad = 0.0;      // angle between ray and horizontal
  double cum_reflection = 1.0;   // (-1)^n_surface * gamma_b(theta)^n_bottom
};

Position position_at(const Trajectory& traj, std::int64_t n);

/// All eigenpaths with n_surface <= pmax and n_bottom <= pmax, sorted by
/// ascending delay. Lengths come from mirror-image unfolding of the
/// waveguide; the direct path is always included.
/// Throws std::domain_error when the horizontal separation is zero and
/// std::invalid_argument when heights leave the water column.
std::vector<Eigenpath> enumerate_eigenpaths(const Waveguide& wg, const Position& tx,
                                            const Position& rx);

}  // namespace swa
