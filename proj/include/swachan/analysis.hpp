#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "swachan/ltv.hpp"
#include "swachan/scenarios.hpp"

namespace swa {

/// Closed-form predictions for one case at separation d.
struct DelayReport {
  CaseKind kind = CaseKind::Static;
  double d = 0.0;                        // m
  double los_delay_s = 0.0;              // first-arrival prediction
  double time_shift_vs_moving_tx_s = 0.0;  // d v / (c (c - v))
  double doppler_factor = 1.0;           // received-over-emitted frequency
};

/// First-arrival delay: d/c when the transmitter sets the geometry
/// (MovingTx, Static), d/(c-v) when the receiver runs from the wavefront
/// (MovingRx, CoMoving). Throws UnsupportedRegimeError for v >= c.
double los_delay(CaseKind kind, double d, double c, double v);

/// Arrival-time shift of the moving-Rx case relative to the moving-Tx case.
double time_shift(double d, double v, double c);

/// f0 * (c - v_rx) / (c + v_tx); velocities positive when moving apart.
double doppler_frequency(double f0, double v_tx_away, double v_rx_away, double c);

DelayReport make_delay_report(CaseKind kind, double d, double c, double v);

/// One detected arrival cluster in a CIR row.
struct Arrival {
  double time_s = 0.0;          // interpolated cluster peak
  double peak_amplitude = 0.0;  // signed: carries the reflection polarity
};

/// Arrival clusters above threshold_db below the row peak. A cluster is
/// located by its leading-edge threshold crossing and timed at the
/// parabola-interpolated local maximum that follows (the raw crossing leads
/// the true delay by the kernel skirt). min_separation bridges the sub-sample
/// dips between kernel side lobes; it must stay below the sample spacing of
/// physically distinct arrivals or they merge into one cluster.
std::vector<Arrival> detect_arrivals(std::span<const double> row, double fs,
                                     std::int64_t lag_offset, double threshold_db = 20.0,
                                     std::int64_t min_separation = 8);

/// Time of the first arrival; throws std::runtime_error on an empty or
/// all-zero row.
double first_arrival_time(std::span<const double> row, double fs, std::int64_t lag_offset,
                          double threshold_db = 20.0);

struct GridCheck {
  bool pass = false;
  std::size_t row_index = 0;
  double row_distance_m = 0.0;
  double measured_s = 0.0;
  double predicted_s = 0.0;
  double residual_s = 0.0;
};

/// First-arrival residuals for every row against los_delay(kind, d_row, c, v).
std::vector<GridCheck> verify_grid_rows(const LtvCirGrid& grid, CaseKind kind, double c,
                                        double v, double tol_s, double threshold_db = 20.0);

/// Check of the single row whose distance matches report.d.
GridCheck verify_grid(const LtvCirGrid& grid, const DelayReport& report, double tol_s,
                      double threshold_db = 20.0);

/// Mean rate from linearly interpolated zero crossings of a real tone,
/// skipping skip_head/skip_tail samples of transient.
double zero_crossing_frequency(std::span<const double> samples, double fs,
                               std::size_t skip_head = 0, std::size_t skip_tail = 0);

}  // namespace swa
