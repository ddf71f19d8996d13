#include "swachan/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace swa {

namespace {

void check_speed(double v, double c) {
  if (!(c > 0.0)) throw std::invalid_argument("analysis: sound speed must be > 0");
  if (v < 0.0) throw std::invalid_argument("analysis: v must be >= 0");
  if (v >= c) throw UnsupportedRegimeError("analysis: v must stay below the sound speed");
}

}  // namespace

double los_delay(CaseKind kind, double d, double c, double v) {
  check_speed(v, c);
  if (!(d > 0.0)) throw std::invalid_argument("analysis: distance must be > 0");
  switch (kind) {
    case CaseKind::MovingTx:
    case CaseKind::Static:
      return d / c;
    case CaseKind::MovingRx:
    case CaseKind::CoMoving:
      return d / (c - v);
  }
  throw std::invalid_argument("los_delay: bad CaseKind");
}

double time_shift(double d, double v, double c) {
  check_speed(v, c);
  if (!(d > 0.0)) throw std::invalid_argument("analysis: distance must be > 0");
  return d * v / (c * (c - v));
}

double doppler_frequency(double f0, double v_tx_away, double v_rx_away, double c) {
  if (!(c > 0.0)) throw std::invalid_argument("analysis: sound speed must be > 0");
  if (std::abs(v_tx_away) >= c || std::abs(v_rx_away) >= c)
    throw UnsupportedRegimeError("analysis: speeds must stay below the sound speed");
  return f0 * (c - v_rx_away) / (c + v_tx_away);
}

DelayReport make_delay_report(CaseKind kind, double d, double c, double v) {
  DelayReport r;
  r.kind = kind;
  r.d = d;
  r.los_delay_s = los_delay(kind, d, c, v);
  r.time_shift_vs_moving_tx_s = time_shift(d, v, c);
  switch (kind) {
    case CaseKind::MovingRx: r.doppler_factor = doppler_frequency(1.0, 0.0, v, c); break;
    case CaseKind::MovingTx: r.doppler_factor = doppler_frequency(1.0, v, 0.0, c); break;
    case CaseKind::Static: r.doppler_factor = 1.0; break;
    case CaseKind::CoMoving: r.doppler_factor = doppler_frequency(1.0, -v, v, c); break;
  }
  return r;
}

std::vector<Arrival> detect_arrivals(std::span<const double> row, double fs,
                                     std::int64_t lag_offset, double threshold_db,
                                     std::int64_t min_separation) {
  if (!(fs > 0.0)) throw std::invalid_argument("detect_arrivals: fs must be > 0");
  if (threshold_db <= 0.0)
    throw std::invalid_argument("detect_arrivals: threshold_db must be > 0");

  const auto n = static_cast<std::int64_t>(row.size());
  double peak = 0.0;
  for (double s : row) peak = std::max(peak, std::abs(s));
  if (peak == 0.0) return {};
  const double threshold = peak * std::pow(10.0, -threshold_db / 20.0);

  std::vector<Arrival> arrivals;
  std::int64_t i = 0;
  while (i < n) {
    if (std::abs(row[static_cast<std::size_t>(i)]) < threshold) {
      ++i;
      continue;
    }
    // Cluster: extend while above-threshold samples keep arriving within
    // min_separation of the last one; the raw crossing at i leads the true
    // delay by the kernel skirt, so the arrival is timed at the cluster peak.
    std::int64_t last_above = i;
    std::int64_t best = i;
    std::int64_t j = i;
    while (j < n && j - last_above <= min_separation) {
      const double a = std::abs(row[static_cast<std::size_t>(j)]);
      if (a >= threshold) {
        last_above = j;
        if (a > std::abs(row[static_cast<std::size_t>(best)])) best = j;
      }
      ++j;
    }

    double delta = 0.0;
    if (best > 0 && best < n - 1) {
      // Fit sign-normalized samples, not magnitudes: folding the kernel's
      // negative first side lobe upward drags the vertex toward the grid
      // point and doubles the timing bias.
      const double s = row[static_cast<std::size_t>(best)] < 0.0 ? -1.0 : 1.0;
      const double y0 = s * row[static_cast<std::size_t>(best - 1)];
      const double y1 = s * row[static_cast<std::size_t>(best)];
      const double y2 = s * row[static_cast<std::size_t>(best + 1)];
      const double denom = y0 - 2.0 * y1 + y2;
      if (denom < 0.0) delta = std::clamp(0.5 * (y0 - y2) / denom, -0.5, 0.5);
    }
    arrivals.push_back({(static_cast<double>(lag_offset + best) + delta) / fs,
                        row[static_cast<std::size_t>(best)]});
    i = j;
  }
  return arrivals;
}

double first_arrival_time(std::span<const double> row, double fs, std::int64_t lag_offset,
                          double threshold_db) {
  const auto arrivals = detect_arrivals(row, fs, lag_offset, threshold_db);
  if (arrivals.empty()) throw std::runtime_error("first_arrival_time: no arrival in row");
  return arrivals.front().time_s;
}

std::vector<GridCheck> verify_grid_rows(const LtvCirGrid& grid, CaseKind kind, double c,
                                        double v, double tol_s, double threshold_db) {
  std::vector<GridCheck> checks;
  checks.reserve(grid.rows.size());
  for (std::size_t i = 0; i < grid.rows.size(); ++i) {
    GridCheck chk;
    chk.row_index = i;
    chk.row_distance_m = grid.row_distance_m[i];
    chk.measured_s =
        first_arrival_time(grid.rows[i], grid.fs, grid.lag_offset, threshold_db);
    chk.predicted_s = los_delay(kind, chk.row_distance_m, c, v);
    chk.residual_s = chk.measured_s - chk.predicted_s;
    chk.pass = std::abs(chk.residual_s) <= tol_s;
    checks.push_back(chk);
  }
  return checks;
}

GridCheck verify_grid(const LtvCirGrid& grid, const DelayReport& report, double tol_s,
                      double threshold_db) {
  if (grid.rows.empty()) throw std::runtime_error("verify_grid: empty grid");

  std::size_t best = 0;
  double best_diff = std::abs(grid.row_distance_m[0] - report.d);
  for (std::size_t i = 1; i < grid.row_distance_m.size(); ++i) {
    const double diff = std::abs(grid.row_distance_m[i] - report.d);
    if (diff < best_diff) {
      best_diff = diff;
      best = i;
    }
  }
  double spacing = 0.0;
  for (std::size_t i = 1; i < grid.row_distance_m.size(); ++i)
    spacing = std::max(spacing, std::abs(grid.row_distance_m[i] - grid.row_distance_m[i - 1]));
  const double coverage = std::max(spacing / 2.0, 1e-6 * std::max(1.0, report.d));
  if (best_diff > coverage)
    throw std::runtime_error("verify_grid: no row near distance " + std::to_string(report.d));

  GridCheck chk;
  chk.row_index = best;
  chk.row_distance_m = grid.row_distance_m[best];
  chk.measured_s =
      first_arrival_time(grid.rows[best], grid.fs, grid.lag_offset, threshold_db);
  chk.predicted_s = report.los_delay_s;
  chk.residual_s = chk.measured_s - chk.predicted_s;
  chk.pass = std::abs(chk.residual_s) <= tol_s;
  return chk;
}

double zero_crossing_frequency(std::span<const double> samples, double fs,
                               std::size_t skip_head, std::size_t skip_tail) {
  if (!(fs > 0.0)) throw std::invalid_argument("zero_crossing_frequency: fs must be > 0");
  if (samples.size() < skip_head + skip_tail + 2)
    throw std::invalid_argument("zero_crossing_frequency: not enough samples");

  const std::size_t lo = skip_head;
  const std::size_t hi = samples.size() - skip_tail;
  double first = 0.0, last = 0.0;
  std::size_t count = 0;
  for (std::size_t i = lo; i + 1 < hi; ++i) {
    const double a = samples[i], b = samples[i + 1];
    if (a == 0.0 || a * b >= 0.0) continue;
    const double t = static_cast<double>(i) + a / (a - b);
    if (count == 0) first = t;
    last = t;
    ++count;
  }
  if (count < 2)
    throw std::runtime_error("zero_crossing_frequency: fewer than two zero crossings");
  return static_cast<double>(count - 1) * fs / (2.0 * (last - first));
}

}  // namespace swa
