#include "swachan/ltv.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_map>

namespace swa {

namespace {

int resolve_threads(int threads) {
  if (threads > 0) return threads;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body) {
  const int nt = std::min<std::size_t>(resolve_threads(threads), count == 0 ? 1 : count);
  if (nt <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(nt);
  std::exception_ptr error;
  std::mutex error_mutex;
  for (int t = 0; t < nt; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

struct TapView {
  std::shared_ptr<const SparseTapList> taps;
  double distance = 0.0;
};

TapView taps_at(const DynamicScenario& s, double tx_time, double rx_time) {
  const auto dur = static_cast<double>(s.duration_samples);
  if (tx_time < 0.0 || tx_time > dur || rx_time < 0.0 || rx_time > dur)
    s.extrapolation_count->fetch_add(1, std::memory_order_relaxed);
  const double d = s.distance(tx_time, rx_time);
  return {s.cache->at_distance(d), d};
}

// One Green's-function sample. Path membership and gains come from the
// distance-quantized cache entry (gains vary by ~1e-5 per centimetre), but
// each kernel sits at the delay of the exact query distance, rebuilt from the
// distance-invariant path verticals: quantizing the delays too would shift
// arrivals by up to half a quantum (~0.85 samples at the default rate), which
// the delay checks on emitted grids can see.
double tap_sum(const DynamicScenario& s, double tx_time, double rx_time, double lag) {
  const TapView view = taps_at(s, tx_time, rx_time);
  const auto& verticals = s.cache->path_verticals();
  const double to_lag = s.fs / s.wg.sound_speed_c;
  const int halfwidth = view.taps->kernel_halfwidth;
  double acc = 0.0;
  for (std::size_t p = 0; p < view.taps->taps.size(); ++p) {
    const double arg = lag - std::hypot(view.distance, verticals[p]) * to_lag;
    if (std::abs(arg) < halfwidth)
      acc += view.taps->taps[p].gain_ref * frac_delay_kernel(arg, halfwidth);
  }
  return acc;
}

void check_n(const DynamicScenario& s, std::int64_t n) {
  if (n < 0 || n > s.duration_samples)
    throw std::out_of_range("ltv: n = " + std::to_string(n) + " outside [0, " +
                            std::to_string(s.duration_samples) + "]");
}

std::vector<double> row_eval(const DynamicScenario& s, std::int64_t n, LagWindow w,
                             CirKind kind) {
  check_n(s, n);
  std::vector<double> row(static_cast<std::size_t>(std::max<std::int64_t>(w.count, 0)), 0.0);
  for (std::int64_t j = 0; j < w.count; ++j) {
    const std::int64_t m = w.first + j;
    if (m < 0) continue;  // rows are causal
    const double tx_time = kind == CirKind::TypeI ? static_cast<double>(n - m)
                                                  : static_cast<double>(n);
    const double rx_time = kind == CirKind::TypeI ? static_cast<double>(n)
                                                  : static_cast<double>(n + m);
    row[static_cast<std::size_t>(j)] = tap_sum(s, tx_time, rx_time, static_cast<double>(m));
  }
  return row;
}

// Signed horizontal offset rx - tx at the given (possibly fractional) times.
double signed_offset(const DynamicScenario& s, double tx_time, double rx_time) {
  return s.rx_x(rx_time) - s.tx_x(tx_time);
}

double delay_of(double d, double vertical, double c) {
  return std::hypot(d, vertical) / c;
}

// Solves lag = fs * tau_path(distance(times(lag))); contraction for speeds
// below c. kind selects which endpoint the lag moves.
double arrival_fixed_point(const DynamicScenario& s, std::int64_t n, double vertical,
                           CirKind kind) {
  const double fs = s.fs;
  const double c = s.wg.sound_speed_c;
  auto dist = [&](double lag) {
    return kind == CirKind::TypeI ? s.distance(static_cast<double>(n) - lag,
                                               static_cast<double>(n))
                                  : s.distance(static_cast<double>(n),
                                               static_cast<double>(n) + lag);
  };
  double lag = fs * delay_of(dist(0.0), vertical, c);
  for (int it = 0; it < 200; ++it) {
    const double next = fs * delay_of(dist(lag), vertical, c);
    const double step = std::abs(next - lag);
    lag = next;
    if (step < 1e-7) break;
  }
  return lag;
}

LagWindow full_row_window(const DynamicScenario& s, std::int64_t n, CirKind kind) {
  const std::int64_t n_values[1] = {n};
  LagWindow w = auto_lag_window(s, n_values, kind);
  w.count += w.first;
  w.first = 0;
  return w;
}

LtvCirGrid build_grid(const DynamicScenario& s, std::vector<std::int64_t> n_values,
                      std::optional<LagWindow> window, CirKind kind, int threads) {
  for (std::int64_t n : n_values) check_n(s, n);
  const LagWindow w = window ? *window : auto_lag_window(s, n_values, kind);

  LtvCirGrid grid;
  grid.kind = kind;
  grid.fs = s.fs;
  grid.lag_offset = w.first;
  grid.n_values = std::move(n_values);
  grid.rows.resize(grid.n_values.size());
  grid.row_distance_m.resize(grid.n_values.size());
  parallel_for(grid.n_values.size(), threads, [&](std::size_t i) {
    const std::int64_t n = grid.n_values[i];
    grid.rows[i] = row_eval(s, n, w, kind);
    grid.row_distance_m[i] = s.distance(static_cast<double>(n), static_cast<double>(n));
  });
  return grid;
}

LtvCirGrid convert(const LtvCirGrid& grid, std::span<const std::int64_t> requested_n,
                   CirKind from, CirKind to) {
  if (grid.kind != from)
    throw std::invalid_argument("convert: grid kind does not match the conversion direction");

  std::unordered_map<std::int64_t, std::size_t> index;
  index.reserve(grid.n_values.size());
  for (std::size_t i = 0; i < grid.n_values.size(); ++i) index.emplace(grid.n_values[i], i);

  const std::vector<std::int64_t> fallback(grid.n_values.begin(), grid.n_values.end());
  const std::span<const std::int64_t> candidates =
      requested_n.empty() ? std::span<const std::int64_t>(fallback) : requested_n;
  const bool explicit_request = !requested_n.empty();

  const std::int64_t n_lags =
      grid.rows.empty() ? 0 : static_cast<std::int64_t>(grid.rows.front().size());

  LtvCirGrid out;
  out.kind = to;
  out.fs = grid.fs;
  out.lag_offset = grid.lag_offset;

  std::vector<std::int64_t> missing;
  for (std::int64_t n : candidates) {
    // r_n(m) = p_{n+m}(m); p_n(m) = r_{n-m}(m)
    const std::int64_t sign = (from == CirKind::TypeI) ? +1 : -1;
    std::vector<std::int64_t> row_missing;
    for (std::int64_t j = 0; j < n_lags; ++j) {
      const std::int64_t source = n + sign * (grid.lag_offset + j);
      if (!index.contains(source)) row_missing.push_back(source);
    }
    if (!row_missing.empty()) {
      missing.insert(missing.end(), row_missing.begin(), row_missing.end());
      continue;
    }
    std::vector<double> row(static_cast<std::size_t>(n_lags));
    for (std::int64_t j = 0; j < n_lags; ++j) {
      const std::int64_t source = n + sign * (grid.lag_offset + j);
      row[static_cast<std::size_t>(j)] =
          grid.rows[index.at(source)][static_cast<std::size_t>(j)];
    }
    out.n_values.push_back(n);
    out.rows.push_back(std::move(row));
    auto self = index.find(n);
    out.row_distance_m.push_back(self != index.end() && !grid.row_distance_m.empty()
                                     ? grid.row_distance_m[self->second]
                                     : std::numeric_limits<double>::quiet_NaN());
  }

  if ((explicit_request && !missing.empty()) || out.rows.empty()) {
    std::sort(missing.begin(), missing.end());
    missing.erase(std::unique(missing.begin(), missing.end()), missing.end());
    if (missing.size() > 64) missing.resize(64);
    throw CoverageError("convert: input grid lacks rows required for the requested n values",
                        std::move(missing));
  }
  return out;
}

struct ScanReach {
  double center;   // fixed-point lag
  double radius;   // covers kernel support, quantization shift, slack
};

ScanReach scan_reach(const DynamicScenario& s, std::int64_t n, double vertical, CirKind kind,
                     double moving_speed) {
  const double c = s.wg.sound_speed_c;
  const double slope_min = 1.0 - moving_speed / c;
  const double quant_shift = s.fs * s.synth.cache_quantum_m / (2.0 * c);
  const double reach =
      (s.synth.kernel_halfwidth + quant_shift + 1.0) / slope_min + 2.0;
  return {arrival_fixed_point(s, n, vertical, kind), reach};
}

}  // namespace

double DynamicScenario::distance(double tx_time, double rx_time) const {
  // Evaluated algebraically, not as a difference of absolute positions:
  // with equal velocities the swept term depends only on rx_time - tx_time,
  // so every co-moving tap at lag m quantizes into the same cache bucket
  // regardless of absolute time, and with one end static the one-sided cases
  // share a single-product expression.  Position differences would re-round
  // per call and can land on the far side of a cache-quantum tie.
  const double gap = rx_traj.start.x - tx_traj.start.x;
  const double v_tx = tx_traj.velocity_x;
  const double v_rx = rx_traj.velocity_x;
  const double swept = (v_tx == v_rx) ? v_rx * (rx_time - tx_time)
                                      : v_rx * rx_time - v_tx * tx_time;
  return std::abs(gap + swept * rx_traj.sample_period_ts);
}

DynamicScenario make_dynamic_scenario(const Waveguide& wg, const Trajectory& tx,
                                      const Trajectory& rx, double fs,
                                      std::int64_t duration_samples, const SynthParams& synth) {
  wg.validate();
  if (!(fs > 0.0)) throw std::invalid_argument("scenario: fs must be > 0");
  if (duration_samples < 0) throw std::invalid_argument("scenario: negative duration");
  for (const Trajectory* t : {&tx, &rx}) {
    if (std::abs(t->sample_period_ts * fs - 1.0) > 1e-9)
      throw std::invalid_argument("scenario: trajectories must share Ts = 1/fs");
    if (t->start.height_above_bottom < 0.0 || t->start.height_above_bottom > wg.depth_w)
      throw std::invalid_argument("scenario: transceiver height outside the water column");
    if (!(std::abs(t->velocity_x) < wg.sound_speed_c))
      throw UnsupportedRegimeError("scenario: mobile speed must stay below the sound speed");
  }

  DynamicScenario s;
  s.wg = wg;
  s.tx_traj = tx;
  s.rx_traj = rx;
  s.fs = fs;
  s.duration_samples = duration_samples;
  s.synth = synth;
  s.extrapolation_count = std::make_shared<std::atomic<std::int64_t>>(0);
  s.cache = std::make_shared<ChannelCache>(wg, tx.start.height_above_bottom,
                                           rx.start.height_above_bottom, fs, s.distance(0, 0),
                                           synth);
  return s;
}

GreensFunction green_from_scenario(const DynamicScenario& s) {
  DynamicScenario copy = s;  // shares cache and counter
  return GreensFunction(
      [copy](std::int64_t n, std::int64_t m) {
        if (n < m) return 0.0;
        return tap_sum(copy, static_cast<double>(m), static_cast<double>(n),
                       static_cast<double>(n - m));
      },
      0, s.duration_samples + 1);
}

double scenario_tap(const DynamicScenario& s, double tx_time, double rx_time, double lag) {
  return tap_sum(s, tx_time, rx_time, lag);
}

LagWindow auto_lag_window(const DynamicScenario& s, std::span<const std::int64_t> n_values,
                          CirKind kind) {
  if (n_values.empty()) throw std::invalid_argument("auto_lag_window: no n values");
  const double c = s.wg.sound_speed_c;
  const double fs = s.fs;
  const double v_max = s.cache->max_vertical();
  const auto [lo_it, hi_it] = std::minmax_element(n_values.begin(), n_values.end());
  const double n_lo = static_cast<double>(*lo_it);
  const double n_hi = static_cast<double>(*hi_it);

  auto offset = [&](double n, double lag) {
    return kind == CirKind::TypeI ? signed_offset(s, n - lag, n) : signed_offset(s, n, n + lag);
  };

  // Longest retained arrival over all rows; distance extremes sit at the
  // corners of the (n, lag) rectangle since trajectories are linear.
  double horizon = 0.0;
  for (int it = 0; it < 64; ++it) {
    double d_max = 0.0;
    for (double n : {n_lo, n_hi})
      for (double lag : {0.0, horizon}) d_max = std::max(d_max, std::abs(offset(n, lag)));
    const double next = fs * delay_of(d_max, v_max, c);
    if (std::abs(next - horizon) < 0.5) {
      horizon = next;
      break;
    }
    horizon = next;
  }

  double off_min = std::numeric_limits<double>::max();
  double off_max = std::numeric_limits<double>::lowest();
  for (double n : {n_lo, n_hi})
    for (double lag : {0.0, horizon}) {
      const double off = offset(n, lag);
      off_min = std::min(off_min, off);
      off_max = std::max(off_max, off);
    }
  const double d_min = (off_min <= 0.0 && off_max >= 0.0)
                           ? 0.0
                           : std::min(std::abs(off_min), std::abs(off_max));

  const double quant_shift = fs * s.synth.cache_quantum_m / (2.0 * c);
  const double margin = s.synth.kernel_halfwidth + quant_shift + 2.0;
  const auto first =
      std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor(fs * d_min / c - margin)));
  const auto last = static_cast<std::int64_t>(std::ceil(horizon + margin));
  return {first, std::max<std::int64_t>(last - first + 1, 1)};
}

std::vector<double> type1_cir(const DynamicScenario& s, std::int64_t n) {
  return row_eval(s, n, full_row_window(s, n, CirKind::TypeI), CirKind::TypeI);
}

std::vector<double> type1_cir(const DynamicScenario& s, std::int64_t n, LagWindow w) {
  return row_eval(s, n, w, CirKind::TypeI);
}

std::vector<double> type2_cir(const DynamicScenario& s, std::int64_t n) {
  return row_eval(s, n, full_row_window(s, n, CirKind::TypeII), CirKind::TypeII);
}

std::vector<double> type2_cir(const DynamicScenario& s, std::int64_t n, LagWindow w) {
  return row_eval(s, n, w, CirKind::TypeII);
}

LtvCirGrid type1_grid(const DynamicScenario& s, std::vector<std::int64_t> n_values,
                      std::optional<LagWindow> window, int threads) {
  return build_grid(s, std::move(n_values), window, CirKind::TypeI, threads);
}

LtvCirGrid type2_grid(const DynamicScenario& s, std::vector<std::int64_t> n_values,
                      std::optional<LagWindow> window, int threads) {
  return build_grid(s, std::move(n_values), window, CirKind::TypeII, threads);
}

LtvCirGrid convert_type1_to_type2(const LtvCirGrid& grid,
                                  std::span<const std::int64_t> requested_n) {
  return convert(grid, requested_n, CirKind::TypeI, CirKind::TypeII);
}

LtvCirGrid convert_type2_to_type1(const LtvCirGrid& grid,
                                  std::span<const std::int64_t> requested_n) {
  return convert(grid, requested_n, CirKind::TypeII, CirKind::TypeI);
}

namespace {

void check_rate(const SignalBuffer& x, const DynamicScenario& s) {
  if (!(x.fs > 0.0) || std::abs(x.fs / s.fs - 1.0) > 1e-9)
    throw ConfigError("filter: input sample rate does not match the scenario rate");
}

// Lag horizon for the filter output: longest retained arrival launched from
// any input sample, padded like the scan windows.
std::int64_t output_horizon(const DynamicScenario& s, const SignalBuffer& x) {
  const std::int64_t emit_last = x.start + static_cast<std::int64_t>(x.samples.size()) - 1;
  const double v_max = s.cache->max_vertical();
  double lag = 0.0;
  for (std::int64_t n : {x.start, emit_last}) {
    const ScanReach r = scan_reach(s, n, v_max, CirKind::TypeII,
                                   std::abs(s.rx_traj.velocity_x));
    lag = std::max(lag, r.center + r.radius);
  }
  return static_cast<std::int64_t>(std::ceil(lag)) + 1;
}

}  // namespace

SignalBuffer filter_type1(const SignalBuffer& x, const DynamicScenario& s) {
  check_rate(x, s);
  const auto& verticals = s.cache->path_verticals();
  const int halfwidth = s.synth.kernel_halfwidth;
  const auto x_size = static_cast<std::int64_t>(x.samples.size());
  const std::int64_t horizon = output_horizon(s, x);

  SignalBuffer y;
  y.fs = x.fs;
  y.start = x.start;
  y.samples.assign(static_cast<std::size_t>(x_size + horizon), 0.0);

  const double tx_speed = std::abs(s.tx_traj.velocity_x);
  const double to_lag = s.fs / s.wg.sound_speed_c;
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(y.samples.size()); ++i) {
    const std::int64_t n = x.start + i;
    double acc = 0.0;
    for (std::size_t p = 0; p < verticals.size(); ++p) {
      const ScanReach r = scan_reach(s, n, verticals[p], CirKind::TypeI, tx_speed);
      std::int64_t m_lo = static_cast<std::int64_t>(std::floor(r.center - r.radius));
      std::int64_t m_hi = static_cast<std::int64_t>(std::ceil(r.center + r.radius));
      m_lo = std::max({m_lo, std::int64_t{0}, n - (x.start + x_size - 1)});
      m_hi = std::min(m_hi, n - x.start);
      for (std::int64_t m = m_lo; m <= m_hi; ++m) {
        const TapView view = taps_at(s, static_cast<double>(n - m), static_cast<double>(n));
        const double arg =
            static_cast<double>(m) - std::hypot(view.distance, verticals[p]) * to_lag;
        if (std::abs(arg) < halfwidth)
          acc += view.taps->taps[p].gain_ref * frac_delay_kernel(arg, halfwidth) *
                 x.samples[static_cast<std::size_t>(n - m - x.start)];
      }
    }
    y.samples[static_cast<std::size_t>(i)] = acc;
  }
  return y;
}

SignalBuffer filter_type2(const SignalBuffer& x, const DynamicScenario& s) {
  check_rate(x, s);
  const auto& verticals = s.cache->path_verticals();
  const int halfwidth = s.synth.kernel_halfwidth;
  const auto x_size = static_cast<std::int64_t>(x.samples.size());
  const std::int64_t horizon = output_horizon(s, x);

  SignalBuffer y;
  y.fs = x.fs;
  y.start = x.start;
  y.samples.assign(static_cast<std::size_t>(x_size + horizon), 0.0);
  const auto y_size = static_cast<std::int64_t>(y.samples.size());

  const double rx_speed = std::abs(s.rx_traj.velocity_x);
  const double to_lag = s.fs / s.wg.sound_speed_c;
  for (std::int64_t i = 0; i < x_size; ++i) {
    const std::int64_t m = x.start + i;
    const double xi = x.samples[static_cast<std::size_t>(i)];
    if (xi == 0.0) continue;
    for (std::size_t p = 0; p < verticals.size(); ++p) {
      const ScanReach r = scan_reach(s, m, verticals[p], CirKind::TypeII, rx_speed);
      std::int64_t l_lo = static_cast<std::int64_t>(std::floor(r.center - r.radius));
      std::int64_t l_hi = static_cast<std::int64_t>(std::ceil(r.center + r.radius));
      l_lo = std::max(l_lo, std::int64_t{0});
      l_hi = std::min(l_hi, y_size - 1 - (m - x.start));
      for (std::int64_t lag = l_lo; lag <= l_hi; ++lag) {
        const TapView view = taps_at(s, static_cast<double>(m), static_cast<double>(m + lag));
        const double arg =
            static_cast<double>(lag) - std::hypot(view.distance, verticals[p]) * to_lag;
        if (std::abs(arg) < halfwidth)
          y.samples[static_cast<std::size_t>(m + lag - x.start)] +=
              view.taps->taps[p].gain_ref * frac_delay_kernel(arg, halfwidth) * xi;
      }
    }
  }
  return y;
}

SignalBuffer filter_type1(const SignalBuffer& x, const GreensFunction& g) {
  // switched-output bank: y(n) = sum over lags of p_n(lag) x(n - lag)
  SignalBuffer y;
  y.fs = x.fs;
  y.start = g.n_begin();
  y.samples.assign(static_cast<std::size_t>(g.n_end() - g.n_begin()), 0.0);
  const auto x_size = static_cast<std::int64_t>(x.samples.size());
  for (std::int64_t n = g.n_begin(); n < g.n_end(); ++n) {
    double acc = 0.0;
    const std::int64_t lag_max = n - std::max(g.n_begin(), x.start);
    for (std::int64_t lag = 0; lag <= lag_max; ++lag) {
      const std::int64_t m = n - lag;
      if (m < x.start || m >= x.start + x_size) continue;
      acc += g(n, m) * x.samples[static_cast<std::size_t>(m - x.start)];
    }
    y.samples[static_cast<std::size_t>(n - g.n_begin())] = acc;
  }
  return y;
}

SignalBuffer filter_type2(const SignalBuffer& x, const GreensFunction& g) {
  // superposition of per-input-sample responses r_m(.) scaled by x(m)
  SignalBuffer y;
  y.fs = x.fs;
  y.start = g.n_begin();
  y.samples.assign(static_cast<std::size_t>(g.n_end() - g.n_begin()), 0.0);
  const auto x_size = static_cast<std::int64_t>(x.samples.size());
  for (std::int64_t m = std::max(g.n_begin(), x.start); m < g.n_end(); ++m) {
    if (m < x.start || m >= x.start + x_size) continue;
    const double xm = x.samples[static_cast<std::size_t>(m - x.start)];
    if (xm == 0.0) continue;
    for (std::int64_t lag = 0; m + lag < g.n_end(); ++lag)
      y.samples[static_cast<std::size_t>(m + lag - g.n_begin())] += g(m + lag, m) * xm;
  }
  return y;
}

}  // namespace swa
