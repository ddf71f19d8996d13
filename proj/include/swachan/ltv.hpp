#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "swachan/errors.hpp"
#include "swachan/static_channel.hpp"

namespace swa {

/// Mobile-to-mobile scenario: a waveguide plus one trajectory per transceiver,
/// sampled at fs. Construct through make_dynamic_scenario so the channel
/// cache and invariants are in place.
struct DynamicScenario {
  Waveguide wg;
  Trajectory tx_traj;
  Trajectory rx_traj;
  double fs = 0.0;
  std::int64_t duration_samples = 0;
  SynthParams synth;

  std::shared_ptr<ChannelCache> cache;
  /// Counts channel evaluations whose lag reached outside [0, duration];
  /// those use linear trajectory extrapolation.
  std::shared_ptr<std::atomic<std::int64_t>> extrapolation_count;

  double tx_x(double n) const { return tx_traj.extrapolated(n).x; }
  double rx_x(double n) const { return rx_traj.extrapolated(n).x; }
  double distance(double tx_time, double rx_time) const;
};

/// Validates trajectories (shared Ts = 1/fs, speeds below c) and builds the
/// distance cache keyed off the separation at n = 0.
DynamicScenario make_dynamic_scenario(const Waveguide& wg, const Trajectory& tx,
                                      const Trajectory& rx, double fs,
                                      std::int64_t duration_samples,
                                      const SynthParams& synth = {});

/// g(n, m): response at sample n to an impulse applied at sample m.
/// Zero for n < m by construction.
class GreensFunction {
 public:
  using Eval = std::function<double(std::int64_t, std::int64_t)>;

  GreensFunction(Eval eval, std::int64_t n_begin, std::int64_t n_end)
      : eval_(std::move(eval)), n_begin_(n_begin), n_end_(n_end) {}

  double operator()(std::int64_t n, std::int64_t m) const {
    return n < m ? 0.0 : eval_(n, m);
  }

  std::int64_t n_begin() const { return n_begin_; }
  std::int64_t n_end() const { return n_end_; }

 private:
  Eval eval_;
  std::int64_t n_begin_, n_end_;
};

GreensFunction green_from_scenario(const DynamicScenario& s);

/// One channel sample: the response at rx_time (in samples) to an impulse
/// launched at tx_time, read `lag` samples after the launch. Path set and
/// gains come from the distance-quantized static cache; kernel delays use the
/// exact transmitter-receiver distance so arrival times vary smoothly with
/// geometry instead of inheriting the cache's quantization staircase.
double scenario_tap(const DynamicScenario& s, double tx_time, double rx_time, double lag);

enum class CirKind { TypeI, TypeII };

/// Contiguous lag range [first, first + count).
struct LagWindow {
  std::int64_t first = 0;
  std::int64_t count = 0;
};

/// Family of CIR rows indexed by sample time n. TypeI row n holds p_n(.),
/// TypeII row n holds r_n(.); columns are lags starting at lag_offset.
struct LtvCirGrid {
  CirKind kind = CirKind::TypeI;
  double fs = 0.0;
  std::vector<std::int64_t> n_values;
  std::int64_t lag_offset = 0;
  std::vector<std::vector<double>> rows;
  std::vector<double> row_distance_m;  // transceiver separation at each row's n
};

/// Real sample stream at a fixed rate; sample i sits at time (start + i) / fs.
struct SignalBuffer {
  std::vector<double> samples;
  double fs = 0.0;
  std::int64_t start = 0;
};

/// Lag range covering all retained multipath for the given rows, widened for
/// Doppler stretch, kernel support, and cache quantization.
LagWindow auto_lag_window(const DynamicScenario& s, std::span<const std::int64_t> n_values,
                          CirKind kind);

/// Type I row p_n(m) = h^S between tx at (n-m) and rx at n, evaluated at lag m.
std::vector<double> type1_cir(const DynamicScenario& s, std::int64_t n);
std::vector<double> type1_cir(const DynamicScenario& s, std::int64_t n, LagWindow w);

/// Type II row r_n(m) = h^S between tx at n and rx at (n+m), evaluated at lag m.
std::vector<double> type2_cir(const DynamicScenario& s, std::int64_t n);
std::vector<double> type2_cir(const DynamicScenario& s, std::int64_t n, LagWindow w);

/// Rows for each n value, computed by a worker pool. threads = 0 picks the
/// hardware count.
LtvCirGrid type1_grid(const DynamicScenario& s, std::vector<std::int64_t> n_values,
                      std::optional<LagWindow> window = {}, int threads = 0);
LtvCirGrid type2_grid(const DynamicScenario& s, std::vector<std::int64_t> n_values,
                      std::optional<LagWindow> window = {}, int threads = 0);

/// Re-index a grid via r_n(m) = p_{n+m}(m) / p_n(m) = r_{n-m}(m). Output keeps
/// only rows whose every lag is covered by the input; throws CoverageError
/// (listing the missing n) when none survive or when requested_n cannot be
/// served.
LtvCirGrid convert_type1_to_type2(const LtvCirGrid& grid,
                                  std::span<const std::int64_t> requested_n = {});
LtvCirGrid convert_type2_to_type1(const LtvCirGrid& grid,
                                  std::span<const std::int64_t> requested_n = {});

/// Switched-output filter bank: y(n) = sum_m p_n(m) x(n-m).
SignalBuffer filter_type1(const SignalBuffer& x, const DynamicScenario& s);
/// Superposition of per-input-sample responses: y(n) = sum_m r_m(n-m) x(m).
SignalBuffer filter_type2(const SignalBuffer& x, const DynamicScenario& s);

/// Same structures over an arbitrary Green's function (dense evaluation,
/// output restricted to [g.n_begin, g.n_end)).
SignalBuffer filter_type1(const SignalBuffer& x, const GreensFunction& g);
SignalBuffer filter_type2(const SignalBuffer& x, const GreensFunction& g);

}  // namespace swa
