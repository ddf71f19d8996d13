#include "swachan/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace swa {

const char* to_string(CaseKind kind) {
  switch (kind) {
    case CaseKind::MovingRx: return "moving_rx";
    case CaseKind::MovingTx: return "moving_tx";
    case CaseKind::Static: return "static";
    case CaseKind::CoMoving: return "co_moving";
  }
  throw std::invalid_argument("to_string: bad CaseKind");
}

CaseKind case_kind_from_string(const std::string& name) {
  if (name == "moving_rx") return CaseKind::MovingRx;
  if (name == "moving_tx") return CaseKind::MovingTx;
  if (name == "static") return CaseKind::Static;
  if (name == "co_moving") return CaseKind::CoMoving;
  throw ConfigError("unknown case kind '" + name +
                    "' (expected moving_rx, moving_tx, static, co_moving)");
}

namespace {

void validate_spec(const CaseSpec& spec) {
  spec.wg.validate();
  if (!(spec.d0 > 0.0)) throw std::invalid_argument("case: d0 must be > 0");
  if (!(spec.fs > 0.0)) throw std::invalid_argument("case: fs must be > 0");
  if (spec.v < 0.0) throw std::invalid_argument("case: v must be >= 0");
  if (spec.v >= spec.wg.sound_speed_c)
    throw UnsupportedRegimeError("case: speed v must stay below the sound speed");
  if (spec.transceiver_height < 0.0 || spec.transceiver_height > spec.wg.depth_w)
    throw std::invalid_argument("case: transceiver height outside the water column");
}

std::int64_t default_duration(const CaseSpec& spec) {
  // Enough samples for d(n) to sweep one meter; for the distance-preserving
  // cases, the time one meter of relative motion would take at v = 51.2 m/s.
  const double speed = spec.v > 0.0 ? spec.v : 51.2;
  return static_cast<std::int64_t>(std::ceil(spec.fs / speed));
}

}  // namespace

double case_distance(const CaseSpec& spec, std::int64_t n) {
  switch (spec.kind) {
    case CaseKind::Static:
    case CaseKind::CoMoving:
      return spec.d0;
    case CaseKind::MovingRx:
    case CaseKind::MovingTx:
      return spec.d0 + spec.v * static_cast<double>(n) / spec.fs;
  }
  throw std::invalid_argument("case_distance: bad CaseKind");
}

DynamicScenario build_scenario(const CaseSpec& spec) {
  validate_spec(spec);
  const double ts = 1.0 / spec.fs;
  const std::int64_t duration =
      spec.duration_samples > 0 ? spec.duration_samples : default_duration(spec);

  double v_tx = 0.0, v_rx = 0.0;
  switch (spec.kind) {
    case CaseKind::MovingRx: v_rx = spec.v; break;
    case CaseKind::MovingTx: v_tx = -spec.v; break;
    case CaseKind::Static: break;
    case CaseKind::CoMoving: v_tx = spec.v; v_rx = spec.v; break;
  }

  const Trajectory tx{{spec.a0, spec.transceiver_height}, v_tx, ts, duration};
  const Trajectory rx{{spec.a0 + spec.d0, spec.transceiver_height}, v_rx, ts, duration};
  return make_dynamic_scenario(spec.wg, tx, rx, spec.fs, duration, spec.synth);
}

std::optional<std::string> regime_warning(const CaseSpec& spec) {
  if (spec.v > 0.1 * spec.wg.sound_speed_c)
    return "speed v = " + std::to_string(spec.v) +
           " m/s exceeds a tenth of the sound speed; the slow-motion "
           "reciprocity approximation degrades at this rate";
  return {};
}

std::vector<double> dynamic_lti_response(const CaseSpec& spec,
                                         std::optional<LagWindow> window) {
  if (spec.kind != CaseKind::CoMoving)
    throw std::invalid_argument("dynamic_lti_response: only the co-moving case is LTI");
  const DynamicScenario s = build_scenario(spec);

  LagWindow w{};
  if (window) {
    w = *window;
  } else {
    const std::int64_t n0[1] = {0};
    w = auto_lag_window(s, n0, CirKind::TypeI);
    w.count += w.first;
    w.first = 0;
  }

  std::vector<double> response(static_cast<std::size_t>(std::max<std::int64_t>(w.count, 0)),
                               0.0);
  for (std::int64_t j = 0; j < w.count; ++j) {
    const std::int64_t m = w.first + j;
    if (m < 0) continue;
    // the channel at separation d0 + v * m * Ts, written as the same scenario
    // evaluation the type I rows use so the trace matches them bit for bit
    response[static_cast<std::size_t>(j)] =
        scenario_tap(s, -static_cast<double>(m), 0.0, static_cast<double>(m));
  }
  return response;
}

}  // namespace swa
